from ..generators import GeneratorSpec, derive_seed, gaussian_mixture, point_mass, sample, uniform_boxes
from .convergence import ConvergenceResult, ConvergenceRow, convergence_study
from .harness import (METHODS, TABLE_ROWS, ExperimentConfig, ReportRow, report_csv,
                      report_markdown, run_replications, run_replications_detailed)
from .presets import PRESETS, interval_example, preset
from .scoring import adjusted_rand_index, average_center_error

__all__ = [
    "GeneratorSpec", "derive_seed", "gaussian_mixture", "point_mass", "sample", "uniform_boxes",
    "ConvergenceResult", "ConvergenceRow", "convergence_study",
    "METHODS", "TABLE_ROWS", "ExperimentConfig", "ReportRow", "report_csv", "report_markdown",
    "run_replications", "run_replications_detailed",
    "PRESETS", "interval_example", "preset",
    "adjusted_rand_index", "average_center_error",
]

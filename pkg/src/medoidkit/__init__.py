"""Metric and ordinal K-medoids, generalized K-means, and consistency experiments."""
from .metric_space import (DataError, Loss, Metric, as_dataset, directed_hausdorff, distance,
                           load_csv, loss_apply, pairwise_matrix)
from .ordinal import (CdfEstimate, RankTable, Scheme, bad_variant_ranks, empirical_pair_cdf,
                      empirical_row_cdf, population_pair_cdf_mc, population_s_mc,
                      quadruple_ranks, rank_table, s_rank, triple_ranks)
from .risk import RiskEstimate, covering_radius, empirical_risk, population_risk_mc
from .solvers import (Objective, Solution, SupportSpec, assign_labels, exact_kmedoids,
                      generalized_kmeans, greedy_build_init, multi_start, pam_swap)

__version__ = "0.1.0"

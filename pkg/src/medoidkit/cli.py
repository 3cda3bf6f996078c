"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 data error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .experiments import convergence_study, preset, report_csv, report_markdown, run_replications
from .experiments.harness import ExperimentConfig
from .experiments.presets import GENERATORS, PRESETS
from .metric_space import DataError, Loss, Metric, load_csv, pairwise_matrix
from .ordinal import RankTable, Scheme, is_rank_csv, rank_table
from .solvers import Objective, generalized_kmeans, multi_start

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 2, 3

METHOD_SCHEMES = {"ordinal-quad": Scheme.QUADRUPLE, "ordinal-triple": Scheme.TRIPLE}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {value}")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _n_grid(text: str) -> list[int]:
    try:
        grid = [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad n-grid {text!r}") from exc
    if not grid or any(b <= a for a, b in zip(grid, grid[1:])) or grid[0] < 1:
        raise argparse.ArgumentTypeError("n-grid must be increasing positive integers")
    return grid


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="medoidkit", description="Metric and ordinal K-medoids, generalized K-means.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    c = sub.add_parser("cluster", help="cluster a CSV dataset or a rank table")
    c.add_argument("--input", required=True, type=Path)
    c.add_argument("--k", required=True, type=_positive_int)
    c.add_argument("--metric", choices=[m.value for m in Metric], default="l2")
    c.add_argument("--loss", choices=[l.value for l in Loss], default="id")
    c.add_argument("--method", choices=["kmedoids", "kmeans", *METHOD_SCHEMES], default="kmedoids")
    c.add_argument("--starts", type=_positive_int, default=10)
    c.add_argument("--seed", type=_seed, default=0)
    c.add_argument("--output", type=Path, help="labels CSV (index,label)")

    r = sub.add_parser("ranks", help="write the rank table of a CSV dataset")
    r.add_argument("--input", required=True, type=Path)
    r.add_argument("--metric", choices=[m.value for m in Metric], default="l2")
    r.add_argument("--scheme", choices=[s.value for s in Scheme], required=True)
    r.add_argument("--output", type=Path)

    e = sub.add_parser("experiment", help="run a replicated experiment")
    src = e.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", type=Path)
    src.add_argument("--preset", choices=PRESETS)
    e.add_argument("--seed", type=_seed)
    e.add_argument("--replications", type=_positive_int)
    e.add_argument("--workers", type=_positive_int, default=1)
    e.add_argument("--output", type=Path)
    e.add_argument("--markdown", type=Path)
    e.add_argument("--no-timing", action="store_true", help="write 0 in the runtime column")

    v = sub.add_parser("convergence", help="large-sample diagnostics for a preset population")
    v.add_argument("--preset", choices=PRESETS, required=True)
    v.add_argument("--n-grid", type=_n_grid, required=True)
    v.add_argument("--k", type=_positive_int)
    v.add_argument("--metric", choices=[m.value for m in Metric], default="l2")
    v.add_argument("--loss", choices=[l.value for l in Loss], default="square")
    v.add_argument("--replications", type=_positive_int, default=20)
    v.add_argument("--starts", type=_positive_int, default=5)
    v.add_argument("--mc-samples", type=_positive_int, default=200_000)
    v.add_argument("--seed", type=_seed, default=0)
    v.add_argument("--output", type=Path)
    return p


def _emit(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def _cluster(args) -> int:
    if args.method in METHOD_SCHEMES and is_rank_csv(args.input):
        table = RankTable.from_csv(args.input)
        if table.scheme is not METHOD_SCHEMES[args.method]:
            raise DataError(f"rank table scheme {table.scheme.value} does not match --method {args.method}")
        data = None
        n = table.n
    else:
        data = load_csv(args.input)
        n = data.shape[0]
    if args.k > n:
        raise DataError(f"k={args.k} exceeds the number of points ({n})")
    metric, loss = Metric(args.metric), Loss(args.loss)

    summary = {"method": args.method, "k": args.k}
    if args.method in METHOD_SCHEMES:
        if data is not None:
            table = rank_table(pairwise_matrix(data, metric), METHOD_SCHEMES[args.method])
        sol = multi_start(Objective.ordinal(table), args.k, starts=args.starts, seed=args.seed)
    else:
        sol = multi_start(Objective.metric(pairwise_matrix(data, metric), loss), args.k,
                          starts=args.starts, seed=args.seed)
        if args.method == "kmeans":
            sol = generalized_kmeans(data, metric, loss, args.k, init=data[sol.medoids])
            summary["centers"] = sol.centers.tolist()
    summary["cost"] = sol.cost
    if sol.medoids is not None:
        summary["medoids"] = [int(i) for i in sol.medoids]
    summary["iterations"] = sol.iterations
    summary["converged"] = bool(sol.converged)

    lines = ["index,label"] + [f"{i},{int(l)}" for i, l in enumerate(sol.labels)]
    if args.output is not None:
        args.output.write_text("\n".join(lines) + "\n")
    print(json.dumps(summary))
    return EXIT_OK


def _ranks(args) -> int:
    data = load_csv(args.input)
    if data.shape[0] < 2:
        raise DataError("rank tables need at least two points")
    table = rank_table(pairwise_matrix(data, Metric(args.metric)), Scheme(args.scheme))
    _emit(table.dumps(), args.output)
    return EXIT_OK


def _experiment(args) -> int:
    if args.config is not None:
        config = ExperimentConfig.from_json(args.config)
        if args.seed is not None or args.replications is not None:
            d = config.to_dict()
            if args.seed is not None:
                d["base_seed"] = args.seed
            if args.replications is not None:
                d["replications"] = args.replications
            config = ExperimentConfig.from_dict(d)
    else:
        config = preset(args.preset, base_seed=args.seed or 0, replications=args.replications)
    rows = run_replications(config, workers=args.workers)
    _emit(report_csv(rows, timing=not args.no_timing), args.output)
    if args.markdown is not None:
        args.markdown.write_text(report_markdown(rows))
    return EXIT_OK


def _convergence(args) -> int:
    generator = GENERATORS[args.preset]
    k = args.k or {"interval-example": 1}.get(args.preset, generator.n_components)
    result = convergence_study(generator, Metric(args.metric), Loss(args.loss), k, args.n_grid,
                               replications=args.replications, base_seed=args.seed,
                               starts=args.starts, mc_samples=args.mc_samples)
    _emit(result.to_csv(), args.output)
    return EXIT_OK


HANDLERS = {"cluster": _cluster, "ranks": _ranks, "experiment": _experiment,
            "convergence": _convergence}


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return HANDLERS[args.verb](args)
    except DataError as exc:
        print(f"medoidkit: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"medoidkit: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()

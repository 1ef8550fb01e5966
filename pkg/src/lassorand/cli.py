"""Command-line front door: ``lassorand infer`` and ``lassorand simulate``.

``infer`` loads a delimited table, selects lambda by cross-validation,
runs the permutation test, and writes a JSON report.  ``simulate`` runs
a power or precision study grid and writes a CSV table plus a JSON
sidecar echoing the full configuration.  Wall-clock timing goes to
stderr only, so output files are byte-identical across reruns with the
same seed and worker count.

Exit codes: 0 success, 1 data or model error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import __version__
from ._kernel import BACKEND
from .covariates import (
    RESIDUALIZE,
    ZERO_WEIGHT,
    ForcedPartition,
    forced_weights,
    residualize,
)
from .inference import InferenceConfig, permutation_test
from .io import TableFormatError, load_table, report_text, write_report
from .linmodel import marginal_correlation, standardize
from .selection import CvConfig
from .simulate import SimConfig, power_grid, power_study, precision_study

_STUDY_KINDS = ("power-rank1", "power-rank2", "precision")

# Desk-scale study grid: small enough to finish in reasonable time,
# wide enough to show the power/precision trends.
_PRESETS = {
    "desk": dict(n=50, ps=(1000,), betas=(0.0, 0.5, 1.0, 1.5), rhos=(0.0, 0.95)),
    "small-n": dict(n=30, ps=(1000,), betas=(0.0, 0.5, 1.0, 1.5), rhos=(0.0, 0.95)),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lassorand",
        description="Randomization inference for features selected by the lasso.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    infer = sub.add_parser(
        "infer", help="permutation test on a delimited data file"
    )
    infer.add_argument("--input", required=True, help="CSV or whitespace table")
    infer.add_argument("--response", required=True, help="response column name")
    infer.add_argument(
        "--drop", default=[], action="append", metavar="COL",
        help="column to discard (repeatable)",
    )
    infer.add_argument(
        "--filter", default=None, metavar="COL=VALUE",
        help="keep rows whose column equals the value, then drop the column",
    )
    infer.add_argument("--perms", type=int, default=100, help="permutations B")
    infer.add_argument("--alpha", type=float, default=0.05)
    infer.add_argument("--seed", type=int, default=0)
    infer.add_argument(
        "--max-ranks", type=int, default=None,
        help="ranks to test (default: all selected features)",
    )
    infer.add_argument(
        "--reuse-lambda", action="store_true",
        help="reuse the original lambda for permutation fits instead of "
        "re-running cross-validation per permutation",
    )
    infer.add_argument(
        "--forced", default=[], action="append", metavar="COL",
        help="covariate forced into the model (repeatable)",
    )
    infer.add_argument(
        "--forced-mode", choices=("residualize", "zero-weight"),
        default="zero-weight",
    )
    infer.add_argument("--folds", type=int, default=10, help="CV folds K")
    infer.add_argument("--grid-size", type=int, default=100)
    infer.add_argument("--grid-ratio", type=float, default=1e-3)
    infer.add_argument("--workers", type=int, default=1)
    infer.add_argument("--output", default=None, help="report path (default stdout)")
    infer.set_defaults(func=run_infer)

    sim = sub.add_parser("simulate", help="power or precision study grid")
    sim.add_argument("--study", choices=_STUDY_KINDS, required=True)
    sim.add_argument("--preset", choices=sorted(_PRESETS), default=None)
    sim.add_argument("--n", type=int, default=50)
    sim.add_argument(
        "--p", type=int, default=[], action="append",
        help="number of predictors (repeatable)",
    )
    sim.add_argument(
        "--beta", type=float, default=[], action="append",
        help="effect size (repeatable)",
    )
    sim.add_argument(
        "--rho", type=float, default=[], action="append",
        help="cluster correlation, 0 = independent (repeatable)",
    )
    sim.add_argument("--cluster-size", type=int, default=10)
    sim.add_argument("--replications", type=int, default=50)
    sim.add_argument("--perms", type=int, default=100)
    sim.add_argument("--alpha", type=float, default=0.05)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--folds", type=int, default=10)
    sim.add_argument("--grid-size", type=int, default=100)
    sim.add_argument("--grid-ratio", type=float, default=1e-3)
    sim.add_argument("--workers", type=int, default=1)
    sim.add_argument("--output", required=True, help="CSV table path")
    sim.set_defaults(func=run_simulate)
    return parser


def _validate_common(parser, args) -> None:
    if args.perms < 1:
        parser.error("--perms must be at least 1")
    if not 0.0 < args.alpha < 1.0:
        parser.error("--alpha must be in (0, 1)")
    if args.seed < 0:
        parser.error("--seed must be nonnegative")
    if args.workers < 1:
        parser.error("--workers must be at least 1")
    if args.folds < 2:
        parser.error("--folds must be at least 2")
    if args.grid_size < 1:
        parser.error("--grid-size must be at least 1")
    if not 0.0 < args.grid_ratio < 1.0:
        parser.error("--grid-ratio must be in (0, 1)")


def run_infer(args) -> int:
    started = time.perf_counter()
    row_filter = None
    if args.filter is not None:
        col, sep, value = args.filter.partition("=")
        if not sep or not col:
            raise TableFormatError(f"bad --filter value: {args.filter!r}")
        row_filter = (col, value)

    data = load_table(
        args.input, response=args.response, drop=args.drop, row_filter=row_filter
    )

    weights = None
    forced_idx: tuple[int, ...] = ()
    mode = args.forced_mode.replace("-", "_")
    if args.forced:
        missing = [c for c in args.forced if c not in data.names]
        if missing:
            raise TableFormatError(f"forced column(s) not found: {', '.join(missing)}")
        forced_idx = tuple(data.names.index(c) for c in args.forced)
        partition = ForcedPartition.from_forced(data.p, forced_idx, mode)
        if mode == RESIDUALIZE:
            data = residualize(data, partition)
            forced_idx = ()
        else:
            weights = forced_weights(data.p, partition)

    config = InferenceConfig(
        n_permutations=args.perms,
        alpha=args.alpha,
        max_rank=args.max_ranks,
        reuse_lambda=args.reuse_lambda,
        seed=args.seed,
        cv=CvConfig(
            n_folds=args.folds,
            grid_size=args.grid_size,
            grid_ratio=args.grid_ratio,
        ),
    )
    result = permutation_test(
        data, config, weights=weights, forced_indices=forced_idx,
        workers=args.workers,
    )
    corr = marginal_correlation(standardize(data)[0])

    n_sel = len(result.selected_names)
    ranks = []
    for k in range(result.n_ranks):
        ranks.append(
            {
                "rank": k + 1,
                "name": result.selected_names[k] if k < n_sel else None,
                "observed": result.observed[k],
                "p_value": result.p_values[k],
                "holm_threshold": result.holm_thresholds[k],
                "holm_reject": result.holm_reject[k],
            }
        )
    report = {
        "command": "infer",
        "version": __version__,
        "kernel_backend": BACKEND,
        "input": {
            "path": str(args.input),
            "rows": data.n,
            "predictors": data.p,
            "response": args.response,
            "dropped_columns": list(args.drop),
            "filter": args.filter,
        },
        "config": {
            "permutations": args.perms,
            "alpha": args.alpha,
            "seed": args.seed,
            "max_ranks": args.max_ranks,
            "lambda_policy": config.lambda_policy,
            "folds": args.folds,
            "grid_size": args.grid_size,
            "grid_ratio": args.grid_ratio,
            "forced": list(args.forced),
            "forced_mode": args.forced_mode,
            "workers": args.workers,
        },
        "cv": None
        if result.cv_curve is None
        else {
            "chosen_lambda": result.cv_curve.chosen_lambda,
            "chosen_index": result.cv_curve.chosen_index,
            "lambdas": result.cv_curve.lambdas,
            "mae": result.cv_curve.mae,
            "dropped": [list(d) for d in result.cv_curve.dropped],
        },
        "inference": {
            "chosen_lambda": result.chosen_lambda_original,
            "n_selected": n_sel,
            "selected_names": list(result.selected_names),
            "nonconverged_permutations": result.nonconverged_permutations,
            "ranks": ranks,
        },
        "marginal_correlations": {
            name: (None if np.isnan(r) else r)
            for name, r in zip(data.names, corr)
        },
    }
    if args.output is None:
        sys.stdout.write(report_text(report))
    else:
        write_report(report, args.output)
    elapsed = time.perf_counter() - started
    print(f"infer: done in {elapsed:.2f}s", file=sys.stderr)
    return 0


def _simulate_cells(args) -> tuple[SimConfig, ...]:
    preset = _PRESETS.get(args.preset, {})
    n = preset.get("n", args.n)
    ps = tuple(args.p) or preset.get("ps", (1000,))
    betas = tuple(args.beta) or preset.get("betas", (0.0, 0.5, 1.0, 1.5))
    rhos = tuple(args.rho) or preset.get("rhos", (0.0,))
    base = SimConfig(
        n=n,
        p=ps[0],
        replications=args.replications,
        permutations=args.perms,
        alpha=args.alpha,
        seed=args.seed,
        target_rank=2 if args.study == "power-rank2" else 1,
        n_folds=args.folds,
        grid_size=args.grid_size,
        grid_ratio=args.grid_ratio,
    )
    second = 1.5 if args.study == "power-rank2" else None
    return power_grid(
        base, betas=betas, rhos=rhos, ps=ps,
        second_effect=second, cluster_size=args.cluster_size,
    )


def run_simulate(args) -> int:
    started = time.perf_counter()
    cells = _simulate_cells(args)
    total = len(cells)

    def progress(row):
        print(f"simulate[{args.study}]: finished cell {row}", file=sys.stderr)

    if args.study == "precision":
        table = precision_study(cells, workers=args.workers, on_row=progress)
    else:
        table = power_study(cells, workers=args.workers, on_row=progress)

    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(table.to_csv())
    sidecar = {
        "command": "simulate",
        "version": __version__,
        "kernel_backend": BACKEND,
        "study": args.study,
        "preset": args.preset,
        "config": {
            "n": _PRESETS.get(args.preset, {}).get("n", args.n),
            "p": [c.p for c in cells],
            "beta": [c.causal[-1][1] if c.causal else 0.0 for c in cells],
            "rho": [c.clusters[0][1] if c.clusters else 0.0 for c in cells],
            "cluster_size": args.cluster_size,
            "replications": args.replications,
            "permutations": args.perms,
            "alpha": args.alpha,
            "seed": args.seed,
            "folds": args.folds,
            "grid_size": args.grid_size,
            "grid_ratio": args.grid_ratio,
            "workers": args.workers,
        },
        "cells": total,
        "output": str(args.output),
    }
    write_report(sidecar, str(args.output) + ".run.json")
    elapsed = time.perf_counter() - started
    print(f"simulate: {total} cells in {elapsed:.2f}s", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate_common(parser, args)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry_point() -> None:
    sys.exit(main())

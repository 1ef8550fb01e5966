"""Power and identification-precision studies on synthetic designs.

Designs are i.i.d. standard normal except for optional equicorrelated
clusters: a cluster of size s with correlation rho occupies a block of
adjacent columns generated as

    X_j = sqrt(rho) * Z_common + sqrt(1 - rho) * Z_j

so every column keeps unit variance and every within-cluster pair has
correlation rho.  Clusters are laid out from column 0 in the order
given; causal columns may sit anywhere, but the grid builders place
them inside the first cluster when one exists.

Every replicate derives its design, noise, and inference seeds from
(seed, replicate) substreams, so tables are reproducible and identical
for any worker count.  Studies report one row per grid cell with a
binomial Monte-Carlo standard error.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace

import numpy as np
from joblib import Parallel, delayed

from ._rng import substream, substream_seed
from .inference import InferenceConfig, permutation_test
from .linmodel import Dataset, fit_lasso, standardize
from .selection import CvConfig, select_lambda


@dataclass(frozen=True)
class SimConfig:
    """One simulation cell: design, signal, and study sizes.

    ``clusters`` is a sequence of (size, rho) blocks assigned to
    consecutive columns starting at 0; ``causal`` a sequence of
    (column index, beta).  ``target_rank`` is the rank whose p-value a
    power study reads.
    """

    n: int = 50
    p: int = 1000
    clusters: tuple[tuple[int, float], ...] = ()
    causal: tuple[tuple[int, float], ...] = ()
    sigma: float = 1.0
    replications: int = 50
    permutations: int = 100
    alpha: float = 0.05
    seed: int = 0
    target_rank: int = 1
    n_folds: int = 10
    grid_size: int = 100
    grid_ratio: float = 1e-3

    def __post_init__(self):
        clusters = tuple((int(s), float(r)) for s, r in self.clusters)
        causal = tuple((int(j), float(b)) for j, b in self.causal)
        object.__setattr__(self, "clusters", clusters)
        object.__setattr__(self, "causal", causal)
        if self.n < 2 or self.p < 1:
            raise ValueError("need n >= 2 and p >= 1")
        total = 0
        for size, rho in clusters:
            if size < 1:
                raise ValueError("cluster size must be positive")
            if not 0.0 <= rho < 1.0:
                raise ValueError("cluster rho must be in [0, 1)")
            total += size
        if total > self.p:
            raise ValueError("clusters use more columns than available")
        for j, _ in causal:
            if not 0 <= j < self.p:
                raise ValueError(f"causal index {j} out of range")
        if len({j for j, _ in causal}) != len(causal):
            raise ValueError("duplicate causal indices")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.replications < 1 or self.permutations < 1:
            raise ValueError("replications and permutations must be positive")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must be in (0, 1)")
        if self.target_rank < 1:
            raise ValueError("target_rank must be at least 1")

    def cluster_spans(self) -> tuple[tuple[int, int, float], ...]:
        """(start, stop, rho) column ranges of the clusters."""
        spans = []
        offset = 0
        for size, rho in self.clusters:
            spans.append((offset, offset + size, rho))
            offset += size
        return tuple(spans)


@dataclass(frozen=True)
class PowerRow:
    p: int
    beta: float
    rho: float
    rank: int
    power: float
    se: float
    replicates: int


@dataclass(frozen=True)
class PrecisionRow:
    p: int
    beta: float
    rho: float
    precision: float
    cluster_hit: float
    se: float
    replicates: int


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


@dataclass(frozen=True)
class PowerTable:
    """Per-cell rejection rates for the rank under test."""

    rows: tuple[PowerRow, ...]

    header = ("p", "beta", "rho", "rank", "power", "se", "replicates")

    def to_csv(self) -> str:
        return _csv_text(
            self.header,
            [
                (r.p, r.beta, r.rho, r.rank, r.power, r.se, r.replicates)
                for r in self.rows
            ],
        )


@dataclass(frozen=True)
class PrecisionTable:
    """Per-cell rates of the top rank hitting the causal column/cluster."""

    rows: tuple[PrecisionRow, ...]

    header = ("p", "beta", "rho", "precision", "cluster_hit", "se", "replicates")

    def to_csv(self) -> str:
        return _csv_text(
            self.header,
            [
                (r.p, r.beta, r.rho, r.precision, r.cluster_hit, r.se, r.replicates)
                for r in self.rows
            ],
        )


def gen_design(config: SimConfig, replicate: int) -> np.ndarray:
    """Design matrix for one replicate, deterministic per (seed, replicate)."""
    rng = substream(config.seed, replicate, 0)
    X = rng.standard_normal((config.n, config.p))
    for start, stop, rho in config.cluster_spans():
        common = rng.standard_normal(config.n)
        X[:, start:stop] = (
            np.sqrt(rho) * common[:, None] + np.sqrt(1.0 - rho) * X[:, start:stop]
        )
    return X


def gen_response(X: np.ndarray, config: SimConfig, replicate: int) -> np.ndarray:
    """y = sum_j beta_j X_j + sigma * eps with standard normal noise."""
    rng = substream(config.seed, replicate, 1)
    y = config.sigma * rng.standard_normal(X.shape[0])
    for j, beta in config.causal:
        y += beta * X[:, j]
    return y


def gen_dataset(config: SimConfig, replicate: int) -> Dataset:
    """Design plus response as a ready-to-use dataset."""
    X = gen_design(config, replicate)
    y = gen_response(X, config, replicate)
    names = tuple(f"x{j + 1}" for j in range(config.p))
    return Dataset(y, X, names)


def _cell_label(config: SimConfig) -> tuple[float, float]:
    """(beta, rho) reported for a cell: the last causal effect and the
    first cluster correlation (0 when absent)."""
    beta = config.causal[-1][1] if config.causal else 0.0
    rho = config.clusters[0][1] if config.clusters else 0.0
    return beta, rho


def _binomial_se(rate: float, r: int) -> float:
    return float(np.sqrt(rate * (1.0 - rate) / r))


def _power_replicate(config: SimConfig, replicate: int) -> bool:
    data = gen_dataset(config, replicate)
    inference = InferenceConfig(
        n_permutations=config.permutations,
        alpha=config.alpha,
        max_rank=config.target_rank,
        seed=substream_seed(config.seed, replicate, 2),
        cv=CvConfig(
            n_folds=config.n_folds,
            grid_size=config.grid_size,
            grid_ratio=config.grid_ratio,
        ),
    )
    result = permutation_test(data, inference)
    return bool(result.p_values[config.target_rank - 1] <= config.alpha)


def power_study(cells, workers: int = 1, on_row=None) -> PowerTable:
    """Rejection rate of the target rank's p-value across replicates.

    One row per cell; ``on_row`` (if given) is called with each
    completed ``PowerRow`` so long runs can flush partial tables.
    """
    rows = []
    for cell in cells:
        reps = range(cell.replications)
        if workers > 1:
            hits = Parallel(n_jobs=workers)(
                delayed(_power_replicate)(cell, r) for r in reps
            )
        else:
            hits = [_power_replicate(cell, r) for r in reps]
        power = float(np.mean(hits))
        beta, rho = _cell_label(cell)
        row = PowerRow(
            p=cell.p,
            beta=beta,
            rho=rho,
            rank=cell.target_rank,
            power=power,
            se=_binomial_se(power, cell.replications),
            replicates=cell.replications,
        )
        rows.append(row)
        if on_row is not None:
            on_row(row)
    return PowerTable(rows=tuple(rows))


def _precision_replicate(config: SimConfig, replicate: int, span) -> tuple[bool, bool]:
    data = gen_dataset(config, replicate)
    std, _ = standardize(data)
    cv = CvConfig(
        n_folds=config.n_folds,
        grid_size=config.grid_size,
        grid_ratio=config.grid_ratio,
        seed=substream_seed(config.seed, replicate, 3),
    )
    lam, _ = select_lambda(std, cv)
    fit = fit_lasso(std, lam)
    if not fit.ranked:
        return False, False
    top = fit.ranked[0][0]
    target = config.causal[0][0]
    return top == target, span[0] <= top < span[1]


def precision_study(cells, workers: int = 1, on_row=None) -> PrecisionTable:
    """How often the top-ranked column is the causal column (or cluster).

    Each cell must designate its target via ``causal[0]`` (possibly
    with effect 0, in which case hits occur at chance level).  The
    cluster-level rate counts the top-ranked column landing anywhere in
    the causal column's cluster; for a causal column outside every
    cluster it coincides with the exact-column rate.
    """
    rows = []
    for cell in cells:
        if not cell.causal:
            raise ValueError("precision cells need causal[0] as the target column")
        target = cell.causal[0][0]
        span = (target, target + 1)
        for start, stop, _ in cell.cluster_spans():
            if start <= target < stop:
                span = (start, stop)
                break
        reps = range(cell.replications)
        if workers > 1:
            hits = Parallel(n_jobs=workers)(
                delayed(_precision_replicate)(cell, r, span) for r in reps
            )
        else:
            hits = [_precision_replicate(cell, r, span) for r in reps]
        exact = float(np.mean([h[0] for h in hits]))
        cluster = float(np.mean([h[1] for h in hits]))
        beta, rho = _cell_label(cell)
        row = PrecisionRow(
            p=cell.p,
            beta=beta,
            rho=rho,
            precision=exact,
            cluster_hit=cluster,
            se=_binomial_se(exact, cell.replications),
            replicates=cell.replications,
        )
        rows.append(row)
        if on_row is not None:
            on_row(row)
    return PrecisionTable(rows=tuple(rows))


def power_grid(
    base: SimConfig,
    betas,
    rhos,
    ps=None,
    second_effect: float | None = None,
    cluster_size: int = 10,
) -> tuple[SimConfig, ...]:
    """Cells for the product of effect sizes, correlations, and sizes.

    ``rhos`` entries of 0 mean fully independent columns; positive
    entries wrap the causal column(s) in one equicorrelated cluster of
    ``cluster_size``.  With ``second_effect`` set, each cell carries a
    fixed first signal of that size at column 0 and the varied effect at
    column 1 (both inside the cluster when there is one), for rank-2
    studies.
    """
    cells = []
    for p in ps if ps is not None else (base.p,):
        for rho in rhos:
            clusters = ((cluster_size, float(rho)),) if rho > 0 else ()
            for beta in betas:
                if second_effect is not None:
                    causal = ((0, float(second_effect)), (1, float(beta)))
                else:
                    causal = ((0, float(beta)),)
                cells.append(
                    replace(
                        base, p=int(p), clusters=clusters, causal=causal
                    )
                )
    return tuple(cells)

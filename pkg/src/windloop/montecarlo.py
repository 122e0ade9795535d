"""Replicate orchestration and statistical studies.

Replicate r always draws from the stream derived as
splitmix64(master_seed XOR (r+1) * golden), regardless of how work is
scheduled; aggregation folds results in replicate-index order.  Output
is therefore byte-identical across thread budgets and repeated runs.
Statistical targets (normalization trend, tail tables, pair-overlap
moments, the subloop scaling identity) are estimated over replicates
with plain normal-approximation uncertainty.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .measures import TestFunction, ThresholdSet, threshold_area
from .sampling import PlanarPath, derive_child_seed, sample_bm, subpath
from .verify import ParamSet, normalization_statistic, occupation_discrepancy, rate_bound
from .winding import (ClosedLoop, GridSpec, WindingField, arc_cut_indices,
                      close_path, split_closed, winding_field)


@dataclass(frozen=True)
class McConfig:
    """One reproducible study: everything an output byte depends on."""

    master_seed: int
    replicates: int
    levels: int
    grid_n: int
    n_values: tuple[int, ...]
    params: ParamSet | None = None
    eta_variant: str = "positive"
    threads: int = 1
    functions: tuple[TestFunction, ...] = ()

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if not 0 <= self.levels <= 26:
            raise ValueError("levels must lie in [0, 26]")
        if self.grid_n < 8:
            raise ValueError("grid_n must be >= 8")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        n = tuple(int(v) for v in self.n_values)
        if not n or any(b <= a for a, b in zip(n, n[1:])) or n[0] < 1:
            raise ValueError("n_values must be nonempty, positive, ascending")
        object.__setattr__(self, "n_values", n)


def parallel_map(fn: Callable[[int], object], count: int,
                 threads: int) -> list:
    """fn(0..count-1) evaluated with a thread budget; results returned
    in index order no matter the completion order."""
    if threads <= 1 or count <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(fn, i) for i in range(count)]
        return [f.result() for f in futures]


def replicate_path(cfg: McConfig, r: int) -> PlanarPath:
    return sample_bm(derive_child_seed(cfg.master_seed, r), cfg.levels)


def path_field(path: PlanarPath, grid_n: int) -> WindingField:
    """Winding field of the path's loop on a grid covering its box."""
    loop = close_path(path)
    grid = GridSpec.cover(loop.bounding_box(), grid_n)
    return winding_field(loop, grid)


@dataclass
class McSummary:
    """Replicate-level samples plus derived per-N statistics."""

    config: McConfig
    n_values: tuple[int, ...]
    stat_off: np.ndarray = field(repr=False)    # (R, nN)
    stat_inc: np.ndarray = field(repr=False)    # (R, nN)
    f_names: tuple[str, ...] = ()
    discrepancy: np.ndarray | None = field(default=None, repr=False)  # (R, nN, nf)
    bound: np.ndarray | None = field(default=None, repr=False)        # (R, nN, nf)
    first_field: WindingField | None = field(default=None, repr=False)

    def per_n(self, which: str = "off") -> list[dict]:
        """mean, variance, L2 error vs 1 and normal-approximation
        confidence half-width for each N."""
        samples = self.stat_off if which == "off" else self.stat_inc
        rows = []
        r = samples.shape[0]
        for k, n in enumerate(self.n_values):
            col = samples[:, k]
            mean = float(col.mean())
            var = float(col.var(ddof=1)) if r > 1 else 0.0
            rows.append({
                "N": int(n),
                "mean": mean,
                "variance": var,
                "l2_error": float(((col - 1.0) ** 2).mean()),
                "ci_halfwidth": 1.96 * math.sqrt(var / r) if r > 1 else 0.0,
            })
        return rows

    def ccdf(self, n_index: int, delta: float,
             r_values: Sequence[float], which: str = "off") -> list[tuple[float, float]]:
        samples = self.stat_off if which == "off" else self.stat_inc
        n = self.n_values[n_index]
        dev = float(n) ** delta * np.abs(samples[:, n_index] - 1.0)
        return [(float(rv), float((dev >= rv).mean())) for rv in r_values]


def run_replicates(cfg: McConfig) -> McSummary:
    """Sample R paths, compute their winding fields and the per-N scaled
    areas (plus per-function discrepancies and rate bounds when params
    are present)."""
    nn = len(cfg.n_values)
    nf = len(cfg.functions)

    def one(r: int):
        path = replicate_path(cfg, r)
        fld = path_field(path, cfg.grid_n)
        off = np.empty(nn)
        inc = np.empty(nn)
        disc = np.zeros((nn, nf))
        bnd = np.zeros((nn, nf))
        for k, n in enumerate(cfg.n_values):
            stat = normalization_statistic(fld, n)
            off[k] = stat.off_curve
            inc[k] = stat.inclusive
            for q, f in enumerate(cfg.functions):
                disc[k, q] = occupation_discrepancy(path, fld, f, n).off_curve
                if cfg.params is not None:
                    bnd[k, q] = rate_bound(path, f, n, cfg.params,
                                           cfg.eta_variant).bound
        return off, inc, disc, bnd, (fld if r == 0 else None)

    results = parallel_map(one, cfg.replicates, cfg.threads)
    stat_off = np.stack([res[0] for res in results])
    stat_inc = np.stack([res[1] for res in results])
    disc = np.stack([res[2] for res in results]) if nf else None
    bnd = np.stack([res[3] for res in results]) if nf else None
    return McSummary(config=cfg, n_values=cfg.n_values,
                     stat_off=stat_off, stat_inc=stat_inc,
                     f_names=tuple(f.name for f in cfg.functions),
                     discrepancy=disc, bound=bnd,
                     first_field=results[0][4])


def tail_table(cfg: McConfig, N: int, delta: float,
               r_values: Sequence[float]) -> list[tuple[float, float]]:
    """Empirical complementary CDF of N^delta |stat - 1| at the given
    thresholds.  delta must be below 1/2 (beyond it no polynomial tail
    bound is claimed)."""
    if not delta < 0.5:
        raise ValueError("delta must be < 1/2")
    sub = replace(cfg, n_values=(N,), functions=())
    summary = run_replicates(sub)
    return summary.ccdf(0, delta, r_values)


def pair_moment_table(cfg: McConfig, t_values: Sequence[int],
                      m_values: Sequence[int]) -> list[dict]:
    """Second moment of the summed pairwise overlap areas, per (T, M).

    For each replicate and T, the path splits into T dyadic subloops
    (T must divide the step count) whose fields share the path's grid;
    the overlap area sums |both subloops wind >= M in absolute value|
    over distinct pairs.  Estimates are means of the squared sums with
    standard errors.
    """
    t_values = [int(t) for t in t_values]
    m_values = [int(m) for m in m_values]
    n_steps = 1 << cfg.levels
    for t in t_values:
        if t < 1 or n_steps % t != 0:
            raise ValueError(f"T={t} does not divide {n_steps} steps")
    if any(m < 1 for m in m_values):
        raise ValueError("M values must be positive")

    def one(r: int) -> np.ndarray:
        path = replicate_path(cfg, r)
        loop = close_path(path)
        grid = GridSpec.cover(loop.bounding_box(), cfg.grid_n)
        out = np.zeros((len(t_values), len(m_values)))
        for ti, t in enumerate(t_values):
            if t == 1:
                continue    # no pairs: the sum is empty
            arcs, _ = split_closed(path.points, arc_cut_indices(n_steps, t))
            fields = [winding_field(a, grid) for a in arcs]
            for mi, m in enumerate(m_values):
                big = [np.abs(f.theta) >= m for f in fields]
                total = 0.0
                for i in range(t):
                    for j in range(i + 1, t):
                        off = ~(fields[i].on_curve | fields[j].on_curve)
                        total += float((big[i] & big[j] & off).sum()) * grid.cell_area
                out[ti, mi] = total
        return out

    sums = parallel_map(one, cfg.replicates, cfg.threads)
    stacked = np.stack(sums) ** 2      # (R, nT, nM), squared per replicate
    rows = []
    r = cfg.replicates
    for ti, t in enumerate(t_values):
        for mi, m in enumerate(m_values):
            col = stacked[:, ti, mi]
            est = float(col.mean())
            se = float(col.std(ddof=1) / math.sqrt(r)) if r > 1 else 0.0
            rows.append({"T": t, "M": m, "estimate": est, "stderr": se})
    return rows


def ks_statistic(a: np.ndarray, b: np.ndarray) -> float:
    """Two-sample Kolmogorov-Smirnov statistic: sup |F_a - F_b| over the
    pooled sample points."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be nonempty")
    pooled = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, pooled, side="right") / a.size
    cdf_b = np.searchsorted(b, pooled, side="right") / b.size
    return float(np.abs(cdf_a - cdf_b).max())


def ks_critical(n1: int, n2: int, coeff: float = 1.628) -> float:
    """Large-sample critical value c * sqrt((n1+n2)/(n1 n2)); the
    default coefficient is the 1% level."""
    return coeff * math.sqrt((n1 + n2) / (n1 * n2))


@dataclass(frozen=True)
class ScalingReport:
    """Two-sample comparison of T * (first-subloop area at N) against
    full-loop area at N; equality in distribution is the claim."""

    ks: float
    critical_1pct: float
    n1: int
    n2: int

    @property
    def compatible(self) -> bool:
        return self.ks < self.critical_1pct


def scaling_check(cfg: McConfig, T: int, N: int) -> ScalingReport:
    """Compare samples of T * |first subloop winds >= N| (replicates
    0..R-1) against |full loop winds >= N| from independent paths
    (replicates R..2R-1), each on its own covering grid."""
    n_steps = 1 << cfg.levels
    if T < 1 or n_steps % T != 0:
        raise ValueError(f"T={T} does not divide {n_steps} steps")

    def sub_area(r: int) -> float:
        path = replicate_path(cfg, r)
        piece = subpath(path, 1, T)
        loop = ClosedLoop(vertices=piece.points)
        grid = GridSpec.cover(loop.bounding_box(), cfg.grid_n)
        fld = winding_field(loop, grid)
        return T * threshold_area(
            ThresholdSet(fields=(fld,), threshold=N)).off_curve

    def full_area(r: int) -> float:
        path = replicate_path(cfg, cfg.replicates + r)
        fld = path_field(path, cfg.grid_n)
        return threshold_area(
            ThresholdSet(fields=(fld,), threshold=N)).off_curve

    s1 = np.array(parallel_map(sub_area, cfg.replicates, cfg.threads))
    s2 = np.array(parallel_map(full_area, cfg.replicates, cfg.threads))
    return ScalingReport(ks=ks_statistic(s1, s2),
                         critical_1pct=ks_critical(s1.size, s2.size),
                         n1=s1.size, n2=s2.size)

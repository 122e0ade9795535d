"""Statement-level checks on winding fields.

The decomposition sandwich brackets the measure of a high-winding set
between sums over subloop sets corrected by pairwise overlaps; it is
checked both as a measure inequality and cell-pointwise (the pointwise
form is an exact integer consequence of winding additivity, so zero
violations is asserted, not hoped for).  The parameter chain, schedule
arithmetic, tail events and the convergence-rate bound live here too.
Unknown constants are never asserted; only ratios and trends are.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .measures import AreaPair, TestFunction, ThresholdSet, mu_N_f, nu_f, threshold_area
from .sampling import PlanarPath, holder_norm
from .winding import (ClosedLoop, GridSpec, WindingField, arc_cut_indices,
                      close_path, split_closed, winding_field)

ETA_VARIANTS = ("paper", "positive")


@dataclass(frozen=True)
class ParamSet:
    """Exponents of the rate/tail machinery; see validate_params for
    the admissible region."""

    t: float
    alpha: float
    m: float
    zeta: float
    s: float
    delta: float
    gamma: float


def validate_params(p: ParamSet) -> list[str]:
    """Check the seven-part parameter chain; returns the violated
    inequalities as messages (empty list = valid).

    In reading order: 0<alpha<1/2; 0<t<2/5; 1/2+t/4<m<1-t;
    0<zeta<2m-1-t/2; 0<s<1/2-t/2; t/2+s<delta<1/2;
    gamma>max(1/(2s), 1/(4m-t-2-2zeta)).
    """
    v: list[str] = []
    if not 0.0 < p.alpha < 0.5:
        v.append("0<alpha<1/2")
    if not 0.0 < p.t < 0.4:
        v.append("t<2/5")
    if not 0.5 + p.t / 4.0 < p.m < 1.0 - p.t:
        v.append("1/2+t/4<m<1-t")
    if not 0.0 < p.zeta < 2.0 * p.m - 1.0 - p.t / 2.0:
        v.append("0<zeta<2m-1-t/2")
    if not 0.0 < p.s < 0.5 - p.t / 2.0:
        v.append("0<s<1/2-t/2")
    if not p.t / 2.0 + p.s < p.delta < 0.5:
        v.append("t/2+s<delta<1/2")
    gamma_floor = -math.inf
    if p.s > 0.0:
        gamma_floor = max(gamma_floor, 1.0 / (2.0 * p.s))
    den = 4.0 * p.m - p.t - 2.0 - 2.0 * p.zeta
    if den > 0.0:
        gamma_floor = max(gamma_floor, 1.0 / den)
    if not (math.isfinite(gamma_floor) and p.gamma > gamma_floor):
        v.append("gamma>max(1/(2s),1/(4m-t-2-2zeta))")
    return v


def floor_power(n: int, e: float) -> int:
    """floor(n**e) with a snap guard: values within 1e-9 (relative) of
    an integer are treated as that integer, so exact powers like 4**1.5
    do not round down spuriously."""
    v = float(n) ** e
    r = round(v)
    if abs(v - r) <= 1e-9 * max(1.0, abs(r)):
        v = float(r)
    return int(math.floor(v))


def gamma_grid(gamma: float, n_max: int) -> np.ndarray:
    """The sparse integer grid {floor(K**gamma)} up to n_max, zero
    removed, sorted ascending."""
    if gamma <= 1.0:
        raise ValueError("gamma must exceed 1")
    vals: list[int] = []
    k = 1
    while True:
        v = floor_power(k, gamma)
        if v > n_max:
            break
        if v > 0 and (not vals or v != vals[-1]):
            vals.append(v)
        k += 1
    return np.array(vals, dtype=np.int64)


@dataclass(frozen=True)
class Schedule:
    """Derived run sizes for one N: T subloops, overlap threshold M,
    snapped threshold n_prime on the sparse grid, rate exponent eta."""

    N: int
    T: int
    M: int
    n_prime: int
    eta: float
    variant: str

    @property
    def sandwich_ready(self) -> bool:
        """Whether T(M+1) < N, the decomposition lemma's precondition."""
        return self.T * (self.M + 1) < self.N


def eta_value(p: ParamSet, variant: str = "positive") -> float:
    """Rate exponent.  'paper' follows the source formula with the
    1/gamma - 1 term (negative for gamma > 1); 'positive' replaces it
    by 1/gamma.  Both are surfaced since the literal formula cannot
    yield a decaying rate."""
    if variant not in ETA_VARIANTS:
        raise ValueError(f"variant must be one of {ETA_VARIANTS}")
    g_term = 1.0 / p.gamma - 1.0 if variant == "paper" else 1.0 / p.gamma
    return min(1.0 - p.m - p.t, g_term, p.delta - p.t / 2.0 - p.s, p.zeta)


def make_schedule(N: int, p: ParamSet, variant: str = "positive") -> Schedule:
    """T = floor(N^t), M = floor(N^m), n_prime = the largest sparse-grid
    value <= N - T - M(T-1), eta per the selected variant.

    Raises when N is too small for any sparse-grid value to fit.
    """
    if N < 1:
        raise ValueError("N must be a positive integer")
    T = floor_power(N, p.t)
    M = floor_power(N, p.m)
    limit = N - T - M * (T - 1)
    if limit < 1:
        raise ValueError(
            f"N={N} too small: N - T - M(T-1) = {limit} leaves no room")
    grid = gamma_grid(p.gamma, limit)
    if grid.size == 0:
        raise ValueError(f"N={N} too small: no sparse-grid value <= {limit}")
    return Schedule(N=N, T=T, M=M, n_prime=int(grid[-1]),
                    eta=eta_value(p, variant), variant=variant)


@dataclass(frozen=True)
class DecompositionFields:
    """Winding fields of a loop, its arcs, and the chord polygon, all on
    one grid.  The combined band covers every involved curve."""

    main: WindingField
    arcs: tuple[WindingField, ...]
    chord: WindingField

    def combined_band(self) -> np.ndarray:
        band = self.main.on_curve.copy()
        for a in self.arcs:
            band |= a.on_curve
        band |= self.chord.on_curve
        return band


def decomposition_fields(vertices: np.ndarray, cuts: Sequence[int],
                         grid: GridSpec,
                         band_eps: float | None = None) -> DecompositionFields:
    """Fields for a closed-up vertex chain split at the given cuts."""
    arcs, chord = split_closed(vertices, np.asarray(cuts, dtype=np.int64))
    main = winding_field(ClosedLoop(vertices=vertices), grid, band_eps)
    arc_fields = tuple(winding_field(a, grid, band_eps) for a in arcs)
    chord_field = winding_field(chord, grid, band_eps)
    return DecompositionFields(main=main, arcs=arc_fields, chord=chord_field)


@dataclass(frozen=True)
class AdditivityReport:
    """Exactness check of winding additivity: loop = sum of arc loops
    plus chord polygon at every cell off all curves."""

    violations: int
    n_cells_checked: int
    max_abs_residual: int

    @property
    def holds(self) -> bool:
        return self.violations == 0


def additivity_report(df: DecompositionFields) -> AdditivityReport:
    off = ~df.combined_band()
    resid = df.main.theta.astype(np.int64) - df.chord.theta
    for a in df.arcs:
        resid -= a.theta
    bad = (resid != 0) & off
    max_resid = int(np.abs(resid[off]).max()) if off.any() else 0
    return AdditivityReport(violations=int(bad.sum()),
                            n_cells_checked=int(off.sum()),
                            max_abs_residual=max_resid)


@dataclass(frozen=True)
class SandwichReport:
    """Both sides of the decomposition bracket around mu(D_N).

    lower/center/upper are f-quadratures over cells off every involved
    curve; the pointwise counts are exact indicator comparisons and must
    be zero.  margin is min(center - lower, upper - center).
    """

    N: int
    T: int
    M: int
    shift: int
    lower: float
    center: float
    upper: float
    pointwise_lower_violations: int
    pointwise_upper_violations: int
    n_cells_checked: int
    arc_sum_wide: float
    arc_sum_narrow: float
    pair_sum: float

    @property
    def pointwise_ok(self) -> bool:
        return (self.pointwise_lower_violations == 0
                and self.pointwise_upper_violations == 0)

    @property
    def measure_ok(self) -> bool:
        tol = 1e-9 * max(1.0, abs(self.lower), abs(self.upper))
        return self.lower <= self.center + tol and self.center <= self.upper + tol

    @property
    def holds(self) -> bool:
        return self.pointwise_ok and self.measure_ok


def sandwich_report(df: DecompositionFields, N: int, M: int,
                    f: TestFunction) -> SandwichReport:
    """Evaluate the decomposition bracket at thresholds (N, M).

    Requires T(M+1) < N with T the number of arcs, and f >= 0 on the
    grid (the bracket only holds for nonnegative densities).
    """
    T = len(df.arcs)
    if T * (M + 1) >= N:
        raise ValueError(f"need T(M+1) < N, got {T}*({M}+1) >= {N}")
    if M < 1:
        raise ValueError("M must be a positive integer")
    grid = df.main.grid
    cx = grid.centers_x()
    cy = grid.centers_y()
    vals = f(cx[None, :], cy[:, None]) * np.ones((grid.ny, grid.nx))
    if (vals < 0.0).any():
        raise ValueError("sandwich check requires f >= 0 at all cell centers")
    off = ~df.combined_band()
    w = np.where(off, vals, 0.0) * grid.cell_area
    shift = T + M * (T - 1)

    def mu(mask: np.ndarray) -> float:
        return float(w[mask].sum())

    center_mask = df.main.theta >= N
    narrow = np.zeros_like(center_mask, dtype=np.int32)   # thresholds N+shift
    wide = np.zeros_like(narrow)                          # thresholds N-shift
    for a in df.arcs:
        narrow += (a.theta >= N + shift).astype(np.int32)
        wide += (a.theta >= N - shift).astype(np.int32)
    pair_count = np.zeros_like(narrow)
    big = [np.abs(a.theta) >= M for a in df.arcs]
    for i in range(T):
        for j in range(i + 1, T):
            pair_count += (big[i] & big[j]).astype(np.int32)

    arc_sum_narrow = sum(mu(a.theta >= N + shift) for a in df.arcs)
    arc_sum_wide = sum(mu(a.theta >= N - shift) for a in df.arcs)
    pair_sum = float((w * pair_count).sum())
    center = mu(center_mask)

    cm = center_mask.astype(np.int32)
    low_bad = ((narrow - pair_count > cm) & off).sum()
    up_bad = ((cm > wide + pair_count) & off).sum()

    return SandwichReport(
        N=N, T=T, M=M, shift=shift,
        lower=arc_sum_narrow - pair_sum, center=center,
        upper=arc_sum_wide + pair_sum,
        pointwise_lower_violations=int(low_bad),
        pointwise_upper_violations=int(up_bad),
        n_cells_checked=int(off.sum()),
        arc_sum_wide=arc_sum_wide, arc_sum_narrow=arc_sum_narrow,
        pair_sum=pair_sum)


def verify_decomposition(path: PlanarPath, N: int, T: int, M: int,
                         grid: GridSpec, f: TestFunction,
                         band_eps: float | None = None) -> SandwichReport:
    """Decomposition bracket for a sampled path split into T equal
    dyadic pieces.  T must divide the step count and T(M+1) < N."""
    n = path.n_steps
    if T < 1 or n % T != 0:
        raise ValueError(f"T={T} does not divide the {n} path steps")
    if T * (M + 1) >= N:
        raise ValueError(f"need T(M+1) < N, got {T}*({M}+1) >= {N}")
    cuts = arc_cut_indices(n, T)
    df = decomposition_fields(path.points, cuts, grid, band_eps)
    return sandwich_report(df, N, M, f)


def normalization_statistic(field: WindingField, N: int) -> AreaPair:
    """2 pi N times the area winding at least N; tends to 1 for
    Brownian loops as N grows.  Both band variants."""
    if N < 1:
        raise ValueError("N must be a positive integer")
    area = threshold_area(ThresholdSet(fields=(field,), threshold=N))
    return AreaPair(off_curve=2.0 * math.pi * N * area.off_curve,
                    inclusive=2.0 * math.pi * N * area.inclusive)


def occupation_discrepancy(path: PlanarPath, field: WindingField,
                           f: TestFunction, N: int) -> AreaPair:
    """|scaled winding f-measure minus the path-time integral of f|,
    the quantity driven to zero by the weak convergence."""
    mu = mu_N_f(field, N, f)
    nu = nu_f(path, f)
    return AreaPair(off_curve=abs(mu.off_curve - nu),
                    inclusive=abs(mu.inclusive - nu))


@dataclass(frozen=True)
class RateReport:
    """Error bound shape for the convergence at one N.  The bound's
    multiplicative constant is unknown, so only the ratio across an
    N-grid carries information."""

    bound: float
    discrepancy: float
    ratio: float


def rate_bound(path: PlanarPath, f: TestFunction, N: int, p: ParamSet,
               variant: str = "positive",
               field: WindingField | None = None) -> RateReport:
    """omega_f(2 ||X|| N^{-alpha t}) + sup_norm N^{-eta}.

    When a winding field is supplied, the measured discrepancy and the
    ratio discrepancy/bound are filled in (off-curve variant);
    otherwise they are nan.
    """
    bad = validate_params(p)
    if bad:
        raise ValueError("invalid params: " + "; ".join(bad))
    hn = holder_norm(path, p.alpha)
    eta = eta_value(p, variant)
    bound = (f.modulus(2.0 * hn * float(N) ** (-p.alpha * p.t))
             + f.sup_norm * float(N) ** -eta)
    if field is None:
        return RateReport(bound=bound, discrepancy=math.nan, ratio=math.nan)
    disc = occupation_discrepancy(path, field, f, N).off_curve
    ratio = disc / bound if bound > 0 else math.inf
    return RateReport(bound=bound, discrepancy=disc, ratio=ratio)


@dataclass(frozen=True)
class EventFlags:
    """Threshold events behind the sparse-grid argument, evaluated with
    grid areas at one N.

    balanced: every subloop's scaled area is within the polynomial
    window of 1/T.  overlap_small: summed pairwise overlap areas are
    below N^{-1-zeta}.  capped: every subloop's scaled area stays under
    2/T.
    """

    balanced: bool
    overlap_small: bool
    capped: bool
    schedule: Schedule
    max_balance_deviation: float
    balance_tolerance: float
    pair_overlap_total: float
    overlap_tolerance: float
    max_scaled_area: float
    area_cap: float


def event_flags(path: PlanarPath, N: int, p: ParamSet, grid: GridSpec,
                variant: str = "positive",
                band_eps: float | None = None) -> EventFlags:
    """Evaluate the three events for one path at one N.

    The subloop count T = floor(N^t) is arbitrary, so the path is cut
    at vertex indices floor(i n / T) rather than requiring
    divisibility; the cuts are exact whenever T divides the step count.
    """
    sched = make_schedule(N, p, variant)
    T = sched.T
    np_ = sched.n_prime
    cuts = arc_cut_indices(path.n_steps, T)
    arcs, _ = split_closed(path.points, cuts)
    fields = [winding_field(a, grid, band_eps) for a in arcs]

    areas = np.empty(T)
    for i, fld in enumerate(fields):
        areas[i] = threshold_area(
            ThresholdSet(fields=(fld,), threshold=np_)).off_curve
    scaled_np = 2.0 * math.pi * np_ * areas
    scaled_n = 2.0 * math.pi * N * areas

    balance_dev = float(np.max(float(np_) ** p.delta
                               * np.abs(scaled_np - 1.0 / T)))
    balance_tol = float(T) ** (-0.5 + p.s / p.t)

    pair_total = 0.0
    if T > 1:
        big = [np.abs(f.theta) >= sched.M for f in fields]
        bands = [f.on_curve for f in fields]
        for i in range(T):
            for j in range(i + 1, T):
                off = ~(bands[i] | bands[j])
                pair_total += float((big[i] & big[j] & off).sum()) * grid.cell_area
    overlap_tol = float(N) ** (-1.0 - p.zeta)

    return EventFlags(
        balanced=balance_dev <= balance_tol,
        overlap_small=pair_total <= overlap_tol,
        capped=bool(np.max(scaled_n) <= 2.0 / T),
        schedule=sched,
        max_balance_deviation=balance_dev,
        balance_tolerance=balance_tol,
        pair_overlap_total=pair_total,
        overlap_tolerance=overlap_tol,
        max_scaled_area=float(np.max(scaled_n)),
        area_cap=2.0 / T)


def joint_threshold_statistic(path1: PlanarPath, path2: PlanarPath, N: int,
                              grid: GridSpec,
                              band_eps: float | None = None) -> float:
    """N^2 times the area where two independent loops both wind at
    least N (cells off both curves); the two-path analogue of the
    single-loop normalization."""
    f1 = winding_field(close_path(path1), grid, band_eps)
    f2 = winding_field(close_path(path2), grid, band_eps)
    return joint_statistic_from_fields(f1, f2, N)


def joint_statistic_from_fields(f1: WindingField, f2: WindingField,
                                N: int) -> float:
    if f1.grid != f2.grid:
        raise ValueError("fields must share one grid")
    if N < 1:
        raise ValueError("N must be a positive integer")
    member = (f1.theta >= N) & (f2.theta >= N)
    off = ~(f1.on_curve | f2.on_curve)
    area = float((member & off).sum()) * f1.grid.cell_area
    return float(N) ** 2 * area

"""Performance metrics for dynamic multi-objective runs.

Per-environment snapshots are scored by inverted generational distance,
exact hypervolume (two and three objectives), and a gated maximum-spread
measure; run-level values are the means over the environment-final
snapshots.  Cross-run aggregation averages repeats, then configurations,
then problems, in that order.  The Friedman rank test compares algorithms
across instances with average ranks for ties and the standard tie-corrected
chi-squared statistic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence

import numpy as np
from scipy.stats import chi2 as _chi2_dist

from .problems import ReferenceFront

__all__ = [
    "MetricRecord",
    "FriedmanResult",
    "igd",
    "hypervolume",
    "strictly_dominating_count",
    "normalized_hypervolume",
    "ms2",
    "run_means",
    "aggregate",
    "friedman",
]


def _ref_points(ref: ReferenceFront | np.ndarray) -> np.ndarray:
    pts = ref.points if isinstance(ref, ReferenceFront) else np.asarray(ref, dtype=float)
    if pts.ndim != 2 or len(pts) == 0:
        raise ValueError(f"reference set must be a nonempty matrix, got {pts.shape}")
    return pts


def igd(ref: ReferenceFront | np.ndarray, approx: np.ndarray) -> float:
    """Mean distance from each reference point to its nearest approximation
    point; lower is better, 0 iff every reference point is attained."""
    R = _ref_points(ref)
    A = np.asarray(approx, dtype=float)
    if A.ndim != 2 or len(A) == 0:
        raise ValueError(f"approximation set must be a nonempty matrix, got {A.shape}")
    if A.shape[1] != R.shape[1]:
        raise ValueError(
            f"objective counts differ: reference {R.shape[1]}, approximation {A.shape[1]}"
        )
    mins = np.empty(len(R))
    chunk = 2048
    # Squared distances to a far-diverged approximation may pass the float
    # range; saturating to inf keeps the min (and the metric) well defined.
    with np.errstate(over="ignore"):
        for i0 in range(0, len(R), chunk):
            block = R[i0 : i0 + chunk]
            d2 = ((block[:, None, :] - A[None, :, :]) ** 2).sum(axis=-1)
            mins[i0 : i0 + chunk] = np.sqrt(d2.min(axis=1))
    return float(mins.mean())


def _staircase_area(pts: np.ndarray, z1: float, z2: float) -> float:
    """Area dominated by ``pts`` within the box cornered at (z1, z2)."""
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    xs: list[float] = []
    ys: list[float] = []
    for x, y in pts[order]:
        if not ys or y < ys[-1]:
            xs.append(float(x))
            ys.append(float(y))
    area = 0.0
    for i in range(len(xs)):
        right = xs[i + 1] if i + 1 < len(xs) else z1
        area += (right - xs[i]) * (z2 - ys[i])
    return area


def hypervolume(points: np.ndarray, z_ref: np.ndarray) -> float:
    """Exact dominated hypervolume w.r.t. ``z_ref`` (minimization).

    Points that do not strictly dominate the reference point enclose no
    volume and are discarded; an entirely discarded set scores 0 (use
    :func:`strictly_dominating_count` to detect that case).
    """
    F = np.asarray(points, dtype=float)
    z = np.asarray(z_ref, dtype=float)
    if F.ndim != 2 or z.shape != (F.shape[1],):
        raise ValueError(
            f"shape mismatch: points {F.shape} vs reference {z.shape}"
        )
    m = F.shape[1]
    if m not in (2, 3):
        raise ValueError(f"hypervolume supports 2 or 3 objectives, got {m}")
    inside = F[(F < z).all(axis=1)]
    if len(inside) == 0:
        return 0.0
    if m == 2:
        return _staircase_area(inside, z[0], z[1])
    order = np.argsort(inside[:, 2], kind="stable")
    P = inside[order]
    levels = np.unique(P[:, 2])
    vol = 0.0
    for i, level in enumerate(levels):
        top = levels[i + 1] if i + 1 < len(levels) else z[2]
        accum = P[P[:, 2] <= level, :2]
        vol += _staircase_area(accum, z[0], z[1]) * (top - level)
    return vol


def strictly_dominating_count(points: np.ndarray, z_ref: np.ndarray) -> int:
    F = np.asarray(points, dtype=float)
    z = np.asarray(z_ref, dtype=float)
    return int((F < z).all(axis=1).sum())


def normalized_hypervolume(
    points: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    ref_coordinate: float = 1.1,
) -> tuple[float, int]:
    """Hypervolume after scaling objectives by reference-front bounds.

    Each objective is mapped through (f - lower) / (upper - lower) and the
    reference point sits at ``ref_coordinate`` per axis.  Returns the value
    and the number of points that contributed.
    """
    F = np.asarray(points, dtype=float)
    lo = np.asarray(lower, dtype=float)
    hi = np.asarray(upper, dtype=float)
    span = hi - lo
    if np.any(span < 0):
        raise ValueError("upper bound below lower bound")
    span = np.where(span < 1e-12, 1.0, span)  # degenerate axis: raw offsets
    scaled = (F - lo) / span
    z = np.full(F.shape[1], ref_coordinate)
    return hypervolume(scaled, z), strictly_dominating_count(scaled, z)


def ms2(ref: ReferenceFront | np.ndarray, approx: np.ndarray) -> float:
    """Gated maximum spread.

    The value is zero unless the approximation's range overlaps the
    reference range in every objective (touching counts as overlap);
    otherwise it is the root-mean-square of the per-objective overlap
    fractions.  A reference objective with zero extent contributes a zero
    fraction rather than dividing by zero.  A :class:`ReferenceFront`
    supplies its stored full-candidate bounds; a bare matrix is reduced to
    its own min/max.
    """
    if isinstance(ref, ReferenceFront):
        t_lo, t_hi = ref.lower, ref.upper
        n_obj = ref.points.shape[1]
    else:
        R = _ref_points(ref)
        t_lo, t_hi = R.min(axis=0), R.max(axis=0)
        n_obj = R.shape[1]
    A = np.asarray(approx, dtype=float)
    if A.ndim != 2 or len(A) == 0:
        raise ValueError(f"approximation set must be a nonempty matrix, got {A.shape}")
    if A.shape[1] != n_obj:
        raise ValueError(
            f"objective counts differ: reference {n_obj}, approximation {A.shape[1]}"
        )
    a_lo, a_hi = A.min(axis=0), A.max(axis=0)
    if np.any(t_hi < a_lo) or np.any(a_hi < t_lo):
        return 0.0
    span = t_hi - t_lo
    overlap = np.minimum(t_hi, a_hi) - np.maximum(t_lo, a_lo)
    with np.errstate(divide="ignore", invalid="ignore"):
        frac = np.where(span > 0, overlap / np.where(span > 0, span, 1.0), 0.0)
    return float(np.sqrt((frac**2).mean()))


@dataclass(frozen=True)
class MetricRecord:
    """Run-level metric means over the environment-final snapshots."""

    migd: float
    mhv: float
    mms: float


def run_means(
    igd_series: Sequence[float],
    hv_series: Sequence[float],
    ms_series: Sequence[float],
) -> MetricRecord:
    n = len(igd_series)
    if n == 0 or len(hv_series) != n or len(ms_series) != n:
        raise ValueError(
            f"series lengths must match and be nonzero: "
            f"{len(igd_series)}, {len(hv_series)}, {len(ms_series)}"
        )
    return MetricRecord(
        migd=float(np.mean(igd_series)),
        mhv=float(np.mean(hv_series)),
        mms=float(np.mean(ms_series)),
    )


def aggregate(
    values: Mapping[str, Mapping[Hashable, Sequence[float]]]
) -> float:
    """Mean over problems of mean over configurations of mean over repeats."""
    if not values:
        raise ValueError("nothing to aggregate")
    missing = [
        f"{problem}/{cfg}"
        for problem, cfgs in values.items()
        for cfg, reps in cfgs.items()
        if len(reps) == 0
    ]
    missing.extend(f"{problem}/<no configs>" for problem, cfgs in values.items() if not cfgs)
    if missing:
        raise ValueError(f"empty aggregation cells: {', '.join(sorted(missing))}")
    problem_means = [
        float(np.mean([float(np.mean(reps)) for reps in cfgs.values()]))
        for cfgs in values.values()
    ]
    return float(np.mean(problem_means))


@dataclass(frozen=True)
class FriedmanResult:
    """Average ranks per algorithm plus the tie-corrected test statistic."""

    rank_matrix: np.ndarray  # (instances, algorithms)
    mean_ranks: np.ndarray  # (algorithms,)
    chi2: float
    p_value: float


def _average_ranks(row: np.ndarray) -> np.ndarray:
    """Rank 1 = smallest; equal values share the average of their positions."""
    order = np.argsort(row, kind="stable")
    ranks = np.empty(len(row))
    i = 0
    while i < len(row):
        j = i
        while j + 1 < len(row) and row[order[j + 1]] == row[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def friedman(scores: np.ndarray, higher_better: bool = False) -> FriedmanResult:
    """Friedman test over a (instances x algorithms) score table.

    By default lower scores are better (rank 1); pass ``higher_better`` for
    metrics where larger values win.
    """
    S = np.asarray(scores, dtype=float)
    if S.ndim != 2 or S.shape[0] < 1 or S.shape[1] < 2:
        raise ValueError(
            f"need at least one instance and two algorithms, got {S.shape}"
        )
    if higher_better:
        S = -S
    n, k = S.shape
    ranks = np.vstack([_average_ranks(row) for row in S])
    mean_ranks = ranks.mean(axis=0)
    stat = 12.0 * n / (k * (k + 1)) * float(((mean_ranks - (k + 1) / 2.0) ** 2).sum())
    # Tie correction: deflate by the summed cubic tie weights.
    tie_sum = 0.0
    for row in S:
        _, counts = np.unique(row, return_counts=True)
        tie_sum += float((counts**3 - counts).sum())
    correction = 1.0 - tie_sum / (n * (k**3 - k))
    if correction <= 0.0:
        chi2 = 0.0  # every instance fully tied: no discrimination at all
    else:
        chi2 = stat / correction
    p = float(_chi2_dist.sf(chi2, k - 1))
    return FriedmanResult(rank_matrix=ranks, mean_ranks=mean_ranks, chi2=chi2, p_value=p)

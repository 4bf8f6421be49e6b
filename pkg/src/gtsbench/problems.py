"""The GTS family of dynamic multi-objective benchmark problems.

Eleven problems (``GTS1`` .. ``GTS11``) share one skeleton: a head block
``x_I`` of one or two position variables shapes the front, and two distance
blocks ``x_II1`` / ``x_II2`` are pulled toward moving anchors ``h1(x_I, t)``
and ``h2(x_I, t)`` by quadratic penalties through configurable interaction
matrices.  The penalty

    g_base = 1 + Q1^(1/p) + Q2^(1/p),   Qj = (x_IIj - hj)^T R_j (x_IIj - hj)

equals 1 exactly on the Pareto set.  GTS6, GTS7 and GTS8 add time linkage:
their anchors are scaled by a factor ``phi`` that grows with how badly the
previous environment was solved, so early mistakes deform later landscapes.

Batch evaluation uses fixed-axis reductions only (no BLAS dispatch), so each
row of a batch is bitwise identical to evaluating that row alone.
"""

from __future__ import annotations

import bisect
import enum
import json
import math
import os
import tempfile
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .dynamics import EnvScalars, Schedule, env_scalars
from .matrices import (
    InteractionMatrix,
    InteractionMatrixSpec,
    MatrixGroup,
    build_matrix,
)

__all__ = [
    "DEFAULT_DIMENSION",
    "DEFAULT_FRONT_SIZES",
    "PROBLEM_IDS",
    "PhiMode",
    "LinkageState",
    "ProblemInstance",
    "ReferenceFront",
    "parse_selection",
    "make_instance",
    "evaluate",
    "evaluate_batch",
    "g_base",
    "g_base_batch",
    "g_linkage",
    "g_linkage_batch",
    "phi_update",
    "sample_ps",
    "sample_pf",
    "reference_front",
    "front_cache_dir",
    "knee_point",
    "knee_index",
    "extreme_indices",
    "hull_distances",
    "non_dominated_mask",
]

DEFAULT_DIMENSION = 10
DEFAULT_POWER = 1.0
# Default reference-front sizes by objective count.
DEFAULT_FRONT_SIZES = {2: 1500, 3: 2500}
_OVERSAMPLE = 8
_BOUND_TOL = 1e-9

PROBLEM_IDS = tuple(f"GTS{k}" for k in range(1, 12))
_TWO_HEAD = frozenset({"GTS2", "GTS5", "GTS8", "GTS9", "GTS10", "GTS11"})
_THREE_OBJ = frozenset({"GTS9", "GTS10", "GTS11"})
_LINKED = frozenset({"GTS6", "GTS7", "GTS8"})

# Per-segment variable bounds: (head, mid, tail).
_BOUNDS: dict[str, tuple[tuple[float, float], ...]] = {
    "GTS1": ((0.0, 1.0), (-1.0, 1.0), (-1.0, 2.0)),
    "GTS2": ((0.0, 1.0), (0.0, 1.0), (-1.0, 2.0)),
    "GTS3": ((0.0, 1.0), (-1.0, 1.0), (-1.0, 2.0)),
    "GTS4": ((0.0, 1.0), (0.0, 1.0), (-1.0, 1.0)),
    "GTS5": ((0.0, 1.0), (-1.0, 1.0), (-1.0, 2.0)),
    "GTS6": ((0.0, 1.0), (-1.0, 1.0), (-1.0, 2.0)),
    "GTS7": ((-1.0, 2.5), (-1.0, 1.0), (0.0, 1.0)),
    "GTS8": ((0.0, 1.0), (0.0, 1.0), (-1.0, 2.0)),
    "GTS9": ((0.0, 1.0), (0.0, 1.0), (-1.0, 1.0)),
    "GTS10": ((0.0, 1.0), (0.0, 1.0), (-1.0, 1.0)),
    "GTS11": ((0.0, 1.0), (0.0, 1.0), (-1.0, 2.0)),
}


class PhiMode(enum.Enum):
    """How the linkage factor reacts to the previous environment."""

    KNEE_DISTANCE = "knee"
    HV_BASED = "hv"
    IGD_BASED = "igd"


@dataclass(frozen=True)
class LinkageState:
    """Carry-over state of a time-linked run.

    ``phi`` scales the anchors of the current environment; knees are the
    objective vectors that produced it, kept for the run record.
    """

    phi: float = 1.0
    environment_index: int = 0
    prev_true_knee: tuple[float, ...] | None = None
    prev_est_knee: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if not self.phi >= 1.0:
            raise ValueError(f"phi must be at least 1, got {self.phi}")

    @staticmethod
    def initial() -> "LinkageState":
        return LinkageState()


@dataclass(frozen=True)
class ProblemInstance:
    """One fully configured benchmark problem.

    ``power`` is the penalty exponent knob (each Q enters as Q^(1/power));
    time-linked problems always use the plain quadratic (power 1) so that the
    optimum shift composes linearly with ``phi``.  ``phi_mode`` selects the
    linkage update rule and is ignored for problems without linkage.
    """

    problem_id: str
    dimension: int = DEFAULT_DIMENSION
    group: MatrixGroup = MatrixGroup.IDENTITY
    schedule: Schedule = Schedule.REGULAR
    power: float = DEFAULT_POWER
    phi_mode: PhiMode = PhiMode.KNEE_DISTANCE

    def __post_init__(self) -> None:
        if self.problem_id not in PROBLEM_IDS:
            raise ValueError(f"unknown problem id {self.problem_id!r}")
        if self.dimension < 4:
            raise ValueError(
                f"dimension must be at least 4, got {self.dimension}"
            )
        if self.power <= 0:
            raise ValueError(f"penalty exponent must be positive, got {self.power}")

    @property
    def n_head(self) -> int:
        return 2 if self.problem_id in _TWO_HEAD else 1

    @property
    def n_mid(self) -> int:
        return self.dimension // 2 - 1

    @property
    def n_tail(self) -> int:
        return self.dimension - self.dimension // 2 - self.n_head + 1

    @property
    def n_objectives(self) -> int:
        return 3 if self.problem_id in _THREE_OBJ else 2

    @property
    def time_linked(self) -> bool:
        return self.problem_id in _LINKED

    @cached_property
    def matrix_mid(self) -> InteractionMatrix:
        return build_matrix(InteractionMatrixSpec(self.group, self.n_mid))

    @cached_property
    def matrix_tail(self) -> InteractionMatrix:
        return build_matrix(InteractionMatrixSpec(self.group, self.n_tail))

    @cached_property
    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        head, mid, tail = _BOUNDS[self.problem_id]
        lower = np.array(
            [head[0]] * self.n_head + [mid[0]] * self.n_mid + [tail[0]] * self.n_tail
        )
        upper = np.array(
            [head[1]] * self.n_head + [mid[1]] * self.n_mid + [tail[1]] * self.n_tail
        )
        return lower, upper

    @property
    def selection(self) -> str:
        s = f"{self.problem_id}:{self.group.value}"
        if self.time_linked:
            s += f":linkage={self.phi_mode.value}"
        return s


def parse_selection(text: str) -> tuple[str, MatrixGroup | None, PhiMode | None]:
    """Parse ``"GTS<k>[:group<1|2|3>][:linkage=<knee|hv|igd>]"``."""
    parts = text.split(":")
    pid = parts[0]
    if pid not in PROBLEM_IDS:
        raise ValueError(f"unknown problem id {pid!r} in selection {text!r}")
    group: MatrixGroup | None = None
    mode: PhiMode | None = None
    for token in parts[1:]:
        if token in ("group1", "group2", "group3"):
            if group is not None:
                raise ValueError(f"duplicate group token in selection {text!r}")
            group = MatrixGroup(token)
        elif token.startswith("linkage="):
            if pid not in _LINKED:
                raise ValueError(
                    f"{pid} has no time linkage; token {token!r} is invalid"
                )
            if mode is not None:
                raise ValueError(f"duplicate linkage token in selection {text!r}")
            mode = PhiMode(token[len("linkage="):])
        else:
            raise ValueError(f"unrecognized token {token!r} in selection {text!r}")
    return pid, group, mode


def make_instance(
    selection: str,
    dimension: int = DEFAULT_DIMENSION,
    group: MatrixGroup = MatrixGroup.IDENTITY,
    schedule: Schedule = Schedule.REGULAR,
    power: float = DEFAULT_POWER,
) -> ProblemInstance:
    """Build an instance from a selection string.

    A group or linkage mode embedded in the string overrides the keyword.
    """
    pid, sel_group, sel_mode = parse_selection(selection)
    return ProblemInstance(
        problem_id=pid,
        dimension=dimension,
        group=sel_group if sel_group is not None else group,
        schedule=schedule,
        power=power,
        phi_mode=sel_mode if sel_mode is not None else PhiMode.KNEE_DISTANCE,
    )


def _pow_nonneg(base: np.ndarray, expo: float) -> np.ndarray:
    # Guard fractional powers against float-noise negatives.
    return np.power(np.maximum(base, 0.0), expo)


def _sigmoid_anchor(alpha: float, x1: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(alpha * (x1 - 0.5)))


def _guarded_arctan_cot(t: float) -> float:
    # cot(3 pi t^2) blows up when 3 t^2 is an integer; the definition pins
    # those times to an effectively-zero argument instead.
    r = 3.0 * t * t
    if abs(r - round(r)) < 1e-12:
        c = 1e-32
    else:
        c = 1.0 / math.tan(math.pi * r)
    return abs(math.atan(c)) / math.pi


def _anchor_mid(pid: str, sc: EnvScalars, t: float, x1: np.ndarray) -> np.ndarray:
    """h1: target profile for the x_II1 block, elementwise over x1."""
    if pid in ("GTS1", "GTS5", "GTS6", "GTS7"):
        return np.full_like(x1, math.cos(0.5 * math.pi * t))
    if pid == "GTS2":
        return np.full_like(x1, _guarded_arctan_cot(t))
    if pid == "GTS3":
        return sc.g_sev * np.sin(4.0 * math.pi * x1) / (1.0 + abs(sc.g_sev))
    if pid in ("GTS4", "GTS10", "GTS11"):
        return np.full_like(x1, abs(sc.g_sev))
    # GTS8, GTS9
    return _sigmoid_anchor(sc.alpha, x1)


def _anchor_tail(pid: str, sc: EnvScalars, t: float, x1: np.ndarray) -> np.ndarray:
    """h2: target profile for the x_II2 block, elementwise over x1."""
    if pid in ("GTS1", "GTS2", "GTS3", "GTS5", "GTS6", "GTS8", "GTS11"):
        return sc.g_sev + _pow_nonneg(x1, sc.h_exp)
    if pid == "GTS4":
        return sc.g_sev * np.sin(4.0 * math.pi * x1) / (1.0 + abs(sc.g_sev))
    if pid == "GTS7":
        return _sigmoid_anchor(sc.alpha, x1)
    if pid == "GTS9":
        return np.sin(t * x1)
    # GTS10
    return -0.5 + np.abs(sc.g_sev * np.sin(4.0 * math.pi * x1)) / (
        0.5 * (1.0 + abs(sc.g_sev))
    )


def _quad_batch(entries: np.ndarray, d: np.ndarray) -> np.ndarray:
    # Fixed-axis sums keep each row independent of batch size (no BLAS).
    w = (d[:, None, :] * entries[None, :, :]).sum(axis=-1)
    return (w * d).sum(axis=-1)


def _quad_limit(entries: np.ndarray, block: np.ndarray, anchor: np.ndarray) -> np.ndarray:
    """Per-row limit of the shifted quadratic as the anchor scale grows."""
    q = _quad_batch(entries, block)
    return np.where(anchor == 0.0, q, np.inf)


def _shifted_quads(
    entries: np.ndarray, block: np.ndarray, anchor: np.ndarray, phi: float
) -> np.ndarray:
    """(block - phi*anchor)^T R (block - phi*anchor) per row, for finite phi.

    A huge linkage factor can push the scaled anchor past the float range;
    those rows saturate to +inf instead of letting inf * 0 terms in the
    matrix product decay into nan.
    """
    with np.errstate(over="ignore"):
        shift = phi * anchor
        ok = np.isfinite(shift)
        if ok.all():
            return _quad_batch(entries, block - shift[:, None])
        d = block - np.where(ok, shift, 0.0)[:, None]
        return np.where(ok, _quad_batch(entries, d), np.inf)


def _penalty_batch(
    inst: ProblemInstance, X: np.ndarray, t: float, phi: float
) -> np.ndarray:
    """1 + Q1^(1/p) + Q2^(1/p) with anchors scaled by phi."""
    sc = env_scalars(t)
    m = inst.n_head
    x1 = X[:, 0]
    h_mid = _anchor_mid(inst.problem_id, sc, t, x1)
    h_tail = _anchor_tail(inst.problem_id, sc, t, x1)
    if math.isfinite(phi):
        q_mid = _shifted_quads(
            inst.matrix_mid.entries, X[:, m : m + inst.n_mid], h_mid, phi
        )
        q_tail = _shifted_quads(
            inst.matrix_tail.entries, X[:, m + inst.n_mid :], h_tail, phi
        )
    else:
        # phi saturated to infinity: a zero anchor stays put (phi * 0 = 0
        # for every real phi), any nonzero anchor sends its block's
        # displacement, and with it the quadratic, to +inf.  Computed
        # directly so IEEE inf * 0 terms cannot turn the result into nan.
        q_mid = _quad_limit(inst.matrix_mid.entries, X[:, m : m + inst.n_mid], h_mid)
        q_tail = _quad_limit(inst.matrix_tail.entries, X[:, m + inst.n_mid :], h_tail)
    # Linked problems keep the plain quadratic so the shifted optimum stays
    # exactly at phi * h.
    p = 1.0 if inst.time_linked else inst.power
    if p != 1.0:
        q_mid = _pow_nonneg(q_mid, 1.0 / p)
        q_tail = _pow_nonneg(q_tail, 1.0 / p)
    return 1.0 + q_mid + q_tail


def _check_batch(inst: ProblemInstance, X: np.ndarray, t: float) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != inst.dimension:
        raise ValueError(
            f"expected shape (n, {inst.dimension}), got {X.shape}"
        )
    if not math.isfinite(t) or t < 0:
        raise ValueError(f"time value must be finite and nonnegative, got {t}")
    lower, upper = inst.bounds
    if np.any(X < lower - _BOUND_TOL) or np.any(X > upper + _BOUND_TOL):
        raise ValueError("decision vector outside the search box")
    return X


def g_base_batch(inst: ProblemInstance, X: np.ndarray, t: float) -> np.ndarray:
    """Distance penalty at the unshifted anchors; equals 1 on the PS."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != inst.dimension:
        raise ValueError(f"expected shape (n, {inst.dimension}), got {X.shape}")
    return _penalty_batch(inst, X, t, 1.0)


def g_base(inst: ProblemInstance, x: np.ndarray, t: float) -> float:
    return float(g_base_batch(inst, np.asarray(x, dtype=float)[None, :], t)[0])


def g_linkage_batch(
    inst: ProblemInstance, X: np.ndarray, t: float, state: LinkageState
) -> np.ndarray:
    """Distance penalty with anchors scaled by the carried-over phi."""
    if not inst.time_linked:
        raise ValueError(f"{inst.problem_id} has no time linkage")
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != inst.dimension:
        raise ValueError(f"expected shape (n, {inst.dimension}), got {X.shape}")
    return _penalty_batch(inst, X, t, state.phi)


def g_linkage(
    inst: ProblemInstance, x: np.ndarray, t: float, state: LinkageState
) -> float:
    return float(
        g_linkage_batch(inst, np.asarray(x, dtype=float)[None, :], t, state)[0]
    )


def phi_update(
    state: LinkageState | None,
    true_knee: np.ndarray | None = None,
    est_knee: np.ndarray | None = None,
    mode: PhiMode = PhiMode.KNEE_DISTANCE,
    aux: float | None = None,
) -> LinkageState:
    """Advance the linkage state across an environment boundary.

    Passing ``state=None`` constructs the first environment's state, which
    has ``phi = 1`` regardless of the other arguments.  Later calls:

    * KNEE_DISTANCE: ``phi = 1 + ||true_knee - est_knee||``.
    * HV_BASED: ``phi = 2 - aux`` with ``aux`` the previous normalized
      hypervolume, required to lie in [0, 1].
    * IGD_BASED: ``phi = exp(aux)`` with ``aux`` the previous IGD, >= 0.
    """
    if state is None:
        return LinkageState()
    if mode is PhiMode.KNEE_DISTANCE:
        if true_knee is None or est_knee is None:
            raise ValueError("knee distance mode needs both knee vectors")
        a = np.asarray(true_knee, dtype=float)
        b = np.asarray(est_knee, dtype=float)
        if a.shape != b.shape:
            raise ValueError(f"knee shapes differ: {a.shape} vs {b.shape}")
        # hypot scales internally, so a huge but representable distance does
        # not overflow; a hopeless estimate saturates the factor to +inf.
        dist = math.hypot(*(a - b))
        if math.isnan(dist):
            raise ValueError(f"knee distance is undefined for {a} vs {b}")
        phi = 1.0 + dist
    elif mode is PhiMode.HV_BASED:
        if aux is None or not 0.0 <= aux <= 1.0:
            raise ValueError(
                f"hypervolume feedback must be normalized to [0, 1], got {aux}"
            )
        phi = 2.0 - aux
    else:
        if aux is None or aux < 0.0:
            raise ValueError(f"IGD feedback must be nonnegative, got {aux}")
        try:
            phi = math.exp(aux)
        except OverflowError:
            phi = math.inf
    return LinkageState(
        phi=phi,
        environment_index=state.environment_index + 1,
        prev_true_knee=None if true_knee is None else tuple(np.asarray(true_knee, dtype=float)),
        prev_est_knee=None if est_knee is None else tuple(np.asarray(est_knee, dtype=float)),
    )


def evaluate_batch(
    inst: ProblemInstance,
    X: np.ndarray,
    t: float,
    state: LinkageState | None = None,
) -> np.ndarray:
    """Objective matrix for a batch of decision vectors at time ``t``."""
    X = _check_batch(inst, X, t)
    if state is not None and not inst.time_linked:
        raise ValueError(f"{inst.problem_id} has no time linkage state")
    phi = 1.0 if state is None else state.phi
    pen = _penalty_batch(inst, X, t, phi)
    sc = env_scalars(t)
    pid = inst.problem_id
    x1 = X[:, 0]

    if pid in ("GTS1", "GTS6"):
        g = pen
        f1 = x1
        f2 = g * (1.0 - _pow_nonneg(x1 / g, sc.h_exp))
        return np.stack([f1, f2], axis=1)
    if pid == "GTS2":
        g = pen
        f1 = 0.5 * x1 + X[:, 1]
        f2 = g * (2.8 - _pow_nonneg(f1 / g, sc.h_exp))
        return np.stack([f1, f2], axis=1)
    if pid == "GTS3":
        g = pen
        wave = 0.1 * np.sin(3.0 * math.pi * x1)
        f1 = g * _pow_nonneg(x1 + wave, sc.beta)
        f2 = g * _pow_nonneg(1.0 - x1 + wave, sc.beta)
        return np.stack([f1, f2], axis=1)
    if pid == "GTS4":
        g = pen - 0.5 + 0.25 * math.sin(0.3 * math.pi * t)
        f1 = g * (1.0 + t) / (x1 + 3.0)
        f2 = g * (x1 + 3.0) / (1.0 + t)
        return np.stack([f1, f2], axis=1)
    if pid == "GTS5":
        g = pen + 0.5 + 0.5 * sc.g_sev
        u = 0.5 * x1 + X[:, 1]
        wave = 0.02 * np.sin(sc.omega * math.pi * u)
        f1 = g * (u + wave)
        f2 = g * (1.6 - u + wave)
        return np.stack([f1, f2], axis=1)
    if pid == "GTS7":
        g = pen
        f1 = g * _pow_nonneg(np.abs(x1 - sc.a), sc.h_exp)
        f2 = g * _pow_nonneg(np.abs(x1 - sc.a - sc.b), sc.h_exp)
        return np.stack([f1, f2], axis=1)
    if pid == "GTS8":
        g = pen + 0.25 * abs(math.cos(0.3 * math.pi * t))
        f1 = 0.5 * x1 + X[:, 1]
        f2 = g * (2.8 - _pow_nonneg(f1 / g, sc.h_exp))
        return np.stack([f1, f2], axis=1)
    if pid == "GTS9":
        g = pen + abs(math.cos(0.27 * math.pi * t))
        a1 = 0.5 * math.pi * x1
        a2 = 0.5 * math.pi * X[:, 1]
        f1 = g * np.cos(a1) * np.cos(a2)
        f2 = g * np.cos(a1) * np.sin(a2)
        f3 = g * np.sin(a1)
        return np.stack([f1, f2, f3], axis=1)
    if pid == "GTS10":
        g = pen
        k6 = math.floor(6.0 * sc.g_sev)
        a1 = 0.5 * math.pi * x1
        a2 = 0.5 * math.pi * X[:, 1]
        s1, s2 = np.sin(a1), np.sin(a2)
        mix = (
            s1 * s1 + s1 * np.cos(k6 * math.pi * x1) ** 2
            + s2 * s2 + s2 * np.cos(k6 * math.pi * X[:, 1]) ** 2
        )
        f1 = g * np.cos(a1) ** 2
        f2 = g * np.cos(a2) ** 2
        f3 = g * mix
        return np.stack([f1, f2, f3], axis=1)
    # GTS11
    g = pen
    x2 = X[:, 1]
    y = 0.5 + sc.g_sev * (x1 - 0.5)
    sy = y + 0.05 * np.sin(6.0 * math.pi * y)
    sx2 = x2 + 0.05 * np.sin(6.0 * math.pi * x2)
    f1 = g * (1.05 - y + 0.05 * np.sin(6.0 * math.pi * y))
    f2 = g * (1.05 - x2 + 0.05 * np.sin(6.0 * math.pi * x2)) * sy
    f3 = g * sx2 * sy
    return np.stack([f1, f2, f3], axis=1)


def evaluate(
    inst: ProblemInstance,
    x: np.ndarray,
    t: float,
    state: LinkageState | None = None,
) -> np.ndarray:
    """Objective vector for a single decision vector."""
    return evaluate_batch(inst, np.asarray(x, dtype=float)[None, :], t, state)[0]


# ---------------------------------------------------------------------------
# Pareto set / front sampling


def _head_grid(inst: ProblemInstance, t: float, count: int) -> np.ndarray:
    """Deterministic grid over the position block that spans the PS."""
    if count < 1:
        raise ValueError(f"sample count must be positive, got {count}")
    if inst.n_head == 1:
        if inst.problem_id == "GTS7":
            sc = env_scalars(t)
            lo, hi = sc.a, sc.a + sc.b
        else:
            lo, hi = _BOUNDS[inst.problem_id][0]
        return np.linspace(lo, hi, count)[:, None]
    side = math.isqrt(count - 1) + 1 if count > 1 else 1
    axis = np.linspace(0.0, 1.0, side)
    u, v = np.meshgrid(axis, axis, indexing="ij")
    return np.stack([u.ravel(), v.ravel()], axis=1)


def sample_ps(inst: ProblemInstance, t: float, count: int) -> np.ndarray:
    """Decision vectors on the (phi = 1) Pareto set.

    One-variable heads get ``count`` evenly spaced samples; two-variable
    heads get the smallest square grid with at least ``count`` nodes.
    """
    head = _head_grid(inst, t, count)
    sc = env_scalars(t)
    x1 = head[:, 0]
    h_mid = _anchor_mid(inst.problem_id, sc, t, x1)
    h_tail = _anchor_tail(inst.problem_id, sc, t, x1)
    X = np.empty((head.shape[0], inst.dimension))
    X[:, : inst.n_head] = head
    X[:, inst.n_head : inst.n_head + inst.n_mid] = h_mid[:, None]
    X[:, inst.n_head + inst.n_mid :] = h_tail[:, None]
    return X


def _nd_mask_2d(F: np.ndarray) -> np.ndarray:
    order = np.lexsort((F[:, 1], F[:, 0]))
    f2 = F[order, 1]
    best = np.minimum.accumulate(f2)
    keep_sorted = np.empty(len(F), dtype=bool)
    keep_sorted[0] = True
    # Strict improvement in f2 over everything earlier in (f1, f2) order.
    keep_sorted[1:] = f2[1:] < best[:-1]
    mask = np.empty(len(F), dtype=bool)
    mask[order] = keep_sorted
    return mask


def _nd_mask_3d(F: np.ndarray) -> np.ndarray:
    order = np.lexsort((F[:, 1], F[:, 0], F[:, 2]))
    keep = np.zeros(len(F), dtype=bool)
    # Staircase of (f1, f2) pairs kept so far: f1 ascending, f2 strictly
    # descending.  A new point is dominated iff some kept point with
    # f1 <= q1 also has f2 <= q2 (rows are unique, so <= means dominated).
    stair_f1: list[float] = []
    stair_f2: list[float] = []
    for idx in order:
        q1, q2 = F[idx, 0], F[idx, 1]
        pos = bisect.bisect_right(stair_f1, q1)
        if pos > 0 and stair_f2[pos - 1] <= q2:
            continue
        keep[idx] = True
        # Insert and drop staircase entries this point makes redundant.
        lo = bisect.bisect_left(stair_f1, q1)
        hi = lo
        while hi < len(stair_f1) and stair_f2[hi] >= q2:
            hi += 1
        stair_f1[lo:hi] = [q1]
        stair_f2[lo:hi] = [q2]
    return keep


def non_dominated_mask(F: np.ndarray) -> np.ndarray:
    """Boolean mask of rows not dominated by any other row (minimization).

    Duplicate rows do not dominate each other, so all copies of a
    non-dominated vector are kept.
    """
    F = np.asarray(F, dtype=float)
    if F.ndim != 2:
        raise ValueError(f"expected a 2-D objective matrix, got shape {F.shape}")
    uniq, inverse = np.unique(F, axis=0, return_inverse=True)
    if uniq.shape[1] == 2:
        umask = _nd_mask_2d(uniq)
    elif uniq.shape[1] == 3:
        umask = _nd_mask_3d(uniq)
    else:
        umask = np.ones(len(uniq), dtype=bool)
        for i in range(len(uniq)):
            le = (uniq <= uniq[i]).all(axis=1)
            lt = (uniq < uniq[i]).any(axis=1)
            le[i] = False
            if np.any(le & lt):
                umask[i] = False
    return umask[inverse]


def _lex_smallest(F: np.ndarray, idxs: np.ndarray) -> int:
    """Index (into F) of the lexicographically smallest row among idxs."""
    sub = F[idxs]
    order = np.lexsort(tuple(sub[:, j] for j in reversed(range(sub.shape[1]))))
    return int(idxs[order[0]])


def extreme_indices(F: np.ndarray) -> list[int]:
    out = []
    for j in range(F.shape[1]):
        tied = np.flatnonzero(F[:, j] == F[:, j].min())
        out.append(_lex_smallest(F, tied))
    return out


def hull_distances(F: np.ndarray, extremes: list[int]) -> np.ndarray:
    """Distance of every row to the affine hull of the extreme rows."""
    base = F[extremes[0]]
    dirs = []
    for e in extremes[1:]:
        d = F[e] - base
        for u in dirs:
            d = d - np.dot(d, u) * u
        norm = np.linalg.norm(d)
        if norm > 1e-12:
            dirs.append(d / norm)
    rel = F - base
    proj = np.zeros_like(rel)
    for u in dirs:
        proj += np.outer(rel @ u, u)
    return np.linalg.norm(rel - proj, axis=1)


def knee_index(F: np.ndarray) -> int:
    """Row index of the knee: farthest from the hull of the extreme points.

    Ties resolve to the lexicographically smallest objective vector; a
    single-point front is its own knee.
    """
    F = np.asarray(F, dtype=float)
    if F.ndim != 2 or len(F) == 0:
        raise ValueError(f"expected a nonempty objective matrix, got {F.shape}")
    if len(F) == 1:
        return 0
    if not np.isfinite(F).all():
        # A front with saturated objective values has no usable hull
        # geometry; fall back to the deterministic tie-break rule alone.
        return _lex_smallest(F, np.arange(len(F)))
    dist = hull_distances(F, extreme_indices(F))
    tied = np.flatnonzero(dist == dist.max())
    return _lex_smallest(F, tied)


def knee_point(F: np.ndarray) -> np.ndarray:
    return np.asarray(F, dtype=float)[knee_index(F)].copy()


@dataclass(frozen=True)
class ReferenceFront:
    """Sampled analytical front at one time value.

    ``points`` are objective vectors, ``xs`` their decision preimages on the
    PS.  ``lower``/``upper`` bound the full non-dominated candidate set (not
    just the retained subset).  ``degenerate`` marks fronts where fewer
    non-dominated candidates existed than were requested.
    """

    problem_id: str
    t: float
    points: np.ndarray
    xs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    degenerate: bool = False

    @property
    def size(self) -> int:
        return len(self.points)


def _farthest_point_subset(F: np.ndarray, count: int) -> np.ndarray:
    """Greedy maximin selection seeded with the per-objective extremes."""
    seeds: list[int] = []
    for e in extreme_indices(F):
        if e not in seeds:
            seeds.append(e)
    chosen = list(seeds)
    mind = np.full(len(F), np.inf)
    for c in chosen:
        mind = np.minimum(mind, np.linalg.norm(F - F[c], axis=1))
    while len(chosen) < count:
        nxt = int(np.argmax(mind))
        chosen.append(nxt)
        mind = np.minimum(mind, np.linalg.norm(F - F[nxt], axis=1))
    return np.asarray(chosen[:count])


def sample_pf(
    inst: ProblemInstance, t: float, count: int | None = None
) -> ReferenceFront:
    """Reference front at time ``t`` from oversampled PS evaluation.

    The PS is sampled at 8x the requested density, evaluated with phi = 1,
    non-dominated filtered, and reduced by farthest-point selection.
    """
    if count is None:
        count = DEFAULT_FRONT_SIZES[inst.n_objectives]
    if count < inst.n_objectives:
        raise ValueError(f"front size {count} is too small")
    X = sample_ps(inst, t, _OVERSAMPLE * count)
    F = evaluate_batch(inst, X, t)
    mask = non_dominated_mask(F)
    F_nd, X_nd = F[mask], X[mask]
    lower = F_nd.min(axis=0)
    upper = F_nd.max(axis=0)
    if len(F_nd) < count:
        return ReferenceFront(
            inst.problem_id, t, F_nd, X_nd, lower, upper, degenerate=True
        )
    keep = _farthest_point_subset(F_nd, count)
    return ReferenceFront(
        inst.problem_id, t, F_nd[keep], X_nd[keep], lower, upper, degenerate=False
    )


# ---------------------------------------------------------------------------
# Reference front cache

_CACHE_ENV_VAR = "GTSBENCH_CACHE_DIR"


def front_cache_dir() -> Path:
    env = os.environ.get(_CACHE_ENV_VAR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "gtsbench" / "fronts"


def _front_key(inst: ProblemInstance, t: float, count: int) -> str:
    return f"{inst.problem_id}_t{t:.12f}_N{count}_D{inst.dimension}"


def reference_front(
    inst: ProblemInstance,
    t: float,
    count: int | None = None,
    cache_dir: Path | None = None,
) -> ReferenceFront:
    """Cached :func:`sample_pf`; files are written atomically so concurrent
    workers can share one cache directory."""
    if count is None:
        count = DEFAULT_FRONT_SIZES[inst.n_objectives]
    directory = Path(cache_dir) if cache_dir is not None else front_cache_dir()
    key = _front_key(inst, t, count)
    npz_path = directory / f"{key}.npz"
    json_path = directory / f"{key}.json"
    if npz_path.exists() and json_path.exists():
        try:
            meta = json.loads(json_path.read_text())
            if (
                meta["instance"] == inst.problem_id
                and meta["N"] == count
                and meta["D"] == inst.dimension
                and abs(meta["t"] - t) < 1e-12
            ):
                with np.load(npz_path) as data:
                    return ReferenceFront(
                        problem_id=inst.problem_id,
                        t=t,
                        points=data["points"].copy(),
                        xs=data["xs"].copy(),
                        lower=data["lower"].copy(),
                        upper=data["upper"].copy(),
                        degenerate=bool(meta.get("degenerate", False)),
                    )
        except (KeyError, ValueError, OSError):
            pass  # fall through and rebuild a corrupt entry
    front = sample_pf(inst, t, count)
    directory.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".npz.tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            np.savez(
                fh,
                points=front.points,
                xs=front.xs,
                lower=front.lower,
                upper=front.upper,
            )
        os.replace(tmp, npz_path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    meta = {
        "instance": inst.problem_id,
        "t": t,
        "N": count,
        "D": inst.dimension,
        "bounds": {
            "lower": front.lower.tolist(),
            "upper": front.upper.tolist(),
        },
        "degenerate": front.degenerate,
    }
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".json.tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(meta, fh, sort_keys=True)
        os.replace(tmp, json_path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return front

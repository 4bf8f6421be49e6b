"""Interaction matrices for the quadratic distance penalties.

Each benchmark problem penalizes deviation from the moving optimum through a
quadratic form ``d^T R d``.  Three matrix groups are supported:

* ``IDENTITY``: the plain squared Euclidean norm.
* ``IMBALANCED_DIAGONAL``: diag(1..n); coordinates are weighted unequally.
* ``SYMMETRIC_INTERACTION``: an integer symmetric matrix with increasing
  diagonal ``start, start+1, ..., start+n-1`` and a 0/1 off-diagonal mask.
  With ``start >= n`` every leading principal minor is positive (each
  elimination step keeps strict diagonal dominance), so the matrix is
  positive definite and the smallest eigenvalue is at least 1.

Positive definiteness is re-verified on construction via fraction-free
Gaussian elimination: integer inputs stay exact, so no spurious sign flips.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MatrixGroup",
    "InteractionMatrixSpec",
    "InteractionMatrix",
    "NotPositiveDefiniteError",
    "build_matrix",
    "verify_positive_definite",
    "imbalance_ratio",
    "quadratic_form",
    "matrix_to_dict",
    "matrix_from_dict",
]

PIVOT_TOLERANCE = 1e-12


class MatrixGroup(enum.Enum):
    IDENTITY = "group1"
    IMBALANCED_DIAGONAL = "group2"
    SYMMETRIC_INTERACTION = "group3"


class NotPositiveDefiniteError(ValueError):
    """A leading principal minor is not strictly positive.

    Attributes:
        index: 1-based order of the first offending minor.
        minors: minors computed up to and including the offending one.
    """

    def __init__(self, index: int, minors: np.ndarray):
        self.index = index
        self.minors = minors
        super().__init__(
            f"leading principal minor {index} is not positive "
            f"(value {minors[index - 1]:.6g})"
        )


@dataclass(frozen=True)
class InteractionMatrixSpec:
    """Recipe for one interaction matrix.

    ``start`` and ``mask`` apply to the SYMMETRIC_INTERACTION group only:
    ``start`` is the first diagonal entry (must be >= dim) and ``mask`` an
    optional symmetric 0/1 matrix with zero diagonal selecting which
    off-diagonal pairs interact (default: all of them).  ``permutation``
    optionally relabels coordinates (experimental hook for per-environment
    variation; identity when omitted).
    """

    group: MatrixGroup
    dim: int
    start: int | None = None
    mask: tuple[tuple[int, ...], ...] | None = None
    permutation: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError(f"matrix dimension must be positive, got {self.dim}")
        if self.group is not MatrixGroup.SYMMETRIC_INTERACTION:
            if self.start is not None or self.mask is not None:
                raise ValueError("start/mask only apply to the interaction group")
        elif self.start is not None and self.start < self.dim:
            raise ValueError(
                f"diagonal start {self.start} must be at least dim {self.dim} "
                "to guarantee positive definiteness"
            )
        if self.mask is not None:
            _validate_mask(self.mask, self.dim)
        if self.permutation is not None and sorted(self.permutation) != list(
            range(self.dim)
        ):
            raise ValueError(f"not a permutation of 0..{self.dim - 1}: "
                             f"{self.permutation}")


@dataclass(eq=False)
class InteractionMatrix:
    spec: InteractionMatrixSpec
    entries: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.spec.dim


def _validate_mask(mask_rows: tuple[tuple[int, ...], ...], n: int) -> np.ndarray:
    mask = np.asarray(mask_rows, dtype=float)
    if mask.shape != (n, n):
        raise ValueError(f"mask shape {mask.shape} does not match dim {n}")
    if not np.array_equal(mask, mask.T):
        raise ValueError("mask must be symmetric")
    if np.any(np.diag(mask) != 0):
        raise ValueError("mask diagonal must be zero")
    if not np.all(np.isin(mask, (0.0, 1.0))):
        raise ValueError("mask entries must be 0 or 1")
    return mask


def _interaction_entries(spec: InteractionMatrixSpec) -> np.ndarray:
    n = spec.dim
    start = spec.start if spec.start is not None else n + 1
    if spec.mask is None:
        mask = np.ones((n, n)) - np.eye(n)
    else:
        mask = _validate_mask(spec.mask, n)
    return np.diag(np.arange(start, start + n, dtype=float)) + mask


def build_matrix(spec: InteractionMatrixSpec) -> InteractionMatrix:
    """Construct the matrix and verify positive definiteness."""
    n = spec.dim
    if spec.group is MatrixGroup.IDENTITY:
        entries = np.eye(n)
    elif spec.group is MatrixGroup.IMBALANCED_DIAGONAL:
        entries = np.diag(np.arange(1, n + 1, dtype=float))
    else:
        entries = _interaction_entries(spec)
    if spec.permutation is not None:
        p = np.asarray(spec.permutation)
        entries = entries[np.ix_(p, p)]
    m = InteractionMatrix(spec=spec, entries=entries)
    verify_positive_definite(m)
    return m


def _leading_minors(entries: np.ndarray) -> np.ndarray:
    """Leading principal minors via fraction-free (Bareiss) elimination.

    Raises NotPositiveDefiniteError as soon as a minor fails to clear the
    pivot tolerance, carrying the minors computed so far.
    """
    a = np.array(entries, dtype=float)
    n = a.shape[0]
    minors = np.empty(n)
    prev = 1.0
    for k in range(n):
        pivot = a[k, k]
        minors[k] = pivot
        if pivot <= PIVOT_TOLERANCE:
            raise NotPositiveDefiniteError(k + 1, minors[: k + 1].copy())
        if k < n - 1:
            rows = a[k + 1 :, k + 1 :]
            rows *= pivot
            rows -= np.outer(a[k + 1 :, k], a[k, k + 1 :])
            rows /= prev
            prev = pivot
    return minors


def verify_positive_definite(m: InteractionMatrix | np.ndarray) -> np.ndarray:
    """Return all leading principal minors, or raise if any is nonpositive."""
    entries = m.entries if isinstance(m, InteractionMatrix) else np.asarray(m)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {entries.shape}")
    return _leading_minors(entries)


def imbalance_ratio(m: InteractionMatrix) -> float:
    """max/min diagonal entry; 1.0 means coordinates are weighted equally."""
    diag = np.diag(m.entries)
    if np.any(diag <= 0):
        raise ValueError("diagonal entries must be positive")
    return float(diag.max() / diag.min())


def quadratic_form(m: InteractionMatrix, v: np.ndarray) -> float:
    """``v^T R v``.

    Uses fixed-axis sums rather than BLAS so a vector evaluated alone agrees
    bitwise with the same vector evaluated inside a batch.
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (m.dim,):
        raise ValueError(f"vector shape {v.shape} does not match dim {m.dim}")
    w = (m.entries * v[None, :]).sum(axis=-1)
    return float((w * v).sum(axis=-1))


def matrix_to_dict(m: InteractionMatrix) -> dict:
    spec = m.spec
    return {
        "group": spec.group.value,
        "dim": spec.dim,
        "start": spec.start,
        "mask": None if spec.mask is None else [list(r) for r in spec.mask],
        "permutation": None if spec.permutation is None else list(spec.permutation),
        "entries": m.entries.tolist(),
    }


def matrix_from_dict(d: dict) -> InteractionMatrix:
    """Rebuild from a descriptor; entries are re-derived and re-verified."""
    spec = InteractionMatrixSpec(
        group=MatrixGroup(d["group"]),
        dim=int(d["dim"]),
        start=d.get("start"),
        mask=None if d.get("mask") is None else tuple(
            tuple(int(x) for x in row) for row in d["mask"]
        ),
        permutation=None if d.get("permutation") is None else tuple(
            int(i) for i in d["permutation"]
        ),
    )
    m = build_matrix(spec)
    stored = np.asarray(d["entries"], dtype=float)
    if stored.shape != m.entries.shape or not np.array_equal(stored, m.entries):
        raise ValueError("stored entries disagree with the rebuilt matrix")
    return m

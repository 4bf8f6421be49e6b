"""Handle-based bindings around the gtsbench public interface.

External optimizer ecosystems drive GTS problems through three calls:
:func:`make_problem` builds an explicit-lifetime handle,
:func:`batch_evaluate` scores decision matrices bitwise-identically to the
primary implementation, and :func:`sample_pf` exposes the analytical
front.  The quality metrics are re-exported unchanged.  The experiment
loop itself stays in gtsbench so evaluation budgets remain accounted in
one place; a handle only carries the problem and, for time-linked
problems, the linkage factor the caller advances between environments.

Handles are not thread-safe; create one per worker.
"""

from __future__ import annotations

import numpy as np

from gtsbench import (
    LinkageState,
    MatrixGroup,
    Schedule,
    evaluate_batch as _evaluate_batch,
    hypervolume,
    igd,
    make_instance,
    ms2,
    parse_selection,
    phi_update,
    sample_pf as _sample_pf,
)

__all__ = [
    "BoundProblemHandle",
    "make_problem",
    "batch_evaluate",
    "sample_pf",
    "igd",
    "hypervolume",
    "ms2",
]

__version__ = "0.1.0"


class BoundProblemHandle:
    """Opaque problem handle with an explicit lifetime.

    Construct via :func:`make_problem`.  After :meth:`close` every
    evaluation or sampling call raises; closing twice is a no-op.  Usable
    as a context manager.
    """

    def __init__(self, instance) -> None:
        self._inst = instance
        self._state = LinkageState() if instance.time_linked else None
        self._closed = False

    def _require_open(self):
        if self._closed:
            raise RuntimeError("handle is closed")
        return self._inst

    @property
    def selection(self) -> str:
        return self._require_open().selection

    @property
    def dimension(self) -> int:
        return self._require_open().dimension

    @property
    def n_objectives(self) -> int:
        return self._require_open().n_objectives

    @property
    def time_linked(self) -> bool:
        return self._require_open().time_linked

    @property
    def phi(self) -> float:
        inst = self._require_open()
        if self._state is None:
            raise ValueError(f"{inst.problem_id} has no time linkage")
        return self._state.phi

    def update_phi(self, true_knee=None, est_knee=None, aux=None) -> float:
        """Advance the linkage factor after an environment change.

        Knee-distance mode takes the two knee objective vectors; the
        hypervolume and distance modes take their scalar through ``aux``.
        Returns the new factor.
        """
        inst = self._require_open()
        if self._state is None:
            raise ValueError(f"{inst.problem_id} has no time linkage")
        self._state = phi_update(
            self._state,
            None if true_knee is None else np.asarray(true_knee, dtype=float),
            None if est_knee is None else np.asarray(est_knee, dtype=float),
            inst.phi_mode,
            aux,
        )
        return self._state.phi

    def close(self) -> None:
        self._closed = True

    @property
    def closed(self) -> bool:
        return self._closed

    def __enter__(self) -> "BoundProblemHandle":
        self._require_open()
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def __repr__(self) -> str:
        status = "closed" if self._closed else "open"
        return f"BoundProblemHandle({self._inst.selection!r}, {status})"


def make_problem(
    selection: str,
    d: int = 10,
    group: int | None = None,
    schedule: str | Schedule = "regular",
) -> BoundProblemHandle:
    """Build a handle for a selection string like ``"GTS3:group2"``.

    ``group`` (1..3) applies when the selection string does not pin one;
    passing both with different values is an error rather than a silent
    override.
    """
    _, pinned, _ = parse_selection(selection)
    chosen: MatrixGroup | None = None
    if group is not None:
        if group not in (1, 2, 3):
            raise ValueError(f"group must be 1, 2 or 3, got {group}")
        chosen = MatrixGroup(f"group{group}")
        if pinned is not None and pinned is not chosen:
            raise ValueError(
                f"selection {selection!r} pins {pinned.value} but group="
                f"{group} was also given"
            )
    kwargs = {
        "dimension": d,
        "schedule": Schedule(schedule) if isinstance(schedule, str) else schedule,
    }
    # Omitted group defers to the primary's default rather than pinning one here.
    if chosen is not None:
        kwargs["group"] = chosen
    return BoundProblemHandle(make_instance(selection, **kwargs))


def batch_evaluate(handle: BoundProblemHandle, X, t: float) -> np.ndarray:
    """Objective matrix for the decision matrix ``X`` at time ``t``.

    Row ``i`` is bitwise identical to evaluating ``X[i]`` alone through
    the primary implementation.
    """
    inst = handle._require_open()
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != inst.dimension:
        raise ValueError(
            f"expected shape (n, {inst.dimension}), got {X.shape}"
        )
    return _evaluate_batch(inst, X, t, handle._state)


def sample_pf(handle: BoundProblemHandle, t: float, count: int | None = None) -> np.ndarray:
    """Analytical front points at time ``t`` as a plain matrix."""
    inst = handle._require_open()
    return _sample_pf(inst, t, count).points.copy()

"""Baseline dynamic optimizers.

All optimizers speak one plug-in contract driven by the experiment harness:

* ``initialize(lower, upper, pop_size, rng)``: allocate the population.
* ``on_change(ev, rng)``: react to a new environment (also called once right
  after initialization); must evaluate the whole population exactly once.
* ``step(ev, rng)``: one generation; must spend exactly ``pop_size``
  evaluations.
* ``final_front()``: objective vectors of the current non-dominated subset.

``ev`` is the harness's evaluation context: calling it on an (n, D) matrix
returns the (n, M) objectives at the current time and linkage state, and it
exposes ``reference_front()`` for optimizers that are allowed to cheat (the
Pareto-set oracle used as an experimental control).

Provided implementations: an elitist genetic optimizer with simulated binary
crossover, polynomial mutation and partial restart at changes; pure random
search with an elitist archive; and the oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .problems import extreme_indices, hull_distances, non_dominated_mask

__all__ = [
    "Population",
    "EvalLike",
    "DynamicOptimizer",
    "DynamicNsga2",
    "RandomSearch",
    "PsOracle",
    "nondominated_ranks",
    "crowding_distances",
    "environmental_selection",
]


@dataclass
class Population:
    X: np.ndarray
    F: np.ndarray
    generation: int = 0


class EvalLike(Protocol):
    def __call__(self, X: np.ndarray) -> np.ndarray: ...

    def reference_front(self): ...


class DynamicOptimizer(Protocol):
    def initialize(
        self,
        lower: np.ndarray,
        upper: np.ndarray,
        pop_size: int,
        rng: np.random.Generator,
    ) -> None: ...

    def on_change(self, ev: EvalLike, rng: np.random.Generator) -> None: ...

    def step(self, ev: EvalLike, rng: np.random.Generator) -> None: ...

    def final_front(self) -> np.ndarray: ...

    @property
    def population(self) -> Population: ...


def nondominated_ranks(F: np.ndarray) -> np.ndarray:
    """0-based front index per row (0 = non-dominated)."""
    F = np.asarray(F, dtype=float)
    n = len(F)
    le = (F[:, None, :] <= F[None, :, :]).all(axis=-1)
    lt = (F[:, None, :] < F[None, :, :]).any(axis=-1)
    dom = le & lt  # dom[i, j]: i dominates j
    n_dominators = dom.sum(axis=0)
    ranks = np.full(n, -1, dtype=int)
    current = np.flatnonzero(n_dominators == 0)
    counts = n_dominators.copy()
    r = 0
    while len(current):
        ranks[current] = r
        counts = counts - dom[current].sum(axis=0)
        r += 1
        current = np.flatnonzero((counts == 0) & (ranks < 0))
    return ranks


def crowding_distances(F: np.ndarray, ranks: np.ndarray) -> np.ndarray:
    """Per-front crowding distance; boundary points get +inf."""
    F = np.asarray(F, dtype=float)
    dist = np.zeros(len(F))
    for r in np.unique(ranks):
        idx = np.flatnonzero(ranks == r)
        if len(idx) <= 2:
            dist[idx] = np.inf
            continue
        for j in range(F.shape[1]):
            vals = F[idx, j]
            order = np.argsort(vals, kind="stable")
            lo = vals[order[0]]
            hi = vals[order[-1]]
            dist[idx[order[0]]] = np.inf
            dist[idx[order[-1]]] = np.inf
            # A saturated front puts +inf in the column; normalized gaps are
            # meaningless there and inf - inf would poison dist with nan.
            if np.isfinite(lo) and np.isfinite(hi) and hi > lo:
                gaps = (vals[order[2:]] - vals[order[:-2]]) / (hi - lo)
                dist[idx[order[1:-1]]] += gaps
    return dist


def environmental_selection(F: np.ndarray, count: int) -> np.ndarray:
    """Indices of the ``count`` survivors by (rank, crowding)."""
    ranks = nondominated_ranks(F)
    crowd = crowding_distances(F, ranks)
    chosen: list[int] = []
    for r in np.unique(ranks):
        idx = np.flatnonzero(ranks == r)
        if len(chosen) + len(idx) <= count:
            chosen.extend(idx.tolist())
            if len(chosen) == count:
                break
            continue
        order = np.argsort(-crowd[idx], kind="stable")
        need = count - len(chosen)
        chosen.extend(idx[order[:need]].tolist())
        break
    return np.asarray(chosen, dtype=int)


def _tournament(
    ranks: np.ndarray, crowd: np.ndarray, n_picks: int, rng: np.random.Generator
) -> np.ndarray:
    n = len(ranks)
    a, b = rng.integers(0, n, size=(2, n_picks))
    a_wins = (ranks[a] < ranks[b]) | (
        (ranks[a] == ranks[b]) & (crowd[a] > crowd[b])
    )
    tie = (ranks[a] == ranks[b]) & (crowd[a] == crowd[b])
    return np.where(a_wins | (tie & (a <= b)), a, b)


def _sbx_pairs(
    p1: np.ndarray,
    p2: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    prob: float,
    eta: float,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    n, d = p1.shape
    # All random draws happen unconditionally so the stream layout does not
    # depend on the data.
    pair_on = rng.random(n) <= prob
    var_on = rng.random((n, d)) <= 0.5
    u = rng.random((n, d))
    beta = np.where(
        u <= 0.5,
        (2.0 * u) ** (1.0 / (eta + 1.0)),
        (0.5 / (1.0 - np.where(u < 1.0, u, 0.5))) ** (1.0 / (eta + 1.0)),
    )
    active = pair_on[:, None] & var_on & (np.abs(p1 - p2) > 1e-14)
    c1 = np.where(active, 0.5 * ((1 + beta) * p1 + (1 - beta) * p2), p1)
    c2 = np.where(active, 0.5 * ((1 - beta) * p1 + (1 + beta) * p2), p2)
    return np.clip(c1, lower, upper), np.clip(c2, lower, upper)


def _polynomial_mutation(
    X: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    prob: float,
    eta: float,
    rng: np.random.Generator,
) -> np.ndarray:
    n, d = X.shape
    on = rng.random((n, d)) <= prob
    u = rng.random((n, d))
    span = upper - lower
    d1 = (X - lower) / span
    d2 = (upper - X) / span
    exp = 1.0 / (eta + 1.0)
    low_branch = (2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1) ** (eta + 1.0)) ** exp - 1.0
    high_branch = 1.0 - (
        2.0 * (1.0 - u) + (2.0 * u - 1.0) * (1.0 - d2) ** (eta + 1.0)
    ) ** exp
    delta = np.where(u <= 0.5, low_branch, high_branch)
    out = np.where(on, X + delta * span, X)
    return np.clip(out, lower, upper)


class DynamicNsga2:
    """Elitist genetic optimizer with partial restart at changes.

    Each generation breeds ``pop_size`` children by binary tournament on
    (rank, crowding), simulated binary crossover and polynomial mutation,
    then keeps the best half of parents plus children.  At an environment
    change a ``restart_fraction`` share of the population is resampled
    uniformly before everything is re-evaluated.
    """

    def __init__(
        self,
        crossover_prob: float = 0.9,
        crossover_eta: float = 20.0,
        mutation_prob: float | None = None,
        mutation_eta: float = 20.0,
        restart_fraction: float = 0.3,
    ):
        if not 0.0 <= crossover_prob <= 1.0:
            raise ValueError(f"crossover probability out of range: {crossover_prob}")
        if mutation_prob is not None and not 0.0 <= mutation_prob <= 1.0:
            raise ValueError(f"mutation probability out of range: {mutation_prob}")
        if not 0.0 <= restart_fraction <= 1.0:
            raise ValueError(f"restart fraction out of range: {restart_fraction}")
        self.crossover_prob = crossover_prob
        self.crossover_eta = crossover_eta
        self.mutation_prob = mutation_prob
        self.mutation_eta = mutation_eta
        self.restart_fraction = restart_fraction
        self._pop: Population | None = None
        self._lower: np.ndarray | None = None
        self._upper: np.ndarray | None = None

    def initialize(
        self,
        lower: np.ndarray,
        upper: np.ndarray,
        pop_size: int,
        rng: np.random.Generator,
    ) -> None:
        self._lower = np.asarray(lower, dtype=float)
        self._upper = np.asarray(upper, dtype=float)
        if pop_size < 2:
            raise ValueError(f"population size must be at least 2, got {pop_size}")
        span = self._upper - self._lower
        X = self._lower + rng.random((pop_size, len(span))) * span
        self._pop = Population(X=X, F=np.empty((pop_size, 0)), generation=0)
        self._evaluated = False

    @property
    def population(self) -> Population:
        if self._pop is None:
            raise RuntimeError("optimizer not initialized")
        return self._pop

    def _mutation_rate(self) -> float:
        if self.mutation_prob is not None:
            return self.mutation_prob
        return 1.0 / len(self._lower)

    def on_change(self, ev, rng: np.random.Generator) -> None:
        pop = self.population
        n = len(pop.X)
        n_restart = math.ceil(self.restart_fraction * n)
        if n_restart:
            idx = rng.permutation(n)[:n_restart]
            span = self._upper - self._lower
            pop.X[idx] = self._lower + rng.random((n_restart, len(span))) * span
        pop.F = ev(pop.X)
        self._evaluated = True

    def step(self, ev, rng: np.random.Generator) -> None:
        if not self._evaluated:
            raise RuntimeError("on_change must run once before stepping")
        pop = self.population
        n = len(pop.X)
        ranks = nondominated_ranks(pop.F)
        crowd = crowding_distances(pop.F, ranks)
        parents = _tournament(ranks, crowd, n_picks=n + (n % 2), rng=rng)
        p1 = pop.X[parents[0::2]]
        p2 = pop.X[parents[1::2]]
        c1, c2 = _sbx_pairs(
            p1, p2, self._lower, self._upper,
            self.crossover_prob, self.crossover_eta, rng,
        )
        children = np.empty((len(p1) * 2, pop.X.shape[1]))
        children[0::2] = c1
        children[1::2] = c2
        children = children[:n]
        children = _polynomial_mutation(
            children, self._lower, self._upper,
            self._mutation_rate(), self.mutation_eta, rng,
        )
        child_F = ev(children)
        all_X = np.vstack([pop.X, children])
        all_F = np.vstack([pop.F, child_F])
        keep = environmental_selection(all_F, n)
        pop.X = all_X[keep]
        pop.F = all_F[keep]
        pop.generation += 1

    def final_front(self) -> np.ndarray:
        pop = self.population
        return pop.F[non_dominated_mask(pop.F)].copy()


class RandomSearch:
    """Uniform sampling with an elitist archive of the same size."""

    def __init__(self) -> None:
        self._pop: Population | None = None
        self._lower: np.ndarray | None = None
        self._upper: np.ndarray | None = None

    def initialize(
        self,
        lower: np.ndarray,
        upper: np.ndarray,
        pop_size: int,
        rng: np.random.Generator,
    ) -> None:
        self._lower = np.asarray(lower, dtype=float)
        self._upper = np.asarray(upper, dtype=float)
        span = self._upper - self._lower
        X = self._lower + rng.random((pop_size, len(span))) * span
        self._pop = Population(X=X, F=np.empty((pop_size, 0)), generation=0)

    @property
    def population(self) -> Population:
        if self._pop is None:
            raise RuntimeError("optimizer not initialized")
        return self._pop

    def on_change(self, ev, rng: np.random.Generator) -> None:
        pop = self.population
        pop.F = ev(pop.X)

    def step(self, ev, rng: np.random.Generator) -> None:
        pop = self.population
        n = len(pop.X)
        span = self._upper - self._lower
        fresh = self._lower + rng.random((n, len(span))) * span
        fresh_F = ev(fresh)
        all_X = np.vstack([pop.X, fresh])
        all_F = np.vstack([pop.F, fresh_F])
        keep = environmental_selection(all_F, n)
        pop.X = all_X[keep]
        pop.F = all_F[keep]
        pop.generation += 1

    def final_front(self) -> np.ndarray:
        pop = self.population
        return pop.F[non_dominated_mask(pop.F)].copy()


class PsOracle:
    """Control optimizer that reads the analytical front.

    Its population is a subset of the cached reference front's decision
    vectors chosen to contain every per-objective extreme point and every
    point tied for the knee distance, so the estimated knee coincides with
    the true knee exactly.  Useful only as an experimental control.
    """

    def __init__(self) -> None:
        self._pop: Population | None = None
        self._pop_size: int = 0

    def initialize(
        self,
        lower: np.ndarray,
        upper: np.ndarray,
        pop_size: int,
        rng: np.random.Generator,
    ) -> None:
        self._pop_size = pop_size
        mid = 0.5 * (np.asarray(lower, dtype=float) + np.asarray(upper, dtype=float))
        X = np.tile(mid, (pop_size, 1))
        self._pop = Population(X=X, F=np.empty((pop_size, 0)), generation=0)

    @property
    def population(self) -> Population:
        if self._pop is None:
            raise RuntimeError("optimizer not initialized")
        return self._pop

    def on_change(self, ev, rng: np.random.Generator) -> None:
        front = ev.reference_front()
        F = front.points
        must_have = list(dict.fromkeys(extreme_indices(F)))
        dist = hull_distances(F, extreme_indices(F))
        for i in np.flatnonzero(dist == dist.max()):
            if int(i) not in must_have:
                must_have.append(int(i))
        chosen = list(must_have[: self._pop_size])
        have = set(chosen)
        for i in range(len(F)):
            if len(chosen) >= self._pop_size:
                break
            if i not in have:
                chosen.append(i)
        pad = 0
        while len(chosen) < self._pop_size:
            # Front smaller than the population: repeat rows.
            chosen.append(chosen[pad % len(chosen)])
            pad += 1
        pop = self.population
        pop.X = front.xs[np.asarray(chosen)]
        pop.F = ev(pop.X)

    def step(self, ev, rng: np.random.Generator) -> None:
        pop = self.population
        pop.F = ev(pop.X)
        pop.generation += 1

    def final_front(self) -> np.ndarray:
        pop = self.population
        return pop.F[non_dominated_mask(pop.F)].copy()

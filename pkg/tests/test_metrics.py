import math

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from gtsbench.metrics import (
    FriedmanResult,
    MetricRecord,
    aggregate,
    friedman,
    hypervolume,
    igd,
    ms2,
    normalized_hypervolume,
    run_means,
    strictly_dominating_count,
)
from gtsbench.problems import ProblemInstance, reference_front


# ---------------------------------------------------------------------------
# IGD


def test_igd_hand_value():
    ref = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
    approx = np.array([[0.0, 0.0], [2.0, 2.0]])
    assert igd(ref, approx) == pytest.approx(math.sqrt(2.0) / 3.0, abs=1e-15)


def test_igd_zero_iff_all_attained():
    ref = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert igd(ref, ref.copy()) == 0.0
    assert igd(ref, np.array([[0.0, 1.0]])) > 0.0


def test_igd_chunking_matches_direct_computation():
    rng = np.random.default_rng(0)
    ref = rng.uniform(size=(5000, 3))  # spans multiple internal chunks
    approx = rng.uniform(size=(37, 3))
    direct = np.sqrt(
        ((ref[:, None, :] - approx[None, :, :]) ** 2).sum(axis=-1).min(axis=1)
    ).mean()
    assert igd(ref, approx) == pytest.approx(float(direct), abs=1e-14)


def test_igd_input_validation():
    ref = np.array([[0.0, 0.0]])
    with pytest.raises(ValueError):
        igd(ref, np.empty((0, 2)))
    with pytest.raises(ValueError):
        igd(ref, np.array([[0.0, 0.0, 0.0]]))
    with pytest.raises(ValueError):
        igd(np.empty((0, 2)), ref)


def test_igd_tolerates_saturated_approximations():
    ref = np.array([[0.0, 0.0], [1.0, 1.0]])
    approx = np.array([[1e200, 1e200], [0.5, 0.5]])
    value = igd(ref, approx)
    assert math.isfinite(value)
    assert value == pytest.approx(math.sqrt(0.5), abs=1e-12)


# ---------------------------------------------------------------------------
# Hypervolume


def test_hypervolume_2d_hand_values():
    z = np.array([1.0, 1.0])
    assert hypervolume(np.array([[0.0, 0.0]]), z) == 1.0
    assert hypervolume(np.array([[0.5, 0.5]]), z) == 0.25
    two = np.array([[0.2, 0.6], [0.6, 0.2]])
    # (0.6-0.2)(1-0.6) + (1-0.6)(1-0.2) = 0.16 + 0.32
    assert hypervolume(two, z) == pytest.approx(0.48, abs=1e-15)


def test_hypervolume_ignores_dominated_and_outside_points():
    z = np.array([1.0, 1.0])
    base = np.array([[0.2, 0.6], [0.6, 0.2]])
    padded = np.vstack([base, [[0.7, 0.7], [1.5, 0.1], [0.3, 1.0]]])
    assert hypervolume(padded, z) == pytest.approx(0.48, abs=1e-15)
    # a point on the reference boundary encloses no volume
    assert hypervolume(np.array([[1.0, 0.0]]), z) == 0.0
    assert strictly_dominating_count(np.array([[1.0, 0.0]]), z) == 0
    assert strictly_dominating_count(padded, z) == 3


def test_hypervolume_duplicates_collapse():
    z = np.array([1.0, 1.0])
    dup = np.array([[0.5, 0.5], [0.5, 0.5]])
    assert hypervolume(dup, z) == 0.25


def test_hypervolume_3d_hand_values():
    z = np.array([1.0, 1.0, 1.0])
    assert hypervolume(np.array([[0.0, 0.0, 0.0]]), z) == 1.0
    assert hypervolume(np.array([[0.5, 0.5, 0.5]]), z) == 0.125
    # union of three half-slabs: 3(0.5) - 3(0.25) + 0.125
    slabs = np.array([[0.5, 0.0, 0.0], [0.0, 0.5, 0.0], [0.0, 0.0, 0.5]])
    assert hypervolume(slabs, z) == pytest.approx(0.875, abs=1e-15)
    layered = np.array([[0.2, 0.2, 0.8], [0.8, 0.8, 0.2]])
    # slab [0.2,0.8): 0.04 * 0.6; slab [0.8,1): 0.64 * 0.2
    assert hypervolume(layered, z) == pytest.approx(0.152, abs=1e-15)


def test_hypervolume_shape_validation():
    with pytest.raises(ValueError):
        hypervolume(np.array([[0.0, 0.0]]), np.array([1.0, 1.0, 1.0]))
    with pytest.raises(ValueError):
        hypervolume(np.zeros((2, 4)), np.ones(4))


def grid_oracle(points, z, step=0.05):
    """Exact dominated volume for grid-aligned coordinates.

    With every coordinate a multiple of ``step`` the dominated region is a
    union of whole cells, so counting strictly dominated cell centres is
    exact, not an approximation.
    """
    m = len(z)
    axes = [np.arange(step / 2, z[j], step) for j in range(m)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, m)
    dominated = (points[None, :, :] <= mesh[:, None, :]).all(axis=2).any(axis=1)
    return dominated.sum() * step**m


@given(
    n=st.integers(min_value=1, max_value=8),
    m=st.sampled_from([2, 3]),
    seed=st.integers(min_value=0, max_value=2**32 - 1),
)
@settings(max_examples=60, deadline=None)
def test_hypervolume_matches_grid_oracle(n, m, seed):
    rng = np.random.default_rng(seed)
    points = rng.integers(0, 20, size=(n, m)) * 0.05
    z = np.ones(m)
    assert hypervolume(points, z) == pytest.approx(
        grid_oracle(points, z), abs=1e-12
    )


@given(
    n=st.integers(min_value=1, max_value=12),
    m=st.sampled_from([2, 3]),
    seed=st.integers(min_value=0, max_value=2**32 - 1),
)
@settings(max_examples=60, deadline=None)
def test_hypervolume_point_order_irrelevant_and_monotone(n, m, seed):
    rng = np.random.default_rng(seed)
    F = rng.uniform(size=(n, m))
    z = np.ones(m)
    base = hypervolume(F, z)
    perm = rng.permutation(n)
    assert hypervolume(F[perm], z) == base
    grown = hypervolume(np.vstack([F, rng.uniform(size=(1, m))]), z)
    assert grown >= base - 1e-15


def test_hypervolume_monte_carlo_sanity():
    rng = np.random.default_rng(42)
    for m in (2, 3):
        F = rng.uniform(0.0, 0.9, size=(6, m))
        z = np.ones(m)
        exact = hypervolume(F, z)
        samples = rng.uniform(0.0, 1.0, size=(40000, m))
        hit = (F[None, :, :] <= samples[:, None, :]).all(axis=2).any(axis=1)
        p_hat = hit.mean()
        sigma = math.sqrt(max(p_hat * (1 - p_hat), 1e-12) / len(samples))
        assert abs(exact - p_hat) <= 4.0 * sigma + 1e-9


# ---------------------------------------------------------------------------
# Normalized hypervolume


def test_normalized_hypervolume_hand_values():
    lower = np.zeros(2)
    upper = np.full(2, 2.0)
    value, count = normalized_hypervolume(np.array([[0.0, 0.0]]), lower, upper)
    assert value == pytest.approx(1.21, abs=1e-15)
    assert count == 1
    value, count = normalized_hypervolume(
        np.array([[0.0, 0.0], [3.0, 3.0]]), lower, upper
    )
    assert value == pytest.approx(1.21, abs=1e-15)
    assert count == 1  # (1.5, 1.5) after scaling: outside the 1.1 box


def test_normalized_hypervolume_degenerate_axis():
    lower = np.array([0.0, 5.0])
    upper = np.array([1.0, 5.0])  # zero extent in the second objective
    value, count = normalized_hypervolume(np.array([[0.0, 5.0]]), lower, upper)
    assert value == pytest.approx(1.21, abs=1e-15)
    assert count == 1


def test_normalized_hypervolume_rejects_inverted_bounds():
    with pytest.raises(ValueError):
        normalized_hypervolume(np.zeros((1, 2)), np.ones(2), np.zeros(2))


# ---------------------------------------------------------------------------
# Maximum spread


def test_ms2_full_overlap_is_one():
    ref = np.array([[0.0, 0.0], [1.0, 1.0]])
    assert ms2(ref, ref.copy()) == pytest.approx(1.0, abs=1e-15)


def test_ms2_half_overlap_hand_value():
    ref = np.array([[0.0, 0.0], [1.0, 1.0]])
    approx = np.array([[0.5, 0.0], [1.0, 0.5]])
    assert ms2(ref, approx) == pytest.approx(0.5, abs=1e-15)


def test_ms2_disjoint_ranges_gate_to_zero():
    ref = np.array([[0.0, 0.0], [1.0, 1.0]])
    assert ms2(ref, np.array([[2.0, 2.0], [3.0, 3.0]])) == 0.0
    # one disjoint objective is enough to close the gate
    assert ms2(ref, np.array([[0.2, 2.0], [0.4, 3.0]])) == 0.0


def test_ms2_touching_counts_as_overlap():
    ref = np.array([[0.0, 0.0], [1.0, 1.0]])
    approx = np.array([[1.0, 0.5], [2.0, 1.0]])
    assert ms2(ref, approx) == pytest.approx(math.sqrt(0.125), abs=1e-15)


def test_ms2_zero_extent_reference_axis():
    ref = np.array([[0.0, 3.0], [1.0, 3.0]])
    approx = np.array([[0.5, 3.0], [0.75, 3.0]])
    assert ms2(ref, approx) == pytest.approx(math.sqrt(0.0625 / 2.0), abs=1e-15)


def test_ms2_uses_stored_front_bounds(tmp_path):
    front = reference_front(ProblemInstance("GTS1"), 0.4, 200, cache_dir=tmp_path)
    approx = front.points[:50]
    via_front = ms2(front, approx)
    via_bounds = ms2(np.vstack([front.lower, front.upper]), approx)
    assert via_front == via_bounds


def test_ms2_input_validation():
    ref = np.array([[0.0, 0.0], [1.0, 1.0]])
    with pytest.raises(ValueError):
        ms2(ref, np.empty((0, 2)))
    with pytest.raises(ValueError):
        ms2(ref, np.zeros((2, 3)))


# ---------------------------------------------------------------------------
# Run-level and cross-run aggregation


def test_run_means():
    rec = run_means([1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [7.0, 8.0, 9.0])
    assert rec == MetricRecord(migd=2.0, mhv=5.0, mms=8.0)
    with pytest.raises(ValueError):
        run_means([1.0], [1.0, 2.0], [1.0])
    with pytest.raises(ValueError):
        run_means([], [], [])


def test_aggregate_nesting():
    assert aggregate({"P1": {"c": [1.0, 3.0]}, "P2": {"c": [4.0]}}) == 3.0
    assert aggregate({"P1": {"a": [0.0, 2.0], "b": [4.0]}}) == 2.5


def test_aggregate_rejects_empty_cells():
    with pytest.raises(ValueError):
        aggregate({})
    with pytest.raises(ValueError):
        aggregate({"P1": {}})
    with pytest.raises(ValueError):
        aggregate({"P1": {"c": []}})


# ---------------------------------------------------------------------------
# Friedman rank test


def test_friedman_hand_example():
    scores = np.array([[1.0, 2.0, 3.0], [1.0, 2.0, 3.0], [2.0, 1.0, 3.0]])
    res = friedman(scores)
    assert np.allclose(res.mean_ranks, [4.0 / 3.0, 5.0 / 3.0, 3.0], atol=1e-15)
    assert res.chi2 == pytest.approx(14.0 / 3.0, abs=1e-12)
    assert res.p_value == pytest.approx(math.exp(-7.0 / 3.0), rel=1e-12)


def test_friedman_tie_ranks():
    res = friedman(np.array([[1.0, 1.0, 2.0]]))
    assert np.allclose(res.rank_matrix, [[1.5, 1.5, 3.0]], atol=0)


def test_friedman_fully_tied_table():
    res = friedman(np.ones((4, 3)))
    assert res.chi2 == 0.0
    assert res.p_value == 1.0


def test_friedman_higher_better_flips_ranks():
    scores = np.array([[1.0, 2.0], [3.0, 5.0]])
    low = friedman(scores)
    high = friedman(scores, higher_better=True)
    assert np.allclose(low.mean_ranks, [1.0, 2.0], atol=0)
    assert np.allclose(high.mean_ranks, [2.0, 1.0], atol=0)


def test_friedman_shape_validation():
    with pytest.raises(ValueError):
        friedman(np.zeros((3,)))
    with pytest.raises(ValueError):
        friedman(np.zeros((3, 1)))


@given(
    n=st.integers(min_value=2, max_value=12),
    k=st.integers(min_value=3, max_value=6),
    seed=st.integers(min_value=0, max_value=2**32 - 1),
)
@settings(max_examples=50, deadline=None)
def test_friedman_matches_scipy_without_ties(n, k, seed):
    rng = np.random.default_rng(seed)
    # distinct values per row guarantee a tie-free table
    scores = np.vstack([rng.permutation(k).astype(float) for _ in range(n)])
    scores += rng.uniform(0, 0.1, size=scores.shape)  # still tie-free
    res = friedman(scores)
    ref_stat, ref_p = scipy.stats.friedmanchisquare(*(scores[:, j] for j in range(k)))
    assert res.chi2 == pytest.approx(float(ref_stat), rel=1e-10)
    assert res.p_value == pytest.approx(float(ref_p), rel=1e-10)


@given(
    n=st.integers(min_value=1, max_value=10),
    k=st.integers(min_value=2, max_value=6),
    seed=st.integers(min_value=0, max_value=2**32 - 1),
)
@settings(max_examples=60, deadline=None)
def test_friedman_rank_rows_are_permutation_averages(n, k, seed):
    rng = np.random.default_rng(seed)
    scores = rng.integers(0, 4, size=(n, k)).astype(float)  # frequent ties
    res = friedman(scores)
    assert isinstance(res, FriedmanResult)
    expected_row_sum = k * (k + 1) / 2.0
    assert np.allclose(res.rank_matrix.sum(axis=1), expected_row_sum, atol=1e-12)
    assert res.p_value >= 0.0 and res.p_value <= 1.0

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gtsbench.dynamics import (
    PI_FRACTIONAL_DIGITS,
    EnvScalars,
    Schedule,
    TimeContext,
    env_scalars,
    irregular_time,
    pi_digit,
    regular_time,
    schedule_from_dict,
    schedule_to_dict,
    time_value,
)


def test_pi_digit_table_matches_mpmath():
    # Independent oracle: recompute the digit table with arbitrary-precision
    # arithmetic instead of trusting the embedded constant.
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 320
    digits = mpmath.nstr(mpmath.mp.pi, 310, strip_zeros=False).split(".")[1]
    expected = tuple(int(c) for c in digits[:300])
    assert PI_FRACTIONAL_DIGITS == expected


def test_pi_digit_hand_values():
    assert pi_digit(0) == 0
    assert pi_digit(1) == 1
    assert pi_digit(2) == 4
    assert pi_digit(5) == 9
    assert pi_digit(300) == PI_FRACTIONAL_DIGITS[-1]


def test_pi_digit_rejects_out_of_table():
    with pytest.raises(ValueError):
        pi_digit(-1)
    with pytest.raises(ValueError):
        pi_digit(301)


def test_regular_time_hand_values():
    assert regular_time(0, 10, 5) == 0.0
    assert regular_time(9, 10, 5) == 0.0
    assert regular_time(10, 10, 5) == 0.2
    assert regular_time(25, 10, 5) == 0.4
    assert regular_time(30, 5, 10) == 0.6


def test_irregular_time_hand_values():
    # k/n_t + 0.5*digit(k)/(9*n_t) with digits 1, 4, 9 at k = 1, 2, 5
    assert irregular_time(0, 10, 10) == 0.0
    assert irregular_time(10, 10, 10) == pytest.approx(0.1 + 0.5 * 1 / 90, abs=0)
    assert irregular_time(20, 10, 10) == pytest.approx(0.2 + 0.5 * 4 / 90, abs=0)
    assert irregular_time(50, 10, 10) == pytest.approx(0.5 + 0.5 * 9 / 90, abs=0)


def test_time_value_dispatch():
    assert time_value(25, 10, 5, Schedule.REGULAR) == regular_time(25, 10, 5)
    assert time_value(25, 10, 5, Schedule.IRREGULAR_PI) == irregular_time(25, 10, 5)


def test_schedule_arg_validation():
    for bad in ((-1, 10, 5), (0, 0, 5), (0, 10, 0)):
        with pytest.raises(ValueError):
            regular_time(*bad)
        with pytest.raises(ValueError):
            irregular_time(*bad)


@given(
    k=st.integers(min_value=0, max_value=290),
    tau_t=st.integers(min_value=1, max_value=20),
    n_t=st.integers(min_value=1, max_value=20),
    offset=st.integers(min_value=0, max_value=19),
    schedule=st.sampled_from(list(Schedule)),
)
@settings(max_examples=200, deadline=None)
def test_time_constant_within_environment(k, tau_t, n_t, offset, schedule):
    tau = k * tau_t + min(offset, tau_t - 1)
    assert time_value(tau, tau_t, n_t, schedule) == time_value(
        k * tau_t, tau_t, n_t, schedule
    )


@given(
    k=st.integers(min_value=0, max_value=290),
    n_t=st.integers(min_value=1, max_value=20),
    schedule=st.sampled_from(list(Schedule)),
)
@settings(max_examples=200, deadline=None)
def test_time_strictly_increases_across_boundaries(k, n_t, schedule):
    # The pi perturbation is at most half a step, so ordering never flips.
    t0 = time_value(k * 7, 7, n_t, schedule)
    t1 = time_value((k + 1) * 7, 7, n_t, schedule)
    assert t1 > t0


@given(
    k=st.integers(min_value=0, max_value=300),
    n_t=st.integers(min_value=1, max_value=20),
)
@settings(max_examples=200, deadline=None)
def test_irregular_offset_bounded(k, n_t):
    base = k / n_t
    t = irregular_time(k * 3, 3, n_t)
    assert base <= t <= base + 0.5 / n_t


def test_time_context_properties():
    ctx = TimeContext(tau=25, tau_t=10, n_t=5)
    assert ctx.environment_index == 2
    assert ctx.t == 0.4
    irr = TimeContext(tau=20, tau_t=10, n_t=10, schedule=Schedule.IRREGULAR_PI)
    assert irr.t == pytest.approx(0.2 + 2 / 90, abs=0)
    with pytest.raises(ValueError):
        TimeContext(tau=-1, tau_t=10, n_t=5)


def test_env_scalars_at_zero():
    sc = env_scalars(0.0)
    assert sc == EnvScalars(
        g_sev=0.0, h_exp=1.5, alpha=5.0, beta=0.2, omega=0, a=0.0, b=2.0
    )


def test_env_scalars_at_one():
    sc = env_scalars(1.0)
    assert sc.g_sev == 1.0
    assert sc.h_exp == 2.5
    assert sc.alpha == pytest.approx(0.0, abs=1e-12)
    assert sc.beta == pytest.approx(3.0, abs=0)
    assert sc.omega == 10
    assert sc.b == pytest.approx(1.0, abs=1e-12)


@given(t=st.floats(min_value=0.0, max_value=10.0, allow_nan=False))
@settings(max_examples=300, deadline=None)
def test_env_scalars_ranges(t):
    sc = env_scalars(t)
    assert -1.0 <= sc.g_sev <= 1.0
    assert 0.5 <= sc.h_exp <= 2.5
    assert -5.0 <= sc.alpha <= 5.0
    assert 0.2 <= sc.beta <= 3.0
    assert isinstance(sc.omega, int) and -10 <= sc.omega <= 10
    assert sc.a == sc.g_sev
    assert 1.0 <= sc.b <= 2.0
    assert sc.omega == math.floor(10.0 * sc.g_sev)


def test_schedule_dict_round_trip():
    d = schedule_to_dict(Schedule.IRREGULAR_PI, tau_t=7, n_t=3)
    assert schedule_from_dict(d) == (Schedule.IRREGULAR_PI, 7, 3)
    assert schedule_from_dict(dict(d)) == (Schedule.IRREGULAR_PI, 7, 3)


def test_schedule_dict_rejects_malformed():
    with pytest.raises(ValueError):
        schedule_from_dict({"kind": "sometimes", "tau_t": 5, "n_t": 5})
    with pytest.raises(ValueError):
        schedule_from_dict({"tau_t": 5, "n_t": 5})
    with pytest.raises(ValueError):
        schedule_from_dict({"kind": "regular", "tau_t": 0, "n_t": 5})

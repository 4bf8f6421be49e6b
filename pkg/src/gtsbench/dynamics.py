"""Time schedules and shared environment scalars for the dynamic benchmarks.

Discrete generation counters map to a real-valued time parameter ``t`` either
through the classic regular schedule or through an irregular schedule whose
step lengths are modulated by the decimal digits of pi.  All quantities that
the benchmark problems share per environment (severity, shape exponents,
oscillation counts) derive from ``t`` alone.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

__all__ = [
    "PI_FRACTIONAL_DIGITS",
    "Schedule",
    "TimeContext",
    "EnvScalars",
    "pi_digit",
    "regular_time",
    "irregular_time",
    "time_value",
    "env_scalars",
    "schedule_to_dict",
    "schedule_from_dict",
]

# First 300 fractional digits of pi.  Embedded so that two processes on any
# platform derive byte-identical schedules; verified against mpmath in tests.
_PI_DIGIT_STRING = (
    "14159265358979323846264338327950288419716939937510"
    "58209749445923078164062862089986280348253421170679"
    "82148086513282306647093844609550582231725359408128"
    "48111745028410270193852110555964462294895493038196"
    "44288109756659334461284756482337867831652712019091"
    "45648566923460348610454326648213393607260249141273"
)

PI_FRACTIONAL_DIGITS: tuple[int, ...] = tuple(int(c) for c in _PI_DIGIT_STRING)


class Schedule(enum.Enum):
    """How the generation counter is quantized into the time parameter."""

    REGULAR = "regular"
    IRREGULAR_PI = "irregular_pi"


def pi_digit(k: int) -> int:
    """k-th fractional decimal digit of pi, with ``pi_digit(0) == 0``.

    The zero convention makes the irregular schedule coincide with the
    regular one in the very first environment.

    Raises:
        ValueError: if ``k`` is negative or exceeds the embedded table.
    """
    if k < 0:
        raise ValueError(f"digit index must be nonnegative, got {k}")
    if k == 0:
        return 0
    if k > len(PI_FRACTIONAL_DIGITS):
        raise ValueError(
            f"digit index {k} exceeds embedded table length "
            f"{len(PI_FRACTIONAL_DIGITS)}"
        )
    return PI_FRACTIONAL_DIGITS[k - 1]


def _check_schedule_args(tau: int, tau_t: int, n_t: int) -> None:
    if tau < 0:
        raise ValueError(f"generation counter must be nonnegative, got {tau}")
    if tau_t < 1:
        raise ValueError(f"change frequency must be positive, got {tau_t}")
    if n_t < 1:
        raise ValueError(f"severity divisor must be positive, got {n_t}")


def regular_time(tau: int, tau_t: int, n_t: int) -> float:
    """Piecewise-constant time value ``floor(tau / tau_t) / n_t``."""
    _check_schedule_args(tau, tau_t, n_t)
    return float(tau // tau_t) / n_t


def irregular_time(tau: int, tau_t: int, n_t: int) -> float:
    """Regular time plus a pi-digit perturbation of at most half a step.

    With ``k = floor(tau / tau_t)`` the value is
    ``k / n_t + (0.5 * pi_digit(k) / 9) / n_t``, so consecutive environment
    times are no longer equally spaced but never collide or reorder.
    """
    _check_schedule_args(tau, tau_t, n_t)
    k = tau // tau_t
    return k / n_t + 0.5 * pi_digit(k) / (9.0 * n_t)


def time_value(tau: int, tau_t: int, n_t: int, schedule: Schedule) -> float:
    if schedule is Schedule.REGULAR:
        return regular_time(tau, tau_t, n_t)
    return irregular_time(tau, tau_t, n_t)


@dataclass(frozen=True)
class TimeContext:
    """Generation counter plus schedule parameters.

    Attributes:
        tau: generation counter, >= 0.
        tau_t: generations per environment (change frequency), >= 1.
        n_t: severity divisor, >= 1.
        schedule: quantization rule mapping tau to t.
    """

    tau: int
    tau_t: int
    n_t: int
    schedule: Schedule = Schedule.REGULAR

    def __post_init__(self) -> None:
        _check_schedule_args(self.tau, self.tau_t, self.n_t)

    @property
    def environment_index(self) -> int:
        return self.tau // self.tau_t

    @property
    def t(self) -> float:
        return time_value(self.tau, self.tau_t, self.n_t, self.schedule)


@dataclass(frozen=True)
class EnvScalars:
    """Environment-level scalars shared across the problem definitions.

    All are functions of ``t`` only:

    * ``g_sev``: severity wave sin(0.5 pi t) in [-1, 1].
    * ``h_exp``: shape exponent 1.5 + g_sev in [0.5, 2.5].
    * ``alpha``: sigmoid steepness 5 cos(0.5 pi t) in [-5, 5].
    * ``beta``: power-law exponent 0.2 + 2.8 |g_sev| in [0.2, 3].
    * ``omega``: integer oscillation count floor(10 g_sev) in {-10..10}.
    * ``a``: moving-interval anchor sin(0.5 pi t).
    * ``b``: moving-interval width 1 + |cos(0.5 pi t)| in [1, 2].
    """

    g_sev: float
    h_exp: float
    alpha: float
    beta: float
    omega: int
    a: float
    b: float


def env_scalars(t: float) -> EnvScalars:
    half = 0.5 * math.pi * t
    g = math.sin(half)
    return EnvScalars(
        g_sev=g,
        h_exp=1.5 + g,
        alpha=5.0 * math.cos(half),
        beta=0.2 + 2.8 * abs(g),
        omega=math.floor(10.0 * g),
        a=math.sin(half),
        b=1.0 + abs(math.cos(half)),
    )


def schedule_to_dict(schedule: Schedule, tau_t: int, n_t: int) -> dict:
    """JSON-ready descriptor; round-trips through :func:`schedule_from_dict`."""
    return {"kind": schedule.value, "tau_t": tau_t, "n_t": n_t}


def schedule_from_dict(d: dict) -> tuple[Schedule, int, int]:
    try:
        kind = Schedule(d["kind"])
        tau_t = int(d["tau_t"])
        n_t = int(d["n_t"])
    except (KeyError, ValueError) as exc:
        raise ValueError(f"malformed schedule descriptor: {d!r}") from exc
    _check_schedule_args(0, tau_t, n_t)
    return kind, tau_t, n_t

"""Rates, multiplexing and memory budgets of the hashing repeater.

Lengths enter in km (``RepeaterScenario.from_km``) and are stored in meters;
all times are seconds and all rates Hz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Literal, NamedTuple, Optional

from .bell import NoiseParams, output_noise_fidelity
from .bounds import (
    DeltaSchedule,
    UnreachableError,
    bennett_terms,
    global_private_fidelity,
    noisy_input_fidelity,
    yield_and_overhead,
)

C_FIBER = 2.0e8
EARTH_TC_BOUND = 0.1  # s; longest classical delay on earth-scale links


class ZeroYieldError(ValueError):
    """The scenario produces no output pairs at the resolved slack."""


@dataclass(frozen=True)
class RepeaterScenario:
    """Parameters of one repeater line.

    ``t0`` defaults to the one-way light time over a segment and ``epsilon``
    to ``n^-1/4``.  ``split_corrections`` models end stations that each wait
    for the nearer half of the Bell-measurement outcomes only.
    """

    L_total: float  # m
    N_links: int
    eta: float = 1.0
    tp: float = 0.0
    t0: Optional[float] = None
    c_fiber: float = C_FIBER
    n: int = 2000
    schedule: DeltaSchedule = field(default_factory=lambda: DeltaSchedule.power(0.25))
    epsilon: Optional[float] = None
    resource_noise: NoiseParams = field(default_factory=NoiseParams)
    F_in: float = 0.95
    channels: Literal["many", "single"] = "many"
    split_corrections: bool = False

    def __post_init__(self) -> None:
        if self.L_total <= 0 or self.N_links < 1:
            raise ValueError("need L_total > 0 and N_links >= 1")
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f"eta must lie in (0, 1], got {self.eta}")
        if self.tp < 0 or (self.t0 is not None and self.t0 < 0) or self.c_fiber <= 0:
            raise ValueError("times must be non-negative and c_fiber positive")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.epsilon is not None and self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if self.channels not in ("many", "single"):
            raise ValueError(f"channels must be 'many' or 'single', got {self.channels!r}")

    @classmethod
    def from_km(cls, L_total_km: float, N_links: int, **kwargs) -> "RepeaterScenario":
        return cls(L_total=L_total_km * 1e3, N_links=N_links, **kwargs)

    @property
    def l0(self) -> float:
        return self.L_total / self.N_links

    @property
    def t0_s(self) -> float:
        return self.l0 / self.c_fiber if self.t0 is None else self.t0

    @property
    def t_c(self) -> float:
        return self.L_total / self.c_fiber

    @property
    def eps(self) -> float:
        return self.n ** -0.25 if self.epsilon is None else self.epsilon

    @property
    def F_eff(self) -> float:
        return noisy_input_fidelity(self.F_in, self.resource_noise)

    def delta(self) -> float:
        return self.schedule.resolve(self.n, bennett_terms(self.F_eff).S)

    def yield_c(self) -> float:
        c = yield_and_overhead(self.F_eff, self.delta()).c
        if c <= 0.0:
            raise ZeroYieldError(
                f"no yield at F_eff={self.F_eff:.6g}, n={self.n}, delta={self.delta():.6g}"
            )
        return c


class ChannelCount(NamedTuple):
    n_c: int
    shortfall_bound: float  # per link
    success_all_links: float


def channel_count(n: int, eta: float, epsilon: float, N_links: int = 1) -> ChannelCount:
    """``n_c = ceil(n (1/eta + epsilon))`` channels give ``n`` pairs w.h.p."""
    if eta <= 0 or epsilon < 0 or n < 1:
        raise ValueError("need eta > 0, epsilon >= 0, n >= 1")
    n_c = math.ceil(n * (1.0 / eta + epsilon) - 1e-9)
    short = math.exp(-epsilon * epsilon * n)
    return ChannelCount(n_c, short, (1.0 - short) ** N_links if short < 1 else 0.0)


@dataclass(frozen=True)
class RateReport:
    rate_per_channel: float
    rate_absolute: float
    n_channels: int
    t_c: float
    overhead_O: Optional[float]
    mode: Literal["single_shot", "continuous"]
    success_prob_all_links: float
    yield_c: float
    F_eff: float
    F_out: float


def _report(s: RepeaterScenario, per_channel: float, mode) -> RateReport:
    c = s.yield_c()
    if s.channels == "many":
        cc = channel_count(s.n, s.eta, s.eps, s.N_links)
        n_channels, p_all = cc.n_c, cc.success_all_links
    else:
        n_channels = 1
        p_all = channel_count(s.n, s.eta, s.eps, s.N_links).success_all_links
    O = yield_and_overhead(s.F_eff, s.delta(), s.channels, s.n).overhead
    return RateReport(
        rate_per_channel=per_channel,
        rate_absolute=per_channel * n_channels,
        n_channels=n_channels,
        t_c=s.t_c,
        overhead_O=O,
        mode=mode,
        success_prob_all_links=p_all,
        yield_c=c,
        F_eff=s.F_eff,
        F_out=output_noise_fidelity(s.resource_noise),
    )


def rate_continuous(s: RepeaterScenario) -> RateReport:
    """Steady-state rate; the classical delay ``t_c`` only adds latency.

    Many channels: ``R = c eta / (t0 + tp)``.  One channel:
    ``R1 = c n / (n (1/eta + eps) t0 + tp)``.
    """
    c = s.yield_c()
    if s.channels == "many":
        denom = s.t0_s + s.tp
        if denom <= 0:
            raise ValueError("t0 + tp must be positive")
        r = c * s.eta / denom
    else:
        denom = s.n * (1.0 / s.eta + s.eps) * s.t0_s + s.tp
        if denom <= 0:
            raise ValueError("t0 + tp must be positive")
        r = c * s.n / denom
    return _report(s, r, "continuous")


def rate_single_shot(s: RepeaterScenario) -> RateReport:
    """One shot at a time: the classical round trip enters the denominator."""
    c = s.yield_c()
    t_c = s.t_c / 2.0 if s.split_corrections else s.t_c
    return _report(s, c * s.eta / (s.t0_s + s.tp + t_c), "single_shot")


class MemoryRequirement(NamedTuple):
    storage_time: float
    qubits: int
    exceeds_earth_bound: bool


def memory_requirement(
    s: RepeaterScenario, role: Literal["intermediate", "end_station"]
) -> MemoryRequirement:
    """Storage time and qubit count of a station.

    Intermediate stations keep the ``2n``-qubit resource for ``t0`` plus the
    elementary-pair halves (``2n`` with many channels, one with a single
    channel).  End stations also hold their ``m`` outputs until the
    Pauli-frame information arrives after ``t_c``.
    """
    extra = 2 * s.n if s.channels == "many" else 1
    if role == "intermediate":
        return MemoryRequirement(s.t0_s, 2 * s.n + extra, False)
    if role == "end_station":
        m = max(0, math.floor(s.n * yield_and_overhead(s.F_eff, s.delta()).c + 1e-9))
        return MemoryRequirement(s.t_c, 2 * s.n + extra + m, s.t_c > EARTH_TC_BOUND)
    raise ValueError(f"unknown role {role!r}")


class TableRate(NamedTuple):
    N_links: int
    n: int
    delta: float
    yield_c: float
    F_gp: float
    rate: float  # per t_segment
    F_out: float


def table_rate_2017(
    F_in: float,
    N_links: int,
    noise: NoiseParams,
    schedule: DeltaSchedule = DeltaSchedule.power(0.25),
    F_target: Optional[float] = None,
    split_corrections: bool = True,
    n_cap: int = 10**7,
) -> TableRate:
    """Single-shot hashing rate in units of the per-segment signalling time.

    Pair creation and local processing are neglected, so the only time cost
    is the classical delay ``N t_segment`` (halved with split corrections).
    ``n`` is the smallest ensemble whose global private fidelity over all
    links reaches ``F_target`` (default: the raw ``F_in``) with positive
    yield.
    """
    target = F_in if F_target is None else F_target
    F_eff = noisy_input_fidelity(F_in, noise)

    def ok(n: int) -> bool:
        b = global_private_fidelity(F_eff, n, schedule, N_links)
        return b.yield_c > 0 and b.F_gp >= target

    hi = 2
    while not ok(hi):
        hi *= 2
        if hi > n_cap:
            raise UnreachableError(f"no n <= {n_cap} reaches F_gp >= {target}")
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    b = global_private_fidelity(F_eff, hi, schedule, N_links)
    t_c = N_links / 2.0 if split_corrections else float(N_links)
    return TableRate(N_links, hi, b.delta, b.yield_c, b.F_gp, b.yield_c / t_c, output_noise_fidelity(noise))


def with_n(s: RepeaterScenario, n: int) -> RepeaterScenario:
    return replace(s, n=n)

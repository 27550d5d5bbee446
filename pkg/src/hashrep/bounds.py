"""Finite-size analytics for the hashing protocol on Werner inputs.

The failure probability of hashing is split into ``p1`` (the error string
falls outside the likely set, bounded with Bennett's inequality) and ``p2``
(a second likely string survives every parity check).  Entropies use log2;
the Bennett exponent uses the natural log.

Internally everything is driven by the infidelity ``eps = 1 - F`` so that
concatenated hashing can be followed well below ``1e-16``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import List, Literal, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from .bell import BellDiagonal, NoiseParams, effective_input, output_noise_fidelity

LN2 = math.log(2.0)
N_MIN_CAP = 10**7


class DomainError(ValueError):
    """Input fidelity outside the range where the bound is defined."""


class NTooSmallError(ValueError):
    """``n -> 1`` hashing needs ``delta >= 0``, which fails for this ``n``."""

    def __init__(self, n: int, delta: float):
        super().__init__(f"n={n} too small for n->1 hashing (delta={delta:.6g} < 0)")
        self.n = n
        self.delta = delta


class UnreachableError(RuntimeError):
    """No ensemble size up to the search cap reaches the target."""


class PoorFitWarning(UserWarning):
    pass


class BennettTerms(NamedTuple):
    S: float
    a: float
    V: float
    g: float


def _terms_eps(eps: float) -> BennettTerms:
    if eps == 0.0:
        # Deterministic error variable; a = |log2 0| is infinite.
        return BennettTerms(0.0, math.inf, 0.0, 0.0)
    F = 1.0 - eps
    le = math.log2(eps / 3.0)
    lf = math.log1p(-eps) / LN2
    S = -F * lf - eps * le
    a = abs(le) + S
    V = max(F * lf * lf + eps * le * le - S * S, 0.0)
    return BennettTerms(S, a, V, V / a)


def _check_eps(eps: float) -> None:
    if not 0.0 <= eps < 0.75:
        raise DomainError(f"fidelity {1.0 - eps!r} outside (0.25, 1]")


def bennett_terms(F_in: float) -> BennettTerms:
    """Entropy ``S``, range ``a``, variance ``V`` and ``g = V/a`` for Werner ``F_in``.

    ``F_in = 1`` returns ``S = V = g = 0`` with ``a = inf``.
    """
    eps = 1.0 - F_in
    _check_eps(eps)
    return _terms_eps(eps)


def _log_p1(terms: BennettTerms, n: float, delta: float) -> float:
    if delta == 0.0:
        return math.log(2.0)
    if terms.V == 0.0:
        return -math.inf
    g = terms.g
    bracket = (g + delta) * math.log1p(delta / g) - delta
    return math.log(2.0) - n / terms.a * bracket


def _log_p2(n: float, delta: float) -> float:
    return -n * delta * LN2


def p1_bound(F_in: float, n: float, delta: float) -> float:
    """Bennett bound on the probability of leaving the likely set."""
    if n < 1 or delta < 0:
        raise ValueError(f"need n >= 1 and delta >= 0, got n={n}, delta={delta}")
    return math.exp(_log_p1(bennett_terms(F_in), n, delta))


def p2_bound(n: float, delta: float) -> float:
    """Collision bound ``2^(-n delta)``."""
    if n < 1 or delta < 0:
        raise ValueError(f"need n >= 1 and delta >= 0, got n={n}, delta={delta}")
    return 2.0 ** (-n * delta)


@dataclass(frozen=True)
class DeltaSchedule:
    """How the slack ``delta`` depends on ``n``.

    ``power`` means ``delta = n^-value``, ``fixed`` a constant ``value`` and
    ``n_to_1`` the slack that leaves exactly one output pair.
    """

    kind: Literal["power", "fixed", "n_to_1"]
    value: float = 0.0

    def __post_init__(self) -> None:
        if self.kind == "power" and not 0.0 < self.value < 1.0:
            raise ValueError(f"power exponent must lie in (0, 1), got {self.value}")
        if self.kind == "fixed" and self.value < 0.0:
            raise ValueError(f"fixed delta must be >= 0, got {self.value}")
        if self.kind not in ("power", "fixed", "n_to_1"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")

    @classmethod
    def power(cls, exponent: float) -> "DeltaSchedule":
        return cls("power", exponent)

    @classmethod
    def fixed(cls, value: float) -> "DeltaSchedule":
        return cls("fixed", value)

    @classmethod
    def n_to_1(cls) -> "DeltaSchedule":
        return cls("n_to_1")

    def resolve(self, n: int, S: float) -> float:
        if self.kind == "power":
            return float(n) ** (-self.value)
        if self.kind == "fixed":
            return self.value
        return 0.5 * ((n - 1) / n - S)

    def label(self) -> str:
        if self.kind == "power":
            return f"n^-{self.value:g}"
        if self.kind == "fixed":
            return f"{self.value:g}"
        return "n_to_1"


@dataclass(frozen=True)
class HashingBound:
    """Every derived quantity of the bound at one ``(F, n, delta, N)`` point.

    ``F_gp`` is the product form ``(1 - p1 - p2)^N``; ``F_gp_linear`` is the
    first-order ``1 - N (p1 + p2)``.  Both are clamped to ``[0, 1]``.
    ``yield_c`` is the raw ``1 - S - 2 delta`` and may be negative, in which
    case ``m == 0`` and ``has_output`` is false.
    """

    F_in: float
    n: int
    delta: float
    N_links: int
    S: float
    a: float
    V: float
    g: float
    p1: float
    p2: float
    F_gp: float
    F_gp_linear: float
    yield_c: float
    m: int
    log_p_fail: float = field(repr=False)

    @property
    def has_output(self) -> bool:
        return self.m > 0

    @property
    def p_fail(self) -> float:
        return min(1.0, self.p1 + self.p2)


def _log_fail(terms: BennettTerms, n: float, delta: float) -> float:
    return float(np.logaddexp(_log_p1(terms, n, delta), _log_p2(n, delta)))


def _fidelity_from_log_fail(log_fail: float, N_links: int) -> Tuple[float, float]:
    if log_fail >= 0.0:
        return 0.0, 0.0
    pf = math.exp(log_fail)
    product = math.exp(N_links * math.log1p(-pf))
    linear = max(0.0, 1.0 - N_links * pf)
    return min(product, 1.0), min(linear, 1.0)


def global_private_fidelity(
    F_in: float, n: int, schedule: DeltaSchedule, N_links: int = 1
) -> HashingBound:
    """Lower bound on the fidelity of all outputs over ``N_links`` hashed links."""
    if n < 1 or N_links < 1:
        raise ValueError(f"need n >= 1 and N_links >= 1, got n={n}, N_links={N_links}")
    eps = 1.0 - F_in
    _check_eps(eps)
    terms = _terms_eps(eps)
    delta = schedule.resolve(n, terms.S)
    if schedule.kind == "n_to_1":
        if delta < 0:
            raise NTooSmallError(n, delta)
        yield_c, m = 1.0 / n, 1
    else:
        yield_c = 1.0 - terms.S - 2.0 * delta
        m = int(math.floor(n * yield_c + 1e-9)) if yield_c > 0 else 0
    log_fail = _log_fail(terms, n, delta)
    F_gp, F_lin = _fidelity_from_log_fail(log_fail, N_links)
    return HashingBound(
        F_in=F_in,
        n=n,
        delta=delta,
        N_links=N_links,
        S=terms.S,
        a=terms.a,
        V=terms.V,
        g=terms.g,
        p1=math.exp(_log_p1(terms, n, delta)),
        p2=math.exp(_log_p2(n, delta)),
        F_gp=F_gp,
        F_gp_linear=F_lin,
        yield_c=yield_c,
        m=m,
        log_p_fail=log_fail,
    )


class YieldOverhead(NamedTuple):
    c: float
    m_per_n: float
    overhead: Optional[float]  # None when the yield vanishes


def yield_and_overhead(
    F_in: float,
    delta: float,
    channels: Literal["many", "single"] = "many",
    n: Optional[int] = None,
) -> YieldOverhead:
    """Yield ``c = 1 - S - 2 delta`` (clamped at 0) and overhead per output pair.

    Many channels store ``2n`` resource qubits plus ``2n`` pair qubits, so
    ``O = 4/c``.  A single channel needs one extra pair qubit: ``O = 2/c + 1/n``.
    """
    if delta < 0:
        raise ValueError(f"delta must be >= 0, got {delta}")
    S = bennett_terms(F_in).S
    c = max(0.0, 1.0 - S - 2.0 * delta)
    m_per_n = c if n is None else math.floor(n * c + 1e-9) / n
    if c <= 0.0:
        return YieldOverhead(c, m_per_n, None)
    if channels == "many":
        return YieldOverhead(c, m_per_n, 4.0 / c)
    if channels == "single":
        if n is None:
            raise ValueError("single-channel overhead needs n")
        return YieldOverhead(c, m_per_n, 2.0 / c + 1.0 / n)
    raise ValueError(f"channels must be 'many' or 'single', got {channels!r}")


def hashing_threshold() -> float:
    """Werner fidelity at which ``S(F) = 1`` (zero asymptotic yield)."""
    return brentq(lambda F: bennett_terms(F).S - 1.0, 0.75, 0.99, xtol=1e-15, rtol=1e-15)


def n_to_1_delta(F_in: float, n: int) -> float:
    return 0.5 * ((n - 1) / n - bennett_terms(F_in).S)


def _n_to_1_log_eps(eps: float, n: int) -> float:
    terms = _terms_eps(eps)
    delta = 0.5 * ((n - 1) / n - terms.S)
    if delta < 0:
        raise NTooSmallError(n, delta)
    return min(0.0, _log_fail(terms, n, delta))


def n_to_1_fidelity(F_in: float, n: int) -> float:
    """Lower bound on the single output pair of ``n -> 1`` hashing."""
    eps = 1.0 - F_in
    _check_eps(eps)
    return 1.0 - math.exp(_n_to_1_log_eps(eps, n))


def n_to_1_infidelity(F_in: float, n: int) -> float:
    """``1 - n_to_1_fidelity`` without cancellation."""
    eps = 1.0 - F_in
    _check_eps(eps)
    return math.exp(_n_to_1_log_eps(eps, n))


@dataclass(frozen=True)
class FitParams:
    """``1 - F'(n) <= alpha exp(-beta n)`` fitted on ``n_range``.

    ``alpha`` is shifted up by the largest residual so the fitted curve lower
    bounds the explicit formula on every fitted point; ``alpha_ls`` is the
    plain least-squares value.
    """

    alpha: float
    beta: float
    r_squared: float
    alpha_ls: float
    n_range: Tuple[int, int]

    def infidelity(self, n: float) -> float:
        return self.alpha * math.exp(-self.beta * n)

    def n_estimate(self, N_links: int, F_target: float) -> float:
        return math.log(self.alpha * N_links / (1.0 - F_target)) / self.beta


def fit_alpha_beta(F_in: float, n_range: Optional[Tuple[int, int]] = None, points: int = 64) -> FitParams:
    """Least-squares fit of ``log(1 - F')`` against ``n`` for ``n -> 1`` hashing."""
    if n_range is None:
        lo = n_min_search(F_in).n
        n_range = (lo, 4 * lo)
    lo, hi = n_range
    if lo < 2 or hi <= lo:
        raise ValueError(f"bad n_range {n_range}")
    eps = 1.0 - F_in
    _check_eps(eps)
    ns = np.unique(np.linspace(lo, hi, points).round().astype(int))
    ys = np.array([_n_to_1_log_eps(eps, int(n)) for n in ns])
    slope, intercept = np.polyfit(ns, ys, 1)
    resid = ys - (intercept + slope * ns)
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    if r2 < 0.99:
        warnings.warn(f"poor exponential fit for F={F_in}: R^2={r2:.4f}", PoorFitWarning, stacklevel=2)
    shift = max(0.0, float(resid.max()))
    return FitParams(
        alpha=math.exp(intercept + shift),
        beta=-float(slope),
        r_squared=r2,
        alpha_ls=math.exp(intercept),
        n_range=(int(lo), int(hi)),
    )


class NMinResult(NamedTuple):
    n: int
    fidelity: float
    fit_estimate: Optional[float]


def _n_links_ok(F_in: float, n: int, N_links: int, F_target: float) -> bool:
    if n_to_1_delta(F_in, n) < 0:
        return False
    return 1.0 - N_links * n_to_1_infidelity(F_in, n) >= F_target


def n_min_search(
    F_in: float,
    N_links: int = 1,
    F_target: Optional[float] = None,
    cap: int = N_MIN_CAP,
    with_fit: bool = False,
) -> NMinResult:
    """Smallest ``n`` with ``1 - N (1 - F'(n)) >= F_target`` (default ``F_target = F_in``).

    Exponential bracketing followed by bisection.
    """
    target = F_in if F_target is None else F_target
    hi = 2
    while not _n_links_ok(F_in, hi, N_links, target):
        if hi >= cap:
            raise UnreachableError(f"no n <= {cap} reaches F'={target} for F={F_in}, N={N_links}")
        hi = min(2 * hi, cap)
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _n_links_ok(F_in, mid, N_links, target):
            hi = mid
        else:
            lo = mid
    estimate = None
    if with_fit:
        base = n_min_search(F_in).n
        fit = fit_alpha_beta(F_in, (base, 4 * base))
        estimate = fit.n_estimate(N_links, target)
    return NMinResult(hi, 1.0 - N_links * n_to_1_infidelity(F_in, hi), estimate)


@dataclass(frozen=True)
class ConcatResult:
    """Per-level output of concatenated ``n -> 1`` hashing.

    ``infidelities[0]`` is the input; level ``k`` used ``block_size**k`` pairs.
    ``stalled_at`` is the first level that failed to improve, if any, and the
    lists stop there.
    """

    block_size: int
    infidelities: List[float]
    stalled_at: Optional[int]

    @property
    def fidelities(self) -> List[float]:
        return [1.0 - e for e in self.infidelities]

    @property
    def total_pairs(self) -> List[int]:
        return [self.block_size**k for k in range(len(self.infidelities))]


def concatenated_n_to_1(F_in: float, block_size: int, levels: int) -> ConcatResult:
    """Repeated ``n -> 1`` hashing on blocks of ``block_size``, twirling between levels."""
    if levels < 1:
        raise ValueError(f"levels must be >= 1, got {levels}")
    eps = 1.0 - F_in
    _check_eps(eps)
    infid = [eps]
    for level in range(1, levels + 1):
        nxt = math.exp(_n_to_1_log_eps(infid[-1], block_size))
        if nxt >= infid[-1]:
            return ConcatResult(block_size, infid, level)
        infid.append(nxt)
    return ConcatResult(block_size, infid, None)


def noisy_input_fidelity(F_raw: float, noise: NoiseParams) -> float:
    """Werner fidelity seen by perfect hashing after folding resource-input LDN."""
    return effective_input(BellDiagonal.werner(F_raw), noise).fidelity()


@dataclass(frozen=True)
class SweepPoint:
    F_raw: float
    F_eff: float
    bound: HashingBound
    F_pair_out: float  # per-pair lower bound after output-qubit noise


def fidelity_yield_sweep(
    F_values: Sequence[float],
    n_values: Sequence[int],
    schedule: DeltaSchedule,
    N_links: int,
    noise: NoiseParams,
) -> List[SweepPoint]:
    """Fidelity/yield grid with resource noise folded into the inputs."""
    f_out = output_noise_fidelity(noise)
    points = []
    for F in F_values:
        F_eff = noisy_input_fidelity(F, noise)
        for n in n_values:
            b = global_private_fidelity(F_eff, int(n), schedule, N_links)
            points.append(SweepPoint(F, F_eff, b, b.F_gp * f_out))
    return points

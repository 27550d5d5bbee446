"""Bell-diagonal two-qubit states and the channels that keep them Bell-diagonal.

A state is stored as four probabilities ``(p00, p01, p10, p11)`` over the Bell
basis ``|B_kl> = (id x X^l Z^k)|phi+>``.  The index of ``p_kl`` is ``2*k + l``,
so ``k`` is the phase-flip bit and ``l`` the bit-flip bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Tuple

NORM_ATOL = 1e-9
_NEG_ATOL = 1e-15


class NormalizationError(ValueError):
    """Probabilities are negative or do not sum to one."""


@dataclass(frozen=True)
class BellDiagonal:
    """Bell-diagonal state given by its four Bell-basis weights."""

    p: Tuple[float, float, float, float]

    def __post_init__(self) -> None:
        p = tuple(float(v) for v in self.p)
        if len(p) != 4:
            raise NormalizationError(f"expected 4 probabilities, got {len(p)}")
        if min(p) < -_NEG_ATOL or any(math.isnan(v) for v in p):
            raise NormalizationError(f"negative probability in {p}")
        total = math.fsum(p)
        if abs(total - 1.0) > NORM_ATOL:
            raise NormalizationError(f"probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "p", tuple(max(v, 0.0) for v in p))

    @classmethod
    def perfect(cls) -> "BellDiagonal":
        return cls((1.0, 0.0, 0.0, 0.0))

    @classmethod
    def werner(cls, fidelity: float) -> "BellDiagonal":
        return WernerParams(fidelity).as_bell_diagonal()

    @classmethod
    def from_iterable(cls, values: Iterable[float]) -> "BellDiagonal":
        return cls(tuple(values))  # type: ignore[arg-type]

    def fidelity(self) -> float:
        return self.p[0]

    def __getitem__(self, idx: int) -> float:
        return self.p[idx]

    def is_werner(self, atol: float = 1e-12) -> bool:
        _, a, b, c = self.p
        return abs(a - b) <= atol and abs(b - c) <= atol


@dataclass(frozen=True)
class WernerParams:
    """Werner state parameterized by its fidelity ``F``."""

    F: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.F <= 1.0:
            raise ValueError(f"fidelity must lie in [0, 1], got {self.F}")

    @classmethod
    def from_weight(cls, q: float) -> "WernerParams":
        return cls((1.0 + 3.0 * q) / 4.0)

    @property
    def q(self) -> float:
        """Werner weight ``(4F - 1) / 3``."""
        return (4.0 * self.F - 1.0) / 3.0

    def as_bell_diagonal(self) -> BellDiagonal:
        e = (1.0 - self.F) / 3.0
        return BellDiagonal((self.F, e, e, e))


@dataclass(frozen=True)
class NoiseParams:
    """Local depolarizing noise; ``p_ldn = 1`` is noiseless."""

    p_ldn: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_ldn <= 1.0:
            raise ValueError(f"p_ldn must lie in [0, 1], got {self.p_ldn}")


def _checked(values: Iterable[float]) -> BellDiagonal:
    # BellDiagonal raises on drift beyond NORM_ATOL; never renormalize silently.
    return BellDiagonal(tuple(values))  # type: ignore[arg-type]


def entropy(state: BellDiagonal) -> float:
    """Shannon entropy of the Bell weights in bits (``0 log 0 = 0``)."""
    return -math.fsum(v * math.log2(v) for v in state.p if v > 0.0)


def werner_entropy(fidelity: float) -> float:
    """Closed form ``-F log2 F - (1-F) log2((1-F)/3)``."""
    return entropy(BellDiagonal.werner(fidelity))


def depolarize(state: BellDiagonal, weight: float) -> BellDiagonal:
    """Mix with the maximally mixed state: ``w * rho + (1 - w) * id/4``.

    Every single-qubit LDN layer with parameter ``p`` acting on either qubit
    of a Bell-diagonal pair multiplies ``w`` by ``p``; this helper applies the
    product of several layers at once.
    """
    if not 0.0 <= weight <= 1.0:
        raise ValueError(f"depolarizing weight must lie in [0, 1], got {weight}")
    rest = (1.0 - weight) / 4.0
    return _checked(weight * v + rest for v in state.p)


def apply_ldn_one_qubit(state: BellDiagonal, noise: NoiseParams) -> BellDiagonal:
    """Single-qubit depolarizing channel on one half of the pair."""
    return depolarize(state, noise.p_ldn)


def twirl_to_werner(state: BellDiagonal) -> WernerParams:
    return WernerParams(state.fidelity())


def swap(a: BellDiagonal, b: BellDiagonal) -> BellDiagonal:
    """Entanglement swapping with a perfect Bell measurement.

    The output weights are the convolution of ``a`` and ``b`` over
    Z2 x Z2 (Pauli byproducts assumed corrected).
    """
    out = [0.0, 0.0, 0.0, 0.0]
    for i, pa in enumerate(a.p):
        if pa == 0.0:
            continue
        for j, pb in enumerate(b.p):
            out[i ^ j] += pa * pb
    return _checked(out)


def effective_input(state: BellDiagonal, resource_noise: NoiseParams) -> BellDiagonal:
    """Fold the LDN of the two resource input qubits onto an elementary pair.

    One layer per end; the result is what a perfect protocol would receive.
    """
    once = apply_ldn_one_qubit(state, resource_noise)
    return apply_ldn_one_qubit(once, resource_noise)


def output_noise_fidelity(noise: NoiseParams) -> float:
    """Fidelity of a perfect pair after LDN on both output qubits."""
    return effective_input(BellDiagonal.perfect(), noise).fidelity()

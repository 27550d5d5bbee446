"""Monte-Carlo oracle for the hashing protocol.

An ensemble of ``n`` Bell-diagonal pairs is a 2n-bit error string: pair ``i``
holds its symbol ``2k + l`` in bits ``2i`` (``l``) and ``2i + 1`` (``k``).  A
hashing round reveals the parity of a random subset of those bits; the
decoder keeps the likely strings consistent with every parity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.stats import binomtest

from .bell import BellDiagonal, NoiseParams, WernerParams, effective_input, entropy, output_noise_fidelity
from .bounds import DeltaSchedule, global_private_fidelity, p1_bound, p2_bound
from .gf2 import kernel_basis, parity, rref, solve_pivots

EXHAUSTIVE_MAX_BITS = 26
_CHUNK_BITS = 16
_TIE_TOL = 1e-12

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator]


class RoundsExceedError(ValueError):
    """``ceil(n (S + 2 delta))`` exceeds the 2n available parity bits."""


def _rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def trial_seed(seed: int, index: int, stream: int = 0) -> np.random.SeedSequence:
    """Private RNG stream of one trial; independent of evaluation order."""
    return np.random.SeedSequence([int(seed), int(index), int(stream)])


@dataclass(frozen=True)
class ErrorEnsemble:
    bits: int
    n: int
    source: BellDiagonal

    def __post_init__(self) -> None:
        if self.n < 1 or self.bits < 0 or self.bits.bit_length() > 2 * self.n:
            raise ValueError("bits must fit in 2n bits")

    def symbols(self) -> np.ndarray:
        return np.array([(self.bits >> (2 * i)) & 3 for i in range(self.n)], dtype=np.int64)


def _pack(symbols: Sequence[int]) -> int:
    out = 0
    for i, s in enumerate(symbols):
        out |= int(s) << (2 * i)
    return out


def sample_ensemble(source: BellDiagonal, n: int, seed: SeedLike) -> ErrorEnsemble:
    """Draw ``n`` i.i.d. Bell symbols from ``source``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    sym = _rng(seed).choice(4, size=n, p=np.asarray(source.p))
    return ErrorEnsemble(_pack(sym), n, source)


@dataclass(frozen=True)
class ParityRound:
    subset: int
    outcome: int

    def check(self, bits: int) -> bool:
        return parity(self.subset & bits) == self.outcome


@dataclass(frozen=True)
class HashingRun:
    success: bool
    decoded: int
    rounds: Tuple[ParityRound, ...]
    truth_likely: bool
    candidates: Optional[int]  # None in approximate mode
    approximate: bool

    @property
    def n_rounds(self) -> int:
        return len(self.rounds)


def _neglog_table(source: BellDiagonal) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return -np.log2(np.asarray(source.p))


def _neglog(bits: int, n: int, table: np.ndarray) -> float:
    return math.fsum(table[(bits >> (2 * i)) & 3] for i in range(n))


def _likely(neglog: float, n: int, S: float, delta: float) -> bool:
    # zero-probability symbols give inf and are never likely
    return math.isfinite(neglog) and abs(neglog / n - S) <= delta + _TIE_TOL


def hashing_rounds(n: int, S: float, delta: float) -> int:
    r = math.ceil(n * (S + 2.0 * delta) - 1e-9)
    if r > 2 * n:
        raise RoundsExceedError(f"{r} rounds exceed 2n = {2 * n}")
    return max(r, 1)


def _draw_masks(rng: np.random.Generator, width: int, count: int) -> List[int]:
    nbytes = (width + 7) // 8
    keep = (1 << width) - 1
    masks = []
    while len(masks) < count:
        m = int.from_bytes(rng.bytes(nbytes), "little") & keep
        if m:
            masks.append(m)
    return masks


def _symbol_columns(values: np.ndarray, n: int) -> np.ndarray:
    """Per-pair symbols of many packed strings (``values``: uint64)."""
    shifts = (2 * np.arange(n, dtype=np.uint64))[None, :]
    return ((values[:, None] >> shifts) & np.uint64(3)).astype(np.int64)


def _exhaustive(x0: int, kernel: List[int], n: int, table: np.ndarray, S: float, delta: float):
    """Count likely strings in ``x0 + span(kernel)``; also return the most probable."""
    d = len(kernel)
    lo_bits = min(d, _CHUNK_BITS)
    low = np.zeros(1 << lo_bits, dtype=np.uint64)
    for j in range(lo_bits):
        size = 1 << j
        low[size : 2 * size] = low[:size] ^ np.uint64(kernel[j])
    count, best, best_val, best_likely = 0, x0, math.inf, False
    for hi in range(1 << (d - lo_bits)):
        offset = x0
        for j in range(d - lo_bits):
            if (hi >> j) & 1:
                offset ^= kernel[lo_bits + j]
        vals = low ^ np.uint64(offset)
        neglog = table[_symbol_columns(vals, n)].sum(axis=1)
        with np.errstate(invalid="ignore"):
            likely = np.isfinite(neglog) & (np.abs(neglog / n - S) <= delta + _TIE_TOL)
        count += int(likely.sum())
        pool = np.where(likely, neglog, np.inf) if likely.any() else neglog
        i = int(np.argmin(pool))
        cand_likely = bool(likely[i])
        if (cand_likely and not best_likely) or (cand_likely == best_likely and pool[i] < best_val):
            best, best_val, best_likely = int(vals[i]), float(pool[i]), cand_likely
    return count, best


def _to_symbols(bits: int, n: int) -> np.ndarray:
    raw = np.frombuffer(bits.to_bytes((2 * n + 7) // 8, "little"), dtype=np.uint8)
    b = np.unpackbits(raw, bitorder="little")[: 2 * n]
    return (b[0::2] | (b[1::2] << 1)).astype(np.int64)


def _likely_mask(neglog: np.ndarray, n: int, S: float, delta: float) -> np.ndarray:
    with np.errstate(invalid="ignore"):
        return np.isfinite(neglog) & (np.abs(neglog / n - S) <= delta + _TIE_TOL)


def _any_likely(neglog: np.ndarray, n: int, S: float, delta: float) -> bool:
    return bool(_likely_mask(neglog, n, S, delta).any())


def _first_hit(sym_rows: np.ndarray, table: np.ndarray, n: int, S: float, delta: float) -> int:
    i = int(np.argmax(_likely_mask(table[sym_rows].sum(axis=1), n, S, delta)))
    return _pack(sym_rows[i])


def _collision_search(
    x: int,
    reduced: List[int],
    pivots: List[int],
    rhs: List[int],
    kernel: List[int],
    ens: ErrorEnsemble,
    table: np.ndarray,
    S: float,
    delta: float,
    rng: np.random.Generator,
    attempts: int,
) -> Optional[int]:
    """Look for a likely string other than ``x`` that matches every parity.

    Two one-sided searches: flips of ``x`` by one or two kernel basis vectors,
    and source-distributed samples completed on the pivot bits.  Finding
    nothing does not prove uniqueness.
    """
    n = ens.n

    def hit(y: int) -> bool:
        return y != x and _likely(_neglog(y, n, table), n, S, delta)

    if kernel:
        xs = _to_symbols(x, n)
        ks = np.stack([_to_symbols(k, n) for k in kernel])
        singles = xs[None, :] ^ ks
        if _any_likely(table[singles].sum(axis=1), n, S, delta):
            return _first_hit(singles, table, n, S, delta)
        for i in range(len(kernel) - 1):
            pairs = singles[i][None, :] ^ ks[i + 1 :]
            if _any_likely(table[pairs].sum(axis=1), n, S, delta):
                return _first_hit(pairs, table, n, S, delta)
    for _ in range(attempts):
        free = _pack(rng.choice(4, size=n, p=np.asarray(ens.source.p)))
        y = solve_pivots(reduced, pivots, rhs, free)
        if hit(y):
            return y
    return None


def run_hashing(
    ensemble: ErrorEnsemble,
    delta: float,
    seed: SeedLike,
    mode: str = "auto",
    attempts: int = 256,
) -> HashingRun:
    """Run the parity rounds on ``ensemble`` and decode.

    ``mode`` is ``"exhaustive"``, ``"approximate"`` or ``"auto"`` (exhaustive
    while ``2n <= 26``).  Success requires a likely truth that is the only
    likely string consistent with the parities.
    """
    n, x = ensemble.n, ensemble.bits
    S = entropy(ensemble.source)
    r = hashing_rounds(n, S, delta)
    rng = _rng(seed)
    masks = _draw_masks(rng, 2 * n, r)
    rounds = tuple(ParityRound(m, parity(m & x)) for m in masks)
    reduced, pivots, rhs = rref(masks, 2 * n, [pr.outcome for pr in rounds])
    kernel = kernel_basis(reduced, pivots, 2 * n)
    table = _neglog_table(ensemble.source)
    truth_likely = _likely(_neglog(x, n, table), n, S, delta)

    if mode == "auto":
        mode = "exhaustive" if 2 * n <= EXHAUSTIVE_MAX_BITS else "approximate"
    if mode == "exhaustive":
        if 2 * n > 62:
            raise ValueError("exhaustive decoding needs 2n <= 62")
        count, best = _exhaustive(x, kernel, n, table, S, delta)
        success = truth_likely and count == 1
        decoded = x if success else best
        assert not success or decoded == x
        return HashingRun(success, decoded, rounds, truth_likely, count, False)
    if mode != "approximate":
        raise ValueError(f"unknown mode {mode!r}")
    if not truth_likely:
        return HashingRun(False, x, rounds, False, None, True)
    other = _collision_search(x, reduced, pivots, rhs, kernel, ensemble, table, S, delta, rng, attempts)
    if other is None:
        return HashingRun(True, x, rounds, True, None, True)
    return HashingRun(False, other, rounds, True, None, True)


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> Tuple[float, float]:
    ci = binomtest(successes, trials).proportion_ci(confidence_level=confidence, method="wilson")
    return float(ci.low), float(ci.high)


@dataclass(frozen=True)
class McReport:
    F_in: float
    n: int
    delta: float
    trials: int
    failures: int
    empirical_p_fail: float
    analytic_bound: float  # raw p1 + p2, may exceed 1
    wilson_ci: Tuple[float, float]
    approximate: bool

    @property
    def bound_informative(self) -> bool:
        return self.analytic_bound < 1.0

    @property
    def dominated(self) -> bool:
        """Data do not show ``p_fail > bound`` at the report's confidence."""
        return (not self.bound_informative) or self.wilson_ci[0] <= self.analytic_bound

    @property
    def strictly_dominated(self) -> bool:
        """Whole confidence interval lies below the bound."""
        return (not self.bound_informative) or self.wilson_ci[1] <= self.analytic_bound


def validate_bound(
    F_in: float,
    n_grid: Sequence[int],
    schedule: DeltaSchedule,
    trials: int,
    seed: int = 0,
    mode: str = "auto",
) -> List[McReport]:
    """Empirical hashing failure rate next to ``p1 + p2`` on Werner inputs."""
    if trials < 100:
        raise ValueError("trials must be >= 100")
    source = WernerParams(F_in).as_bell_diagonal()
    S = entropy(source)
    reports = []
    for n in n_grid:
        delta = schedule.resolve(n, S)
        failures, approx = 0, False
        for t in range(trials):
            ens = sample_ensemble(source, n, trial_seed(seed, t, 2 * n))
            run = run_hashing(ens, delta, trial_seed(seed, t, 2 * n + 1), mode)
            failures += not run.success
            approx = approx or run.approximate
        bound = p1_bound(F_in, n, delta) + p2_bound(n, delta) if F_in < 1 else p2_bound(n, delta)
        reports.append(
            McReport(F_in, n, delta, trials, failures, failures / trials, bound, wilson_interval(failures, trials), approx)
        )
    return reports


@dataclass(frozen=True)
class ChainReport:
    F_in: float
    N_links: int
    n: int
    delta: float
    trials: int
    all_succeeded: int
    empirical_fidelity: float
    fidelity_ci: Tuple[float, float]
    analytic_fidelity: float  # F_gp times output-noise fidelity

    @property
    def consistent(self) -> bool:
        """The bound is not significantly above the empirical fidelity."""
        return self.fidelity_ci[1] >= self.analytic_fidelity


def simulate_chain(
    F_in: float,
    N_links: int,
    n: int,
    delta: float,
    resource_noise: NoiseParams = NoiseParams(),
    trials: int = 200,
    seed: int = 0,
    mode: str = "auto",
) -> ChainReport:
    """End-to-end fidelity of ``N_links`` hashed links joined by perfect swaps.

    A trial yields perfect pairs when every link decodes correctly, which then
    receive output noise; any link failure is scored as fidelity zero.
    """
    source = effective_input(WernerParams(F_in).as_bell_diagonal(), resource_noise)
    f_out = output_noise_fidelity(resource_noise)
    ok = 0
    for t in range(trials):
        good = True
        for link in range(N_links):
            idx = t * N_links + link
            ens = sample_ensemble(source, n, trial_seed(seed, idx, 0))
            if not run_hashing(ens, delta, trial_seed(seed, idx, 1), mode).success:
                good = False
                break
        ok += good
    lo, hi = wilson_interval(ok, trials)
    bound = global_private_fidelity(source.fidelity(), n, DeltaSchedule.fixed(delta), N_links).F_gp
    return ChainReport(F_in, N_links, n, delta, trials, ok, f_out * ok / trials, (f_out * lo, f_out * hi), bound * f_out)

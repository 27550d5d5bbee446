"""CHP-style stabilizer tableau with generator rows packed into ints.

Rows ``0..n-1`` are destabilizers and ``n..2n-1`` stabilizers.  Row ``i``
is the Pauli ``(-1)^r[i] prod_j P_j`` where qubit ``j`` carries ``X`` if bit
``j`` of ``x[i]`` is set, ``Z`` for ``z[i]``, and ``Y`` for both.
Measurement outcomes are bits: 0 for eigenvalue +1 and 1 for -1.
"""

from __future__ import annotations

import random as _random
from typing import Iterable, List, Optional, Sequence, Tuple

from ..gf2 import rref

Pauli = Tuple[int, int, int]  # (x, z, sign bit)


def _popcount(v: int) -> int:
    return v.bit_count()


def g_sum(x1: int, z1: int, x2: int, z2: int) -> int:
    """Exponent of ``i`` picked up when multiplying Pauli 1 by Pauli 2."""
    y1 = x1 & z1
    xo = x1 & ~z1
    zo = ~x1 & z1
    pos = (y1 & z2 & ~x2) | (xo & x2 & z2) | (zo & x2 & ~z2)
    neg = (y1 & x2 & ~z2) | (xo & z2 & ~x2) | (zo & x2 & z2)
    return _popcount(pos) - _popcount(neg)


def pauli_mul(a: Pauli, b: Pauli) -> Pauli:
    """Product ``a * b`` of commuting Hermitian Paulis."""
    x1, z1, r1 = a
    x2, z2, r2 = b
    e = (2 * r1 + 2 * r2 + g_sum(x1, z1, x2, z2)) % 4
    if e % 2:
        raise ValueError("product of anticommuting Paulis is not Hermitian")
    return (x1 ^ x2, z1 ^ z2, e // 2)


def commutes(a: Pauli, b: Pauli) -> bool:
    return (_popcount(a[0] & b[1]) + _popcount(a[1] & b[0])) % 2 == 0


def parse_pauli(label: str) -> Pauli:
    """``"+XZI"`` style label; qubit 0 is the first letter."""
    sign = 0
    if label[0] in "+-":
        sign = int(label[0] == "-")
        label = label[1:]
    x = z = 0
    for j, ch in enumerate(label):
        if ch in "XY":
            x |= 1 << j
        if ch in "ZY":
            z |= 1 << j
        if ch not in "IXYZ":
            raise ValueError(f"bad Pauli letter {ch!r}")
    return (x, z, sign)


def format_pauli(p: Pauli, n: int) -> str:
    x, z, r = p
    letters = "".join("IXZY"[((x >> j) & 1) | (((z >> j) & 1) << 1)] for j in range(n))
    return ("-" if r else "+") + letters


def _drop_bit(v: int, q: int) -> int:
    return ((v >> (q + 1)) << q) | (v & ((1 << q) - 1))


class StabilizerTableau:
    """Mutable stabilizer state on ``n_qubits`` qubits (starts in ``|0...0>``)."""

    def __init__(self, n_qubits: int):
        if n_qubits < 0:
            raise ValueError("n_qubits must be >= 0")
        n = n_qubits
        self.n = n
        self.x: List[int] = [1 << i for i in range(n)] + [0] * n
        self.z: List[int] = [0] * n + [1 << i for i in range(n)]
        self.r: List[int] = [0] * (2 * n)

    @property
    def n_qubits(self) -> int:
        return self.n

    def copy(self) -> "StabilizerTableau":
        t = StabilizerTableau.__new__(StabilizerTableau)
        t.n, t.x, t.z, t.r = self.n, list(self.x), list(self.z), list(self.r)
        return t

    # -- construction -------------------------------------------------------

    @classmethod
    def from_stabilizers(cls, stabilizers: Sequence[Pauli], n_qubits: int) -> "StabilizerTableau":
        """Tableau for the state stabilized by ``n_qubits`` independent generators.

        Destabilizers are found by solving for symplectic duals and then made
        mutually commuting.
        """
        n = n_qubits
        stabs = [tuple(int(v) for v in s) for s in stabilizers]
        if len(stabs) != n:
            raise ValueError(f"need {n} generators, got {len(stabs)}")
        for i in range(n):
            for j in range(i + 1, n):
                if not commutes(stabs[i], stabs[j]):
                    raise ValueError("generators do not commute")
        # symplectic product with s is the plain dot product with swap(s)
        swapped = [s[1] | (s[0] << n) for s in stabs]
        reduced, pivots, ops = _elimination(swapped, 2 * n)
        if len(pivots) != n:
            raise ValueError("generators are not independent")
        destabs: List[Tuple[int, int]] = []
        for i in range(n):
            v = 0
            for k, pc in enumerate(pivots):
                if (ops[k] >> i) & 1:
                    v |= 1 << pc
            destabs.append((v & ((1 << n) - 1), v >> n))
        for i in range(n):
            for j in range(i + 1, n):
                a, b = destabs[i], destabs[j]
                if not commutes((a[0], a[1], 0), (b[0], b[1], 0)):
                    destabs[j] = (b[0] ^ stabs[i][0], b[1] ^ stabs[i][1])
        t = cls(n)
        t.x = [d[0] for d in destabs] + [s[0] for s in stabs]
        t.z = [d[1] for d in destabs] + [s[1] for s in stabs]
        t.r = [0] * n + [s[2] for s in stabs]
        t.validate()
        return t

    @classmethod
    def bell_pairs(cls, pairs: Iterable[Tuple[int, int]], n_qubits: int) -> "StabilizerTableau":
        t = cls(n_qubits)
        for a, b in pairs:
            t.h(a)
            t.cnot(a, b)
        return t

    def tensor(self, other: "StabilizerTableau") -> "StabilizerTableau":
        """``self`` on the low qubits, ``other`` shifted above it."""
        n, m = self.n, other.n
        t = StabilizerTableau(n + m)
        t.x = self.x[:n] + [v << n for v in other.x[:m]] + self.x[n:] + [v << n for v in other.x[m:]]
        t.z = self.z[:n] + [v << n for v in other.z[:m]] + self.z[n:] + [v << n for v in other.z[m:]]
        t.r = self.r[:n] + other.r[:m] + self.r[n:] + other.r[m:]
        return t

    # -- gates ----------------------------------------------------------------

    def h(self, q: int) -> None:
        b = 1 << q
        x, z, r = self.x, self.z, self.r
        for i in range(2 * self.n):
            xi, zi = x[i] & b, z[i] & b
            if xi and zi:
                r[i] ^= 1
            x[i] = (x[i] & ~b) | zi
            z[i] = (z[i] & ~b) | xi

    def s(self, q: int) -> None:
        b = 1 << q
        x, z, r = self.x, self.z, self.r
        for i in range(2 * self.n):
            if x[i] & b:
                if z[i] & b:
                    r[i] ^= 1
                z[i] ^= b

    def sdg(self, q: int) -> None:
        self.s(q)
        self.s(q)
        self.s(q)

    def pauli_x(self, q: int) -> None:
        b = 1 << q
        for i in range(2 * self.n):
            if self.z[i] & b:
                self.r[i] ^= 1

    def pauli_z(self, q: int) -> None:
        b = 1 << q
        for i in range(2 * self.n):
            if self.x[i] & b:
                self.r[i] ^= 1

    def pauli_y(self, q: int) -> None:
        b = 1 << q
        for i in range(2 * self.n):
            if (self.x[i] ^ self.z[i]) & b:
                self.r[i] ^= 1

    def cnot(self, c: int, t: int) -> None:
        if c == t:
            raise ValueError("control equals target")
        bc, bt = 1 << c, 1 << t
        x, z, r = self.x, self.z, self.r
        for i in range(2 * self.n):
            xc, zt = bool(x[i] & bc), bool(z[i] & bt)
            if xc and zt and (bool(x[i] & bt) == bool(z[i] & bc)):
                r[i] ^= 1
            if xc:
                x[i] ^= bt
            if zt:
                z[i] ^= bc

    def cz(self, a: int, b: int) -> None:
        self.h(b)
        self.cnot(a, b)
        self.h(b)

    def apply(self, gate: str, *qubits: int) -> None:
        """Apply a named gate (``H S Sdg X Y Z CNOT CZ``)."""
        fn = {
            "H": self.h,
            "S": self.s,
            "Sdg": self.sdg,
            "X": self.pauli_x,
            "Y": self.pauli_y,
            "Z": self.pauli_z,
            "CNOT": self.cnot,
            "CZ": self.cz,
        }.get(gate)
        if fn is None:
            raise ValueError(f"non-Clifford or unknown gate {gate!r}")
        fn(*qubits)

    def apply_pauli(self, p: Pauli) -> None:
        """Apply the Pauli operator ``p`` (its sign is a global phase)."""
        x, z, _ = p
        for i in range(2 * self.n):
            if (_popcount(self.x[i] & z) + _popcount(self.z[i] & x)) % 2:
                self.r[i] ^= 1

    # -- measurement ----------------------------------------------------------

    def _row(self, i: int) -> Pauli:
        return (self.x[i], self.z[i], self.r[i])

    def _rowsum(self, h: int, i: int) -> None:
        e = (2 * self.r[h] + 2 * self.r[i] + g_sum(self.x[i], self.z[i], self.x[h], self.z[h])) % 4
        self.r[h] = 1 if e >= 2 else 0
        self.x[h] ^= self.x[i]
        self.z[h] ^= self.z[i]

    def measure_z(self, q: int, forced_outcome: Optional[int] = None, rng=None) -> Tuple[int, bool]:
        """Measure ``Z_q``; returns ``(outcome, deterministic)``.

        A random outcome is ``forced_outcome`` when given, otherwise drawn
        from ``rng`` (a ``random.Random``-like object) or 0.
        """
        n, b = self.n, 1 << q
        p = next((i for i in range(n, 2 * n) if self.x[i] & b), None)
        if p is not None:
            for i in range(2 * n):
                if i != p and self.x[i] & b:
                    self._rowsum(i, p)
            d = p - n
            self.x[d], self.z[d], self.r[d] = self.x[p], self.z[p], self.r[p]
            if forced_outcome is not None:
                outcome = int(forced_outcome) & 1
            elif rng is not None:
                outcome = rng.getrandbits(1)
            else:
                outcome = 0
            self.x[p], self.z[p], self.r[p] = 0, b, outcome
            return outcome, False
        acc: Pauli = (0, 0, 0)
        for i in range(n):
            if self.x[i] & b:
                acc = pauli_mul(acc, self._row(i + n))
        return acc[2], True

    def measure_pauli(
        self, q: int, basis: str = "Z", forced_outcome: Optional[int] = None, rng=None
    ) -> Tuple[int, bool]:
        """Single-qubit Pauli measurement in basis ``X``, ``Y`` or ``Z``."""
        if basis == "Z":
            return self.measure_z(q, forced_outcome, rng)
        if basis == "X":
            self.h(q)
            out = self.measure_z(q, forced_outcome, rng)
            self.h(q)
            return out
        if basis == "Y":
            self.sdg(q)
            self.h(q)
            out = self.measure_z(q, forced_outcome, rng)
            self.h(q)
            self.s(q)
            return out
        raise ValueError(f"basis must be X, Y or Z, got {basis!r}")

    def expectation(self, p: Pauli) -> Optional[int]:
        """+1/-1 if ``+p``'s eigenvalue is fixed, ``None`` if random (0 mean)."""
        n = self.n
        for i in range(n, 2 * n):
            if not commutes(p, self._row(i)):
                return None
        acc: Pauli = (0, 0, 0)
        for i in range(n):
            if not commutes(p, self._row(i)):
                acc = pauli_mul(acc, self._row(i + n))
        if (acc[0], acc[1]) != (p[0], p[1]):
            raise AssertionError("Pauli not in stabilizer group despite commuting")
        return 1 if acc[2] == p[2] else -1

    # -- structure ------------------------------------------------------------

    def stabilizers(self) -> List[Pauli]:
        return [self._row(i) for i in range(self.n, 2 * self.n)]

    def canonical_form(self) -> Tuple[Pauli, ...]:
        """Reduced-row-echelon generators with tracked signs; unique per state."""
        n = self.n
        rows = self.stabilizers()
        key = lambda p: p[0] | (p[1] << n)  # noqa: E731
        out: List[Pauli] = []
        rank = 0
        for col in range(2 * n):
            bit = 1 << col
            piv = next((i for i in range(rank, n) if key(rows[i]) & bit), None)
            if piv is None:
                continue
            rows[rank], rows[piv] = rows[piv], rows[rank]
            for i in range(n):
                if i != rank and key(rows[i]) & bit:
                    rows[i] = pauli_mul(rows[i], rows[rank])
            rank += 1
        out = rows[:rank]
        return tuple(out)

    def same_state(self, other: "StabilizerTableau") -> bool:
        return self.n == other.n and self.canonical_form() == other.canonical_form()

    def validate(self) -> None:
        """Check commutation relations and full rank."""
        n = self.n
        rows = [self._row(i) for i in range(2 * n)]
        for i in range(n, 2 * n):
            for j in range(i + 1, 2 * n):
                if not commutes(rows[i], rows[j]):
                    raise AssertionError("stabilizers do not commute")
        for i in range(n):
            for j in range(n, 2 * n):
                if commutes(rows[i], rows[j]) == (j - n == i):
                    raise AssertionError("destabilizer pairing broken")
        if len(rref([r[0] | (r[1] << n) for r in rows[n:]], 2 * n)[1]) != n:
            raise AssertionError("stabilizers not independent")

    def remove_qubits(self, qubits: Iterable[int]) -> "StabilizerTableau":
        """New tableau without ``qubits``, each of which must be a ``Z`` eigenstate."""
        t = self
        for q in sorted(set(qubits), reverse=True):
            t = t._remove_one(q)
        return t

    def _remove_one(self, q: int) -> "StabilizerTableau":
        n, b = self.n, 1 << q
        probe = self.copy()
        outcome, det = probe.measure_z(q)
        if not det:
            raise ValueError(f"qubit {q} is not in a Z eigenstate")
        rows = self.stabilizers()
        if any(r[0] & b for r in rows):
            raise AssertionError("Z eigenstate with X support on its qubit")
        piv = next(i for i, r in enumerate(rows) if r[1] & b)
        for i in range(n):
            if i != piv and rows[i][1] & b:
                rows[i] = pauli_mul(rows[i], rows[piv])
        rest = [(_drop_bit(x, q), _drop_bit(z, q), r) for i, (x, z, r) in enumerate(rows) if i != piv]
        return StabilizerTableau.from_stabilizers(rest, n - 1)

    def permuted(self, order: Sequence[int]) -> "StabilizerTableau":
        """Tableau whose qubit ``k`` is this tableau's qubit ``order[k]``."""
        if sorted(order) != list(range(self.n)):
            raise ValueError("order must be a permutation")

        def move(v: int) -> int:
            out = 0
            for k, src in enumerate(order):
                if (v >> src) & 1:
                    out |= 1 << k
            return out

        t = self.copy()
        t.x = [move(v) for v in self.x]
        t.z = [move(v) for v in self.z]
        return t

    def __repr__(self) -> str:
        gens = ", ".join(format_pauli(p, self.n) for p in self.stabilizers())
        return f"StabilizerTableau(n={self.n}, [{gens}])"


def _elimination(rows: Sequence[int], n_cols: int):
    """RREF of ``rows`` plus the row operations that produced it.

    ``ops[k]`` has bit ``i`` set when reduced row ``k`` contains input row ``i``.
    """
    work = list(rows)
    ops = [1 << i for i in range(len(rows))]
    pivots: List[int] = []
    r = 0
    for col in range(n_cols):
        bit = 1 << col
        piv = next((i for i in range(r, len(work)) if work[i] & bit), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        ops[r], ops[piv] = ops[piv], ops[r]
        for i in range(len(work)):
            if i != r and work[i] & bit:
                work[i] ^= work[r]
                ops[i] ^= ops[r]
        pivots.append(col)
        r += 1
    return work[:r], pivots, ops[:r]


def random_stabilizer_state(n: int, depth: int, seed: int) -> StabilizerTableau:
    """Random Clifford circuit applied to ``|0...0>`` (for tests and demos)."""
    rng = _random.Random(seed)
    t = StabilizerTableau(n)
    for _ in range(depth):
        kind = rng.randrange(3)
        q = rng.randrange(n)
        if kind == 0:
            t.h(q)
        elif kind == 1:
            t.s(q)
        elif n > 1:
            c = rng.randrange(n - 1)
            t.cnot(q, c if c < q else c + 1)
    return t

"""Hashing circuits and their measurement-based resource states.

One side of a hashing round ``(mask, target)`` rotates every pair in the
subset so that the masked combination of its error bits becomes its bit-flip
bit, gathers those bits into the target with CNOTs, measures the target in
``Z`` and undoes the rotations.  Side ``A`` uses ``H S H`` where side ``B``
uses ``H S^dag H`` so that the pair of local operations preserves ``|phi+>``.

A resource is built by applying one side's circuit to halves of Bell pairs
and projecting the targets onto outcome 0; reading a state into it by Bell
measurements with outcomes ``(x, y)`` applies the circuit to ``X^y Z^x``
times that state.
"""

from __future__ import annotations

import random as _random
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .graph import GraphResource, to_graph_state
from .tableau import Pauli, StabilizerTableau

Op = Tuple  # ("H", q) | ("S", q) | ("Sdg", q) | ("CNOT", c, t) | ("MZ", q)

_INVERSE = {"H": "H", "S": "Sdg", "Sdg": "S"}


@dataclass(frozen=True)
class HashingCircuit:
    """``rounds`` of ``(mask, target)``; mask bit ``2i`` selects the bit-flip
    bit and ``2i + 1`` the phase bit of pair ``i``."""

    n: int
    rounds: Tuple[Tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be >= 1")
        measured = set()
        for mask, t in self.rounds:
            if not 0 <= t < self.n or t in measured:
                raise ValueError(f"target {t} out of range or reused")
            if mask <= 0 or mask.bit_length() > 2 * self.n:
                raise ValueError("mask must be a non-empty 2n-bit subset")
            if any((mask >> (2 * q)) & 3 for q in measured):
                raise ValueError("mask touches an already measured pair")
            measured.add(t)
        if len(self.rounds) >= self.n:
            raise ValueError("at least one pair must survive")

    @property
    def m(self) -> int:
        return self.n - len(self.rounds)

    @property
    def targets(self) -> List[int]:
        return [t for _, t in self.rounds]

    @property
    def survivors(self) -> List[int]:
        gone = set(self.targets)
        return [i for i in range(self.n) if i not in gone]

    def ops(self, side: str = "A") -> List[Op]:
        """Gate list of one side on local pair indices ``0..n-1``."""
        if side not in ("A", "B"):
            raise ValueError("side must be 'A' or 'B'")
        mid = "S" if side == "A" else "Sdg"
        out: List[Op] = []
        for mask, t in self.rounds:
            pre: Dict[int, List[str]] = {}
            for i in range(self.n):
                bits = (mask >> (2 * i)) & 3
                if bits == 2:
                    pre[i] = ["H"]
                elif bits == 3:
                    pre[i] = ["H", mid, "H"]
                elif bits == 1:
                    pre[i] = []
            for i, word in pre.items():
                out.extend((g, i) for g in word)
            out.extend(("CNOT", i, t) for i in pre if i != t)
            out.append(("MZ", t))
            for i, word in pre.items():
                if i != t:
                    out.extend((_INVERSE[g], i) for g in reversed(word))
        return out

    @classmethod
    def random(cls, n: int, n_rounds: int, seed: int) -> "HashingCircuit":
        rng = _random.Random(seed)
        alive = list(range(n))
        rounds = []
        for _ in range(n_rounds):
            t = rng.choice(alive)
            mask = 0
            while mask == 0:
                for i in alive:
                    mask |= rng.randrange(4) << (2 * i)
            rounds.append((mask, t))
            alive.remove(t)
        return cls(n, tuple(rounds))


def apply_ops(
    tab: StabilizerTableau,
    ops: Sequence[Op],
    qubits: Sequence[int],
    outcomes: Optional[Dict[int, int]] = None,
) -> Dict[int, int]:
    """Apply ``ops`` with local index ``i`` acting on ``qubits[i]``.

    Random ``MZ`` outcomes are forced to ``outcomes[i]`` (default 0); a
    deterministic outcome that disagrees raises ``ValueError``.
    """
    outcomes = outcomes or {}
    got: Dict[int, int] = {}
    for op in ops:
        name = op[0]
        if name == "MZ":
            i = op[1]
            want = outcomes.get(i, 0)
            res, det = tab.measure_z(qubits[i], forced_outcome=want)
            if det and res != want:
                raise ValueError(f"outcome {want} impossible on pair {i}")
            got[i] = res
        elif name == "CNOT":
            tab.cnot(qubits[op[1]], qubits[op[2]])
        else:
            tab.apply(name, qubits[op[1]])
    return got


def jamiolkowski_tableau(circuit: HashingCircuit, side: str = "A") -> Tuple[StabilizerTableau, Tuple[str, ...]]:
    """Resource tableau: qubits ``0..n-1`` are inputs, then the ``m`` outputs."""
    n = circuit.n
    if n > 32:
        raise ValueError("resource construction is limited to n <= 32")
    tab = StabilizerTableau.bell_pairs([(i, n + i) for i in range(n)], 2 * n)
    apply_ops(tab, circuit.ops(side), [n + i for i in range(n)])
    tab = tab.remove_qubits(n + t for t in circuit.targets)
    return tab, ("input",) * n + ("output",) * circuit.m


def jamiolkowski_resource(circuit: HashingCircuit, side: str = "A") -> GraphResource:
    tab, labels = jamiolkowski_tableau(circuit, side)
    return to_graph_state(tab, labels)


def bell_measure(tab: StabilizerTableau, a: int, b: int, rng=None) -> Tuple[int, int]:
    """Bell measurement; returns ``(x, y)`` from qubits ``a`` and ``b``.

    Random outcomes are drawn from ``rng`` or forced to 0 without one.
    """
    tab.cnot(a, b)
    tab.h(a)
    x, _ = tab.measure_z(a, rng=rng)
    y, _ = tab.measure_z(b, rng=rng)
    return x, y


def read_in(
    state: StabilizerTableau,
    state_qubits: Sequence[int],
    resource: StabilizerTableau,
    resource_inputs: Sequence[int],
    rng=None,
) -> Tuple[StabilizerTableau, List[Tuple[int, int]]]:
    """Bell-measure ``state_qubits`` into ``resource_inputs``.

    The result keeps the remaining state qubits (in order) followed by the
    remaining resource qubits (in order).
    """
    if len(state_qubits) != len(resource_inputs):
        raise ValueError("one resource input per state qubit")
    ns = state.n
    tab = state.tensor(resource)
    record = [bell_measure(tab, q, ns + r, rng) for q, r in zip(state_qubits, resource_inputs)]
    gone = list(state_qubits) + [ns + r for r in resource_inputs]
    return tab.remove_qubits(gone), record


def station_resource(left: GraphResource, right: GraphResource) -> GraphResource:
    """Join two hashing resources by Bell-measuring matching outputs.

    ``left`` acts on the pairs arriving from the left link (side ``B``) and
    ``right`` on those of the right link (side ``A``); the station keeps the
    ``2n`` input qubits.
    """
    lo, ro = left.outputs, right.outputs
    if len(lo) != len(ro):
        raise ValueError(f"output counts differ: {len(lo)} vs {len(ro)}")
    nl = left.n_qubits
    tab = left.to_tableau().tensor(right.to_tableau())
    for a, b in zip(lo, ro):
        bell_measure(tab, a, nl + b)
    tab = tab.remove_qubits(list(lo) + [nl + b for b in ro])
    n_in = len(left.inputs) + len(right.inputs)
    return to_graph_state(tab, ("input",) * n_in)


def propagate_pauli(ops: Sequence[Op], pauli: Pauli) -> Tuple[Pauli, Dict[int, int]]:
    """Push a Pauli (sign ignored) through ``ops``.

    Returns the Pauli after the circuit, with measured pairs cleared, and the
    outcome flips its X part causes at each ``MZ``.
    """
    x, z, _ = pauli
    flips: Dict[int, int] = {}
    for op in ops:
        name = op[0]
        if name == "MZ":
            b = 1 << op[1]
            flips[op[1]] = int(bool(x & b))
            x &= ~b
            z &= ~b
        elif name == "CNOT":
            bc, bt = 1 << op[1], 1 << op[2]
            if x & bc:
                x ^= bt
            if z & bt:
                z ^= bc
        elif name == "H":
            b = 1 << op[1]
            xb, zb = x & b, z & b
            x = (x & ~b) | zb
            z = (z & ~b) | xb
        elif name in ("S", "Sdg"):
            b = 1 << op[1]
            if x & b:
                z ^= b
        else:
            raise ValueError(f"cannot propagate through {name!r}")
    return (x, z, 0), flips


def byproduct(record: Sequence[Tuple[int, int]]) -> Pauli:
    """``prod_i X^y_i Z^x_i`` on local indices."""
    x = z = 0
    for i, (mx, my) in enumerate(record):
        if my:
            x |= 1 << i
        if mx:
            z |= 1 << i
    return (x, z, 0)


def compact(p: Pauli, keep: Sequence[int]) -> Pauli:
    """Restrict a Pauli to the local indices in ``keep``, renumbered in order."""
    x = z = 0
    for k, i in enumerate(keep):
        if (p[0] >> i) & 1:
            x |= 1 << k
        if (p[1] >> i) & 1:
            z |= 1 << k
    return (x, z, p[2])


def shift(p: Pauli, offset: int) -> Pauli:
    return (p[0] << offset, p[1] << offset, p[2])

"""Graph states with local Cliffords, and conversion from tableaux."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..gf2 import rref
from .local import LOCAL_CLIFFORDS, index_of, inverse
from .tableau import StabilizerTableau

IO_LABELS = ("input", "output")


def graph_state(adjacency: np.ndarray) -> StabilizerTableau:
    adj = np.asarray(adjacency, dtype=np.uint8)
    n = adj.shape[0]
    t = StabilizerTableau(n)
    for q in range(n):
        t.h(q)
    for a in range(n):
        for b in range(a + 1, n):
            if adj[a, b]:
                t.cz(a, b)
    return t


@dataclass(frozen=True)
class GraphResource:
    """State ``(prod_q C_q) |G>`` where ``C_q = LOCAL_CLIFFORDS[local_cliffords[q]]``."""

    adjacency: np.ndarray
    local_cliffords: Tuple[int, ...]
    io_labels: Tuple[str, ...]

    def __post_init__(self) -> None:
        adj = np.asarray(self.adjacency, dtype=np.uint8)
        n = adj.shape[0]
        if adj.shape != (n, n) or (adj != adj.T).any() or adj.diagonal().any():
            raise ValueError("adjacency must be symmetric with zero diagonal")
        if len(self.local_cliffords) != n or len(self.io_labels) != n:
            raise ValueError("one local Clifford and one label per qubit")
        if any(lbl not in IO_LABELS for lbl in self.io_labels):
            raise ValueError(f"labels must be one of {IO_LABELS}")
        object.__setattr__(self, "adjacency", adj)

    @property
    def n_qubits(self) -> int:
        return self.adjacency.shape[0]

    @property
    def inputs(self) -> List[int]:
        return [q for q, lbl in enumerate(self.io_labels) if lbl == "input"]

    @property
    def outputs(self) -> List[int]:
        return [q for q, lbl in enumerate(self.io_labels) if lbl == "output"]

    def edges(self) -> List[Tuple[int, int]]:
        a, b = np.nonzero(np.triu(self.adjacency))
        return [(int(i), int(j)) for i, j in zip(a, b)]

    def to_tableau(self) -> StabilizerTableau:
        t = graph_state(self.adjacency)
        for q, c in enumerate(self.local_cliffords):
            for g in LOCAL_CLIFFORDS[c]:
                t.apply(g, q)
        return t

    def to_json(self) -> Dict:
        """``{n_qubits, edges, local_cliffords, io_labels}``.

        ``local_cliffords`` holds gate words over ``H`` and ``S`` applied in
        order to the graph-state qubit (empty word = identity).
        """
        return {
            "n_qubits": self.n_qubits,
            "edges": [list(e) for e in self.edges()],
            "local_cliffords": [LOCAL_CLIFFORDS[c] for c in self.local_cliffords],
            "io_labels": list(self.io_labels),
        }

    @classmethod
    def from_json(cls, doc: Dict) -> "GraphResource":
        n = int(doc["n_qubits"])
        adj = np.zeros((n, n), dtype=np.uint8)
        for a, b in doc["edges"]:
            adj[a, b] = adj[b, a] = 1
        return cls(adj, tuple(index_of(w) for w in doc["local_cliffords"]), tuple(doc["io_labels"]))


def to_graph_state(
    tableau: StabilizerTableau, io_labels: Optional[Sequence[str]] = None
) -> GraphResource:
    """Local-Clifford-equivalent graph state of ``tableau``.

    Hadamards on a complementary set of qubits make the X block invertible;
    the generators are then brought to ``[I | Theta]``, diagonal entries of
    ``Theta`` are cleared with ``S`` and signs with ``Z``.  The inverse of the
    applied local gates is stored per qubit, and the result is checked by
    rebuilding the tableau.
    """
    n = tableau.n
    labels = tuple(io_labels) if io_labels is not None else ("output",) * n
    work = tableau.copy()
    words = [""] * n

    def apply(g: str, q: int) -> None:
        work.apply(g, q)
        words[q] += g

    full = [x | (z << n) for x, z, _ in work.stabilizers()]
    _, pivots, _ = rref(full, 2 * n)
    for col in pivots:
        if col >= n:
            apply("H", col - n)

    canon = work.canonical_form()
    if [p[0] for p in canon] != [1 << i for i in range(n)]:
        raise AssertionError("X block not invertible after local Hadamards")
    for i, p in enumerate(canon):
        if (p[1] >> i) & 1:
            apply("S", i)
    for i, p in enumerate(work.canonical_form()):
        if p[2]:
            apply("S", i)
            apply("S", i)

    canon = work.canonical_form()
    adj = np.zeros((n, n), dtype=np.uint8)
    for i, (_, z, r) in enumerate(canon):
        if r or (z >> i) & 1:
            raise AssertionError("graph reduction left a sign or self-loop")
        for j in range(n):
            adj[i, j] = (z >> j) & 1
    res = GraphResource(adj, tuple(inverse(index_of(w)) for w in words), labels)
    if not res.to_tableau().same_state(tableau):
        raise AssertionError("graph-state round trip failed")
    return res

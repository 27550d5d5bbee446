"""The 24 single-qubit Cliffords (modulo phase) as words over ``H`` and ``S``."""

from __future__ import annotations

from collections import deque
from typing import Dict, List, Tuple

# signed single-qubit Pauli: (x, z, sign)
_SP = Tuple[int, int, int]


def _h(p: _SP) -> _SP:
    x, z, r = p
    return (z, x, r ^ (x & z))


def _s(p: _SP) -> _SP:
    x, z, r = p
    return (x, z ^ x, r ^ (x & z))


_GATES = {"H": _h, "S": _s}


def _act(word: str, p: _SP) -> _SP:
    """Image of ``p`` under conjugation by the word, gates applied left to right."""
    for g in word:
        p = _GATES[g](p)
    return p


def _signature(word: str) -> Tuple[_SP, _SP]:
    return _act(word, (1, 0, 0)), _act(word, (0, 1, 0))


def _enumerate() -> List[str]:
    seen: Dict[Tuple[_SP, _SP], str] = {_signature(""): ""}
    queue = deque([""])
    while queue:
        w = queue.popleft()
        for g in "HS":
            nw = w + g
            sig = _signature(nw)
            if sig not in seen:
                seen[sig] = nw
                queue.append(nw)
    return list(seen.values())


LOCAL_CLIFFORDS: List[str] = _enumerate()
_BY_SIG = {_signature(w): i for i, w in enumerate(LOCAL_CLIFFORDS)}
assert len(LOCAL_CLIFFORDS) == 24


def index_of(word: str) -> int:
    """Index in ``LOCAL_CLIFFORDS`` of the Clifford a gate word implements.

    Accepts ``H``, ``S`` and ``D`` (``S`` dagger); other letters are ignored
    only if they are ``I``.
    """
    expanded = word.replace("I", "").replace("D", "SSS")
    return _BY_SIG[_signature(expanded)]


def compose(first: int, second: int) -> int:
    """Index of applying ``first`` then ``second``."""
    return index_of(LOCAL_CLIFFORDS[first] + LOCAL_CLIFFORDS[second])


def inverse(idx: int) -> int:
    for j in range(24):
        if compose(idx, j) == 0:
            return j
    raise AssertionError("group element without inverse")

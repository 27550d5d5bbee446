"""GF(2) linear algebra on rows packed into Python ints (bit j = column j)."""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple


def parity(x: int) -> int:
    return x.bit_count() & 1


def rref(rows: Sequence[int], n_cols: int, rhs: Optional[Sequence[int]] = None):
    """Reduced row echelon form.

    Returns ``(rows, pivots, rhs)`` with only the non-zero rows kept;
    ``pivots[i]`` is the pivot column of row ``i``.  When ``rhs`` is given the
    same row operations are applied to it; inconsistent systems raise
    ``ValueError``.
    """
    work = list(rows)
    b = list(rhs) if rhs is not None else [0] * len(work)
    pivots: List[int] = []
    r = 0
    for col in range(n_cols):
        bit = 1 << col
        pivot = next((i for i in range(r, len(work)) if work[i] & bit), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        b[r], b[pivot] = b[pivot], b[r]
        for i in range(len(work)):
            if i != r and work[i] & bit:
                work[i] ^= work[r]
                b[i] ^= b[r]
        pivots.append(col)
        r += 1
        if r == len(work):
            break
    if rhs is not None and any(b[i] for i in range(r, len(work))):
        raise ValueError("inconsistent linear system")
    return work[:r], pivots, (b[:r] if rhs is not None else None)


def rank(rows: Sequence[int], n_cols: int) -> int:
    return len(rref(rows, n_cols)[1])


def kernel_basis(reduced: Sequence[int], pivots: Sequence[int], n_cols: int) -> List[int]:
    """Basis of ``{v : row . v = 0 for every row}`` from an RREF."""
    pivot_set = set(pivots)
    basis = []
    for f in range(n_cols):
        if f in pivot_set:
            continue
        v = 1 << f
        for row, pc in zip(reduced, pivots):
            if (row >> f) & 1:
                v |= 1 << pc
        basis.append(v)
    return basis


def solve_pivots(reduced: Sequence[int], pivots: Sequence[int], rhs: Sequence[int], free_part: int) -> int:
    """Complete ``free_part`` (non-pivot bits) into a solution of the reduced system."""
    mask = 0
    for pc in pivots:
        mask |= 1 << pc
    y = free_part & ~mask
    for row, pc, bit in zip(reduced, pivots, rhs):
        if bit ^ parity(row & y):
            y |= 1 << pc
    return y


def span_size_log2(reduced: Sequence[int]) -> int:
    return len(reduced)


def rows_from_matrix(matrix) -> List[int]:
    """Pack a 0/1 matrix (iterable of rows) into ints."""
    out = []
    for row in matrix:
        v = 0
        for j, bit in enumerate(row):
            if int(bit) & 1:
                v |= 1 << j
        out.append(v)
    return out


def to_bits(x: int, width: int) -> Tuple[int, ...]:
    return tuple((x >> j) & 1 for j in range(width))

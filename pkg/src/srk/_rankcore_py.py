"""Pure-Python fraction-free rank over the integers.

Bareiss elimination with row pivoting: every intermediate entry is a
minor of the input, so all divisions are exact and magnitudes stay
polynomially bounded.  Rank over the integers computed this way equals
rank over the rationals.
"""

from __future__ import annotations

from typing import List, Sequence


def rank_int(rows: Sequence[Sequence[int]]) -> int:
    """Rank of an integer matrix given as a sequence of equal-length rows."""
    m: List[List[int]] = [list(r) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    rank = 0
    prev = 1
    for col in range(ncols):
        if rank == nrows:
            break
        pivot = next((i for i in range(rank, nrows) if m[i][col]), None)
        if pivot is None:
            continue
        if pivot != rank:
            m[rank], m[pivot] = m[pivot], m[rank]
        lead = m[rank][col]
        for i in range(rank + 1, nrows):
            head = m[i][col]
            row_i = m[i]
            row_r = m[rank]
            for j in range(col + 1, ncols):
                row_i[j] = (lead * row_i[j] - head * row_r[j]) // prev
            row_i[col] = 0
        prev = lead
        rank += 1
    return rank

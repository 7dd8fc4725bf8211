# cython: language_level=3
"""Compiled fraction-free rank over the integers.

Same Bareiss elimination as srk._rankcore_py; entries stay Python ints
(they are exact and can outgrow any machine word), the win is compiled
loop and indexing overhead on the many small matrices the oracle
produces.
"""


def rank_int(rows):
    """Rank of an integer matrix given as a sequence of equal-length rows."""
    cdef list m = [list(r) for r in rows]
    cdef Py_ssize_t nrows = len(m)
    cdef Py_ssize_t ncols = len(m[0]) if nrows else 0
    cdef Py_ssize_t rank = 0
    cdef Py_ssize_t col, i, j, pivot
    cdef list row_i, row_r
    prev = 1
    for col in range(ncols):
        if rank == nrows:
            break
        pivot = -1
        for i in range(rank, nrows):
            if m[i][col] != 0:
                pivot = i
                break
        if pivot < 0:
            continue
        if pivot != rank:
            m[rank], m[pivot] = m[pivot], m[rank]
        row_r = m[rank]
        lead = row_r[col]
        for i in range(rank + 1, nrows):
            row_i = m[i]
            head = row_i[col]
            for j in range(col + 1, ncols):
                row_i[j] = (lead * row_i[j] - head * row_r[j]) // prev
            row_i[col] = 0
        prev = lead
        rank += 1
    return rank

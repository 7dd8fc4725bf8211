"""Exact sparse multivariate polynomials and matrices of them.

Variables name the scalar entries of an input grid, flattened row-major:
entry (i, j) of an n-by-m input is variable i*m + j.  A monomial is a
tuple of (variable, exponent) pairs, sorted by variable, exponents
strictly positive; the empty tuple is the monomial 1.  A polynomial maps
monomials to nonzero Fraction coefficients, so the zero polynomial is
the empty dict and equal polynomials are equal dicts.  All arithmetic is
exact; nothing in this module touches floating point.

The canonical monomial order is graded lexicographic: lower total degree
first, ties broken by exponent vectors read in increasing variable order
with earlier variables weighted heavier (1, x0, x1, x0^2, x0*x1, x1^2).
Matricization rows/columns and text serialization both use this order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Sequence, Tuple

from srk.errors import InvalidPermutation, ShapeMismatch

Mon = Tuple[Tuple[int, int], ...]
Poly = Dict[Mon, Fraction]

MON_ONE: Mon = ()


def var_index(i: int, j: int, m: int) -> int:
    """Flatten grid position (i, j) of an n-by-m input to a variable id."""
    return i * m + j


def var_position(v: int, m: int) -> Tuple[int, int]:
    """Inverse of var_index for row length m."""
    return divmod(v, m)


# ---------------------------------------------------------------------------
# monomials


def mon_degree(mon: Mon) -> int:
    return sum(e for _, e in mon)


def mon_mul(a: Mon, b: Mon) -> Mon:
    """Merge two sorted exponent tuples, summing shared variables."""
    if not a:
        return b
    if not b:
        return a
    merged = dict(a)
    for v, e in b:
        merged[v] = merged.get(v, 0) + e
    return tuple(sorted(merged.items()))


def mon_vars(mon: Mon) -> Tuple[int, ...]:
    return tuple(v for v, _ in mon)


def mon_key(mon: Mon, width: int) -> Tuple[int, Tuple[int, ...]]:
    """Graded-lex sort key over a universe of `width` variables.

    Negating the dense exponent vector puts monomials heavier in earlier
    variables first within a degree block.
    """
    dense = [0] * width
    for v, e in mon:
        dense[v] = -e
    return (mon_degree(mon), tuple(dense))


def sort_monomials(mons: Iterable[Mon]) -> Tuple[Mon, ...]:
    """Sort monomials into the canonical graded-lex order."""
    mons = tuple(mons)
    width = 1 + max((v for mon in mons for v, _ in mon), default=0)
    return tuple(sorted(mons, key=lambda mon: mon_key(mon, width)))


# ---------------------------------------------------------------------------
# polynomials


def make_zero() -> Poly:
    return {}


def make_const(c) -> Poly:
    c = Fraction(c)
    return {} if c == 0 else {MON_ONE: c}


def make_var(v: int) -> Poly:
    """The polynomial x_v."""
    return {((v, 1),): Fraction(1)}


def poly_add(a: Poly, b: Poly) -> Poly:
    out = dict(a)
    for mon, coeff in b.items():
        acc = out.get(mon, 0) + coeff
        if acc:
            out[mon] = acc
        elif mon in out:
            del out[mon]
    return out


def poly_neg(a: Poly) -> Poly:
    return {mon: -coeff for mon, coeff in a.items()}


def poly_sub(a: Poly, b: Poly) -> Poly:
    return poly_add(a, poly_neg(b))


def poly_scale(a: Poly, c) -> Poly:
    c = Fraction(c)
    if c == 0:
        return {}
    return {mon: coeff * c for mon, coeff in a.items()}


def poly_mul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            mon = mon_mul(ma, mb)
            acc = out.get(mon, 0) + ca * cb
            if acc:
                out[mon] = acc
            elif mon in out:
                del out[mon]
    return out


def poly_degree(a: Poly) -> int:
    """Total degree; 0 for constants and for the zero polynomial."""
    return max((mon_degree(mon) for mon in a), default=0)


def poly_vars(a: Poly) -> Tuple[int, ...]:
    seen = {v for mon in a for v, _ in mon}
    return tuple(sorted(seen))


def poly_text(a: Poly) -> str:
    """Canonical text form, terms in graded-lex order.

    Example: "3 * x0^2 x1 + -1/2 * x3"; the zero polynomial prints "0".
    """
    if not a:
        return "0"
    parts = []
    for mon in sort_monomials(a.keys()):
        coeff = a[mon]
        if mon == MON_ONE:
            parts.append(str(coeff))
            continue
        body = " ".join(f"x{v}" if e == 1 else f"x{v}^{e}" for v, e in mon)
        parts.append(f"{coeff} * {body}")
    return " + ".join(parts)


# ---------------------------------------------------------------------------
# polynomial matrices


@dataclass(frozen=True)
class PolyMatrix:
    """Dense grid of polynomials; the symbolic value of a network."""

    rows: int
    cols: int
    entries: Tuple[Tuple[Poly, ...], ...]

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise ShapeMismatch(f"degenerate shape {self.rows}x{self.cols}")
        if len(self.entries) != self.rows or any(
            len(row) != self.cols for row in self.entries
        ):
            raise ShapeMismatch("entry grid does not match declared shape")

    def entry(self, i: int, j: int) -> Poly:
        return self.entries[i][j]


ConstMatrix = Sequence[Sequence[Fraction]]


def mat_from_rows(rows: Sequence[Sequence[Poly]]) -> PolyMatrix:
    return PolyMatrix(len(rows), len(rows[0]), tuple(tuple(r) for r in rows))


def zero_matrix(rows: int, cols: int) -> PolyMatrix:
    return PolyMatrix(rows, cols, tuple(tuple({} for _ in range(cols)) for _ in range(rows)))


def input_matrix(n: int, m: int) -> PolyMatrix:
    """The symbolic n-by-m input: entry (i, j) is the variable i*m + j."""
    return mat_from_rows(
        [[make_var(var_index(i, j, m)) for j in range(m)] for i in range(n)]
    )


def mat_add(a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
    if (a.rows, a.cols) != (b.rows, b.cols):
        raise ShapeMismatch(f"add {a.rows}x{a.cols} vs {b.rows}x{b.cols}")
    return mat_from_rows(
        [
            [poly_add(a.entries[i][j], b.entries[i][j]) for j in range(a.cols)]
            for i in range(a.rows)
        ]
    )


def mat_matmul(a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
    if a.cols != b.rows:
        raise ShapeMismatch(f"matmul {a.rows}x{a.cols} vs {b.rows}x{b.cols}")
    out = []
    for i in range(a.rows):
        row = []
        for j in range(b.cols):
            acc: Poly = {}
            for k in range(a.cols):
                acc = poly_add(acc, poly_mul(a.entries[i][k], b.entries[k][j]))
            row.append(acc)
        out.append(row)
    return mat_from_rows(out)


def mat_hadamard(a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
    if (a.rows, a.cols) != (b.rows, b.cols):
        raise ShapeMismatch(f"hadamard {a.rows}x{a.cols} vs {b.rows}x{b.cols}")
    return mat_from_rows(
        [
            [poly_mul(a.entries[i][j], b.entries[i][j]) for j in range(a.cols)]
            for i in range(a.rows)
        ]
    )


def const_left_mul(w: ConstMatrix, a: PolyMatrix) -> PolyMatrix:
    """W @ A for an exact-rational constant matrix W."""
    if not w or len(w[0]) != a.rows:
        raise ShapeMismatch(f"const_left_mul inner dim {len(w[0]) if w else 0} vs {a.rows}")
    out = []
    for wrow in w:
        row = []
        for j in range(a.cols):
            acc: Poly = {}
            for k in range(a.rows):
                acc = poly_add(acc, poly_scale(a.entries[k][j], wrow[k]))
            row.append(acc)
        out.append(row)
    return mat_from_rows(out)


def mat_transpose(a: PolyMatrix) -> PolyMatrix:
    return mat_from_rows(
        [[a.entries[i][j] for i in range(a.rows)] for j in range(a.cols)]
    )


def check_permutation(pi: Sequence[int], size: int) -> Tuple[int, ...]:
    pi = tuple(pi)
    if len(pi) != size or sorted(pi) != list(range(size)):
        raise InvalidPermutation(f"not a bijection on [{size}]: {pi}")
    return pi


def identity_permutation(size: int) -> Tuple[int, ...]:
    return tuple(range(size))


def mat_permute(a: PolyMatrix, pi: Sequence[int]) -> PolyMatrix:
    """Relocate entries: flat result position t holds flat source entry pi[t].

    Positions flatten row-major; pi must be a bijection on [rows*cols].
    """
    pi = check_permutation(pi, a.rows * a.cols)
    flat = [a.entries[t // a.cols][t % a.cols] for t in range(a.rows * a.cols)]
    return mat_from_rows(
        [
            [flat[pi[i * a.cols + j]] for j in range(a.cols)]
            for i in range(a.rows)
        ]
    )


def entrywise_square(a: PolyMatrix) -> PolyMatrix:
    """The squaring activation; |x|^2 = x^2 on polynomials."""
    return mat_from_rows(
        [[poly_mul(p, p) for p in row] for row in a.entries]
    )


def total_degree(a: PolyMatrix) -> int:
    """Maximum total degree over all entries; 0 for constant matrices."""
    return max(poly_degree(p) for row in a.entries for p in row)


def mat_vars(a: PolyMatrix) -> Tuple[int, ...]:
    seen = {v for row in a.entries for p in row for mon in p for v, _ in mon}
    return tuple(sorted(seen))


def mat_equal(a: PolyMatrix, b: PolyMatrix) -> bool:
    return (a.rows, a.cols) == (b.rows, b.cols) and a.entries == b.entries

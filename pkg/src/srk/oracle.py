"""Ground-truth separation ranks via coefficient matricization.

For a polynomial y and a balanced split (A, B) of its variable
universe, the minimal R with y = sum of R products g_r(A) * g_r'(B)
equals the rank of the matrix holding y's coefficients indexed by
A-side monomials (rows) and B-side monomials (columns).  This module
enumerates balanced partitions, builds those matrices, and computes
their rank exactly; everything downstream validates against it.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from srk import _kernels
from srk.errors import CapExceeded, OddUniverse, UnknownVariable
from srk.poly import Mon, Poly, PolyMatrix, mon_degree, mon_key

DEFAULT_PARTITION_CAP = 12


def partition_cap() -> int:
    """Largest universe size enumerate_balanced_partitions accepts.

    Overridable through the SRK_PARTITION_CAP environment variable.
    """
    return int(os.environ.get("SRK_PARTITION_CAP", DEFAULT_PARTITION_CAP))


@dataclass(frozen=True)
class Partition:
    """A balanced bipartition of the variable universe 0..2M-1.

    Side a always contains variable 0, making each unordered split
    appear exactly once.
    """

    a: Tuple[int, ...]
    b: Tuple[int, ...]


def enumerate_balanced_partitions(universe_size: int) -> List[Partition]:
    """All balanced splits of {0..universe_size-1}, canonical side first.

    Exactly C(2M, M)/2 partitions for universe size 2M.
    """
    if universe_size <= 0 or universe_size % 2:
        raise OddUniverse(f"universe size {universe_size} is not an even positive integer")
    cap = partition_cap()
    if universe_size > cap:
        raise CapExceeded(
            f"universe size {universe_size} exceeds the partition cap {cap} "
            "(set SRK_PARTITION_CAP to raise it)"
        )
    half = universe_size // 2
    universe = range(universe_size)
    out = []
    for rest in combinations(range(1, universe_size), half - 1):
        a = (0,) + rest
        in_a = set(a)
        b = tuple(v for v in universe if v not in in_a)
        out.append(Partition(a, b))
    return out


@dataclass(frozen=True)
class CoeffMatricization:
    """A polynomial's coefficients laid out over an (A, B) split.

    Entry (r, c) is the coefficient of row_index[r] * col_index[c] in
    the source; every nonzero coefficient lands in exactly one cell.
    Row and column monomials are in graded-lex order, so the layout is
    canonical.  The empty monomial indexes constants and one-sided
    terms.
    """

    row_index: Tuple[Mon, ...]
    col_index: Tuple[Mon, ...]
    matrix: Tuple[Tuple[Fraction, ...], ...]


def matricize(p: Poly, part: Partition) -> CoeffMatricization:
    in_a = set(part.a)
    in_b = set(part.b)
    width = 1 + max((*part.a, *part.b), default=-1)
    cells: Dict[Tuple[Mon, Mon], Fraction] = {}
    for mon, coeff in p.items():
        for v, _ in mon:
            if v not in in_a and v not in in_b:
                raise UnknownVariable(f"variable x{v} is outside the partition universe")
        mon_a = tuple(pair for pair in mon if pair[0] in in_a)
        mon_b = tuple(pair for pair in mon if pair[0] in in_b)
        cells[(mon_a, mon_b)] = coeff
    if not cells:
        return CoeffMatricization((), (), ())
    rows = sorted({ma for ma, _ in cells}, key=lambda mon: mon_key(mon, width))
    cols = sorted({mb for _, mb in cells}, key=lambda mon: mon_key(mon, width))
    zero = Fraction(0)
    matrix = tuple(
        tuple(cells.get((ma, mb), zero) for mb in cols) for ma in rows
    )
    return CoeffMatricization(tuple(rows), tuple(cols), matrix)


def exact_rank(matrix: Sequence[Sequence[Fraction]]) -> int:
    """Rank over the rationals, by fraction-free elimination.

    Each row is scaled by the lcm of its denominators first; row scaling
    by a nonzero constant leaves rank unchanged.
    """
    if not matrix or not matrix[0]:
        return 0
    int_rows = []
    for row in matrix:
        scale = math.lcm(*(Fraction(x).denominator for x in row))
        int_rows.append([int(Fraction(x) * scale) for x in row])
    return _kernels.rank_int(int_rows)


def sep_rank_entry(p: Poly, part: Partition) -> int:
    """Separation rank of one polynomial for one balanced split."""
    return exact_rank(matricize(p, part).matrix)


@dataclass(frozen=True)
class SepProfile:
    """Exhaustive per-entry, per-partition separation ranks of a matrix.

    per_entry holds (min over partitions, max over partitions) for each
    output entry.  sup_sep is the max over entries of the per-entry max.
    inf_sep aggregates the per-entry min by default; inf_mode="max"
    instead takes the min over entries of the per-entry max (a reading
    of the definition that is recorded but not the default).
    """

    per_entry: Tuple[Tuple[Tuple[int, int], ...], ...]
    sup_sep: int
    inf_sep: int
    inf_mode: str = "min"


def sep_profile(
    f: PolyMatrix,
    universe_size: Optional[int] = None,
    inf_mode: str = "min",
) -> SepProfile:
    """Separation ranks of every entry of f over every balanced split.

    The universe defaults to 0..max variable mentioned in f; pass
    universe_size explicitly when trailing variables may be absent.
    """
    if inf_mode not in ("min", "max"):
        raise ValueError(f"inf_mode must be 'min' or 'max', got {inf_mode!r}")
    if universe_size is None:
        top = max(
            (v for row in f.entries for p in row for mon in p for v, _ in mon),
            default=-1,
        )
        universe_size = top + 1
    if universe_size == 0:
        # Constant matrix: no variables to split, so each entry is rank
        # 0 (zero polynomial) or 1 (nonzero constant).
        grid = tuple(
            tuple((0, 0) if not p else (1, 1) for p in row) for row in f.entries
        )
        sup = max(hi for row in grid for _, hi in row)
        inf = min(lo for row in grid for lo, _ in row)
        return SepProfile(grid, sup, inf, inf_mode)
    parts = enumerate_balanced_partitions(universe_size)
    grid_rows = []
    for row in f.entries:
        grid_row = []
        for p in row:
            ranks = [sep_rank_entry(p, part) for part in parts]
            grid_row.append((min(ranks), max(ranks)))
        grid_rows.append(tuple(grid_row))
    grid = tuple(grid_rows)
    sup = max(hi for row in grid for _, hi in row)
    if inf_mode == "min":
        inf = min(lo for row in grid for lo, _ in row)
    else:
        inf = min(hi for row in grid for _, hi in row)
    return SepProfile(grid, sup, inf, inf_mode)


def profile_to_json(profile: SepProfile) -> str:
    payload = {
        "sup_sep": profile.sup_sep,
        "inf_sep": profile.inf_sep,
        "entries": [
            [{"min": lo, "max": hi} for lo, hi in row] for row in profile.per_entry
        ],
    }
    return json.dumps(payload, sort_keys=True)


def profile_from_json(text: str) -> SepProfile:
    payload = json.loads(text)
    grid = tuple(
        tuple((cell["min"], cell["max"]) for cell in row)
        for row in payload["entries"]
    )
    return SepProfile(grid, payload["sup_sep"], payload["inf_sep"])

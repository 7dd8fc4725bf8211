"""Certified separation-rank bounds and the rules that produce them.

A Bound carries the certified value twice: as an exact big integer when
that stays affordable, and always as a float in log base 3.  Bounds at
interesting depths are doubly exponential, so the exact track is
dropped (never rounded) once it would pass EXACT_BIT_LIMIT bits and the
log track carries on alone.  provenance records the rule applications
that produced the value.

Rule catalogue (k, k_f, k_g are operand bounds, dims are matrix sizes):

  add              k_f + k_g
  permute          k
  transpose        k
  identity         2
  hadamard_square  C(k+1, 2)
  scalar_mul       k_f * k_g
  matmul           n * k_f * k_g     (n = inner dimension)
  linear_map       n * k             (n = inner dimension)

Layer rules fold these into one step per layer: a squaring mixer layer
maps k to dim^2 k^2 + k (the +k term covers an optional residual, so
the rule is valid with or without one), and a degree-d attention layer
maps k to H m^d n^(d+1) k^d, plus k when the layer has a residual.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple, Union

from srk.arch import ArchSpec, AttentionLayerSpec, MixerLayerSpec
from srk.errors import PreconditionViolation, RegimeViolation, UnknownRule

EXACT_BIT_LIMIT = 10**6

LN3 = math.log(3)


def _log3(x) -> float:
    return math.log(x) / LN3


@dataclass(frozen=True)
class Bound:
    """A certified bound: optional exact integer, log3 float, rule trail."""

    exact: Optional[int]
    log3: float
    provenance: Tuple[str, ...] = ()

    def trace_id(self) -> str:
        return hashlib.sha256("|".join(self.provenance).encode()).hexdigest()[:12]


def bound_from_exact(value: int, provenance: Tuple[str, ...]) -> Bound:
    if value < 0:
        raise ValueError(f"bounds are nonnegative, got {value}")
    if value.bit_length() > EXACT_BIT_LIMIT:
        return Bound(None, _log3(value), provenance)
    log3 = _log3(value) if value > 0 else float("-inf")
    return Bound(value, log3, provenance)


def bound_power(base: int, exponent: int, provenance: Tuple[str, ...]) -> Bound:
    """base**exponent as a Bound, skipping materialization when too wide."""
    if base < 1 or exponent < 0:
        raise ValueError(f"need base >= 1 and exponent >= 0, got {base}^{exponent}")
    bits = exponent * math.log2(base) if base > 1 else 0
    if bits > EXACT_BIT_LIMIT:
        return Bound(None, exponent * _log3(base), provenance)
    return bound_from_exact(base**exponent, provenance)


def _operand(x: Union[int, Bound], rule: str) -> int:
    if isinstance(x, Bound):
        if x.exact is None:
            raise ValueError(f"rule {rule!r} needs an exact operand bound")
        return x.exact
    return int(x)


def _merge_provenance(*xs: Union[int, Bound]) -> Tuple[str, ...]:
    out: Tuple[str, ...] = ()
    for x in xs:
        if isinstance(x, Bound):
            out += x.provenance
    return out


def elementary_rule_bound(
    rule: str,
    k: Union[int, Bound, None] = None,
    k_f: Union[int, Bound, None] = None,
    k_g: Union[int, Bound, None] = None,
    n: Optional[int] = None,
) -> Bound:
    """Apply one elementary rule; see the module docstring for the table."""
    if rule == "add":
        value = _operand(k_f, rule) + _operand(k_g, rule)
        prov = _merge_provenance(k_f, k_g)
    elif rule in ("permute", "transpose"):
        value = _operand(k, rule)
        prov = _merge_provenance(k)
    elif rule == "identity":
        value = 2
        prov = ()
    elif rule == "hadamard_square":
        value = math.comb(_operand(k, rule) + 1, 2)
        prov = _merge_provenance(k)
    elif rule == "scalar_mul":
        value = _operand(k_f, rule) * _operand(k_g, rule)
        prov = _merge_provenance(k_f, k_g)
    elif rule == "matmul":
        value = n * _operand(k_f, rule) * _operand(k_g, rule)
        prov = _merge_provenance(k_f, k_g)
    elif rule == "linear_map":
        value = n * _operand(k, rule)
        prov = _merge_provenance(k)
    else:
        raise UnknownRule(f"no such rule {rule!r}")
    return bound_from_exact(value, prov + (rule,))


def mixer_layer_bound(k: Union[int, Bound], n: int) -> Bound:
    """One squaring mixing layer: k maps to n^2 k^2 + k."""
    kv = _operand(k, "mixer_layer")
    return bound_from_exact(
        n * n * kv * kv + kv, _merge_provenance(k) + (f"mixer_layer(dim={n})",)
    )


def attention_layer_bound(
    k: Union[int, Bound], n: int, m: int, H: int, d: int
) -> Bound:
    """One degree-d attention layer: k maps to H m^d n^(d+1) k^d."""
    kv = _operand(k, "attention_layer")
    value = H * m**d * n ** (d + 1) * kv**d
    return bound_from_exact(
        value, _merge_provenance(k) + (f"attention_layer(H={H},d={d})",)
    )


def _log3_add(a: float, b: float) -> float:
    """log3(3^a + 3^b) without overflow."""
    hi, lo = (a, b) if a >= b else (b, a)
    if lo == float("-inf"):
        return hi
    return hi + math.log1p(3.0 ** (lo - hi)) / LN3


def propagate_bound(spec: ArchSpec) -> Bound:
    """Fold the layer rules over a stack, starting from the identity leaf.

    Keeps the exact track as long as it fits EXACT_BIT_LIMIT, then
    continues in log space; both tracks agree to float precision while
    both exist.
    """
    exact: Optional[int] = 2
    log3 = _log3(2)
    prov = ["identity"]
    for layer in spec.layers:
        if isinstance(layer, MixerLayerSpec):
            dim = spec.n if layer.orientation == "odd" else spec.m
            if exact is not None:
                exact = dim * dim * exact * exact + exact
                if exact.bit_length() > EXACT_BIT_LIMIT:
                    exact = None
            if exact is not None:
                log3 = _log3(exact)
            else:
                log3 = _log3_add(2 * _log3(dim) + 2 * log3, log3)
            prov.append(f"mixer_layer(dim={dim})")
        elif isinstance(layer, AttentionLayerSpec):
            H, d = layer.heads, layer.degree
            base = H * spec.m**d * spec.n ** (d + 1)
            if exact is not None:
                prev = exact
                exact = base * exact**d + (prev if layer.residual else 0)
                if exact.bit_length() > EXACT_BIT_LIMIT:
                    exact = None
            if exact is not None:
                log3 = _log3(exact)
            else:
                prev_log3 = log3
                log3 = _log3(base) + d * prev_log3
                if layer.residual:
                    log3 = _log3_add(log3, prev_log3)
            prov.append(f"attention_layer(H={H},d={d})")
        else:
            raise UnknownRule(f"no rule for layer {layer!r}")
    return Bound(exact, log3, tuple(prov))


def mixer_closed_form(p: int, n: int, m: int, H: int = 1) -> Bound:
    """(2 H m^2 n^2) ** (2^p), the whole-stack mixer bound."""
    if p < 1:
        raise ValueError(f"need p >= 1, got {p}")
    base = 2 * H * m * m * n * n
    return bound_power(base, 2**p, (f"mixer_closed_form(p={p})",))


def transformer_closed_form(p: int, n: int, m: int, H: int = 1, d: int = 3) -> Bound:
    """(2 H m^2 n^2) ** (d^p), the whole-stack transformer bound."""
    if p < 1:
        raise ValueError(f"need p >= 1, got {p}")
    base = 2 * H * m * m * n * n
    return bound_power(base, d**p, (f"transformer_closed_form(p={p},d={d})",))


def transformer_lower_bound(
    p: int, m: int, H: int = 1, a: Optional[float] = None
) -> Bound:
    """Depth-efficiency floor: log3 sep >= 3^(p-2) (log3(m-H) - p + 2 - log3 2).

    Valid only while p < log3 m; outside that regime the call raises
    instead of returning a silently meaningless number.  The additive
    constant -p + 2 - log3 2 can be overridden via `a` (the derivation
    leaves a slack constant open); negative results clamp to 0, since
    separation rank is always at least 1.
    """
    if H >= m:
        raise PreconditionViolation(f"need H < m, got H={H}, m={m}")
    if 3**p >= m:
        raise RegimeViolation(
            f"p={p} is outside the depth-efficiency regime p < log3(m) = {_log3(m):.4f}"
        )
    shift = a if a is not None else (-p + 2 - _log3(2))
    value = 3.0 ** (p - 2) * (_log3(m - H) + shift)
    tag = "transformer_lower_bound" + ("" if a is None else f"(a={a})")
    return Bound(None, max(value, 0.0), (tag,))


# ---------------------------------------------------------------------------
# saturated-depth support counting

@dataclass(frozen=True)
class SupportBound:
    """Monomial-support bounds for a depth-p stack on nm input variables.

    count is the exact number of exponent vectors in N^nm with entry sum
    at most 2^p, which is C(2^p + nm, nm); chain is the looser product
    2^p * count; log2_envelope is the analytic form p*nm + p + nm*log2(e),
    meaningful for p > log2(m).
    """

    count: Bound
    chain: Bound
    log2_envelope: float


def exact_support_count(p: int, nm: int) -> int:
    """|{a in N^nm : sum a_i <= 2^p}| = C(2^p + nm, nm)."""
    return math.comb(2**p + nm, nm)


def literal_series_count(p: int, nm: int) -> int:
    """The partial-sum variant sum_{l=1}^{2^p} C(l + nm - 1, nm).

    This form disagrees with the true support count: it telescopes to
    C(2^p + nm, nm + 1), not C(2^p + nm, nm), so it runs low while
    2^p < nm + 1 (4 against 6 at p=1, nm=2) and high afterwards.
    Summing C(l + nm - 1, nm - 1) from l = 0 instead gives the correct
    count.  The variant is kept so tests can pin the discrepancy rather
    than let it resurface.
    """
    if 2**p > 10**6:
        raise ValueError("literal series is only evaluated at small p")
    return sum(math.comb(l + nm - 1, nm) for l in range(1, 2**p + 1))


def large_p_mixer_bound(p: int, n: int, m: int) -> SupportBound:
    """Support-count bound for deep mixers, exact and enveloped."""
    if p < 1 or n < 1 or m < 1:
        raise ValueError(f"need p, n, m >= 1, got p={p}, n={n}, m={m}")
    nm = n * m
    count = exact_support_count(p, nm)
    count_bound = bound_from_exact(count, (f"support_count(p={p},nm={nm})",))
    chain_bound = bound_from_exact(
        2**p * count, (f"support_chain(p={p},nm={nm})",)
    )
    envelope = p * nm + p + nm * math.log2(math.e)
    return SupportBound(count_bound, chain_bound, envelope)


# ---------------------------------------------------------------------------
# expressivity gap

def mixer_log3_upper(p: int, m: int) -> float:
    """Large-depth mixer upper bound on log3 sep: 11 * 2^p * log3 m."""
    return 11.0 * 2**p * _log3(m)


def transformer_log3_lower(p: int, m: int) -> float:
    """Large-depth transformer lower bound on log3 sep: 3^(p-3) * log3 m."""
    return 3.0 ** (p - 3) * _log3(m)


def gap_ratio_exact(p: int) -> Fraction:
    """transformer floor over mixer ceiling with log3 m cancelled: 3^(p-3) / (11 * 2^p)."""
    if p < 4:
        raise ValueError(f"gap ratio is tracked for p >= 4, got p={p}")
    return Fraction(3 ** (p - 3), 11 * 2**p)


def gap_ratio(p: int, m: int = 81) -> float:
    """Ratio of the two log3 curves at depth p; m cancels but is checked sane."""
    if m <= 1:
        raise ValueError(f"need m > 1, got m={m}")
    return float(gap_ratio_exact(p))


# ---------------------------------------------------------------------------
# regime verification

@dataclass(frozen=True)
class RegimeReport:
    """Outcome of the dominance-regime inequality with both sides shown."""

    holds: bool
    lhs: float  # 2^p * log3(2 H m^2 n^2)
    rhs: float  # 3^(p-2) * log3(m - H)
    p: int
    m: int
    n: int
    H: int

    def __bool__(self) -> bool:
        return self.holds


def verify_regime_conditions(p: int, m: int, n: int, H: int) -> RegimeReport:
    """Check 2^p log3(2 H m^2 n^2) <= 3^(p-2) log3(m - H).

    Preconditions m >= 9, H < m/2, n <= m^2, p < log3 m are enforced
    first; a violation raises PreconditionViolation naming the failed
    assumption instead of producing an out-of-regime verdict.
    """
    if m < 9:
        raise PreconditionViolation(f"need m >= 9, got m={m}")
    if 2 * H >= m:
        raise PreconditionViolation(f"need H < m/2, got H={H}, m={m}")
    if n > m * m:
        raise PreconditionViolation(f"need n <= m^2, got n={n}, m={m}")
    if 3**p >= m:
        raise PreconditionViolation(
            f"need p < log3 m, got p={p}, log3 m = {_log3(m):.4f}"
        )
    lhs = 2**p * _log3(2 * H * m * m * n * n)
    rhs = 3.0 ** (p - 2) * _log3(m - H)
    return RegimeReport(lhs <= rhs, lhs, rhs, p, m, n, H)


# ---------------------------------------------------------------------------
# bound curves

@dataclass(frozen=True)
class ClassBoundCurve:
    """Family bounds over a depth range; lower track only for transformers."""

    family: str
    n: int
    m: int
    H: int
    d: int
    upper: Dict[int, Bound] = field(default_factory=dict)
    lower: Dict[int, Bound] = field(default_factory=dict)


def class_bound_curve(
    family: str,
    p_range: Sequence[int],
    n: int,
    m: int,
    H: int = 1,
    d: int = 3,
) -> ClassBoundCurve:
    upper: Dict[int, Bound] = {}
    lower: Dict[int, Bound] = {}
    for p in p_range:
        if family == "mixer":
            upper[p] = mixer_closed_form(p, n, m, H)
        elif family == "linear_transformer":
            upper[p] = transformer_closed_form(p, n, m, H, d)
            try:
                lower[p] = transformer_lower_bound(p, m, H)
            except RegimeViolation:
                pass
        else:
            raise UnknownRule(f"no such family {family!r}")
    return ClassBoundCurve(family, n, m, H, d, upper, lower)


def curve_to_csv(curve: ClassBoundCurve) -> str:
    """Stable CSV: p,family,log3_upper,log3_lower,exact_upper_if_available,rule_trace_id."""
    lines = ["p,family,log3_upper,log3_lower,exact_upper_if_available,rule_trace_id"]
    for p in sorted(curve.upper):
        ub = curve.upper[p]
        lb = curve.lower.get(p)
        lines.append(
            ",".join(
                [
                    str(p),
                    curve.family,
                    repr(ub.log3),
                    repr(lb.log3) if lb is not None else "",
                    str(ub.exact) if ub.exact is not None else "",
                    ub.trace_id(),
                ]
            )
        )
    return "\n".join(lines) + "\n"

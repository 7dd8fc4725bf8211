"""Bound engine: rule table, propagation, closed forms, gap and regime."""

import itertools
import math
from fractions import Fraction

import pytest

import srk.bounds as bmod
from srk.arch import build_linear_transformer, build_mixer, symbolic_forward, sample_weights
from srk.bounds import (
    Bound,
    attention_layer_bound,
    bound_from_exact,
    bound_power,
    class_bound_curve,
    curve_to_csv,
    elementary_rule_bound,
    exact_support_count,
    gap_ratio,
    gap_ratio_exact,
    large_p_mixer_bound,
    literal_series_count,
    mixer_closed_form,
    mixer_layer_bound,
    mixer_log3_upper,
    propagate_bound,
    transformer_closed_form,
    transformer_log3_lower,
    transformer_lower_bound,
    verify_regime_conditions,
)
from srk.errors import (
    PreconditionViolation,
    RegimeViolation,
    UnknownRule,
)
from srk.oracle import sep_profile

LOG3 = math.log(3)


def log3(x: float) -> float:
    return math.log(x) / LOG3


# ---------------------------------------------------------------------------
# elementary rules


@pytest.mark.parametrize(
    "rule,kwargs,expected",
    [
        ("add", dict(k_f=3, k_g=4), 7),
        ("permute", dict(k=5), 5),
        ("transpose", dict(k=5), 5),
        ("identity", {}, 2),
        ("hadamard_square", dict(k=1), 1),
        ("hadamard_square", dict(k=2), 3),
        ("hadamard_square", dict(k=3), 6),
        ("scalar_mul", dict(k_f=3, k_g=4), 12),
        ("matmul", dict(k_f=2, k_g=3, n=5), 30),
        ("linear_map", dict(k=4, n=3), 12),
    ],
)
def test_rule_table(rule, kwargs, expected):
    b = elementary_rule_bound(rule, **kwargs)
    assert b.exact == expected
    assert abs(b.log3 - log3(expected)) < 1e-12
    assert b.provenance[-1] == rule


def test_rules_compose_through_bound_operands():
    inner = elementary_rule_bound("identity")
    outer = elementary_rule_bound("hadamard_square", k=inner)
    assert outer.exact == 3
    assert outer.provenance == ("identity", "hadamard_square")
    both = elementary_rule_bound("add", k_f=outer, k_g=inner)
    assert both.exact == 5
    assert both.provenance.count("identity") == 2


def test_unknown_rule_rejected():
    with pytest.raises(UnknownRule):
        elementary_rule_bound("convolve", k=2)


def test_log_space_operand_rejected():
    huge = bound_power(2, 10**7, ("big",))
    assert huge.exact is None
    with pytest.raises(ValueError):
        elementary_rule_bound("hadamard_square", k=huge)


def test_bound_primitives():
    z = bound_from_exact(0, ("zero",))
    assert z.log3 == float("-inf")
    with pytest.raises(ValueError):
        bound_from_exact(-1, ())
    b = bound_power(32, 2, ("sq",))
    assert b.exact == 1024
    assert abs(b.log3 - log3(1024)) < 1e-12
    big = bound_power(2, 10**7, ("big",))
    assert big.exact is None
    assert abs(big.log3 - 10**7 * log3(2)) < 1e-6 * big.log3


def test_trace_ids():
    a = bound_from_exact(5, ("x", "y"))
    b = bound_from_exact(7, ("x", "y"))
    c = bound_from_exact(5, ("x", "z"))
    assert a.trace_id() == b.trace_id()
    assert a.trace_id() != c.trace_id()
    assert len(a.trace_id()) == 12
    assert all(ch in "0123456789abcdef" for ch in a.trace_id())


# ---------------------------------------------------------------------------
# layer rules


def test_mixer_layer_bound_values():
    assert mixer_layer_bound(2, 2).exact == 18
    assert mixer_layer_bound(18, 2).exact == 4 * 18 * 18 + 18  # 1314
    assert mixer_layer_bound(2, 3).exact == 9 * 4 + 2


def test_attention_layer_bound_values():
    assert attention_layer_bound(2, 2, 2, 1, 3).exact == 1 * 8 * 16 * 8
    assert attention_layer_bound(2, 2, 2, 2, 3).exact == 2048
    assert attention_layer_bound(1, 2, 3, 1, 2).exact == 9 * 8


# ---------------------------------------------------------------------------
# propagation


def test_propagate_mixer_depths():
    assert propagate_bound(build_mixer(1, 2, 2)).exact == 18
    assert propagate_bound(build_mixer(2, 2, 2)).exact == 1314
    assert propagate_bound(build_mixer(2, 2, 3)).exact == 9 * 18 * 18 + 18


def test_propagate_mixer_rule_absorbs_residual():
    # n^2 k^2 + k already pays for the skip connection, so marking
    # residual layers must not change the bound.
    plain = propagate_bound(build_mixer(2, 2, 2))
    skip = propagate_bound(build_mixer(2, 2, 2, residual_set=[1, 2]))
    assert plain.exact == skip.exact


def test_propagate_transformer_depths():
    assert propagate_bound(build_linear_transformer(1, 2, 2, H=1)).exact == 1024
    two = propagate_bound(build_linear_transformer(2, 2, 2, H=1))
    assert two.exact == 128 * 1024**3
    assert (
        propagate_bound(
            build_linear_transformer(1, 2, 2, H=1, residual_set=[1])
        ).exact
        == 1026
    )


def test_propagate_provenance_trail():
    b = propagate_bound(build_mixer(2, 2, 3))
    assert b.provenance == ("identity", "mixer_layer(dim=2)", "mixer_layer(dim=3)")
    t = propagate_bound(build_linear_transformer(1, 2, 2, H=2))
    assert t.provenance == ("identity", "attention_layer(H=2,d=3)")


def test_propagate_log3_tracks_exact():
    for spec in (
        build_mixer(3, 2, 2),
        build_linear_transformer(2, 2, 2, H=1),
        build_linear_transformer(1, 2, 3, H=2, d=2, residual_set=[1]),
    ):
        b = propagate_bound(spec)
        assert b.exact is not None
        assert abs(b.log3 - log3(b.exact)) < 1e-9


def test_propagate_degrades_to_log_space(monkeypatch):
    reference = propagate_bound(build_mixer(5, 2, 2))
    assert reference.exact is not None
    monkeypatch.setattr(bmod, "EXACT_BIT_LIMIT", 10)
    degraded = propagate_bound(build_mixer(5, 2, 2))
    assert degraded.exact is None
    assert abs(degraded.log3 - reference.log3) < 1e-9 * reference.log3


def test_propagate_deep_stack_stays_finite():
    b = propagate_bound(build_mixer(40, 2, 2))
    assert b.exact is None
    assert math.isfinite(b.log3)
    ceiling = mixer_closed_form(40, 2, 2)
    assert b.log3 <= ceiling.log3


# ---------------------------------------------------------------------------
# closed forms


def test_closed_form_values():
    assert mixer_closed_form(1, 2, 2).exact == 32**2
    assert mixer_closed_form(2, 2, 2).exact == 32**4
    assert transformer_closed_form(1, 2, 2).exact == 32**3
    assert transformer_closed_form(2, 2, 2).exact == 32**9
    assert mixer_closed_form(1, 2, 2, H=2).exact == 64**2
    assert transformer_closed_form(1, 2, 2, H=1, d=2).exact == 32**2


def test_closed_form_dominates_propagation():
    cases = [
        (build_mixer(1, 2, 2), mixer_closed_form(1, 2, 2)),
        (build_mixer(2, 2, 2), mixer_closed_form(2, 2, 2)),
        (build_mixer(3, 2, 3), mixer_closed_form(3, 3, 2) if False else mixer_closed_form(3, 2, 3)),
        (
            build_linear_transformer(1, 2, 2, H=1),
            transformer_closed_form(1, 2, 2, H=1),
        ),
        (
            build_linear_transformer(2, 2, 2, H=2),
            transformer_closed_form(2, 2, 2, H=2),
        ),
    ]
    for spec, closed in cases:
        assert propagate_bound(spec).exact <= closed.exact


def test_closed_form_rejects_depth_zero():
    with pytest.raises(ValueError):
        mixer_closed_form(0, 2, 2)
    with pytest.raises(ValueError):
        transformer_closed_form(0, 2, 2)


# ---------------------------------------------------------------------------
# oracle / bound sandwich on desk instances


def test_sandwich_mixer():
    for p in (1, 2):
        spec = build_mixer(p, 2, 2)
        sup = sep_profile(symbolic_forward(spec, sample_weights(spec, 0))).sup_sep
        mid = propagate_bound(spec).exact
        top = mixer_closed_form(p, 2, 2).exact
        assert 1 <= sup <= mid <= top


def test_sandwich_transformer():
    spec = build_linear_transformer(1, 2, 2, H=1)
    sup = sep_profile(symbolic_forward(spec, sample_weights(spec, 0))).sup_sep
    assert 1 <= sup <= propagate_bound(spec).exact
    assert propagate_bound(spec).exact <= transformer_closed_form(1, 2, 2).exact


# ---------------------------------------------------------------------------
# transformer lower bound


def test_lower_bound_spot_value():
    b = transformer_lower_bound(3, 81, 1)
    assert b.exact is None
    assert abs(b.log3 - 3.0 * (log3(40) - 1.0)) < 1e-12
    assert abs(b.log3 - 7.073288344296897) < 1e-12


def test_lower_bound_shift_override():
    # a replaces the whole additive constant -p + 2 - log3(2).
    b = transformer_lower_bound(3, 81, 1, a=0.0)
    assert abs(b.log3 - 3.0 * log3(80)) < 1e-12
    assert "a=0.0" in b.provenance[0]


def test_lower_bound_clamps_at_zero():
    assert transformer_lower_bound(3, 81, 1, a=-100.0).log3 == 0.0


def test_lower_bound_regime_violation():
    with pytest.raises(RegimeViolation):
        transformer_lower_bound(4, 81, 1)
    with pytest.raises(RegimeViolation):
        transformer_lower_bound(5, 100, 1)
    with pytest.raises(PreconditionViolation):
        transformer_lower_bound(1, 5, 5)


def test_lower_bound_below_class_ceiling():
    lo = transformer_lower_bound(3, 81, 1)
    hi = transformer_closed_form(3, 1, 81, H=1)
    assert lo.log3 <= hi.log3


# ---------------------------------------------------------------------------
# support counts


def test_exact_support_count_small_cases():
    assert exact_support_count(1, 2) == 6
    assert exact_support_count(2, 2) == 15
    assert exact_support_count(4, 4) == 4845


def test_exact_support_count_by_enumeration():
    for p, nm in [(1, 2), (2, 2), (1, 3), (2, 3), (3, 2)]:
        cap = 2**p
        direct = sum(
            1
            for v in itertools.product(range(cap + 1), repeat=nm)
            if sum(v) <= cap
        )
        assert exact_support_count(p, nm) == direct


def test_literal_series_discrepancy_is_pinned():
    # The naive partial sum telescopes one binomial slot too deep:
    # C(2^p + nm, nm + 1) instead of C(2^p + nm, nm).  Low at the
    # classic 4-vs-6 point, high once 2^p passes nm + 1.
    assert literal_series_count(1, 2) == 4
    assert exact_support_count(1, 2) == 6
    for p, nm in [(1, 2), (2, 2), (3, 3), (4, 2)]:
        assert literal_series_count(p, nm) == math.comb(2**p + nm, nm + 1)
    assert literal_series_count(2, 2) > exact_support_count(2, 2)
    with pytest.raises(ValueError):
        literal_series_count(21, 2)


def test_large_p_mixer_bound_components():
    sb = large_p_mixer_bound(4, 2, 2)
    assert sb.count.exact == 4845
    assert sb.chain.exact == 16 * 4845
    assert abs(sb.log2_envelope - (16 + 4 + 4 * math.log2(math.e))) < 1e-12


def test_support_chain_within_envelope():
    for p, n, m in [(2, 2, 1), (3, 2, 2), (5, 2, 2), (6, 2, 3), (8, 3, 3)]:
        sb = large_p_mixer_bound(p, n, m)
        assert math.log2(sb.chain.exact) <= sb.log2_envelope


# ---------------------------------------------------------------------------
# expressivity gap


def test_gap_ratio_exact_values():
    assert gap_ratio_exact(4) == Fraction(3, 176)
    assert gap_ratio_exact(5) == Fraction(9, 352)
    with pytest.raises(ValueError):
        gap_ratio_exact(3)


def test_gap_quotient_is_three_halves():
    for p in range(4, 61):
        assert gap_ratio_exact(p + 1) / gap_ratio_exact(p) == Fraction(3, 2)


def test_gap_ratio_float_matches_exact_and_ignores_m():
    for p in (4, 7, 12):
        assert abs(gap_ratio(p) - float(gap_ratio_exact(p))) < 1e-12
        assert abs(gap_ratio(p, m=81) - gap_ratio(p, m=10**6)) < 1e-12
    with pytest.raises(ValueError):
        gap_ratio(5, m=1)


def test_gap_curves_consistent_with_ratio():
    for p in (4, 6, 9):
        lo = transformer_log3_lower(p, 81)
        hi = mixer_log3_upper(p, 81)
        assert abs(lo / hi - float(gap_ratio_exact(p))) < 1e-12
    assert mixer_log3_upper(3, 81) == 11.0 * 8 * 4.0


# ---------------------------------------------------------------------------
# regime verification


def test_regime_holds_deep_in_the_asymptote():
    m = 3**14
    report = verify_regime_conditions(13, m, m * m, m // 2 - 1)
    assert report
    assert report.holds
    assert report.lhs <= report.rhs


def test_regime_fails_at_shallow_depth():
    report = verify_regime_conditions(1, 9, 1, 1)
    assert not report
    assert report.lhs > report.rhs
    assert (report.p, report.m, report.n, report.H) == (1, 9, 1, 1)


def test_regime_preconditions():
    with pytest.raises(PreconditionViolation):
        verify_regime_conditions(1, 8, 1, 1)
    with pytest.raises(PreconditionViolation):
        verify_regime_conditions(1, 9, 1, 5)
    with pytest.raises(PreconditionViolation):
        verify_regime_conditions(1, 9, 100, 1)
    with pytest.raises(PreconditionViolation):
        verify_regime_conditions(2, 9, 1, 1)


def test_regime_boundary_width_is_allowed():
    # n = m^2 sits inside the precondition, not outside it.
    report = verify_regime_conditions(1, 9, 81, 1)
    assert isinstance(report.holds, bool)


# ---------------------------------------------------------------------------
# curves and CSV


def test_class_bound_curve_tracks():
    mix = class_bound_curve("mixer", range(1, 5), 2, 2)
    assert set(mix.upper) == {1, 2, 3, 4}
    assert not mix.lower
    tra = class_bound_curve("linear_transformer", range(1, 6), 1, 81)
    assert set(tra.upper) == {1, 2, 3, 4, 5}
    assert set(tra.lower) == {1, 2, 3}  # p >= 4 leaves the regime at m = 81
    with pytest.raises(UnknownRule):
        class_bound_curve("cnn", [1], 2, 2)


def test_curve_upper_is_increasing():
    curve = class_bound_curve("mixer", range(1, 8), 2, 2)
    values = [curve.upper[p].log3 for p in range(1, 8)]
    assert all(a < b for a, b in zip(values, values[1:]))


def test_curve_csv_shape():
    curve = class_bound_curve("linear_transformer", range(1, 5), 1, 81)
    text = curve_to_csv(curve)
    lines = text.strip().split("\n")
    assert lines[0] == "p,family,log3_upper,log3_lower,exact_upper_if_available,rule_trace_id"
    assert len(lines) == 5
    row_p3 = lines[3].split(",")
    assert row_p3[0] == "3"
    assert row_p3[1] == "linear_transformer"
    assert float(row_p3[3]) == pytest.approx(7.073288344296897)
    row_p4 = lines[4].split(",")
    assert row_p4[3] == ""  # out of regime: no lower bound column value
    assert len(row_p4[5]) == 12
    assert text.endswith("\n")

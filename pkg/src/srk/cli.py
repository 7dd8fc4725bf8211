"""Command-line surface: srk {oracle|bound|verify|plan|gap|sweep}.

Every command is deterministic given its flags; randomness is always
seeded and the seeds are echoed in the output.  Results go to --out or
stdout.  Failures print one machine-readable JSON object to stderr and
exit with: 2 for parse/spec errors, 3 for cap violations, 4 for
regime/precondition violations, 1 for verification failures.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Dict, List, Optional, Sequence

from srk import arch, bounds, oracle, planner
from srk.errors import (
    CapExceeded,
    DegreeCapExceeded,
    InsufficientRange,
    InvalidPermutation,
    InvalidShape,
    InvalidTransposeSet,
    NoFeasibleDepth,
    OddUniverse,
    PreconditionViolation,
    RegimeViolation,
    UnknownRule,
    UnknownVariable,
)

PARSE_ERRORS = (
    json.JSONDecodeError,
    KeyError,
    ValueError,
    OSError,
    InvalidShape,
    InvalidTransposeSet,
    InvalidPermutation,
    UnknownRule,
    UnknownVariable,
    NoFeasibleDepth,
    InsufficientRange,
)
CAP_ERRORS = (CapExceeded, DegreeCapExceeded, OddUniverse)
REGIME_ERRORS = (RegimeViolation, PreconditionViolation)


def _emit(text: str, out: Optional[str]) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_ints(text: str) -> List[int]:
    """Parse "4..30" or "0,1,2" into a list of ints."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(part) for part in text.split(",") if part.strip()]


def _parse_floats(text: str) -> List[float]:
    return [float(part) for part in text.split(",") if part.strip()]


def _load_spec(path: str) -> arch.ArchSpec:
    with open(path) as fh:
        return arch.spec_from_json(fh.read())


def _spec_from_args(args: argparse.Namespace) -> arch.ArchSpec:
    if args.spec:
        return _load_spec(args.spec)
    if not args.family:
        raise ValueError("need either --spec or --family with dimensions")
    if args.family == "mixer":
        return arch.build_mixer(args.p, args.n, args.m)
    return arch.build_linear_transformer(
        args.p, args.n, args.m, args.heads, args.degree
    )


def _normalize_family(family: str) -> str:
    return "linear_transformer" if family == "transformer" else family


def _profile_payload(profile: oracle.SepProfile) -> Dict[str, object]:
    return {
        "sup_sep": profile.sup_sep,
        "inf_sep": profile.inf_sep,
        "entries": [
            [{"min": lo, "max": hi} for lo, hi in row] for row in profile.per_entry
        ],
    }


def _bound_payload(b: bounds.Bound) -> Dict[str, object]:
    return {
        "exact": b.exact,
        "log3": b.log3,
        "provenance": list(b.provenance),
        "rule_trace_id": b.trace_id(),
    }


# ---------------------------------------------------------------------------
# commands

def cmd_oracle(args: argparse.Namespace) -> int:
    spec = _load_spec(args.spec)
    seeds = _parse_ints(args.seeds) if args.seeds else [spec.seed]
    per_seed = []
    for seed in seeds:
        w = arch.sample_weights(spec, seed)
        value = arch.symbolic_forward(spec, w)
        profile = oracle.sep_profile(value, universe_size=spec.n * spec.m)
        per_seed.append({"seed": seed, "profile": _profile_payload(profile)})
    aggregate = {
        "sup_sep": max(entry["profile"]["sup_sep"] for entry in per_seed),
        "inf_sep": max(entry["profile"]["inf_sep"] for entry in per_seed),
    }
    payload = {
        "spec_digest": arch.spec_digest(spec),
        "per_seed": per_seed,
        "aggregate": aggregate,
    }
    _emit(json.dumps(payload, sort_keys=True), args.out)
    return 0


def cmd_bound(args: argparse.Namespace) -> int:
    mode = args.mode or ("propagate" if args.spec else "closed")
    if mode == "propagate":
        spec = _spec_from_args(args)
        b = bounds.propagate_bound(spec)
    elif mode == "closed":
        family = _normalize_family(args.family or "mixer")
        if family == "mixer":
            b = bounds.mixer_closed_form(args.p, args.n, args.m, args.heads)
        else:
            b = bounds.transformer_closed_form(
                args.p, args.n, args.m, args.heads, args.degree
            )
    elif mode == "lower":
        b = bounds.transformer_lower_bound(args.p, args.m, args.heads)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if args.format == "csv":
        text = "log3,exact,rule_trace_id\n" + ",".join(
            [repr(b.log3), str(b.exact) if b.exact is not None else "", b.trace_id()]
        )
        _emit(text, args.out)
    else:
        _emit(json.dumps(_bound_payload(b), sort_keys=True), args.out)
    return 0


def _random_mixer_spec(rng: random.Random, p_max: int, n: int, m: int) -> arch.ArchSpec:
    p = rng.randint(1, p_max)
    residual = [k for k in range(1, p + 1) if rng.random() < 0.5]
    permutations = None
    if rng.random() < 0.5:
        size = n * m
        permutations = {
            name: rng.sample(range(size), size)
            for name in ("pi_e", "pi_o", "pi_r")
            if rng.random() < 0.5
        } or None
    return arch.build_mixer(p, n, m, residual, permutations)


def _random_transformer_spec(
    rng: random.Random, p_max: int, n: int, m: int, h_max: int, d: int
) -> arch.ArchSpec:
    p = rng.randint(1, p_max)
    H = rng.randint(1, h_max)
    transpose_sets = [
        sorted(rng.sample(range(1, d + 1), rng.randint(1, d))) for _ in range(H)
    ]
    residual = [k for k in range(1, p + 1) if rng.random() < 0.5]
    return arch.build_linear_transformer(p, n, m, H, d, transpose_sets, residual)


def cmd_verify(args: argparse.Namespace) -> int:
    families = (
        ["mixer", "linear_transformer"]
        if args.family == "both"
        else [_normalize_family(args.family)]
    )
    rng = random.Random(args.seed)
    instances = []
    failures = 0
    for family in families:
        if args.trials is not None:
            trials = args.trials
        else:
            trials = 50 if family == "mixer" else 20
        p_max = args.p if args.p else (2 if family == "mixer" else 1)
        for _ in range(trials):
            if family == "mixer":
                spec = _random_mixer_spec(rng, p_max, args.n, args.m)
                closed = bounds.mixer_closed_form(spec.p, spec.n, spec.m)
            else:
                spec = _random_transformer_spec(
                    rng, p_max, args.n, args.m, args.heads, args.degree
                )
                closed = bounds.transformer_closed_form(
                    spec.p, spec.n, spec.m, spec.layers[0].heads, args.degree
                )
            seed = rng.randrange(2**32)
            w = arch.sample_weights(spec, seed)
            value = arch.symbolic_forward(spec, w)
            profile = oracle.sep_profile(value, universe_size=spec.n * spec.m)
            propagated = bounds.propagate_bound(spec)
            ok = profile.sup_sep <= propagated.exact <= closed.exact
            failures += 0 if ok else 1
            instances.append(
                {
                    "spec_digest": arch.spec_digest(spec),
                    "family": family,
                    "seed": seed,
                    "sup_sep": profile.sup_sep,
                    "inf_sep": profile.inf_sep,
                    "propagated": propagated.exact,
                    "closed_form": closed.exact,
                    "sandwich_ok": ok,
                }
            )
    payload = {
        "instances": instances,
        "summary": {"trials": len(instances), "failures": failures},
    }
    _emit(json.dumps(payload, sort_keys=True), args.out)
    return 0 if failures == 0 else 1


def cmd_plan(args: argparse.Namespace) -> int:
    result = planner.grid_search_optimum(args.family, args.budget)
    payload = {
        "p_star": result.p_star,
        "d_star": result.d_star,
        "objective_value": result.objective_value,
        "regime": result.regime,
        "ratio_log2": result.ratio_log2,
        "ratio_log3": result.ratio_log3,
    }
    _emit(json.dumps(payload, sort_keys=True), args.out)
    return 0


def cmd_gap(args: argparse.Namespace) -> int:
    ps = _parse_ints(args.p)
    rows = []
    for p in ps:
        rows.append(
            {
                "p": p,
                "log3_lower": bounds.transformer_log3_lower(p, args.m),
                "log3_upper": bounds.mixer_log3_upper(p, args.m),
                "ratio": bounds.gap_ratio(p, args.m),
            }
        )
    if args.format == "json":
        _emit(json.dumps({"rows": rows}, sort_keys=True), args.out)
    else:
        lines = ["p,log3_lower,log3_upper,ratio"]
        for row in rows:
            lines.append(
                f"{row['p']},{row['log3_lower']!r},{row['log3_upper']!r},{row['ratio']!r}"
            )
        _emit("\n".join(lines), args.out)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    budgets = _parse_ints(args.budgets) if args.budgets else planner.DEFAULT_BUDGETS
    ratios = _parse_floats(args.ratios) if args.ratios else planner.DEFAULT_RATIOS
    seeds = _parse_ints(args.seeds) if args.seeds else planner.DEFAULT_SEEDS
    config = planner.make_sweep_config(budgets, ratios, seeds)
    _emit(planner.sweep_to_json(config), args.out)
    return 0


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="srk",
        description="separation-rank oracle, certified bounds, and budget planning",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out", help="output path (default stdout)")

    p_oracle = sub.add_parser("oracle", help="exact separation ranks of a spec")
    p_oracle.add_argument("--spec", required=True, help="ArchSpec JSON file")
    p_oracle.add_argument("--seeds", help="weight seeds, e.g. 0,1,2 or 0..4")
    common(p_oracle)
    p_oracle.set_defaults(func=cmd_oracle)

    p_bound = sub.add_parser("bound", help="certified bounds for a spec or family")
    p_bound.add_argument("--spec", help="ArchSpec JSON file")
    p_bound.add_argument("--family", choices=["mixer", "linear_transformer", "transformer"])
    p_bound.add_argument("--mode", choices=["propagate", "closed", "lower"])
    p_bound.add_argument("--p", type=int, default=1)
    p_bound.add_argument("--n", type=int, default=2)
    p_bound.add_argument("--m", type=int, default=2)
    p_bound.add_argument("--heads", type=int, default=1)
    p_bound.add_argument("--degree", type=int, default=3)
    p_bound.add_argument("--format", choices=["json", "csv"], default="json")
    common(p_bound)
    p_bound.set_defaults(func=cmd_bound)

    p_verify = sub.add_parser("verify", help="oracle vs bound sandwich on random specs")
    p_verify.add_argument(
        "--family",
        choices=["mixer", "linear_transformer", "transformer", "both"],
        default="both",
    )
    p_verify.add_argument("--trials", type=int, help="instances per family")
    p_verify.add_argument("--p", type=int, help="max depth (mixer 2, transformer 1)")
    p_verify.add_argument("--n", type=int, default=2)
    p_verify.add_argument("--m", type=int, default=2)
    p_verify.add_argument("--heads", type=int, default=2, help="max head count")
    p_verify.add_argument("--degree", type=int, default=3)
    p_verify.add_argument("--seed", type=int, default=0)
    common(p_verify)
    p_verify.set_defaults(func=cmd_verify)

    p_plan = sub.add_parser("plan", help="optimal depth/width under a budget")
    p_plan.add_argument(
        "--family", required=True, choices=["mixer", "linear_transformer", "transformer"]
    )
    p_plan.add_argument("--budget", type=int, required=True)
    common(p_plan)
    p_plan.set_defaults(func=cmd_plan)

    p_gap = sub.add_parser("gap", help="expressivity gap curves over a depth range")
    p_gap.add_argument("--p", required=True, help="depth range, e.g. 4..30")
    p_gap.add_argument("--m", type=int, default=81)
    p_gap.add_argument("--format", choices=["json", "csv"], default="csv")
    common(p_gap)
    p_gap.set_defaults(func=cmd_gap)

    p_sweep = sub.add_parser("sweep", help="emit the training sweep configuration")
    p_sweep.add_argument("--budgets", help="e.g. 32768,65536")
    p_sweep.add_argument("--ratios", help="e.g. 0.25,0.5,1,2,4,8")
    p_sweep.add_argument("--seeds", help="e.g. 0..5")
    common(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    return parser


def _fail(code: int, exc: Exception) -> int:
    payload = {"error": type(exc).__name__, "detail": str(exc)}
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CAP_ERRORS as exc:
        return _fail(3, exc)
    except REGIME_ERRORS as exc:
        return _fail(4, exc)
    except PARSE_ERRORS as exc:
        return _fail(2, exc)


if __name__ == "__main__":
    sys.exit(main())

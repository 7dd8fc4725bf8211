"""Budget-constrained depth-to-width planning and dominance checking.

The parameter budget law is |params| = C * p * d^2 with C defaulting to
1, so a budget B admits the integer grid {(p, d) : p * d^2 <= B}.  The
expressivity objective per family is piecewise in depth:

  alpha^p * log_alpha(d)   while p <= log_alpha(d)   (depth efficient)
  d * log_alpha(d)         beyond                    (saturated)

with alpha = 3 for transformers and alpha = 2 for mixers.  The planner
searches that grid exactly, selects experiment depths by the smallest p
whose rounded width pushes p / log2(d) past a requested ratio, and
emits the training sweep grid consumed by the companion harness.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from srk.errors import InsufficientRange, NoFeasibleDepth

DEFAULT_BUDGETS = (32768, 65536, 131072, 262144)
DEFAULT_RATIOS = (0.25, 0.5, 1.0, 2.0, 4.0, 8.0)
DEFAULT_SEEDS = (0, 1, 2, 3, 4, 5)

# Fixed training block emitted with every sweep; the harness reads it
# verbatim.
HYPERPARAMETERS = {
    "optimizer": "adam",
    "lr": 1e-3,
    "weight_decay": 5e-5,
    "betas": [0.9, 0.999],
    "batch_size": 128,
    "epochs": 40,
    "patch": [4, 4],
    "dropout": 0.5,
    "augment": ["random_crop", "normalize"],
}

DEFAULT_P_MAX = 64


def _family_alpha(family: str, alpha: Optional[float]) -> float:
    if alpha is not None:
        if alpha <= 1:
            raise ValueError(f"need alpha > 1, got {alpha}")
        return float(alpha)
    if family in ("transformer", "linear_transformer"):
        return 3.0
    if family == "mixer":
        return 2.0
    raise ValueError(f"unknown family {family!r}")


def _depth_efficient(p: int, d: int, alpha: float) -> bool:
    """Whether p <= log_alpha(d), branch decided exactly for integer alpha."""
    if alpha.is_integer():
        return int(alpha) ** p <= d
    return p <= math.log(d) / math.log(alpha) + 1e-12


def piecewise_objective(
    family: str, p: int, d: int, alpha: Optional[float] = None
) -> float:
    """Expressivity proxy for a depth-p width-d stack; see module docstring.

    The boundary p = log_alpha(d) lands in the depth-efficient branch,
    where both branches agree anyway.
    """
    if p < 1 or d < 1:
        raise ValueError(f"need p, d >= 1, got p={p}, d={d}")
    alpha = _family_alpha(family, alpha)
    log_d = math.log(d) / math.log(alpha)
    if _depth_efficient(p, d, alpha):
        return alpha**p * log_d
    return d * log_d


@dataclass(frozen=True)
class PlanResult:
    p_star: int
    d_star: int
    objective_value: float
    regime: str  # "depth_efficient" or "saturated"
    ratio_log2: float
    ratio_log3: float


def grid_search_optimum(
    family: str, budget: int, alpha: Optional[float] = None
) -> PlanResult:
    """Exact optimum of piecewise_objective over {(p, d) : p d^2 <= budget}.

    The search walks every feasible width.  For fixed d the objective
    grows with p up to the branch boundary and is constant past it, so
    per width only the boundary depth and the first saturated depth are
    evaluated; that collapses the depth dimension without skipping any
    candidate value.  Ties break toward smaller p, then smaller d.
    """
    if budget < 4:
        raise ValueError(f"need budget >= 4, got {budget}")
    alpha = _family_alpha(family, alpha)
    best: Optional[Tuple[float, int, int]] = None  # (value, p, d)

    def consider(value: float, p: int, d: int) -> None:
        nonlocal best
        if (
            best is None
            or value > best[0]
            or (value == best[0] and (p, d) < (best[1], best[2]))
        ):
            best = (value, p, d)

    for d in range(1, math.isqrt(budget) + 1):
        p_cap = budget // (d * d)
        log_d = math.log(d) / math.log(alpha)
        # largest depth still inside the depth-efficient branch
        boundary = 0
        while _depth_efficient(boundary + 1, d, alpha):
            boundary += 1
        p1 = min(boundary, p_cap)
        if p1 >= 1:
            consider(alpha**p1 * log_d, p1, d)
        p2 = max(boundary + 1, 1)
        if p2 <= p_cap:
            consider(d * log_d, p2, d)
    value, p, d = best
    regime = "depth_efficient" if _depth_efficient(p, d, alpha) else "saturated"
    return PlanResult(
        p_star=p,
        d_star=d,
        objective_value=value,
        regime=regime,
        ratio_log2=p / math.log2(d),
        ratio_log3=p / math.log(d, 3),
    )


# ---------------------------------------------------------------------------
# depth selection for the training sweep

def default_width(p: int, budget: int) -> int:
    """Round sqrt(budget / p) half-up, decided in exact arithmetic."""
    q = Fraction(budget, p)
    d = math.isqrt(budget // p)
    while (d + 1) * (d + 1) <= q:
        d += 1
    # half-up: q >= (d + 1/2)^2 <=> 4 budget >= p (2d + 1)^2
    if 4 * budget >= p * (2 * d + 1) ** 2:
        d += 1
    return d


def _width_for(
    p: int, budget: int, count_fn: Optional[Callable[[int, int], int]]
) -> int:
    if count_fn is None:
        return default_width(p, budget)
    # Closest width by parameter count, assuming count_fn nondecreasing
    # in d; on an exact tie the larger width wins, mirroring half-up.
    lo, hi = 1, 2
    while count_fn(p, hi) < budget:
        lo, hi = hi, hi * 2
        if hi > 1 << 40:
            return lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if count_fn(p, mid) < budget:
            lo = mid
        else:
            hi = mid
    if count_fn(p, lo) >= budget:
        return lo
    below = budget - count_fn(p, lo)
    above = count_fn(p, hi) - budget
    return hi if above <= below else lo


def depth_selection(
    budget: int,
    ratio: float,
    count_fn: Optional[Callable[[int, int], int]] = None,
    p_max: int = DEFAULT_P_MAX,
) -> Tuple[int, int]:
    """Smallest depth p whose budgeted width d gives p / log2(d) > ratio.

    count_fn maps (p, d) to a parameter count and defaults to p * d^2,
    for which the width is round-half-up sqrt(budget / p).  Depths whose
    width collapses below 2 leave the ratio undefined and are skipped.
    Raises NoFeasibleDepth when no p <= p_max qualifies.
    """
    for p in range(1, p_max + 1):
        d = _width_for(p, budget, count_fn)
        if d < 2:
            continue
        if p / math.log2(d) > ratio:
            return p, d
    raise NoFeasibleDepth(
        f"no depth up to {p_max} reaches ratio > {ratio} at budget {budget}"
    )


# ---------------------------------------------------------------------------
# sweep configuration

@dataclass(frozen=True)
class SweepCell:
    budget: int
    ratio: float
    seed: int
    p: int
    d: int


@dataclass(frozen=True)
class SweepConfig:
    cells: Tuple[SweepCell, ...]
    hyperparameters: Dict[str, object]


def make_sweep_config(
    budgets: Sequence[int] = DEFAULT_BUDGETS,
    ratios: Sequence[float] = DEFAULT_RATIOS,
    seeds: Sequence[int] = DEFAULT_SEEDS,
    count_fn: Optional[Callable[[int, int], int]] = None,
) -> SweepConfig:
    """Cross product of budgets, ratios, and seeds with planned (p, d).

    The stock grid (4 budgets x 6 ratios x 6 seeds) yields 144 cells.
    Pure function of its inputs: identical arguments serialize to
    byte-identical JSON.
    """
    if not budgets or not ratios or not seeds:
        raise ValueError("budgets, ratios, and seeds must all be nonempty")
    cells: List[SweepCell] = []
    for budget in budgets:
        for ratio in ratios:
            p, d = depth_selection(budget, ratio, count_fn)
            for seed in seeds:
                cells.append(SweepCell(budget, float(ratio), seed, p, d))
    return SweepConfig(tuple(cells), dict(HYPERPARAMETERS))


def sweep_to_json(config: SweepConfig) -> str:
    payload = {
        "cells": [
            {
                "budget": c.budget,
                "ratio": c.ratio,
                "seed": c.seed,
                "p": c.p,
                "d": c.d,
            }
            for c in config.cells
        ],
        "hyperparameters": config.hyperparameters,
    }
    return json.dumps(payload, sort_keys=True)


def sweep_from_json(text: str) -> SweepConfig:
    payload = json.loads(text)
    cells = tuple(
        SweepCell(c["budget"], c["ratio"], c["seed"], c["p"], c["d"])
        for c in payload["cells"]
    )
    return SweepConfig(cells, payload["hyperparameters"])


# ---------------------------------------------------------------------------
# dominance

def check_dominance(
    lb_curve: Mapping[int, float],
    ub_curve: Mapping[int, float],
    f: Callable[[int], float],
) -> bool:
    """Numerical check that lb/ub grows at least like the positive f.

    True iff, over the later half of the shared depth range, the ratio
    lb(p)/ub(p) is strictly increasing and ratio/f does not decay below
    half its starting value (a finite-range reading of being bounded
    below by a positive constant).  Needs at least 8 shared depths.
    """
    shared = sorted(set(lb_curve) & set(ub_curve))
    if len(shared) < 8:
        raise InsufficientRange(
            f"need at least 8 shared depths, got {len(shared)}"
        )
    ratio = {p: lb_curve[p] / ub_curve[p] for p in shared}
    tail = shared[len(shared) // 2 :]
    increasing = all(
        ratio[tail[i + 1]] > ratio[tail[i]] for i in range(len(tail) - 1)
    )
    scaled = [ratio[p] / f(p) for p in tail]
    bounded = all(g > 0 for g in scaled) and scaled[-1] >= 0.5 * scaled[0]
    return increasing and bounded


def depth_scaling_threshold() -> float:
    """Depth-inflation threshold log2(3), about 1.585.

    A mixer whose depth grows alpha times faster than the transformer's
    keeps an exponential expressivity deficit exactly while
    alpha < log2(3): the dominance base 3 / 2^alpha stays above 1.
    """
    return math.log2(3)

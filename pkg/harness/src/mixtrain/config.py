"""Sweep-configuration loading, validation, and desk-scale trimming.

The harness is driven entirely by a JSON document produced by
``srk sweep``: a hyperparameter block plus one cell per
(budget, ratio, seed) point, each cell carrying the (depth p, width d)
the planner selected there.  Nothing else crosses the boundary between
the two packages, so this module also re-derives the published
selection law from each cell's budget and ratio and refuses to train
from a document that contradicts it.
"""

from __future__ import annotations

import dataclasses
import json
import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from mixtrain.errors import ConfigurationError

DESK_BUDGETS: tuple[int, ...] = (32768, 65536)
DESK_SEED_COUNT: int = 3
DESK_EPOCHS: int = 20

# Sanity ceiling for the selection loop; every realistic budget selects far below it.
_MAX_DEPTH = 100_000


@dataclass(frozen=True)
class SweepCell:
    """One training job: a (budget, ratio, seed) point and its planned shape."""

    budget: int
    ratio: float
    seed: int
    p: int
    d: int


@dataclass(frozen=True)
class Hyperparameters:
    optimizer: str
    lr: float
    weight_decay: float
    betas: tuple[float, float]
    batch_size: int
    epochs: int
    patch: tuple[int, int]
    dropout: float
    augment: tuple[str, ...]


@dataclass(frozen=True)
class SweepConfig:
    cells: tuple[SweepCell, ...]
    hyperparameters: Hyperparameters


def _require(mapping: dict[str, Any], key: str, where: str) -> Any:
    if key not in mapping:
        raise ConfigurationError(f"{where} is missing required key {key!r}")
    return mapping[key]


def _cell_from_dict(raw: dict[str, Any], index: int) -> SweepCell:
    where = f"cell {index}"
    cell = SweepCell(
        budget=int(_require(raw, "budget", where)),
        ratio=float(_require(raw, "ratio", where)),
        seed=int(_require(raw, "seed", where)),
        p=int(_require(raw, "p", where)),
        d=int(_require(raw, "d", where)),
    )
    if cell.budget < 1 or cell.p < 1 or cell.d < 1 or cell.seed < 0 or cell.ratio <= 0:
        raise ConfigurationError(f"{where} has out-of-range fields: {raw!r}")
    return cell


def config_from_json(text: str) -> SweepConfig:
    """Parse a sweep-configuration document.

    Raises ConfigurationError on malformed JSON, missing keys, or
    out-of-range cell fields, so that a bad document is rejected before
    any training starts.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"sweep config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigurationError("sweep config must be a JSON object")
    hyper_raw = _require(raw, "hyperparameters", "sweep config")
    cells_raw = _require(raw, "cells", "sweep config")
    if not isinstance(cells_raw, list) or not cells_raw:
        raise ConfigurationError("sweep config must carry a non-empty cell list")
    betas = _require(hyper_raw, "betas", "hyperparameters")
    patch = _require(hyper_raw, "patch", "hyperparameters")
    hyper = Hyperparameters(
        optimizer=str(_require(hyper_raw, "optimizer", "hyperparameters")),
        lr=float(_require(hyper_raw, "lr", "hyperparameters")),
        weight_decay=float(_require(hyper_raw, "weight_decay", "hyperparameters")),
        betas=(float(betas[0]), float(betas[1])),
        batch_size=int(_require(hyper_raw, "batch_size", "hyperparameters")),
        epochs=int(_require(hyper_raw, "epochs", "hyperparameters")),
        patch=(int(patch[0]), int(patch[1])),
        dropout=float(_require(hyper_raw, "dropout", "hyperparameters")),
        augment=tuple(str(a) for a in _require(hyper_raw, "augment", "hyperparameters")),
    )
    cells = tuple(_cell_from_dict(c, i) for i, c in enumerate(cells_raw))
    return SweepConfig(cells=cells, hyperparameters=hyper)


def load_config(path: str | Path) -> SweepConfig:
    return config_from_json(Path(path).read_text())


def selected_width(budget: int, p: int) -> int:
    """Width for depth p under budget: sqrt(budget / p) rounded half up.

    Integer form: the largest d with p * (2d - 1)^2 <= 4 * budget, so no
    float ever decides a boundary case.
    """
    if budget < 1 or p < 1:
        raise ConfigurationError("budget and depth must be positive")
    d = (math.isqrt(4 * budget // p) + 1) // 2
    while p * (2 * (d + 1) - 1) ** 2 <= 4 * budget:
        d += 1
    while d > 0 and p * (2 * d - 1) ** 2 > 4 * budget:
        d -= 1
    return d


def selected_cell(budget: int, ratio: float) -> tuple[int, int]:
    """Re-derive the (p, d) the planner publishes for a (budget, ratio) point.

    Smallest depth p whose ratio p / log2(d_p) exceeds the requested
    ratio, where d_p is the half-up rounded width for that depth.  This
    restates the documented generation law of the sweep JSON; it exists
    so a consumer can audit the document without importing the producer.
    """
    for p in range(1, _MAX_DEPTH + 1):
        d = selected_width(budget, p)
        if d <= 1:
            return (p, max(d, 1))
        if p > ratio * math.log2(d):
            return (p, d)
    raise ConfigurationError(f"no feasible depth for budget={budget} ratio={ratio}")


def mixing_param_count(p: int, d: int, *, norm: bool = True) -> int:
    """Trainable parameters in the mixing stack alone.

    One d-by-d matrix plus bias per layer, plus the per-layer norm affine
    pair when norm is on.  This is the count the budget governs, and the
    count function a planner can consume.
    """
    per_layer = d * d + d + (2 * d if norm else 0)
    return p * per_layer


def validate_cells(
    config: SweepConfig,
    *,
    count_fn: Callable[[int, int], int] | None = None,
    tolerance: float = 0.15,
) -> None:
    """Check every cell against the selection law and the budget.

    Two properties must hold: the recorded (p, d) equals the re-derived
    selection for (budget, ratio), and the mixing-stack parameter count
    lands within ``tolerance`` of the stated budget.  All offending
    cells are listed in one ConfigurationError.
    """
    counter = count_fn if count_fn is not None else mixing_param_count
    bad: list[str] = []
    for cell in config.cells:
        expect = selected_cell(cell.budget, cell.ratio)
        if expect != (cell.p, cell.d):
            bad.append(
                f"(B={cell.budget}, R={cell.ratio}, seed={cell.seed}): recorded "
                f"(p={cell.p}, d={cell.d}) but selection law gives {expect}"
            )
            continue
        count = counter(cell.p, cell.d)
        if abs(count - cell.budget) > tolerance * cell.budget:
            bad.append(
                f"(B={cell.budget}, R={cell.ratio}, seed={cell.seed}): mixing count "
                f"{count} is outside {tolerance:.0%} of the budget"
            )
    if bad:
        raise ConfigurationError("sweep config failed validation:\n  " + "\n  ".join(bad))


def desk_preset(
    config: SweepConfig,
    *,
    budgets: Iterable[int] = DESK_BUDGETS,
    seed_count: int = DESK_SEED_COUNT,
    epochs: int = DESK_EPOCHS,
) -> SweepConfig:
    """Trim a full sweep to the desk-scale subset.

    Keeps the two smallest paper budgets, the first few seeds, and
    shortens training; the qualitative best-ratio trend survives the cut
    while the wall-clock cost drops by an order of magnitude.
    """
    wanted = set(budgets)
    seeds = sorted({c.seed for c in config.cells})[:seed_count]
    kept = tuple(c for c in config.cells if c.budget in wanted and c.seed in set(seeds))
    if not kept:
        raise ConfigurationError("desk preset removed every cell; check the budget filter")
    hyper = dataclasses.replace(config.hyperparameters, epochs=epochs)
    return SweepConfig(cells=kept, hyperparameters=hyper)

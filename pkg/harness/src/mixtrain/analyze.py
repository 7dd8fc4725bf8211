"""Best-ratio extraction from a results table.

Pure functions of the CSV: group rows by budget, pick each seed's
best ratio, settle disagreements by majority with ties toward the
smaller ratio, and report how far individual seeds strayed from the
per-ratio mean.  Large strays are flagged, not failed; at desk scale
some seed noise is expected.
"""

from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from mixtrain.errors import ConfigurationError, MissingCells
from mixtrain.train import CSV_HEADER, RunResult

FLAG_THRESHOLD = 0.02


@dataclass(frozen=True)
class RatioVerdict:
    """Per-budget outcome: the winning ratio and the seed spread behind it."""

    budget: int
    r_star: float
    deviation: float
    flagged: bool
    per_seed: tuple[tuple[int, float], ...]  # (seed, that seed's best ratio)
    mean_by_ratio: tuple[tuple[float, float], ...]  # (ratio, mean accuracy)


def read_results(path: str | Path) -> list[RunResult]:
    """Parse a results CSV produced by the sweep runner."""
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ConfigurationError(f"results file {path} is empty") from None
        if header != CSV_HEADER.split(","):
            raise ConfigurationError(f"results file {path} has header {header!r}")
        rows = []
        for line in reader:
            if not line:
                continue
            if len(line) != 8:
                raise ConfigurationError(f"results row has {len(line)} fields: {line!r}")
            rows.append(
                RunResult(
                    budget=int(line[0]),
                    ratio=float(line[1]),
                    seed=int(line[2]),
                    p=int(line[3]),
                    d=int(line[4]),
                    accuracy=float(line[5]),
                    epochs=int(line[6]),
                    seconds=float(line[7]),
                )
            )
    return rows


def analyze_results(rows: list[RunResult], *, flag_threshold: float = FLAG_THRESHOLD) -> list[RatioVerdict]:
    """Reduce result rows to one verdict per budget.

    The expected grid is the cross product of the budgets, ratios, and
    seeds that appear anywhere in the rows; holes raise MissingCells
    with the absent combinations listed, duplicates are rejected.  Each
    seed votes for its own best ratio (ties toward the smaller one),
    the majority wins (again ties toward the smaller), and the reported
    deviation is the largest distance of any single run from its
    ratio's seed mean.
    """
    if not rows:
        raise ConfigurationError("no result rows to analyze")
    acc: dict[tuple[int, float, int], float] = {}
    for row in rows:
        key = (row.budget, row.ratio, row.seed)
        if key in acc:
            raise ConfigurationError(f"duplicate result row for (B={key[0]}, R={key[1]}, seed={key[2]})")
        acc[key] = row.accuracy
    budgets = sorted({row.budget for row in rows})
    ratios = sorted({row.ratio for row in rows})
    seeds = sorted({row.seed for row in rows})
    missing = [
        (b, r, s) for b in budgets for r in ratios for s in seeds if (b, r, s) not in acc
    ]
    if missing:
        raise MissingCells(missing)

    verdicts = []
    for budget in budgets:
        per_seed = []
        for seed in seeds:
            best = max(ratios, key=lambda r: (acc[(budget, r, seed)], -r))
            per_seed.append((seed, best))
        votes = Counter(choice for _, choice in per_seed)
        r_star = min(votes, key=lambda r: (-votes[r], r))
        means = {r: sum(acc[(budget, r, s)] for s in seeds) / len(seeds) for r in ratios}
        deviation = max(abs(acc[(budget, r, s)] - means[r]) for r in ratios for s in seeds)
        verdicts.append(
            RatioVerdict(
                budget=budget,
                r_star=r_star,
                deviation=deviation,
                flagged=deviation > flag_threshold,
                per_seed=tuple(per_seed),
                mean_by_ratio=tuple((r, means[r]) for r in ratios),
            )
        )
    return verdicts


def analyze_sweep(results_csv: str | Path, *, flag_threshold: float = FLAG_THRESHOLD) -> list[RatioVerdict]:
    return analyze_results(read_results(results_csv), flag_threshold=flag_threshold)


def verdicts_to_json(verdicts: list[RatioVerdict]) -> str:
    payload = [
        {
            "budget": v.budget,
            "r_star": v.r_star,
            "deviation": v.deviation,
            "flagged": v.flagged,
            "per_seed": [{"seed": s, "best_ratio": r} for s, r in v.per_seed],
            "mean_by_ratio": [{"ratio": r, "accuracy": a} for r, a in v.mean_by_ratio],
        }
        for v in verdicts
    ]
    return json.dumps(payload, indent=2, sort_keys=True)

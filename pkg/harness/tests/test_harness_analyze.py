import json

import pytest

from mixtrain import (
    ConfigurationError,
    MissingCells,
    RunResult,
    analyze_results,
    analyze_sweep,
    read_results,
    verdicts_to_json,
)
from mixtrain.train import CSV_HEADER


def row(budget: int, ratio: float, seed: int, accuracy: float) -> RunResult:
    return RunResult(
        budget=budget, ratio=ratio, seed=seed, p=4, d=16, accuracy=accuracy, epochs=20, seconds=1.0
    )


def grid(budgets, ratios, seeds, acc_fn) -> list[RunResult]:
    return [row(b, r, s, acc_fn(b, r, s)) for b in budgets for r in ratios for s in seeds]


def test_dominant_ratio_wins_everywhere():
    rows = grid(
        [32768, 65536], [0.5, 1.0, 2.0], [0, 1, 2],
        lambda b, r, s: 0.6 if r == 1.0 else 0.5,
    )
    verdicts = analyze_results(rows)
    assert [v.budget for v in verdicts] == [32768, 65536]
    assert all(v.r_star == 1.0 for v in verdicts)
    assert all(v.deviation == 0.0 and not v.flagged for v in verdicts)
    assert all(dict(v.per_seed) == {0: 1.0, 1: 1.0, 2: 1.0} for v in verdicts)


def test_reported_outcome_shape_reproduced():
    # four budgets peaking at four different ratios, unanimous seeds
    peak = {32768: 0.67, 65536: 1.15, 131072: 1.06, 262144: 1.14}
    rows = grid(
        sorted(peak), [0.67, 1.06, 1.14, 1.15], [0, 1, 2],
        lambda b, r, s: 0.4 + (0.1 if r == peak[b] else 0.0),
    )
    verdicts = analyze_results(rows)
    assert [v.r_star for v in verdicts] == [0.67, 1.15, 1.06, 1.14]


def test_majority_vote_two_against_one():
    def acc(b, r, s):
        if s in (0, 1):
            return 0.7 if r == 2.0 else 0.6
        return 0.8 if r == 0.5 else 0.2

    verdicts = analyze_results(grid([1024], [0.5, 2.0], [0, 1, 2], acc))
    assert verdicts[0].r_star == 2.0
    assert dict(verdicts[0].per_seed) == {0: 2.0, 1: 2.0, 2: 0.5}


def test_vote_tie_breaks_toward_smaller_ratio():
    def acc(b, r, s):
        if s == 0:
            return 0.7 if r == 0.5 else 0.6
        return 0.7 if r == 2.0 else 0.6

    verdicts = analyze_results(grid([1024], [0.5, 2.0], [0, 1], acc))
    assert verdicts[0].r_star == 0.5


def test_per_seed_argmax_tie_breaks_toward_smaller_ratio():
    verdicts = analyze_results(grid([1024], [0.5, 1.0, 2.0], [0, 1], lambda b, r, s: 0.5))
    assert dict(verdicts[0].per_seed) == {0: 0.5, 1: 0.5}
    assert verdicts[0].r_star == 0.5


def test_deviation_measured_and_flagged():
    spread = {0: 0.50, 1: 0.44, 2: 0.47}

    def acc(b, r, s):
        if b == 1024 and r == 1.0:
            return spread[s]
        return 0.4

    verdicts = analyze_results(grid([1024, 2048], [0.5, 1.0], [0, 1, 2], acc))
    noisy, quiet = verdicts[0], verdicts[1]
    assert noisy.deviation == pytest.approx(0.03, abs=1e-12)
    assert noisy.flagged
    assert quiet.deviation == pytest.approx(0.0, abs=1e-12)
    assert not quiet.flagged
    # the flag is a report, not a failure: both budgets still get verdicts
    assert len(verdicts) == 2


def test_flag_threshold_is_adjustable():
    rows = grid([1024], [1.0], [0, 1], lambda b, r, s: 0.5 + 0.005 * s)
    assert not analyze_results(rows)[0].flagged
    assert analyze_results(rows, flag_threshold=0.001)[0].flagged


def test_missing_cells_listed():
    rows = grid([1024, 2048], [0.5, 1.0], [0, 1], lambda b, r, s: 0.5)
    dropped = [r for r in rows if not (r.budget == 2048 and r.ratio == 0.5 and r.seed == 1)]
    with pytest.raises(MissingCells) as excinfo:
        analyze_results(dropped)
    assert excinfo.value.missing == [(2048, 0.5, 1)]


def test_duplicate_rows_rejected():
    rows = grid([1024], [0.5, 1.0], [0], lambda b, r, s: 0.5)
    with pytest.raises(ConfigurationError, match="duplicate"):
        analyze_results(rows + [rows[0]])


def test_empty_input_rejected():
    with pytest.raises(ConfigurationError):
        analyze_results([])


def test_row_order_does_not_matter():
    rows = grid([1024, 2048], [0.5, 1.0, 2.0], [0, 1, 2], lambda b, r, s: 0.4 + 0.01 * r + 0.001 * s)
    assert analyze_results(rows) == analyze_results(list(reversed(rows)))
    assert [v.budget for v in analyze_results(list(reversed(rows)))] == [1024, 2048]


def test_analysis_is_pure(tmp_path):
    rows = grid([1024], [0.5, 1.0], [0, 1], lambda b, r, s: 0.4 + 0.1 * r)
    path = tmp_path / "results.csv"
    path.write_text(CSV_HEADER + "\n" + "\n".join(r.csv_row() for r in rows) + "\n")
    before = path.read_bytes()
    first = analyze_sweep(path)
    second = analyze_sweep(path)
    assert first == second
    assert path.read_bytes() == before


def test_csv_round_trip(tmp_path):
    rows = grid([1024], [0.5], [0, 1], lambda b, r, s: 0.123456789 + s * 0.1)
    path = tmp_path / "results.csv"
    path.write_text(CSV_HEADER + "\n" + "\n".join(r.csv_row() for r in rows) + "\n")
    assert read_results(path) == rows


def test_read_results_validates_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ConfigurationError, match="header"):
        read_results(path)
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(ConfigurationError, match="empty"):
        read_results(empty)


def test_json_output_shape():
    rows = grid([1024, 2048], [0.5, 1.0], [0, 1], lambda b, r, s: 0.4 + 0.1 * r)
    verdicts = analyze_results(rows)
    text = verdicts_to_json(verdicts)
    assert text == verdicts_to_json(verdicts)
    payload = json.loads(text)
    assert [entry["budget"] for entry in payload] == [1024, 2048]
    for entry in payload:
        assert set(entry) == {"budget", "r_star", "deviation", "flagged", "per_seed", "mean_by_ratio"}
        assert entry["r_star"] in {0.5, 1.0}

import csv
import io
import json

import pytest
from hypothesis import given, settings, strategies as st
from statsmodels.stats.proportion import proportion_confint

from phantomgames import GameConfig, GameKind, Reason
from phantomgames.experiment import (CSV_COLUMNS, RESERVOIR, BudgetError, SweepSpec, TrialError,
                                     dump_json, parse_grid, play_trial, result_json, run_sweep,
                                     run_trials, wilson_interval)
from phantomgames.registry import UnknownStrategy

K3 = GameConfig(3, 1, 1, GameKind.CONNECTIVITY)


# -- Wilson interval -----------------------------------------------------------

def test_wilson_examples():
    lo, hi = wilson_interval(0, 100)
    assert lo == 0 and hi == pytest.approx(0.0370, abs=1e-4)
    lo, hi = wilson_interval(100, 100)
    assert hi == 1 and lo == pytest.approx(0.9630, abs=1e-4)
    lo, hi = wilson_interval(50, 100)
    assert lo == pytest.approx(0.4038, abs=1e-4) and hi == pytest.approx(0.5962, abs=1e-4)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 10 ** 6).flatmap(lambda t: st.tuples(st.integers(0, t), st.just(t))))
def test_wilson_matches_statsmodels(data):
    wins, trials = data
    lo, hi = wilson_interval(wins, trials)
    ref_lo, ref_hi = proportion_confint(wins, trials, alpha=0.05, method="wilson")
    assert lo == pytest.approx(ref_lo, abs=1e-9)
    assert hi == pytest.approx(ref_hi, abs=1e-9)
    assert 0 <= lo <= wins / trials <= hi <= 1


@pytest.mark.parametrize("wins,trials", [(1, 0), (-1, 5), (6, 5)])
def test_wilson_domain(wins, trials):
    with pytest.raises(ValueError):
        wilson_interval(wins, trials)


# -- running trials ------------------------------------------------------------

def test_run_trials_k3():
    res = run_trials(K3, "random", "random", 1000, master_seed=7, workers=1)
    s = res.stats
    assert s.trials == 1000
    assert sum(s.reasons.values()) == 1000
    assert s.maker_wins == s.reasons[Reason.MAKER_WIN.value]
    assert 0.44 < s.maker_frequency < 0.56
    assert s.wilson_low <= s.maker_frequency <= s.wilson_high


def test_forced_results():
    s = run_trials(GameConfig(3, 2, 1, GameKind.CONNECTIVITY), "random", "random", 200,
                   workers=1).stats
    assert s.maker_frequency == 1.0 and s.wilson_high == 1.0
    s = run_trials(GameConfig(4, 1, 6, GameKind.MIN_DEGREE), "random", "star-phases", 200,
                   workers=1).stats
    assert s.maker_wins == 0 and s.wilson_low == 0.0


def test_worker_count_does_not_change_results():
    cfg = GameConfig(30, 1, 2, GameKind.HAMILTONICITY)
    runs = [run_trials(cfg, "hamilton", "random", 120, master_seed=3, workers=w, keep_records=True)
            for w in (1, 4, 16)]
    base = runs[0]
    for r in runs[1:]:
        assert r.stats == base.stats
        assert [x.transcript for x in r.records] == [x.transcript for x in base.records]


def test_reservoir_keeps_first_records():
    res = run_trials(K3, "random", "random", RESERVOIR + 30, workers=2, keep_records=True)
    assert len(res.records) == RESERVOIR + 30
    assert all(r.transcript for r in res.records[:RESERVOIR])
    assert all(r.transcript is None for r in res.records[RESERVOIR:])


def test_play_trial_matches_run_trials_record():
    res = run_trials(K3, "random", "random", 5, master_seed=11, workers=1, keep_records=True)
    for i, rec in enumerate(res.records):
        again = play_trial(K3, "random", "random", i, 11, None)
        assert again == rec and again.transcript == rec.transcript


def test_unknown_strategy_rejected_before_running():
    with pytest.raises(UnknownStrategy):
        run_trials(K3, "nosuch", "random", 10)


def test_trial_error_carries_seed(monkeypatch):
    from phantomgames import makers

    def boom(self, view, rng):
        raise RuntimeError("boom")
    monkeypatch.setattr(makers.RandomMaker, "next_move", boom)
    with pytest.raises(TrialError) as info:
        run_trials(K3, "random", "random", 3, master_seed=5, workers=1)
    assert "seed" in str(info.value)


@settings(max_examples=20, deadline=None)
@given(st.integers(3, 12), st.integers(1, 3), st.integers(1, 3), st.integers(1, 60),
       st.integers(0, 2 ** 32))
def test_stats_invariants(n, a, b, trials, seed):
    s = run_trials(GameConfig(n, a, b, GameKind.CONNECTIVITY), "random", "random", trials,
                   master_seed=seed, workers=1).stats
    assert sum(s.reasons.values()) == trials == s.trials
    assert s.maker_wins <= trials
    assert s.certified_wins <= s.maker_wins
    assert s.wilson_low <= s.maker_frequency <= s.wilson_high
    assert s.mean_rounds >= 1


# -- JSON ----------------------------------------------------------------------

def test_dump_json_uses_full_precision():
    text = dump_json({"x": 0.1 + 0.2, "y": [1, 2.5], "z": "s"})
    assert "0.30000000000000004" in text
    assert json.loads(text) == {"x": 0.1 + 0.2, "y": [1, 2.5], "z": "s"}


def test_result_json_round_trip():
    res = run_trials(K3, "random", "random", 50, master_seed=1, workers=1, keep_records=True)
    doc = json.loads(dump_json(result_json(res, include_records=True)))
    assert doc["config"]["maker"] == "random" and doc["config"]["seed"] == 1
    assert doc["stats"]["frequency"] == res.stats.maker_frequency
    assert len(doc["records"]) == 50


# -- sweeps --------------------------------------------------------------------

def spec(**kw):
    base = dict(games=[GameKind.CONNECTIVITY], ns=[4], a_values=[1], b_values=[1, 2, 3],
                trials=40, master_seed=9)
    base.update(kw)
    return SweepSpec(**base)


def test_sweep_three_rows():
    out = io.StringIO()
    rows = run_sweep(spec(), workers=1, stream=out)
    assert len(rows) == 3
    lines = list(csv.reader(io.StringIO(out.getvalue())))
    assert lines[0] == CSV_COLUMNS and len(lines) == 4
    assert [r[3] for r in lines[1:]] == ["1", "2", "3"]


def test_single_cell_sweep_equals_run_trials():
    rows = run_sweep(spec(b_values=[2]), workers=1)
    stats = run_trials(GameConfig(4, 1, 2, GameKind.CONNECTIVITY), "random", "random", 40,
                       master_seed=9, workers=1).stats
    row = dict(zip(CSV_COLUMNS, rows[0]))
    assert int(row["maker_wins"]) == stats.maker_wins
    assert float(row["frequency"]) == stats.maker_frequency


def test_sweep_resume_is_identical(tmp_path):
    full = tmp_path / "full.csv"
    run_sweep(spec(), out_path=str(full), workers=1)
    part = tmp_path / "part.csv"
    lines = full.read_text().splitlines(keepends=True)
    part.write_text("".join(lines[:2]))  # header and the first cell only
    rows = run_sweep(spec(), out_path=str(part), workers=1)
    assert len(rows) == 2
    assert part.read_text() == full.read_text()


def test_sweep_budget_refused(tmp_path):
    out = tmp_path / "x.csv"
    with pytest.raises(BudgetError):
        run_sweep(spec(budget=10), out_path=str(out))
    assert not out.exists()


def test_sweep_empty_grid():
    with pytest.raises(ValueError):
        run_sweep(spec(b_values=[]))


@pytest.mark.parametrize("text,want", [("1,2,5", [1, 2, 5]), ("1..4", [1, 2, 3, 4]),
                                       ("3", [3]), ("1..2,7", [1, 2, 7])])
def test_parse_grid(text, want):
    assert parse_grid(text) == want


@pytest.mark.parametrize("text", ["3..1", "", "a", "1..x"])
def test_parse_grid_rejects(text):
    with pytest.raises(ValueError):
        parse_grid(text)

import json
from fractions import Fraction

import pytest

from phantomgames import GameConfig, GameKind
from phantomgames.acceptance import fixture_config, load_fixtures
from phantomgames.oracle import (InfeasibleError, enumerate_choice_points, estimate_tree_size,
                                 exact_win_probability, fixture_record, new_root)

FAST = {("Connectivity", 3, 2, 1), ("MinDegree", 4, 1, 6), ("Connectivity", 3, 1, 1),
        ("Connectivity", 4, 1, 1), ("PerfectMatching", 4, 1, 1), ("MinDegree", 4, 1, 1)}


def fixtures():
    return load_fixtures()


def test_fixture_file_shape():
    recs = fixtures()
    assert len(recs) >= 5
    values = [Fraction(r["num"], r["den"]) for r in recs]
    assert Fraction(1) in values and Fraction(0) in values
    assert all(0 <= v <= 1 for v in values)


@pytest.mark.parametrize("rec", [r for r in load_fixtures() if (r["game"], r["n"], r["a"], r["b"]) in FAST],
                         ids=lambda r: f"{r['game']}-K{r['n']}-{r['a']}:{r['b']}-{r['maker']}-{r['breaker']}")
def test_fast_fixtures_recompute(rec):
    res = exact_win_probability(fixture_config(rec), rec["maker"], rec["breaker"])
    assert res.probability == Fraction(rec["num"], rec["den"])
    assert res.total == 1


def test_k3_connectivity_by_hand():
    # Round 1: Maker claims some edge, Breaker claims one of the two others.
    # Round 2: Maker picks one of the two remaining edges uniformly; it wins iff
    # that edge is the free one.  Maker never learns anything before guessing.
    res = exact_win_probability(GameConfig(3, 1, 1, GameKind.CONNECTIVITY), "random", "random")
    assert res.probability == Fraction(1, 2)


def test_forced_win_two_to_one():
    # Maker places two distinct edges of K3 before Breaker moves, and any two span it.
    res = exact_win_probability(GameConfig(3, 2, 1, GameKind.CONNECTIVITY), "random", "random")
    assert res.probability == 1


@pytest.mark.parametrize("config,maker,breaker", [
    (GameConfig(4, 1, 1, GameKind.CONNECTIVITY), "random", "random"),
    (GameConfig(4, 1, 6, GameKind.MIN_DEGREE), "random", "star-phases"),
    (GameConfig(4, 1, 1, GameKind.PERFECT_MATCHING), "random", "random"),
])
def test_memo_does_not_change_value(config, maker, breaker):
    on = exact_win_probability(config, maker, breaker, memo=True)
    off = exact_win_probability(config, maker, breaker, memo=False)
    assert on.probability == off.probability
    assert on.nodes <= off.nodes


def test_choice_points_star_phases_k4():
    root = new_root(GameConfig(4, 1, 6, GameKind.MIN_DEGREE), "random", "star-phases")
    points = list(enumerate_choice_points(root))
    assert points[0] == ("maker", 6)
    assert points[1] == ("breaker", 2)  # two vertices untouched by Maker's edge
    assert points[-1][1] == 1  # the last star edge is forced


def test_choice_points_mindeg_first_vertex():
    for n in (4, 6, 8):
        root = new_root(GameConfig(n, 1, 1, GameKind.MIN_DEGREE), "mindeg-large", "random")
        assert next(enumerate_choice_points(root)) == ("maker", n)


def test_choice_points_follow_path():
    root = new_root(GameConfig(4, 1, 1, GameKind.CONNECTIVITY), "random", "random")
    a = list(enumerate_choice_points(root, path=(0, 0, 0), seed=1))
    b = list(enumerate_choice_points(root, path=(0, 0, 0), seed=1))
    assert a == b and a[0] == ("maker", 6)


def test_tree_estimate_exact_for_uniform_tree():
    # random vs random on K3 (1:1): 3 Maker choices, 2 Breaker choices, 2 Maker choices
    root = new_root(GameConfig(3, 1, 1, GameKind.CONNECTIVITY), "random", "random")
    assert estimate_tree_size(root) == pytest.approx(12)


def test_infeasible_board_refused():
    with pytest.raises(InfeasibleError) as info:
        exact_win_probability(GameConfig(12, 1, 1, GameKind.CONNECTIVITY), "random", "random")
    assert info.value.estimate > 1e8


def test_node_budget_refusal():
    with pytest.raises(InfeasibleError):
        exact_win_probability(GameConfig(4, 1, 1, GameKind.CONNECTIVITY), "random", "random",
                              node_budget=3)


def test_fixture_record_round_trip():
    cfg = GameConfig(4, 1, 1, GameKind.CONNECTIVITY)
    rec = fixture_record(cfg, "random", "random", Fraction(7, 15))
    back = json.loads(json.dumps(rec))
    assert fixture_config(back) == cfg
    assert Fraction(back["num"], back["den"]) == Fraction(7, 15)

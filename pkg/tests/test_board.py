import itertools
import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from phantomgames import (ConfigError, ContractError, GameConfig, GameKind, MoveOutcome, Reason,
                          ScriptedSource, SeededSource, Winner, attempt_claim_maker,
                          claim_breaker, maker_view, new_game, run_game)
from phantomgames.engine import Game, replay_known_breaker
from phantomgames.randomness import Branch, mix_seed
from phantomgames.registry import make_breaker, make_maker


def cfg(n, a=1, b=1, game=GameKind.MIN_DEGREE, k=1, **kw):
    return GameConfig(n, a, b, game, k, **kw)


# -- configuration -------------------------------------------------------------

def test_new_game_n4_all_free():
    s = new_game(cfg(4))
    assert s.free_count == 6
    assert list(s.free_edges()) == list(itertools.combinations(range(4), 2))
    assert s.maker_deg == [0] * 4 and s.breaker_deg == [0] * 4
    assert s.round == 1 and s.maker_attempts_this_round == 0


def test_new_game_n2_single_edge():
    assert new_game(cfg(2)).free_count == 1


@pytest.mark.parametrize("kw", [
    dict(n=5, game=GameKind.PERFECT_MATCHING),
    dict(n=1), dict(n=4, a=0), dict(n=4, b=0), dict(n=4, k=0),
    dict(n=2, game=GameKind.HAMILTONICITY),
])
def test_invalid_configs(kw):
    n = kw.pop("n")
    with pytest.raises(ConfigError):
        cfg(n, **kw)


def test_stall_cap_default_and_minimum():
    c = cfg(10, 1, 1)
    assert c.round_cap == 100
    assert c.min_rounds == 23  # ceil(45 / 2)
    with pytest.raises(ConfigError):
        cfg(10, 1, 1, stall_cap=22)
    assert cfg(10, 1, 1, stall_cap=23).round_cap == 23


# -- moves ---------------------------------------------------------------------

def test_maker_claims_free_edge():
    s = new_game(cfg(4))
    assert attempt_claim_maker(s, (0, 1)) is MoveOutcome.CLAIMED
    assert maker_view(s).edges() == [(0, 1)]
    assert s.maker_deg[0] == s.maker_deg[1] == 1


def test_maker_failure_reveals_and_costs_budget():
    s = new_game(cfg(4, a=2))
    claim_breaker(s, (1, 2))
    assert attempt_claim_maker(s, (2, 1)) is MoveOutcome.FAILURE
    assert s.known_breaker == {1 * 4 + 2}
    assert maker_view(s).my_attempt_budget_left == 1
    assert s.maker_failures == 1


def test_maker_own_edge_is_error():
    s = new_game(cfg(4, a=2))
    attempt_claim_maker(s, (0, 1))
    with pytest.raises(ContractError):
        attempt_claim_maker(s, (1, 0))


def test_maker_budget_exhausted_is_error():
    s = new_game(cfg(4, a=1))
    attempt_claim_maker(s, (0, 1))
    with pytest.raises(ContractError):
        attempt_claim_maker(s, (2, 3))


def test_breaker_claims():
    s = new_game(cfg(4))
    claim_breaker(s, (0, 3))
    assert s.owner(0, 3) == "B"
    attempt_claim_maker(s, (1, 2))
    with pytest.raises(ContractError):
        claim_breaker(s, (1, 2))
    with pytest.raises(ContractError):
        claim_breaker(s, (3, 0))


def test_view_is_phantom():
    s = new_game(cfg(5))
    v = maker_view(s)
    assert v.my_edges == set() and v.revealed_breaker == set()
    claim_breaker(s, (0, 1))
    assert maker_view(s).revealed_breaker == set()
    attempt_claim_maker(s, (0, 1))
    assert maker_view(s).revealed_breaker == {1}
    assert not hasattr(v, "breaker_edges")


def test_free_incident_counts():
    s = new_game(cfg(5))
    assert s.free_incident(0) == (4, 0, 0)
    claim_breaker(s, (0, 1))
    assert s.free_incident(0) == (3, 0, 1)


# -- referee loop --------------------------------------------------------------

def test_n2_maker_wins_round_one():
    for a, b in [(1, 1), (2, 5), (3, 1)]:
        c = cfg(2, a, b)
        rec = run_game(c, make_maker("random", c), make_breaker("random", c), SeededSource(0))
        assert rec.winner is Winner.MAKER and rec.reason is Reason.MAKER_WIN
        assert rec.rounds_used == 1


def test_k4_star_phases_forced_loss():
    c = cfg(4, 1, 6)
    for seed in range(50):
        rec = run_game(c, make_maker("random", c), make_breaker("star-phases", c), SeededSource(seed))
        assert rec.winner is Winner.BREAKER


def test_k3_connectivity_two_to_one_forced_win():
    c = cfg(3, 2, 1, GameKind.CONNECTIVITY)
    for seed in range(50):
        rec = run_game(c, make_maker("random", c), make_breaker("random", c), SeededSource(seed))
        assert rec.winner is Winner.MAKER


def test_k3_connectivity_one_to_one_failure_loses():
    # Maker's second attempt hits Breaker's hidden edge half of the time
    c = cfg(3, 1, 1, GameKind.CONNECTIVITY)
    winners = Counter(run_game(c, make_maker("random", c), make_breaker("random", c),
                               SeededSource(s)).winner for s in range(400))
    assert winners[Winner.MAKER] > 100 and winners[Winner.BREAKER] > 100


def test_stall_cap_reported_distinctly():
    class Stubborn:
        """Claims (0,1), then keeps failing on Breaker's (2,3)."""

        def next_move(self, view, rng):
            return (2, 3) if view.owns(0, 1) else (0, 1)

        def observe(self, *args):
            pass

    class Lexicographic:
        def next_claim(self, state, rng):
            return (2, 3) if state.is_free(2, 3) else next(iter(state.free_edges()))

        def on_maker_attempt(self, *args):
            pass

    c = cfg(4, 1, 1, stall_cap=3)
    rec = run_game(c, Stubborn(), Lexicographic(), SeededSource(0))
    assert rec.reason is Reason.STALL_CAP
    assert rec.winner is Winner.BREAKER and rec.stalled
    assert rec.rounds_used == 3 and rec.maker_failures == 2


def test_breaker_takes_all_when_fewer_than_b_free():
    c = cfg(3, 1, 5, GameKind.CONNECTIVITY)
    g = Game(c, make_maker("random", c), make_breaker("random", c))
    rec = g.play(SeededSource(1))
    b_claims = [t for t in g.state.transcript if t[0] == "B"]
    assert len(b_claims) == 2
    assert rec.winner is Winner.BREAKER


# -- properties ----------------------------------------------------------------

GAMES = [(GameKind.MIN_DEGREE, "mindeg-large"), (GameKind.MIN_DEGREE, "random"),
         (GameKind.CONNECTIVITY, "conn-large"), (GameKind.HAMILTONICITY, "hamilton"),
         (GameKind.PERFECT_MATCHING, "pm-large")]


class Checked:
    """Wraps a breaker and audits the board before every Breaker claim."""

    def __init__(self, inner):
        self.inner = inner
        self.audits = 0

    def next_claim(self, state, rng):
        state.check_partition()
        assert set(state.edges_of(state.known_breaker)) == replay_known_breaker(state.transcript)
        self.audits += 1
        return self.inner.next_claim(state, rng)

    def on_maker_attempt(self, edge, outcome, state):
        self.inner.on_maker_attempt(edge, outcome, state)


@settings(max_examples=60, deadline=None)
@given(st.integers(4, 14), st.integers(1, 3), st.integers(1, 4), st.sampled_from(GAMES),
       st.sampled_from(["random", "star-phases"]), st.integers(0, 2 ** 32))
def test_partition_and_known_breaker_replay(n, a, b, game_maker, breaker, seed):
    game, maker = game_maker
    if game is GameKind.PERFECT_MATCHING:
        n += n % 2
    c = cfg(n, a, b, game)
    br = Checked(make_breaker(breaker, c))
    g = Game(c, make_maker(maker, c), br)
    g.play(SeededSource(seed))
    g.state.check_partition()
    assert set(g.state.edges_of(g.state.known_breaker)) == replay_known_breaker(g.state.transcript)


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 16), st.integers(1, 3), st.integers(1, 3), st.integers(0, 2 ** 32))
def test_round_budget(n, a, b, seed):
    c = cfg(n, a, b, GameKind.CONNECTIVITY)
    g = Game(c, make_maker("random", c), make_breaker("random", c))
    g.play(SeededSource(seed))
    free = c.num_edges
    by_round = []
    cur = []
    for actor, e, outcome in g.state.transcript:
        if actor == "M" and cur and cur[-1][0] == "B":
            by_round.append(cur)
            cur = []
        cur.append((actor, outcome))
    for rnd in by_round:  # only complete rounds
        m = sum(1 for x in rnd if x[0] == "M")
        bb = sum(1 for x in rnd if x[0] == "B")
        claimed = sum(1 for x in rnd if x[0] == "M" and x[1] is MoveOutcome.CLAIMED)
        assert m == a
        assert bb == min(b, free - claimed)
        free -= claimed + bb


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(GAMES), st.integers(0, 2 ** 32))
def test_determinism(game_maker, seed):
    game, maker = game_maker
    c = cfg(12, 1, 2, game)
    recs = [Game(c, make_maker(maker, c), make_breaker("random", c)).play(SeededSource(seed))
            for _ in range(2)]
    assert recs[0] == recs[1]
    assert recs[0].transcript == recs[1].transcript


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 12), st.lists(st.tuples(st.integers(0, 11), st.integers(0, 11)), max_size=60),
       st.integers(0, 2 ** 32))
def test_free_edge_indexing_matches_brute_force(n, claims, seed):
    s = new_game(cfg(n, a=10 ** 6))
    rng = random.Random(seed)
    for u, v in claims:
        u, v = u % n, v % n
        if u == v or not s.is_free(u, v):
            continue
        if rng.random() < 0.5:
            claim_breaker(s, (u, v))
        else:
            attempt_claim_maker(s, (u, v))
    free = [(u, v) for u, v in itertools.combinations(range(n), 2) if s.is_free(u, v)]
    assert list(s.free_edges()) == free
    for v in range(n):
        nb = [w for w in range(n) if w != v and s.is_free(v, w)]
        assert s.free_neighbors(v) == nb
        assert s.free_degree(v) + s.maker_deg[v] + s.breaker_deg[v] == n - 1


def test_random_free_edge_is_uniform():
    from scipy.stats import chisquare
    c = cfg(6)
    s = new_game(c)
    claim_breaker(s, (0, 1))
    attempt_claim_maker(s, (2, 3))
    br = make_breaker("random", c)
    rng = SeededSource(3)
    counts = Counter(br.next_claim(s, rng) for _ in range(13_000))
    assert len(counts) == 13
    assert chisquare(list(counts.values())).pvalue > 1e-4


# -- randomness ----------------------------------------------------------------

def test_mix_seed_spreads_and_is_stable():
    seeds = {mix_seed(0, i) for i in range(10_000)}
    assert len(seeds) == 10_000
    assert mix_seed(5, 7) == mix_seed(5, 7) != mix_seed(7, 5)
    assert all(0 <= s < 2 ** 64 for s in list(seeds)[:100])


def test_scripted_source_branches():
    src = ScriptedSource((2,))
    assert src.randrange(3) == 2
    assert src.randrange(1) == 0  # single option never consumes the path
    with pytest.raises(Branch) as info:
        src.randrange(4)
    assert info.value.options == 4


def test_seeded_pick_where_uniform_over_allowed():
    src = SeededSource(11)
    counts = Counter(src.pick_where(10, lambda i: i % 3 == 0) for _ in range(4000))
    assert set(counts) == {0, 3, 6, 9}
    assert min(counts.values()) > 850
    assert src.pick_where(10, lambda i: False) is None

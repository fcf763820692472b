"""PhantomBreaker strategies and the closed-form star-phase bound.

Breaker sees the whole board, so his claims are always free edges; the engine
calls ``next_claim`` once per claim and ``on_maker_attempt`` after every Maker
attempt (successful or not).
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional

from .board import BoardState, Edge, MoveOutcome
from .engine import FORFEIT


def star_phase_bound(a: int, b: int) -> Fraction:
    """Product of ``1/(b/2a - i)`` for ``i`` in ``0 .. floor(b/2a) - 1``."""
    if a < 1 or b < 1:
        raise ValueError("biases must be positive")
    if b <= 2 * a:
        raise ValueError(f"bound needs b > 2a, got a={a} b={b}")
    ratio = Fraction(b, 2 * a)
    out = Fraction(1)
    for i in range(b // (2 * a)):
        out /= ratio - i
    return out


def _free_incident_edge(state: BoardState, v: int, rng) -> Optional[Edge]:
    d = state.free_degree(v)
    if d == 0:
        return None
    w = state.nth_free_neighbor(v, rng.randrange(d))
    return (v, w) if v < w else (w, v)


def _random_free_edge(state: BoardState, rng) -> Edge:
    return state.nth_free_edge(rng.randrange(state.free_count))


class RandomBreaker:
    name = "random"

    def __init__(self, config=None):
        pass

    def next_claim(self, state: BoardState, rng):
        return _random_free_edge(state, rng)

    def on_maker_attempt(self, edge: Edge, outcome: MoveOutcome, state: BoardState) -> None:
        pass


class StarPhaseBreaker:
    """Builds a star at an untouched vertex; restarts when Maker touches it.

    A vertex is touched once Maker has attempted any edge at it, successful
    or not.
    """

    name = "star-phases"

    def __init__(self, config):
        n = config.n
        self.untouched: List[int] = list(range(n))
        self.pos: List[int] = list(range(n))
        self.target: Optional[int] = None
        self.phases = 0

    def _touch(self, v: int) -> None:
        i = self.pos[v]
        if i < 0:
            return
        last = self.untouched.pop()
        if last != v:
            self.untouched[i] = last
            self.pos[last] = i
        self.pos[v] = -1

    def on_maker_attempt(self, edge: Edge, outcome: MoveOutcome, state: BoardState) -> None:
        u, v = edge
        self._touch(u)
        self._touch(v)
        if self.target == u or self.target == v:
            self.target = None

    def next_claim(self, state: BoardState, rng):
        if self.target is None or state.free_degree(self.target) == 0:
            if not self.untouched:
                return FORFEIT
            self.target = rng.choice(self.untouched)
            self.phases += 1
        e = _free_incident_edge(state, self.target, rng)
        if e is None:
            # every edge at the target is gone and the game is still on;
            # nothing left to build here, so start over
            self.target = None
            return self.next_claim(state, rng)
        return e


class SingleStarBreaker:
    """One star at a uniformly chosen vertex, then uniform filler claims."""

    name = "single-star"

    def __init__(self, config):
        self.k = config.k
        self.target: Optional[int] = None
        self.failure_seen = False
        self.star_done = False

    def on_maker_attempt(self, edge: Edge, outcome: MoveOutcome, state: BoardState) -> None:
        if outcome is MoveOutcome.FAILURE and self.target in edge:
            self.failure_seen = True

    def next_claim(self, state: BoardState, rng):
        if self.target is None:
            self.target = rng.randrange(state.n)
        v = self.target
        if self.failure_seen or state.maker_deg[v] >= self.k:
            return FORFEIT
        if not self.star_done and state.free_degree(v) >= self.k:
            return _free_incident_edge(state, v, rng)
        self.star_done = True
        return _random_free_edge(state, rng)

"""Exact Maker win probabilities on tiny boards.

The game is advanced one atomic step at a time with a :class:`ScriptedSource`.
When a step needs a choice that is not on the scripted path, the source raises
:class:`Branch` with the number of options; we then re-run the step from a
copy of the same snapshot once per option.  Completed steps are memoised on a
frozen snapshot of the board and both strategies.  All weights are exact
fractions.
"""

from __future__ import annotations

import copy
import enum
import pickle
import random
import sys
from collections import deque
from dataclasses import dataclass, is_dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

from .board import GameConfig
from .engine import Game, Winner
from .randomness import Branch, ProbeSource, ScriptedSource
from .registry import make_breaker, make_maker

DEFAULT_TREE_CAP = 10 ** 8
DEFAULT_NODE_BUDGET = 2_000_000


class InfeasibleError(RuntimeError):
    """The branch tree is too large to enumerate."""

    def __init__(self, message: str, estimate: float):
        super().__init__(message)
        self.estimate = estimate


_SKIP = frozenset({"params", "config"})


def freeze(x):
    """Hashable snapshot of a strategy's private state."""
    if x is None or isinstance(x, (int, float, str, bool, Fraction, enum.Enum)):
        return x
    if isinstance(x, (list, tuple, deque)):
        return tuple(freeze(i) for i in x)
    if isinstance(x, (set, frozenset)):
        return frozenset(freeze(i) for i in x)
    if isinstance(x, dict):
        return frozenset((k, freeze(v)) for k, v in x.items())
    if hasattr(x, "__dict__") or hasattr(x, "__slots__") or is_dataclass(x):
        names = []
        for cls in type(x).__mro__:
            names.extend(getattr(cls, "__slots__", ()))
        names.extend(getattr(x, "__dict__", {}).keys())
        items = []
        for name in sorted(set(names)):
            if name in _SKIP or name.startswith("__") or not hasattr(x, name):
                continue
            if name == "pos":  # index maps are derived from their item lists
                continue
            items.append((name, freeze(getattr(x, name))))
        return (type(x).__name__, tuple(items))
    raise TypeError(f"cannot freeze {type(x).__name__}")


def game_key(game: Game):
    st = game.state
    return (frozenset(st.maker_edges), frozenset(st.breaker_edges), frozenset(st.known_breaker),
            st.round, st.maker_attempts_this_round, game.turn, game.breaker_left,
            freeze(game.maker), freeze(game.breaker))


def new_root(config: GameConfig, maker_name: str, breaker_name: str,
             overrides: Optional[Dict[str, str]] = None) -> Game:
    return Game(config, make_maker(maker_name, config, overrides),
                make_breaker(breaker_name, config), record=False)


def estimate_tree_size(root: Game, probes: int = 200, seed: int = 0) -> float:
    """Knuth's unbiased estimate of the number of root-to-leaf choice paths."""
    rng = random.Random(seed)
    total = 0.0
    for _ in range(probes):
        g = copy.deepcopy(root)
        src = ProbeSource(rng)
        while not g.step(src):
            pass
        prod = 1.0
        for _, m in src.trace:
            prod *= m
        total += prod
    return total / probes


def enumerate_choice_points(game: Game, path=(), seed: int = 0) -> Iterator[Tuple[str, int]]:
    """Yield ``(actor, option_count)`` for every choice along one playthrough.

    The first ``len(path)`` non-trivial choices follow ``path``; the rest are
    drawn with a seeded generator.  Deterministic steps yield count 1.
    """
    g = copy.deepcopy(game)
    src = ProbeSource(random.Random(seed), path)
    seen = 0
    while True:
        done = g.step(src)
        while seen < len(src.trace):
            yield src.trace[seen]
            seen += 1
        if done:
            return


@dataclass
class ExactResult:
    probability: Fraction
    total: Fraction
    nodes: int
    estimate: float


class _Solver:
    def __init__(self, use_memo: bool, node_budget: int):
        self.memo: Dict[object, Tuple[Fraction, Fraction]] = {}
        self.use_memo = use_memo
        self.node_budget = node_budget
        self.nodes = 0

    def value(self, node: Game) -> Tuple[Fraction, Fraction]:
        """(probability Maker wins, total probability mass) below ``node``."""
        if node.done:
            return (Fraction(1) if node.result.winner is Winner.MAKER else Fraction(0)), Fraction(1)
        key = game_key(node) if self.use_memo else None
        if key is not None:
            hit = self.memo.get(key)
            if hit is not None:
                return hit
        self.nodes += 1
        if self.nodes > self.node_budget:
            raise InfeasibleError(f"exceeded node budget {self.node_budget}", float(self.nodes))
        out = self._expand(pickle.dumps(node, pickle.HIGHEST_PROTOCOL), ())
        if key is not None:
            self.memo[key] = out
        return out

    def _expand(self, blob: bytes, path: Tuple[int, ...]) -> Tuple[Fraction, Fraction]:
        # snapshots are restored from a pickle, which is much cheaper than deepcopy
        g = pickle.loads(blob)
        try:
            g.step(ScriptedSource(path))
        except Branch as br:
            win = Fraction(0)
            mass = Fraction(0)
            for i in range(br.options):
                w, m = self._expand(blob, path + (i,))
                win += w
                mass += m
            return win / br.options, mass / br.options
        return self.value(g)


def exact_win_probability(config: GameConfig, maker_name: str, breaker_name: str,
                          overrides: Optional[Dict[str, str]] = None, memo: bool = True,
                          tree_cap: float = DEFAULT_TREE_CAP,
                          node_budget: int = DEFAULT_NODE_BUDGET) -> ExactResult:
    root = new_root(config, maker_name, breaker_name, overrides)
    estimate = estimate_tree_size(root)
    if estimate > tree_cap:
        raise InfeasibleError(
            f"estimated {estimate:.3g} branches exceeds the cap of {tree_cap:.3g}", estimate)
    solver = _Solver(memo, node_budget)
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 100_000))
    try:
        p, total = solver.value(root)
    finally:
        sys.setrecursionlimit(old)
    if total != 1:
        raise AssertionError(f"probability mass {total} != 1")
    return ExactResult(p, total, solver.nodes, estimate)


def fixture_record(config: GameConfig, maker_name: str, breaker_name: str, p: Fraction) -> dict:
    return {"game": config.game.value, "n": config.n, "a": config.a, "b": config.b, "k": config.k,
            "maker": maker_name, "breaker": breaker_name,
            "num": p.numerator, "den": p.denominator}


__all__ = ["ExactResult", "InfeasibleError", "enumerate_choice_points", "estimate_tree_size",
           "exact_win_probability", "fixture_record", "freeze", "game_key"]

"""Strategy names and constructors."""

from __future__ import annotations

from typing import Callable, Dict, Optional

from . import params as P
from .board import GameConfig
from .breakers import RandomBreaker, SingleStarBreaker, StarPhaseBreaker
from .makers import (ConnectivityLargeB, ConnectivitySmallB, HamiltonMaker, MinDegreeLargeB,
                     MinDegreeSmallB, PerfectMatchingMaker, PerfectMatchingSmallB, RandomMaker)


class UnknownStrategy(KeyError):
    pass


def _params_for(name: str, config: GameConfig) -> P.StrategyParams:
    n, a, b, k = config.n, config.a, config.b, config.k
    if name == "mindeg-large":
        return P.mindeg_large(n, a, b, k)
    if name == "mindeg-small":
        return P.mindeg_small(n, a, b, k)
    if name in ("pm-large", "pm-small"):
        return P.perfect_matching(n, a, b)
    if name == "conn-large":
        return P.connectivity_large(n, a, b)
    if name == "conn-small":
        return P.connectivity_small(n, a, b)
    if name == "hamilton":
        return P.hamiltonicity(n, a, b)
    return P.StrategyParams(n, a, b, k)


MAKERS: Dict[str, type] = {
    "mindeg-large": MinDegreeLargeB,
    "mindeg-small": MinDegreeSmallB,
    "pm-large": PerfectMatchingMaker,
    "pm-small": PerfectMatchingSmallB,
    "conn-large": ConnectivityLargeB,
    "conn-small": ConnectivitySmallB,
    "hamilton": HamiltonMaker,
    "random": RandomMaker,
}

BREAKERS: Dict[str, Callable] = {
    "star-phases": StarPhaseBreaker,
    "single-star": SingleStarBreaker,
    "random": RandomBreaker,
}


def strategy_params(name: str, config: GameConfig,
                    overrides: Optional[Dict[str, str]] = None) -> P.StrategyParams:
    return _params_for(name, config).with_overrides(overrides)


def make_maker(name: str, config: GameConfig, overrides: Optional[Dict[str, str]] = None):
    try:
        cls = MAKERS[name]
    except KeyError:
        raise UnknownStrategy(f"unknown maker strategy {name!r}; known: {', '.join(MAKERS)}") from None
    return cls(config, strategy_params(name, config, overrides))


def make_breaker(name: str, config: GameConfig):
    try:
        cls = BREAKERS[name]
    except KeyError:
        raise UnknownStrategy(f"unknown breaker strategy {name!r}; known: {', '.join(BREAKERS)}") from None
    return cls(config)

"""Resolved integer thresholds for every Maker strategy.

Conventions: natural logarithms; ``ln ln n`` is floored at 1; lengths and
round caps are rounded up; every integer threshold is at least 1 (stage-I
step counts excepted, which may legitimately be 0 on tiny boards).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace
from fractions import Fraction
from typing import Dict, Optional


def lnn(n: int) -> float:
    return math.log(n) if n > 1 else 0.0


def lnlnn(n: int) -> float:
    return max(1.0, math.log(lnn(n))) if n > math.e else 1.0


def ceil1(x: float) -> int:
    """Ceiling, floored at 1.  Guards against float noise on exact integers."""
    r = round(x)
    c = r if abs(x - r) < 1e-9 else math.ceil(x)
    return max(1, int(c))


@dataclass(frozen=True)
class StrategyParams:
    n: int
    a: int
    b: int
    k: int = 1
    eps: Fraction = Fraction(1)
    # mindeg-large
    phase_len: int = 1
    phase_cap: int = 1
    strict_sampling: bool = False
    # mindeg-small
    stage1_limit: float = 0.0
    repair_cap: int = 1
    stage2_cap: int = 1
    # perfect matching
    stage1_steps: int = 0
    fix_cap_large: int = 1
    fix_cap_small: int = 1
    pairs_per_side: int = 1
    middle_draws: int = 1
    pm_round_cap: int = 1
    # connectivity, large b
    stages: int = 1
    seqs_per_stage: int = 1
    edge_choices: int = 1
    conn_round_cap: int = 1
    # connectivity, small b
    conn_stage1_cap: int = 1
    size2_threshold: float = 0.0
    conn_stage_cap: int = 1
    # hamiltonicity
    star_size: int = 1
    fail_cap: int = 1
    ham_round_cap: int = 1

    def with_overrides(self, overrides: Optional[Dict[str, str]]) -> "StrategyParams":
        if not overrides:
            return self
        known = {f.name: f for f in fields(self)}
        changes = {}
        for key, raw in overrides.items():
            if key not in known or key in ("n", "a", "b", "k"):
                raise KeyError(f"unknown strategy parameter {key!r}")
            cur = getattr(self, key)
            if isinstance(cur, bool):
                changes[key] = str(raw).lower() in ("1", "true", "yes")
            elif isinstance(cur, Fraction):
                changes[key] = Fraction(str(raw))
            elif isinstance(cur, int):
                changes[key] = int(raw)
            else:
                changes[key] = float(raw)
        return replace(self, **changes)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["eps"] = str(self.eps)
        return d


def mindeg_large(n: int, a: int, b: int, k: int) -> StrategyParams:
    eps = Fraction(a, 20 * k * b)
    phase_len = ceil1(float(eps * n))
    return StrategyParams(n, a, b, k, eps=eps, phase_len=phase_len,
                          phase_cap=ceil1(2 * k * phase_len / a))


def mindeg_small(n: int, a: int, b: int, k: int) -> StrategyParams:
    eps = Fraction(1, (10 * a) ** 2)
    return StrategyParams(n, a, b, k, eps=eps,
                          stage1_limit=n / lnn(n) if n > 1 else 0.0,
                          repair_cap=ceil1(lnn(n) ** 10),
                          stage2_cap=ceil1(float(eps * n)))


def perfect_matching(n: int, a: int, b: int, round_exponent: float = 0.99) -> StrategyParams:
    return StrategyParams(n, a, b, 1, eps=Fraction(a, 10 * b),
                          stage1_steps=max(0, n // 2 - ceil1(n ** 0.7)),
                          fix_cap_large=ceil1(8 * lnn(n)),
                          fix_cap_small=ceil1(0.5 * n ** 0.7),
                          pairs_per_side=ceil1(n ** 0.1),
                          middle_draws=ceil1(n ** 0.1),
                          pm_round_cap=ceil1(n / (2 * a) + n ** round_exponent))


def connectivity_large(n: int, a: int, b: int) -> StrategyParams:
    eps = Fraction(a, 8 * b)
    return StrategyParams(n, a, b, 1, eps=eps,
                          stages=ceil1(float(1 / eps)),
                          seqs_per_stage=ceil1(float(eps * (n - 1))),
                          edge_choices=ceil1(n ** 0.2),
                          conn_round_cap=ceil1(1.1 * n / a))


def connectivity_small(n: int, a: int, b: int) -> StrategyParams:
    pm = perfect_matching(n, a, b, round_exponent=0.9)
    return replace(pm, conn_stage1_cap=pm.pm_round_cap,
                   size2_threshold=n ** (2.0 / 3.0),
                   conn_stage_cap=ceil1(1.1 * n / (4 * a)))


def hamiltonicity(n: int, a: int, b: int) -> StrategyParams:
    return StrategyParams(n, a, b, 1, eps=Fraction(a, 20 * b),
                          star_size=ceil1(a / (20 * b) * lnn(n) * lnlnn(n)),
                          fail_cap=ceil1(2 * lnn(n)),
                          ham_round_cap=ceil1(n / a + n ** 0.9))

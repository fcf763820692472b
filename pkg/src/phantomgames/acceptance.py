"""Acceptance checks shared by ``phantomgames verify`` and the test suite.

Each check returns a :class:`CheckResult`.  ``full`` scale uses the stated
sizes, tolerances and time limits; ``quick`` shrinks sizes for a smoke run
and does not enforce time limits.
"""

from __future__ import annotations

import json
import random
import time
import tracemalloc
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from scipy.stats import binom

from . import breakers
from .board import ContractError, GameConfig, GameKind, MoveOutcome
from .engine import FORFEIT, Game, Reason
from .experiment import RunResult, TrialError, run_trials
from .randomness import SeededSource, mix_seed
from .registry import make_breaker, make_maker
from .surgery import Degenerate, path_edges, path_surgery
from .wincheck import ComponentIndex

SCALES = ("quick", "full")
MAKER_NAMES = ("mindeg-large", "mindeg-small", "pm-large", "pm-small", "conn-large",
               "conn-small", "hamilton")
ALLOWED_ENDINGS = {Reason.MAKER_WIN.value, Reason.MAKER_FORFEIT.value,
                   Reason.BOARD_EXHAUSTED.value, Reason.BREAKER_FORFEIT.value}


@dataclass
class CheckResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0
    limit: Optional[float] = None

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        lim = f" / {self.limit:.0f}s" if self.limit else ""
        return f"[{tag}] {self.number:>2} {self.title}: {self.detail} ({self.seconds:.1f}s{lim})"


@dataclass
class Context:
    """Settings plus the runs collected for the structural check."""

    scale: str = "full"
    workers: int = 1
    runs: List[Tuple[str, RunResult]] = field(default_factory=list)
    errors: List[str] = field(default_factory=list)

    @property
    def full(self) -> bool:
        return self.scale == "full"

    def pick(self, full, quick):
        return full if self.full else quick

    def run(self, label: str, config: GameConfig, maker: str, breaker: str, trials: int,
            seed: int, **kw) -> Optional[RunResult]:
        try:
            res = run_trials(config, maker, breaker, trials, seed, self.workers, **kw)
        except TrialError as exc:
            self.errors.append(f"{label}: {exc}")
            return None
        self.runs.append((label, res))
        return res


def _timed(number: int, title: str, limit: Optional[float], ctx: Context,
           body: Callable[[], Tuple[bool, str]]) -> CheckResult:
    t0 = time.perf_counter()
    try:
        ok, detail = body()
    except (TrialError, ContractError, AssertionError) as exc:
        ok, detail = False, f"error: {exc}"
    secs = time.perf_counter() - t0
    if ctx.full and limit is not None and secs > limit:
        ok = False
        detail += f"; exceeded time limit {limit:.0f}s"
    return CheckResult(number, title, ok, detail, secs, limit if ctx.full else None)


# ---------------------------------------------------------------------------
# 1. determinism and phantom isolation


class SplitSource:
    """Separate random streams for Maker and Breaker, routed by ``actor``."""

    def __init__(self, maker_seed: int, breaker_seed: int):
        self.actor = ""
        self._m = SeededSource(maker_seed)
        self._b = SeededSource(breaker_seed)

    def _src(self) -> SeededSource:
        return self._m if self.actor == "maker" else self._b

    def randrange(self, m):
        return self._src().randrange(m)

    def choice(self, seq):
        return self._src().choice(seq)

    def pick_where(self, m, ok, listing=None):
        return self._src().pick_where(m, ok, listing)


class ShadowBreaker:
    """Replays a recorded Breaker, swapping every never-revealed claim.

    Claims Maker later hit in the recorded game are repeated exactly; all
    others go to edges Maker never touched in the recorded game and that the
    recorded Breaker never owned, so the hidden part of the board differs.
    """

    def __init__(self, schedule: Sequence, revealed: set, avoid: set, seed: int):
        self.schedule = list(schedule)
        self.revealed = revealed
        self.avoid = avoid
        self.rng = random.Random(seed)
        self.i = 0
        self.swapped = 0

    def next_claim(self, state, rng):
        if self.i >= len(self.schedule):
            return FORFEIT
        e = self.schedule[self.i]
        self.i += 1
        if e in self.revealed:
            return e
        n = state.n
        for _ in range(200):
            u, v = sorted(self.rng.sample(range(n), 2))
            if state.is_free(u, v) and (u, v) not in self.avoid:
                self.swapped += 1
                return (u, v)
        for f in state.free_edges():
            if f not in self.avoid:
                self.swapped += 1
                return f
        return e if state.is_free(*e) else next(iter(state.free_edges()))

    def on_maker_attempt(self, edge, outcome, state):
        pass


ISOLATION_SETUPS = {
    "mindeg-large": (GameKind.MIN_DEGREE, 1, 3, 1),
    "mindeg-small": (GameKind.MIN_DEGREE, 1, 2, 1),
    "pm-large": (GameKind.PERFECT_MATCHING, 1, 3, 1),
    "pm-small": (GameKind.PERFECT_MATCHING, 1, 2, 1),
    "conn-large": (GameKind.CONNECTIVITY, 1, 3, 1),
    "conn-small": (GameKind.CONNECTIVITY, 1, 2, 1),
    "hamilton": (GameKind.HAMILTONICITY, 1, 1, 1),
}


def isolation_pair(maker: str, n: int, seed: int) -> Tuple[bool, int]:
    """Play a game, then a twin whose unrevealed Breaker edges differ.

    Returns whether Maker's attempts agree on the common prefix, and how many
    Breaker claims were swapped.
    """
    game, a, b, k = ISOLATION_SETUPS[maker]
    cfg = GameConfig(n, a, b, game, k, seed=seed)
    g1 = Game(cfg, make_maker(maker, cfg), make_breaker("random", cfg))
    g1.play(SplitSource(mix_seed(seed, 1), mix_seed(seed, 2)))
    t1 = g1.state.transcript
    moves1 = [(e, o) for actor, e, o in t1 if actor == "M"]
    schedule = [e for actor, e, _ in t1 if actor == "B"]
    revealed = {e for e, o in moves1 if o is MoveOutcome.FAILURE}
    avoid = {e for e, _ in moves1} | set(schedule)
    shadow = ShadowBreaker(schedule, revealed, avoid, mix_seed(seed, 3))
    g2 = Game(cfg, make_maker(maker, cfg), shadow)
    g2.play(SplitSource(mix_seed(seed, 1), mix_seed(seed, 4)))
    moves2 = [(e, o) for actor, e, o in g2.state.transcript if actor == "M"]
    common = min(len(moves1), len(moves2))
    return moves1[:common] == moves2[:common], shadow.swapped


def check_determinism(ctx: Context) -> CheckResult:
    def body():
        n = ctx.pick(500, 120)
        trials = ctx.pick(1000, 200)
        worker_counts = ctx.pick((1, 4, 16), (1, 2))
        cfg = GameConfig(n, 1, 1, GameKind.HAMILTONICITY)
        runs = []
        for w in worker_counts:
            runs.append(run_trials(cfg, "hamilton", "random", trials, 2024, w, keep_records=True))
        runs.append(run_trials(cfg, "hamilton", "random", trials, 2024, 1, keep_records=True))
        base = runs[0]
        same_stats = all(r.stats == base.stats for r in runs)
        same_digests = all([x.digest for x in r.records] == [x.digest for x in base.records]
                           for r in runs)
        same_transcripts = all([x.transcript for x in r.records[:100]]
                               == [x.transcript for x in base.records[:100]] for r in runs)
        iso_n = ctx.pick(40, 24)
        iso_seeds = ctx.pick(20, 5)
        bad = []
        swapped = 0
        for name in MAKER_NAMES:
            for s in range(iso_seeds):
                ok, sw = isolation_pair(name, iso_n, s)
                swapped += sw
                if not ok:
                    bad.append(f"{name}@{s}")
        ok = same_stats and same_digests and same_transcripts and not bad and swapped > 0
        detail = (f"workers {list(worker_counts)} + repeat: stats equal={same_stats}, "
                  f"digests equal={same_digests}, transcripts equal={same_transcripts}; "
                  f"isolation mismatches={bad or 0} over {len(MAKER_NAMES) * iso_seeds} pairs, "
                  f"{swapped} hidden claims swapped")
        return ok, detail
    return _timed(1, "determinism and phantom isolation", 120, ctx, body)


# ---------------------------------------------------------------------------
# 2. exact fixtures against Monte Carlo


def load_fixtures() -> List[dict]:
    text = resources.files("phantomgames").joinpath("data/exact.jsonl").read_text()
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def fixture_config(rec: dict) -> GameConfig:
    return GameConfig(rec["n"], rec["a"], rec["b"], GameKind(rec["game"]), rec["k"])


def check_oracle(ctx: Context, fixtures: Optional[List[dict]] = None) -> CheckResult:
    def body():
        recs = fixtures if fixtures is not None else load_fixtures()
        trials = ctx.pick(100_000, 20_000)
        parts = []
        ok = len(recs) >= 5
        ones = zeros = 0
        for i, rec in enumerate(recs):
            p = Fraction(rec["num"], rec["den"])
            ones += p == 1
            zeros += p == 0
            res = run_trials(fixture_config(rec), rec["maker"], rec["breaker"], trials,
                             mix_seed(77, i), ctx.workers)
            lo, hi = binom.interval(0.999, trials, float(p))
            inside = lo <= res.stats.maker_wins <= hi
            ok &= inside
            parts.append(f"K{rec['n']} {rec['game']} ({rec['a']}:{rec['b']}) p={p}: "
                         f"{res.stats.maker_wins}/{trials} in [{lo:.0f},{hi:.0f}]"
                         + ("" if inside else " OUTSIDE"))
        ok &= ones >= 1 and zeros >= 1
        return ok, "; ".join(parts)
    return _timed(2, "exact oracle vs Monte Carlo", 300, ctx, body)


# ---------------------------------------------------------------------------
# 3-7. statistical checks


def check_star_bound(ctx: Context) -> CheckResult:
    def body():
        n = ctx.pick(500, 200)
        trials = ctx.pick(2000, 400)
        ok = True
        parts = []
        for b in (6, 4):
            bound = float(breakers.star_phase_bound(1, b)) + 0.03
            res = ctx.run(f"c3 b={b}", GameConfig(n, 1, b, GameKind.MIN_DEGREE, 1),
                          "mindeg-large", "star-phases", trials, 300 + b)
            if res is None:
                return False, ctx.errors[-1]
            f = res.stats.maker_frequency
            ok &= f <= bound
            parts.append(f"b={b}: frequency {f:.4f} <= {bound:.4f}")
        return ok, "; ".join(parts)
    return _timed(3, "star-phase Breaker bounds Maker", 300, ctx, body)


def check_single_star(ctx: Context) -> CheckResult:
    def body():
        n = ctx.pick(1000, 300)
        trials = ctx.pick(1000, 300)
        res = ctx.run("c4", GameConfig(n, 1, 3, GameKind.MIN_DEGREE, 1), "mindeg-large",
                      "single-star", trials, 400)
        if res is None:
            return False, ctx.errors[-1]
        f = 1 - res.stats.maker_frequency
        return f >= 0.02, f"Breaker frequency {f:.4f} >= 0.02"
    return _timed(4, "single-star Breaker wins with constant probability", 120, ctx, body)


def _aas(ctx: Context, number: int, title: str, limit: float,
         cases: Sequence[Tuple[str, GameKind, int, int, int, str]],
         extra: Optional[Callable[[RunResult, int], Tuple[bool, str]]] = None) -> CheckResult:
    def body():
        n = ctx.pick(2000, 500)
        trials = ctx.pick(200, 40)
        ok = True
        parts = []
        for label, game, a, b, k, maker in cases:
            res = ctx.run(f"c{number} {label}", GameConfig(n, a, b, game, k), maker, "random",
                          trials, 500 + number * 10 + b + k)
            if res is None:
                ok = False
                parts.append(ctx.errors[-1])
                continue
            f = res.stats.maker_frequency
            ok &= f >= 0.95
            reasons = {r: c for r, c in res.stats.reasons.items() if c}
            parts.append(f"{label}: frequency {f:.3f} >= 0.95 {reasons}")
            if extra is not None:
                good, text = extra(res, n)
                ok &= good
                parts.append(text)
        return ok, "; ".join(parts)
    return _timed(number, title, limit, ctx, body)


def check_mindeg_small(ctx: Context) -> CheckResult:
    return _aas(ctx, 5, "min-degree strategy below threshold", 600, [
        ("k=1 (1:2)", GameKind.MIN_DEGREE, 1, 2, 1, "mindeg-small"),
        ("k=2 (1:1)", GameKind.MIN_DEGREE, 1, 1, 2, "mindeg-small"),
    ])


def check_pm_small(ctx: Context) -> CheckResult:
    def rounds(res: RunResult, n: int):
        bound = n / 2 + 5 * n ** 0.8
        m = res.stats.mean_rounds
        return m <= bound, f"mean rounds {m:.1f} <= {bound:.1f}"
    return _aas(ctx, 6, "perfect-matching strategy below threshold", 600, [
        ("(1:2)", GameKind.PERFECT_MATCHING, 1, 2, 1, "pm-small"),
    ], rounds)


def check_conn_ham(ctx: Context) -> CheckResult:
    return _aas(ctx, 7, "connectivity and Hamiltonicity strategies below threshold", 900, [
        ("conn-small (1:2)", GameKind.CONNECTIVITY, 1, 2, 1, "conn-small"),
        ("hamilton (1:1)", GameKind.HAMILTONICITY, 1, 1, 1, "hamilton"),
    ])


# ---------------------------------------------------------------------------
# 8. structural soundness


def is_forest(n: int, edges) -> bool:
    comps = ComponentIndex(n)
    return all(comps.union(u, v) for u, v in edges)


STRUCTURAL_SETUPS = (
    ("mindeg-large", GameKind.MIN_DEGREE),
    ("pm-large", GameKind.PERFECT_MATCHING),
    ("conn-large", GameKind.CONNECTIVITY),
    ("hamilton", GameKind.HAMILTONICITY),
)


def check_structural(ctx: Context) -> CheckResult:
    def body():
        n = ctx.pick(1000, 300)
        trials = ctx.pick(500, 100)
        freqs = []
        acyclic_ok = True
        for maker, game in STRUCTURAL_SETUPS:
            res = ctx.run(f"c8 {maker}", GameConfig(n, 1, 3, game, 1), maker, "random", trials,
                          800 + len(freqs), keep_records=maker == "conn-large",
                          keep_edges=maker == "conn-large")
            if res is None:
                continue
            freqs.append(f"{maker} {res.stats.maker_frequency:.3f}")
            if maker == "conn-large":
                acyclic_ok = all(is_forest(n, r.maker_edges) for r in res.records)
        bad_cert = 0
        bad_end = []
        total = 0
        for label, res in ctx.runs:
            s = res.stats
            total += s.trials
            bad_cert += s.maker_wins - s.certified_wins - s.reasons.get(Reason.BREAKER_FORFEIT.value, 0)
            for reason, count in s.reasons.items():
                if count and reason not in ALLOWED_ENDINGS:
                    bad_end.append(f"{label}: {count}x {reason}")
        ok = not ctx.errors and bad_cert == 0 and not bad_end and acyclic_ok
        detail = (f"{total} trials over {len(ctx.runs)} runs: uncertified wins={bad_cert}, "
                  f"disallowed endings={bad_end or 0}, trial errors={len(ctx.errors)}, "
                  f"conn-large acyclic={acyclic_ok}; large-b frequencies (informational): "
                  + ", ".join(freqs))
        return ok, detail
    return _timed(8, "structural soundness", None, ctx, body)


# ---------------------------------------------------------------------------
# 9. path surgery


def _designated(path: Sequence[int], xp: int, yp: int) -> Tuple[Optional[Tuple[int, int]], bool]:
    """Independent rule: (designated edge or None, whether an index runs off the path)."""
    m = len(path)
    pos = {v: t + 1 for t, v in enumerate(path)}
    i, j = pos.get(xp), pos.get(yp)
    at = lambda t: path[t - 1]  # noqa: E731 - 1-based lookup
    if i is None and j is None:
        return tuple(sorted((xp, yp))), False
    if i is not None and j is not None:
        if i < j:
            return (None, True) if j == m else (tuple(sorted((at(i - 1), at(j + 1)))), False)
        return (None, True) if i == m else (tuple(sorted((at(j - 1), at(i + 1)))), False)
    if i is not None:
        return (None, True) if i == m else (tuple(sorted((at(i + 1), yp))), False)
    return tuple(sorted((xp, at(j - 1)))), False


def surgery_case_ok(rng: random.Random) -> Tuple[bool, str]:
    n = rng.randint(4, 50)
    verts = list(range(n))
    rng.shuffle(verts)
    m = rng.randint(1, n - 3)
    path = verts[:m]
    x = verts[m]
    y = path[0]
    rest = [v for v in verts if v not in (x, y)]
    xp, yp = rng.sample(rest, 2)
    owned = {tuple(sorted(e)) for e in path_edges(path)}
    owned |= {tuple(sorted((x, xp))), tuple(sorted((y, yp)))}
    for _ in range(rng.randint(0, 3 * n)):
        u, v = rng.sample(range(n), 2)
        owned.add(tuple(sorted((u, v))))
    owns = lambda u, v: tuple(sorted((u, v))) in owned  # noqa: E731
    out = path_surgery(path, x, xp, yp, owns)
    edge, off_end = _designated(path, xp, yp)
    if isinstance(out, Degenerate):
        if off_end or (edge is not None and edge in owned):
            return True, ""
        return False, f"unexpected Degenerate {out} for path={path} x={x} x'={xp} y'={yp}"
    if off_end or edge is None or edge in owned or tuple(sorted(out.edge)) != edge:
        return False, f"designated edge {out.edge} disagrees with {edge} (off_end={off_end})"
    order = out.order
    want = set(path) | {x, xp, yp}
    if len(order) != len(set(order)) or set(order) != want:
        return False, f"order {order} does not cover {sorted(want)}"
    if order[0] != x or order[-1] != path[-1]:
        return False, f"order {order} has wrong ends"
    new = [e for e in path_edges(order) if tuple(sorted(e)) not in owned]
    if [tuple(sorted(e)) for e in new] != [edge]:
        return False, f"order {order} uses unowned edges {new}"
    return True, ""


def check_surgery(ctx: Context) -> CheckResult:
    def body():
        rng = random.Random(9)
        cases = ctx.pick(10_000, 2_000)
        failures = []
        for _ in range(cases):
            ok, why = surgery_case_ok(rng)
            if not ok:
                failures.append(why)
        detail = f"{cases} cases, {len(failures)} failures"
        if failures:
            detail += f"; first: {failures[0]}"
        return not failures, detail
    return _timed(9, "path surgery", 10, ctx, body)


# ---------------------------------------------------------------------------
# 10. performance


def one_trial(config: GameConfig, maker: str, breaker: str) -> Tuple[float, Reason]:
    t0 = time.perf_counter()
    g = Game(config, make_maker(maker, config), make_breaker(breaker, config), record=False)
    rec = g.play(SeededSource(config.seed))
    return time.perf_counter() - t0, rec.reason


def check_performance(ctx: Context) -> CheckResult:
    def body():
        n = 10_000
        ham = GameConfig(n, 1, 1, GameKind.HAMILTONICITY, seed=1)
        t_ham, r_ham = one_trial(ham, "hamilton", "random")
        tracemalloc.start()
        try:
            one_trial(ham, "hamilton", "random")
            peak = tracemalloc.get_traced_memory()[1] / 2 ** 20
        finally:
            tracemalloc.stop()
        md = GameConfig(n, 1, 2, GameKind.MIN_DEGREE, 1, seed=1)
        t_md, r_md = one_trial(md, "mindeg-small", "random")
        ok = t_ham < 1 and peak < 100 and t_md < 1
        return ok, (f"hamilton n={n}: {t_ham:.2f}s, peak {peak:.1f} MB ({r_ham.value}); "
                    f"mindeg-small n={n}: {t_md:.2f}s ({r_md.value})")
    return _timed(10, "performance", None, ctx, body)


CHECKS: Dict[int, Callable[[Context], CheckResult]] = {
    1: check_determinism,
    2: check_oracle,
    3: check_star_bound,
    4: check_single_star,
    5: check_mindeg_small,
    6: check_pm_small,
    7: check_conn_ham,
    8: check_structural,
    9: check_surgery,
    10: check_performance,
}


def run_checks(scale: str = "full", only: Optional[Sequence[int]] = None, workers: int = 1,
               out=None) -> List[CheckResult]:
    """Run the selected checks in order, printing one line per check.

    The structural check also audits every trial of the statistical checks
    that ran before it.
    """
    if scale not in SCALES:
        raise ValueError(f"unknown scale {scale!r}; choose from {', '.join(SCALES)}")
    ctx = Context(scale=scale, workers=workers)
    numbers = sorted(CHECKS) if not only else sorted(set(only))
    results = []
    for num in numbers:
        if num not in CHECKS:
            raise ValueError(f"no check numbered {num}")
        res = CHECKS[num](ctx)
        results.append(res)
        if out is not None:
            print(res.line(), file=out, flush=True)
    return results


__all__ = ["CHECKS", "CheckResult", "Context", "SCALES", "isolation_pair", "load_fixtures",
           "run_checks", "surgery_case_ok"]

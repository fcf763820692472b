"""Maker strategies.

Each strategy sees only a :class:`~phantomgames.board.MakerView` plus its own
private state, and hands the engine one attempted edge at a time.  All of
them are written as explicit state machines: ``next_move`` makes whatever
random choices are due and returns the next edge (or ``FORFEIT``), and
``observe`` digests the outcome.  Nothing is held across calls except plain
attributes, so a game can be deep-copied between any two choices.

Uniform draws of "an edge at v" or "an edge leaving C" skip edges Maker
already knows to be unavailable (her own, or revealed as Breaker's).
"""

from __future__ import annotations

from collections import deque
from typing import Dict, List, Optional, Tuple

from .board import Edge, MakerView, MoveOutcome
from .engine import FORFEIT
from .params import StrategyParams
from .surgery import Degenerate, path_surgery
from .wincheck import ComponentIndex


CLAIMED = MoveOutcome.CLAIMED


def _e(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class IndexedSet:
    """List with O(1) membership, removal and uniform choice by index."""

    __slots__ = ("items", "pos")

    def __init__(self, items=()):
        self.items: List[int] = list(items)
        self.pos: Dict[int, int] = {v: i for i, v in enumerate(self.items)}

    def __len__(self):
        return len(self.items)

    def __contains__(self, v):
        return v in self.pos

    def add(self, v: int) -> None:
        if v not in self.pos:
            self.pos[v] = len(self.items)
            self.items.append(v)

    def discard(self, v: int) -> None:
        i = self.pos.pop(v, None)
        if i is None:
            return
        last = self.items.pop()
        if last != v:
            self.items[i] = last
            self.pos[last] = i

    def pick(self, rng) -> int:
        return self.items[rng.randrange(len(self.items))]


def draw_incident(view: MakerView, v: int, rng, exclude=None, strict: bool = False) -> Optional[int]:
    """Uniform ``w`` such that ``vw`` is not known to be unavailable to Maker.

    ``exclude`` is an extra set of forbidden endpoints.  With ``strict``,
    only Maker's own edges are skipped (revealed Breaker edges may be retried).
    """
    n = view.n
    mine, rev = view.my_edges, view.revealed_breaker
    vn = v * n

    def ok(w: int) -> bool:
        if w == v or (exclude is not None and w in exclude):
            return False
        key = vn + w if v < w else w * n + v
        return key not in mine and (strict or key not in rev)

    return rng.pick_where(n, ok, lambda: [w for w in range(n) if ok(w)])


class MakerStrategy:
    name = ""

    def __init__(self, config, params: StrategyParams):
        self.n = config.n
        self.params = params

    def next_move(self, view: MakerView, rng):
        raise NotImplementedError

    def observe(self, edge: Edge, outcome: MoveOutcome, view: MakerView) -> None:
        pass

    def certificate(self):
        return None


class RandomMaker(MakerStrategy):
    """Uniform attempt among edges not known to be unavailable."""

    name = "random"

    def next_move(self, view, rng):
        n = view.n
        mine, rev = view.my_edges, view.revealed_breaker

        def ok(i: int) -> bool:
            u, v = divmod(i, n)
            return u < v and i not in mine and i not in rev

        i = rng.pick_where(n * n, ok, lambda: [i for i in range(n * n) if ok(i)])
        if i is None:
            return FORFEIT
        return divmod(i, n)


# ---------------------------------------------------------------------------
# minimum degree k


class MinDegreeLargeB(MakerStrategy):
    """Pick a vertex, raise its degree to k, drop it; phase-length forfeits."""

    name = "mindeg-large"

    def __init__(self, config, params):
        super().__init__(config, params)
        self.k = config.k
        self.V0 = IndexedSet(range(self.n))
        self.current: Optional[int] = None
        self.chosen = 0
        self.phase_start = 1

    def next_move(self, view, rng):
        p, k = self.params, self.k
        while self.current is None:
            if not len(self.V0):
                return FORFEIT
            if self.chosen % p.phase_len == 0:
                self.phase_start = view.round
            v = self.V0.pick(rng)
            self.V0.discard(v)
            self.chosen += 1
            if view.degree(v) < k:
                self.current = v
        if view.round - self.phase_start + 1 > p.phase_cap:
            return FORFEIT
        v = self.current
        w = draw_incident(view, v, rng, strict=p.strict_sampling)
        if w is None:
            return FORFEIT
        return _e(v, w)

    def observe(self, edge, outcome, view):
        if self.current is not None and view.degree(self.current) >= self.k:
            self.current = None


class MinDegreeSmallB(MakerStrategy):
    """Weight process over pairs of light vertices, then a clean-up stage."""

    name = "mindeg-small"

    def __init__(self, config, params):
        super().__init__(config, params)
        self.k = config.k
        self.omega = [0] * self.n
        self.light = IndexedSet(range(self.n))
        self.stage = 1
        self.pair: Optional[Tuple[int, int]] = None
        self.repair: List[int] = []
        self.repair_attempts = 0
        self.current: Optional[int] = None
        self.stage2_start = 0

    def _finish_iteration(self, view) -> None:
        v, w = self.pair
        for u in (v, w):
            self.omega[u] += 1
            if self.omega[u] >= self.k:
                self.light.discard(u)
            assert view.degree(u) >= self.omega[u], "Maker degree fell below its weight"
        self.pair = None
        self.repair = []

    def next_move(self, view, rng):
        p, k = self.params, self.k
        while True:
            if self.stage == 1:
                if self.pair is not None:
                    # repairing after a failed pair attempt
                    while self.repair and view.degree(self.repair[0]) >= k:
                        self.repair.pop(0)
                    if not self.repair:
                        self._finish_iteration(view)
                        continue
                    u = self.repair[0]
                    w = draw_incident(view, u, rng)
                    if w is None:
                        return FORFEIT
                    self.repair_attempts += 1
                    return _e(u, w)
                if self.repair_attempts > p.repair_cap:
                    return FORFEIT
                if len(self.light) <= p.stage1_limit:
                    self.stage = 2
                    self.stage2_start = view.round
                    continue
                items = self.light.items
                i = rng.randrange(len(items))
                j = rng.randrange(len(items) - 1)
                if j >= i:
                    j += 1
                v, w = items[i], items[j]
                self.pair = (v, w)
                if view.known(v, w):
                    self.repair = [v, w]
                    continue
                return _e(v, w)
            # stage 2
            if view.round - self.stage2_start + 1 > p.stage2_cap:
                return FORFEIT
            if self.current is not None and view.degree(self.current) >= k:
                self.current = None
            if self.current is None:
                if not len(self.light):
                    return FORFEIT
                v = self.light.pick(rng)
                self.light.discard(v)
                if view.degree(v) >= k:
                    continue
                self.current = v
            w = draw_incident(view, self.current, rng)
            if w is None:
                return FORFEIT
            return _e(self.current, w)

    def observe(self, edge, outcome, view):
        if self.stage == 1 and self.pair is not None and not self.repair:
            if outcome is CLAIMED:
                self._finish_iteration(view)
            else:
                self.repair = list(self.pair)
        elif self.stage == 2 and self.current is not None and view.degree(self.current) >= self.k:
            self.current = None


# ---------------------------------------------------------------------------
# perfect matching


class PerfectMatchingMaker(MakerStrategy):
    """Greedy matching with local repairs, then five-edge augmenting paths."""

    name = "pm-large"
    small_b = False

    def __init__(self, config, params, round_cap: Optional[int] = None):
        super().__init__(config, params)
        n = self.n
        self.partner: List[Optional[int]] = [None] * n
        self.V0 = IndexedSet(range(n))
        self.VM = IndexedSet()
        self.round_cap = params.pm_round_cap if round_cap is None else round_cap
        self.steps = 0
        self.mode = "idle"
        self.x: Tuple[int, int] = (-1, -1)
        # stage I repair bookkeeping
        self.queue: List[int] = []
        self.y = -1
        self.yp = -1
        self.z = -1
        self.step_draws = 0
        self.total_choices = 0
        # stage II bookkeeping
        self.s: List[int] = []
        self.hit: List[bool] = []
        self.used_pairs: set = set()
        self.middle = 0
        self.mid_pick: Tuple[int, int] = (-1, -1)

    # -- helpers ---------------------------------------------------------
    def _match(self, u: int, v: int) -> None:
        self.partner[u] = v
        self.partner[v] = u
        for w in (u, v):
            self.V0.discard(w)
            self.VM.add(w)

    @property
    def complete(self) -> bool:
        return not len(self.V0)

    def certificate(self):
        return list(self.partner) if self.complete else None

    def _fix_cap_hit(self) -> bool:
        p = self.params
        if self.small_b:
            return self.total_choices > p.fix_cap_small
        return self.step_draws > p.fix_cap_large

    # -- driver ----------------------------------------------------------
    def next_move(self, view, rng):
        if view.round > self.round_cap or self.complete:
            return FORFEIT
        while True:
            mode = self.mode
            if mode == "idle":
                if len(self.V0) < 2:
                    return FORFEIT
                items = self.V0.items
                i = rng.randrange(len(items))
                j = rng.randrange(len(items) - 1)
                if j >= i:
                    j += 1
                x1, x2 = items[i], items[j]
                self.x = (x1, x2)
                if self.steps < self.params.stage1_steps:
                    if view.owns(x1, x2):
                        self._match(x1, x2)
                        self.steps += 1
                        continue
                    if view.revealed(x1, x2):
                        self._start_fix()
                        continue
                    self.mode = "pair"
                    return _e(x1, x2)
                self._start_stage2()
                continue
            if mode == "fix":
                while self.queue and self.partner[self.queue[0]] is not None:
                    self.queue.pop(0)
                if not self.queue:
                    self.steps += 1
                    self.mode = "idle"
                    continue
                xi = self.queue[0]
                self.step_draws += 1
                self.total_choices += 1
                if self._fix_cap_hit():
                    return FORFEIT
                y = draw_incident(view, xi, rng)
                if y is None:
                    return FORFEIT
                self.y = y
                self.mode = "fix_y"
                return _e(xi, y)
            if mode == "fix_z":
                xi, yp = self.queue[0], self.yp
                self.total_choices += 1
                if self.small_b and self._fix_cap_hit():
                    return FORFEIT
                z = self._draw_z(view, yp, xi, rng)
                if z is None:
                    self.mode = "fix"
                    continue
                self.z = z
                self.mode = "fix_zwait"
                return _e(yp, z)
            if mode == "s2_star":
                if len(self.s) == len(self.hit) and len(self.s) >= self._star_total():
                    self._start_middle()
                    continue
                if len(self.s) == len(self.hit):
                    s = self._draw_s(rng)
                    if s is None:
                        self._start_middle()
                        continue
                    self.s.append(s)
                xi = self.x[(len(self.s) - 1) % 2]
                s = self.s[-1]
                if view.owns(xi, s):
                    self.hit.append(True)
                    continue
                if view.revealed(xi, s):
                    self.hit.append(False)
                    continue
                return _e(xi, s)
            if mode == "s2_middle":
                ok1 = [j for j in range(0, len(self.hit), 2) if self.hit[j]]
                ok2 = [j for j in range(1, len(self.hit), 2) if self.hit[j]]
                if not ok1 or not ok2 or self.middle >= self.params.middle_draws:
                    return FORFEIT
                j1 = rng.choice(ok1)
                j2 = rng.choice(ok2)
                self.middle += 1
                self.mid_pick = (j1, j2)
                t1, t2 = self.partner[self.s[j1]], self.partner[self.s[j2]]
                if view.owns(t1, t2):
                    self._complete_path()
                    continue
                if view.revealed(t1, t2):
                    continue
                return _e(t1, t2)
            raise RuntimeError(f"unexpected mode {mode}")

    def _start_fix(self) -> None:
        self.queue = list(self.x)
        self.step_draws = 0
        self.mode = "fix"

    def _draw_z(self, view, yp: int, xi: int, rng) -> Optional[int]:
        items = self.V0.items
        n = view.n

        def ok(t: int) -> bool:
            z = items[t]
            return z != xi and view.key(yp, z) not in view.my_edges and \
                view.key(yp, z) not in view.revealed_breaker

        t = rng.pick_where(len(items), ok, lambda: [t for t in range(len(items)) if ok(t)])
        return None if t is None else items[t]

    # stage II
    def _star_total(self) -> int:
        return 2 * self.params.pairs_per_side

    def _start_stage2(self) -> None:
        self.s, self.hit = [], []
        self.used_pairs = set()
        self.middle = 0
        self.mode = "s2_star"

    def _draw_s(self, rng) -> Optional[int]:
        items = self.VM.items
        used = self.used_pairs
        partner = self.partner

        def ok(t: int) -> bool:
            s = items[t]
            return min(s, partner[s]) not in used

        t = rng.pick_where(len(items), ok, lambda: [t for t in range(len(items)) if ok(t)])
        if t is None:
            return None
        s = items[t]
        used.add(min(s, partner[s]))
        return s

    def _start_middle(self) -> None:
        self.mode = "s2_middle"

    def _complete_path(self) -> None:
        j1, j2 = self.mid_pick
        x1, x2 = self.x
        s1, s2 = self.s[j1], self.s[j2]
        t1, t2 = self.partner[s1], self.partner[s2]
        self._match(x1, s1)
        self._match(t1, t2)
        self._match(s2, x2)
        self.mode = "idle"

    def observe(self, edge, outcome, view):
        mode = self.mode
        ok = outcome is CLAIMED
        if mode == "pair":
            if ok:
                self._match(*self.x)
                self.steps += 1
                self.mode = "idle"
            else:
                self._start_fix()
        elif mode == "fix_y":
            xi, y = self.queue[0], self.y
            if not ok:
                self.mode = "fix"
            elif self.partner[y] is None:
                self._match(xi, y)
                self.mode = "fix"
            else:
                self.yp = self.partner[y]
                self.mode = "fix_z"
        elif mode == "fix_zwait":
            if ok:
                xi, y, yp, z = self.queue[0], self.y, self.yp, self.z
                self.partner[yp] = None
                self._match(xi, y)
                self._match(yp, z)
            self.mode = "fix"
        elif mode == "s2_star":
            self.hit.append(ok)
        elif mode == "s2_middle":
            if ok:
                self._complete_path()


class PerfectMatchingSmallB(PerfectMatchingMaker):
    name = "pm-small"
    small_b = True


# ---------------------------------------------------------------------------
# connectivity


class Components(ComponentIndex):
    """Union-find that also keeps member lists, roots and size-2 components."""

    __slots__ = ("members", "roots", "pairs")

    def __init__(self, n: int):
        super().__init__(n)
        self.members: Dict[int, List[int]] = {v: [v] for v in range(n)}
        self.roots = IndexedSet(range(n))
        self.pairs = IndexedSet()

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        for r in (rx, ry):
            self.pairs.discard(r)
            self.roots.discard(r)
        super().union(rx, ry)
        root = self.find(rx)
        other = ry if root == rx else rx
        self.members[root].extend(self.members.pop(other))
        self.roots.add(root)
        if self.size[root] == 2:
            self.pairs.add(root)
        return True

    def outside(self, root: int) -> List[int]:
        out: List[int] = []
        for r in self.roots.items:
            if r != root:
                out.extend(self.members[r])
        return out


def draw_cross_edge(view: MakerView, comps: Components, v: int, rng) -> Optional[Edge]:
    """Uniform edge from v's component to the rest, skipping revealed ones."""
    n = view.n
    root = comps.find(v)
    mem = comps.members[root]
    rev = view.revealed_breaker
    if 2 * len(mem) <= n:
        find = comps.find

        def ok(i: int) -> bool:
            c, w = mem[i // n], i % n
            return find(w) != root and (c * n + w if c < w else w * n + c) not in rev

        i = rng.pick_where(len(mem) * n, ok,
                           lambda: [i for i in range(len(mem) * n) if ok(i)])
        if i is None:
            return None
        return _e(mem[i // n], i % n)
    out = comps.outside(root)
    if not out:
        return None
    m = len(out)

    def ok2(i: int) -> bool:
        c, w = mem[i // m], out[i % m]
        return (c * n + w if c < w else w * n + c) not in rev

    i = rng.pick_where(len(mem) * m, ok2, lambda: [i for i in range(len(mem) * m) if ok2(i)])
    if i is None:
        return None
    return _e(mem[i // m], out[i % m])


class ConnectivityLargeB(MakerStrategy):
    """Stage-local vertex pools; each sequence adds one tree edge."""

    name = "conn-large"

    def __init__(self, config, params):
        super().__init__(config, params)
        self.comps = Components(self.n)
        self.stage = 0
        self.seq_in_stage = 0
        self.pool = IndexedSet(range(self.n))
        self.current: Optional[int] = None
        self.choices = 0
        self.successes = 0

    def next_move(self, view, rng):
        p = self.params
        if view.round > p.conn_round_cap:
            return FORFEIT
        if self.current is None:
            if self.seq_in_stage >= p.seqs_per_stage:
                self.stage += 1
                self.seq_in_stage = 0
                self.pool = IndexedSet(range(self.n))
            if self.stage >= p.stages or not len(self.pool):
                return FORFEIT
            v = self.pool.pick(rng)
            self.pool.discard(v)
            self.seq_in_stage += 1
            self.current = v
            self.choices = 0
        if self.choices >= p.edge_choices:
            return FORFEIT
        e = draw_cross_edge(view, self.comps, self.current, rng)
        if e is None:
            return FORFEIT
        self.choices += 1
        return e

    def observe(self, edge, outcome, view):
        if outcome is CLAIMED:
            merged = self.comps.union(*edge)
            assert merged, "claimed edge closes a cycle"
            self.successes += 1
            self.current = None


class ConnectivitySmallB(MakerStrategy):
    """Perfect matching first, then merge pairs, then merge everything."""

    name = "conn-small"

    def __init__(self, config, params):
        super().__init__(config, params)
        self.pm = PerfectMatchingSmallB(config, params, round_cap=params.conn_stage1_cap)
        self.stage = 1
        self.comps: Optional[Components] = None
        self.stage_start = 0
        self.repair: List[int] = []
        self.pending: Optional[str] = None
        self.repair_next: List[int] = []

    def _enter(self, stage: int, view) -> None:
        self.stage = stage
        self.stage_start = view.round
        if stage == 2:
            comps = Components(self.n)
            for u, w in view.edges():
                comps.union(u, w)
            self.comps = comps

    def next_move(self, view, rng):
        p = self.params
        if self.stage == 1:
            if not self.pm.complete:
                return self.pm.next_move(view, rng)
            self._enter(2, view)
        comps = self.comps
        while True:
            if comps.count == 1:
                return FORFEIT
            if view.round - self.stage_start + 1 > p.conn_stage_cap:
                return FORFEIT
            if self.repair:
                rep = self.repair[0]
                e = draw_cross_edge(view, comps, rep, rng)
                if e is None:
                    return FORFEIT
                self.pending = "repair"
                return e
            if self.stage == 2:
                pairs = comps.pairs
                if not len(pairs):
                    self._enter(3, view)
                    continue
                if len(pairs) >= p.size2_threshold:
                    items = pairs.items
                    i = rng.randrange(len(items))
                    j = rng.randrange(len(items) - 1)
                    if j >= i:
                        j += 1
                    c1, c2 = comps.members[items[i]], comps.members[items[j]]
                    f = rng.randrange(4)
                    u, w = c1[f // 2], c2[f % 2]
                    if view.revealed(u, w):
                        self.repair = [c1[0], c2[0]]
                        continue
                    self.pending = "pair2"
                    self.repair_next = [c1[0], c2[0]]
                    return _e(u, w)
                root = pairs.pick(rng)
                e = draw_cross_edge(view, comps, root, rng)
                if e is None:
                    return FORFEIT
                self.pending = "pair1"
                self.repair_next = [root]
                return e
            # stage 3
            root = comps.roots.pick(rng)
            self.repair = [root]

    def observe(self, edge, outcome, view):
        if self.stage == 1:
            self.pm.observe(edge, outcome, view)
            return
        comps = self.comps
        if outcome is CLAIMED:
            assert comps.union(*edge), "claimed edge closes a cycle"
            if self.pending == "repair":
                self._advance_repair()
        elif self.pending in ("pair2", "pair1"):
            self.repair = list(self.repair_next)
            self._skip_merged()
        self.pending = None

    def _advance_repair(self) -> None:
        done = self.comps.find(self.repair.pop(0))
        self.repair = [r for r in self.repair if self.comps.find(r) != done]
        self._skip_merged()

    def _skip_merged(self) -> None:
        # a component that has already been merged away needs no repair of its own
        seen = []
        for r in self.repair:
            root = self.comps.find(r)
            if root not in seen:
                seen.append(root)
        self.repair = seen


# ---------------------------------------------------------------------------
# Hamiltonicity


class HamiltonMaker(MakerStrategy):
    """Grow a path by one vertex per step, repairing failures with two stars."""

    name = "hamilton"

    def __init__(self, config, params):
        super().__init__(config, params)
        n = self.n
        self.path: deque = deque()
        self.y_left = True
        self.V0 = IndexedSet(range(n))
        self.stage = 0  # 0: first edge, 1: extending, 2: closing
        self.mode = "idle"
        self.x = -1
        self.first = (-1, -1)
        self.order: List[int] = []      # path from y, frozen during a repair
        self.star_x: List[int] = []
        self.hit_x: List[int] = []
        self.star_y: List[int] = []
        self.hit_y: List[int] = []
        self.pending = -1
        self.candidates: List[Tuple[int, int]] = []
        self.fails = 0
        self.surgery = None
        self.cycle: Optional[List[int]] = None
        self.closing_path: List[int] = []

    def certificate(self):
        return self.cycle

    def _from_y(self) -> List[int]:
        return list(self.path) if self.y_left else list(reversed(self.path))

    def next_move(self, view, rng):
        p = self.params
        if view.round > p.ham_round_cap or self.cycle is not None:
            return FORFEIT
        n = self.n
        while True:
            mode = self.mode
            if self.stage == 0:
                u = rng.randrange(n)
                v = rng.randrange(n - 1)
                if v >= u:
                    v += 1
                if view.known(u, v):
                    continue
                self.first = (u, v)
                return _e(u, v)
            if mode == "idle":
                if self.stage == 1 and not len(self.V0):
                    self._enter_closing()
                if self.stage == 1:
                    self.x = self.V0.pick(rng)
                y = self.path[0] if self.y_left else self.path[-1]
                x = self.x
                if view.owns(x, y):
                    self._extend_direct()
                    continue
                if view.revealed(x, y):
                    self._start_repair()
                    continue
                self.mode = "direct"
                return _e(x, y)
            if mode == "star_x" or mode == "star_y":
                e = self._next_star_edge(view, rng)
                if e is not None:
                    return e
                continue
            if mode == "pairs":
                if self.fails >= p.fail_cap or not self.candidates:
                    return FORFEIT
                xp, yp = rng.choice(self.candidates)
                surg = path_surgery(self.order, self.x, xp, yp, view.owns)
                assert not isinstance(surg, Degenerate)
                self.surgery = surg
                if view.revealed(*surg.edge):
                    self.fails += 1
                    continue
                return surg.edge
            raise RuntimeError(f"unexpected mode {mode}")

    # -- transitions -----------------------------------------------------
    def _enter_closing(self) -> None:
        # P = (v_1 .. v_n) read from the non-last-added end; close with x = v_n
        order = self._from_y()
        self.stage = 2
        self.x = order[-1]
        self.closing_path = order
        self.path.clear()
        self.path.extend(order[:-1])
        self.y_left = True

    def _extend_direct(self) -> None:
        x = self.x
        if self.stage == 2:
            # x y closes the cycle (v_1 .. v_n)
            self.cycle = list(self.closing_path)
            self.mode = "done"
            return
        if self.y_left:
            self.path.appendleft(x)
        else:
            self.path.append(x)
        self.y_left = not self.y_left
        self.V0.discard(x)
        self.mode = "idle"

    def _start_repair(self) -> None:
        self.order = self._from_y()
        self.star_x, self.hit_x, self.star_y, self.hit_y = [], [], [], []
        self.mode = "star_x"

    def _next_star_edge(self, view, rng) -> Optional[Edge]:
        p = self.params
        x, y = self.x, self.order[0]
        if self.mode == "star_x":
            if len(self.star_x) < p.star_size:
                drawn = set(self.star_x)
                drawn.add(y)
                w = draw_incident(view, x, rng, exclude=drawn)
                if w is not None:
                    self.star_x.append(w)
                    self.pending = w
                    return _e(x, w)
            self.mode = "star_y"
            return None
        if len(self.star_y) < p.star_size:
            drawn = set(self.star_y)
            drawn.update(self.star_x)
            drawn.add(x)
            w = draw_incident(view, y, rng, exclude=drawn)
            if w is not None:
                self.star_y.append(w)
                self.pending = w
                return _e(y, w)
        self._start_pairs(view)
        return None

    def _start_pairs(self, view) -> None:
        index = {v: i for i, v in enumerate(self.order)}
        cands = []
        for xp in self.hit_x:
            for yp in self.hit_y:
                s = path_surgery(self.order, self.x, xp, yp, view.owns, index)
                if not isinstance(s, Degenerate):
                    cands.append((xp, yp))
        self.candidates = cands
        self.fails = 0
        self.mode = "pairs"

    def _apply_surgery(self) -> None:
        s = self.surgery
        if self.stage == 2:
            self.cycle = list(s.order)
            self.mode = "done"
            return
        self.path.clear()
        self.path.extend(s.order)
        # the new path runs from x (added last) to the old far endpoint
        self.y_left = False
        for v in s.added:
            self.V0.discard(v)
        self.mode = "idle"

    def observe(self, edge, outcome, view):
        ok = outcome is CLAIMED
        if self.stage == 0:
            if ok:
                u, v = self.first
                self.path.extend((u, v))
                self.y_left = True
                self.V0.discard(u)
                self.V0.discard(v)
                self.stage = 1
            return
        mode = self.mode
        if mode == "direct":
            if ok:
                self._extend_direct()
            else:
                self._start_repair()
        elif mode == "star_x":
            if ok:
                self.hit_x.append(self.pending)
        elif mode == "star_y":
            if ok:
                self.hit_y.append(self.pending)
        elif mode == "pairs":
            if ok:
                self._apply_surgery()
            else:
                self.fails += 1

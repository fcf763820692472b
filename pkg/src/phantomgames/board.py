"""Board representation for biased Maker-PhantomBreaker games on K_n.

Edges are canonical pairs ``(u, v)`` with ``u < v``; internally they are keyed
by the integer ``u * n + v``.  Ownership lives in two sets (Maker's and
Breaker's edges); everything else is free.

Per-vertex sorted lists of claimed neighbours plus a Fenwick tree over rows of
free "upper" edges give exact uniform sampling of free edges and free incident
edges in logarithmic time, without rejection.
"""

from __future__ import annotations

import enum
from bisect import bisect_right, insort
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Set, Tuple

Edge = Tuple[int, int]


class ConfigError(ValueError):
    """Invalid game configuration."""


class ContractError(RuntimeError):
    """A strategy broke the move contract (e.g. resubmitted its own edge)."""


class GameKind(enum.Enum):
    MIN_DEGREE = "MinDegree"
    CONNECTIVITY = "Connectivity"
    PERFECT_MATCHING = "PerfectMatching"
    HAMILTONICITY = "Hamiltonicity"


class MoveOutcome(enum.Enum):
    CLAIMED = "Claimed"
    FAILURE = "Failure"


MAKER = "M"
BREAKER = "B"


def canon(u: int, v: int) -> Edge:
    if u == v:
        raise ContractError(f"loop at vertex {u}")
    return (u, v) if u < v else (v, u)


def edge_key(u: int, v: int, n: int) -> int:
    return u * n + v if u < v else v * n + u


def key_edge(key: int, n: int) -> Edge:
    return divmod(key, n)


@dataclass(frozen=True)
class GameConfig:
    n: int
    a: int
    b: int
    game: GameKind = GameKind.MIN_DEGREE
    k: int = 1
    stall_cap: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.game, GameKind):
            object.__setattr__(self, "game", GameKind(self.game))
        if self.n < 2:
            raise ConfigError(f"n must be at least 2, got {self.n}")
        if self.a < 1 or self.b < 1:
            raise ConfigError(f"biases must be positive, got a={self.a} b={self.b}")
        if self.k < 1:
            raise ConfigError(f"k must be positive, got {self.k}")
        if self.game is GameKind.PERFECT_MATCHING and self.n % 2:
            raise ConfigError(f"perfect matching game needs even n, got {self.n}")
        if self.game is GameKind.HAMILTONICITY and self.n < 3:
            raise ConfigError(f"Hamiltonicity game needs n >= 3, got {self.n}")
        if self.stall_cap is not None and self.stall_cap < self.min_rounds:
            raise ConfigError(
                f"stall_cap {self.stall_cap} below the {self.min_rounds} rounds a full game can take")

    @property
    def num_edges(self) -> int:
        return self.n * (self.n - 1) // 2

    @property
    def min_rounds(self) -> int:
        return -(-self.num_edges // (self.a + self.b))

    @property
    def round_cap(self) -> int:
        return self.stall_cap if self.stall_cap is not None else max(self.n * self.n, self.min_rounds)

    def as_dict(self) -> dict:
        return {"game": self.game.value, "n": self.n, "a": self.a, "b": self.b, "k": self.k,
                "stall_cap": self.round_cap, "seed": self.seed}


def nth_missing(lst: List[int], r: int) -> int:
    """The ``r``-th (0-based) non-negative integer absent from sorted ``lst``."""
    lo, hi = 0, len(lst)
    while lo < hi:
        mid = (lo + hi) >> 1
        if lst[mid] - mid <= r:
            lo = mid + 1
        else:
            hi = mid
    return r + lo


class Fenwick:
    __slots__ = ("n", "tree", "top")

    def __init__(self, values: List[int]):
        n = len(values)
        self.n = n
        tree = [0] * (n + 1)
        for i, x in enumerate(values, 1):
            tree[i] += x
            j = i + (i & -i)
            if j <= n:
                tree[j] += tree[i]
        self.tree = tree
        self.top = 1 << max(0, n.bit_length() - 1) if n else 0

    def add(self, i: int, delta: int) -> None:
        i += 1
        tree, n = self.tree, self.n
        while i <= n:
            tree[i] += delta
            i += i & -i

    def find(self, r: int) -> Tuple[int, int]:
        """Index ``i`` with prefix(i) <= r < prefix(i+1), and ``r - prefix(i)``."""
        pos, step, tree, n = 0, self.top, self.tree, self.n
        while step:
            nxt = pos + step
            if nxt <= n and tree[nxt] <= r:
                pos = nxt
                r -= tree[nxt]
            step >>= 1
        return pos, r


class BoardState:
    """Tri-partition of E(K_n) into Maker's, Breaker's and free edges."""

    def __init__(self, config: GameConfig, record: bool = True):
        n = config.n
        self.config = config
        self.n = n
        self.maker_edges: Set[int] = set()
        self.breaker_edges: Set[int] = set()
        self.known_breaker: Set[int] = set()
        self.maker_deg = [0] * n
        self.breaker_deg = [0] * n
        self.round = 1
        self.maker_attempts_this_round = 0
        self.maker_failures = 0
        self.free_count = config.num_edges
        self.record = record
        self.transcript: list = []
        # claimed neighbours of v (either player), with v itself as a sentinel
        self._claimed_nbrs: List[List[int]] = [[v] for v in range(n)]
        self._free_upper = Fenwick([n - 1 - u for u in range(n)])

    # -- queries ---------------------------------------------------------
    def owner(self, u: int, v: int) -> str:
        key = edge_key(u, v, self.n)
        if key in self.maker_edges:
            return MAKER
        if key in self.breaker_edges:
            return BREAKER
        return "F"

    def is_free(self, u: int, v: int) -> bool:
        key = edge_key(u, v, self.n)
        return key not in self.maker_edges and key not in self.breaker_edges

    def free_degree(self, v: int) -> int:
        return self.n - len(self._claimed_nbrs[v])

    def free_incident(self, v: int) -> Tuple[int, int, int]:
        """``(d_F(v), d_M(v), d_B(v))``."""
        return self.free_degree(v), self.maker_deg[v], self.breaker_deg[v]

    def nth_free_neighbor(self, v: int, r: int) -> int:
        """The ``r``-th free neighbour of ``v`` in increasing vertex order."""
        return nth_missing(self._claimed_nbrs[v], r)

    def free_neighbors(self, v: int) -> List[int]:
        return [self.nth_free_neighbor(v, r) for r in range(self.free_degree(v))]

    def nth_free_edge(self, r: int) -> Edge:
        """The ``r``-th free edge in lexicographic order."""
        u, rest = self._free_upper.find(r)
        lst = self._claimed_nbrs[u]
        below = u + 1 - bisect_right(lst, u)
        return u, nth_missing(lst, rest + below)

    def free_edges(self) -> Iterator[Edge]:
        for r in range(self.free_count):
            yield self.nth_free_edge(r)

    def edges_of(self, keys) -> List[Edge]:
        n = self.n
        return sorted(divmod(k, n) for k in keys)

    # -- mutation --------------------------------------------------------
    def _take(self, u: int, v: int) -> None:
        insort(self._claimed_nbrs[u], v)
        insort(self._claimed_nbrs[v], u)
        self._free_upper.add(u, -1)
        self.free_count -= 1

    def check_partition(self) -> None:
        """Debug check of the ownership and degree invariants."""
        n = self.n
        assert not (self.maker_edges & self.breaker_edges)
        assert len(self.maker_edges) + len(self.breaker_edges) + self.free_count == n * (n - 1) // 2
        assert self.known_breaker <= self.breaker_edges
        mdeg, bdeg = [0] * n, [0] * n
        for key in self.maker_edges:
            u, v = divmod(key, n)
            mdeg[u] += 1
            mdeg[v] += 1
        for key in self.breaker_edges:
            u, v = divmod(key, n)
            bdeg[u] += 1
            bdeg[v] += 1
        assert mdeg == self.maker_deg and bdeg == self.breaker_deg
        for v in range(n):
            assert self.free_degree(v) + mdeg[v] + bdeg[v] == n - 1


def new_game(config: GameConfig, record: bool = True) -> BoardState:
    return BoardState(config, record)


def attempt_claim_maker(state: BoardState, e: Edge) -> MoveOutcome:
    n = state.n
    u, v = e
    if not (0 <= u < n and 0 <= v < n) or u == v:
        raise ContractError(f"invalid edge {e} for n={n}")
    if u > v:
        u, v = v, u
    key = u * n + v
    if key in state.maker_edges:
        raise ContractError(f"Maker resubmitted her own edge {(u, v)}")
    if state.maker_attempts_this_round >= state.config.a:
        raise ContractError("Maker attempt budget exhausted for this round")
    state.maker_attempts_this_round += 1
    if key in state.breaker_edges:
        state.known_breaker.add(key)
        state.maker_failures += 1
        outcome = MoveOutcome.FAILURE
    else:
        state.maker_edges.add(key)
        state.maker_deg[u] += 1
        state.maker_deg[v] += 1
        state._take(u, v)
        outcome = MoveOutcome.CLAIMED
    if state.record:
        state.transcript.append((MAKER, (u, v), outcome))
    return outcome


def claim_breaker(state: BoardState, e: Edge) -> None:
    n = state.n
    u, v = e
    if not (0 <= u < n and 0 <= v < n) or u == v:
        raise ContractError(f"invalid edge {e} for n={n}")
    if u > v:
        u, v = v, u
    key = u * n + v
    if key in state.maker_edges or key in state.breaker_edges:
        raise ContractError(f"Breaker claimed non-free edge {(u, v)}")
    state.breaker_edges.add(key)
    state.breaker_deg[u] += 1
    state.breaker_deg[v] += 1
    state._take(u, v)
    if state.record:
        state.transcript.append((BREAKER, (u, v), MoveOutcome.CLAIMED))


@dataclass
class MakerView:
    """What Maker is allowed to know: her edges and revealed Breaker edges.

    ``my_edges`` and ``revealed_breaker`` hold integer keys ``u * n + v``.
    """

    n: int
    a: int
    b: int
    k: int
    round: int
    my_attempt_budget_left: int
    my_edges: Set[int] = field(repr=False)
    revealed_breaker: Set[int] = field(repr=False)
    my_deg: List[int] = field(repr=False)

    def key(self, u: int, v: int) -> int:
        return u * self.n + v if u < v else v * self.n + u

    def owns(self, u: int, v: int) -> bool:
        return self.key(u, v) in self.my_edges

    def revealed(self, u: int, v: int) -> bool:
        return self.key(u, v) in self.revealed_breaker

    def known(self, u: int, v: int) -> bool:
        """True if Maker knows the edge is unavailable to her."""
        key = self.key(u, v)
        return key in self.my_edges or key in self.revealed_breaker

    def degree(self, v: int) -> int:
        return self.my_deg[v]

    def edges(self) -> List[Edge]:
        n = self.n
        return sorted(divmod(k, n) for k in self.my_edges)


def maker_view(state: BoardState) -> MakerView:
    cfg = state.config
    return MakerView(cfg.n, cfg.a, cfg.b, cfg.k, state.round,
                     cfg.a - state.maker_attempts_this_round,
                     state.maker_edges, state.known_breaker, state.maker_deg)

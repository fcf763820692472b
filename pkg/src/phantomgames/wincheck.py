"""Win detection for the four games, with exact small-n fallbacks."""

from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .board import BoardState, Edge, GameConfig, GameKind

PM_EXACT_MAX_N = 24
HAMILTON_EXACT_MAX_N = 20


class UnsupportedError(RuntimeError):
    """Exact check requested beyond the supported board size."""


class CertificateError(AssertionError):
    """A strategy offered a win certificate that does not hold on its graph."""


class ComponentIndex:
    """Union-find over ``n`` vertices (union by size, path compression).

    ``rep(v)`` is the smallest vertex id of v's component, independent of the
    order in which unions happened.
    """

    __slots__ = ("parent", "size", "low", "count")

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.low = list(range(n))
        self.count = n

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if self.size[rx] < self.size[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        self.size[rx] += self.size[ry]
        if self.low[ry] < self.low[rx]:
            self.low[rx] = self.low[ry]
        self.count -= 1
        return True

    def same(self, x: int, y: int) -> bool:
        return self.find(x) == self.find(y)

    def rep(self, x: int) -> int:
        return self.low[self.find(x)]

    def comp_size(self, x: int) -> int:
        return self.size[self.find(x)]

    def members(self, x: int) -> List[int]:
        r = self.find(x)
        return [v for v in range(len(self.parent)) if self.find(v) == r]


def _degrees(edges: Iterable[Edge], n: int) -> List[int]:
    deg = [0] * n
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    return deg


def _adjacency_masks(edges: Iterable[Edge], n: int) -> List[int]:
    adj = [0] * n
    for u, v in edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    return adj


def check_mindegree(edges: Iterable[Edge], n: int, k: int) -> bool:
    return min(_degrees(edges, n)) >= k


def check_connectivity(edges: Iterable[Edge], n: int) -> bool:
    if n <= 1:
        return True
    uf = ComponentIndex(n)
    for u, v in edges:
        uf.union(u, v)
    return uf.count == 1


def has_perfect_matching(edges: Iterable[Edge], n: int) -> bool:
    """Exact bitmask search, always matching the lowest unmatched vertex."""
    if n % 2:
        raise ValueError(f"perfect matching needs even n, got {n}")
    if n > PM_EXACT_MAX_N:
        raise UnsupportedError(f"exact perfect matching check limited to n <= {PM_EXACT_MAX_N}")
    adj = _adjacency_masks(edges, n)
    if any(m == 0 for m in adj):
        return False
    full = (1 << n) - 1
    memo: Dict[int, bool] = {}

    def solve(free: int) -> bool:
        if free == 0:
            return True
        hit = memo.get(free)
        if hit is not None:
            return hit
        low = free & -free
        v = low.bit_length() - 1
        cand = adj[v] & free & ~low
        ok = False
        while cand:
            bit = cand & -cand
            if solve(free & ~low & ~bit):
                ok = True
                break
            cand ^= bit
        memo[free] = ok
        return ok

    return solve(full)


def has_hamilton_cycle(edges: Iterable[Edge], n: int) -> bool:
    """Exact Held-Karp style reachability over vertex subsets."""
    if n > HAMILTON_EXACT_MAX_N:
        raise UnsupportedError(f"exact Hamilton check limited to n <= {HAMILTON_EXACT_MAX_N}")
    edges = list(edges)
    if n < 3:
        return False
    adj = _adjacency_masks(edges, n)
    if any(bin(m).count("1") < 2 for m in adj) or not check_connectivity(edges, n):
        return False
    # reach[mask] = set of end vertices of paths from 0 covering exactly mask
    full = (1 << n) - 1
    reach = {1: 1}
    frontier = [1]
    for _ in range(n - 1):
        nxt: Dict[int, int] = {}
        for mask in frontier:
            ends = reach[mask]
            while ends:
                bit = ends & -ends
                ends ^= bit
                v = bit.bit_length() - 1
                out = adj[v] & ~mask
                while out:
                    wbit = out & -out
                    out ^= wbit
                    m2 = mask | wbit
                    nxt[m2] = nxt.get(m2, 0) | wbit
        reach.update(nxt)
        frontier = list(nxt)
    return bool(reach.get(full, 0) & adj[0])


def check_perfect_matching(edges: Iterable[Edge], n: int,
                           partner: Optional[Sequence[int]] = None) -> bool:
    if n % 2:
        raise ValueError(f"perfect matching needs even n, got {n}")
    edges = list(edges)
    if partner is not None:
        return verify_matching(partner, set(map(tuple, edges)), n)
    return has_perfect_matching(edges, n)


def check_hamilton(edges: Iterable[Edge], n: int, order: Optional[Sequence[int]] = None) -> bool:
    edges = list(edges)
    if order is not None:
        return verify_cycle(order, set(map(tuple, edges)), n)
    return has_hamilton_cycle(edges, n)


def _has(edge_set, u: int, v: int) -> bool:
    return ((u, v) if u < v else (v, u)) in edge_set


def verify_matching(partner: Sequence[int], edge_set, n: int) -> bool:
    if len(partner) != n:
        return False
    for v, w in enumerate(partner):
        if w is None or not 0 <= w < n or w == v or partner[w] != v:
            return False
        if v < w and not _has(edge_set, v, w):
            return False
    return True


def verify_cycle(order: Sequence[int], edge_set, n: int) -> bool:
    if len(order) != n or sorted(order) != list(range(n)):
        return False
    return all(_has(edge_set, order[i - 1], order[i]) for i in range(n))


def blocked_mindegree(state: BoardState, k: int) -> bool:
    """True iff some vertex can no longer reach Maker degree ``k``."""
    n = state.n
    bdeg = state.breaker_deg
    return any(n - 1 - bdeg[v] < k for v in range(n))


def dead_threshold(config: GameConfig) -> int:
    """Minimum Maker degree every vertex needs in any winning set."""
    if config.game is GameKind.MIN_DEGREE:
        return config.k
    if config.game is GameKind.HAMILTONICITY:
        return 2
    return 1


class WinTracker:
    """Incremental win detection over Maker's successful claims.

    Min-degree and connectivity are tracked exactly.  Perfect matchings and
    Hamilton cycles rely on a certificate from the strategy (partner map or
    cyclic vertex order), with exact search as a fallback on small boards.
    """

    def __init__(self, config: GameConfig):
        self.config = config
        self.kind = config.game
        n = config.n
        self.n = n
        self.k = config.k
        self.deg = [0] * n
        self.reached = 0
        self.components = ComponentIndex(n)
        self.edge_set: set = set()
        self.certified = False

    def add(self, u: int, v: int) -> None:
        self.edge_set.add((u, v) if u < v else (v, u))
        kind = self.kind
        if kind is GameKind.MIN_DEGREE or kind is GameKind.PERFECT_MATCHING or kind is GameKind.HAMILTONICITY:
            need = self.k if kind is GameKind.MIN_DEGREE else (1 if kind is GameKind.PERFECT_MATCHING else 2)
            for w in (u, v):
                self.deg[w] += 1
                if self.deg[w] == need:
                    self.reached += 1
        if kind is GameKind.CONNECTIVITY or kind is GameKind.HAMILTONICITY:
            self.components.union(u, v)

    def _prereq(self) -> bool:
        kind = self.kind
        if kind is GameKind.CONNECTIVITY:
            return self.components.count == 1
        if kind is GameKind.HAMILTONICITY:
            return self.reached == self.n and self.components.count == 1
        return self.reached == self.n

    def won(self, certificate=None, exhaustive: bool = False) -> bool:
        """Has Maker won?  ``exhaustive`` allows the exact fallback search."""
        if not self._prereq():
            return False
        kind = self.kind
        if kind is GameKind.MIN_DEGREE or kind is GameKind.CONNECTIVITY:
            return True
        if certificate is not None:
            if kind is GameKind.PERFECT_MATCHING:
                ok = verify_matching(certificate, self.edge_set, self.n)
            else:
                ok = verify_cycle(certificate, self.edge_set, self.n)
            if not ok:
                raise CertificateError(f"invalid {kind.value} certificate")
            self.certified = True
            return True
        limit = PM_EXACT_MAX_N if kind is GameKind.PERFECT_MATCHING else HAMILTON_EXACT_MAX_N
        if self.n > limit:
            if exhaustive:
                raise UnsupportedError(
                    f"{kind.value} check at n={self.n} needs a strategy certificate")
            return False
        if kind is GameKind.PERFECT_MATCHING:
            return has_perfect_matching(self.edge_set, self.n)
        return has_hamilton_cycle(self.edge_set, self.n)


def independent_check(config: GameConfig, edges: List[Edge], certificate=None) -> bool:
    """Recheck a final Maker graph from scratch (no shared state with the tracker)."""
    n = config.n
    kind = config.game
    if kind is GameKind.MIN_DEGREE:
        return check_mindegree(edges, n, config.k)
    if kind is GameKind.CONNECTIVITY:
        return check_connectivity(edges, n)
    if kind is GameKind.PERFECT_MATCHING:
        if certificate is None and n > PM_EXACT_MAX_N:
            raise UnsupportedError("no certificate")
        return check_perfect_matching(edges, n, certificate)
    if certificate is None and n > HAMILTON_EXACT_MAX_N:
        raise UnsupportedError("no certificate")
    return check_hamilton(edges, n, certificate)

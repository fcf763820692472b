"""Random sources.

Every uniform choice a strategy makes goes through one of three primitives:

* ``randrange(m)``      -- uniform integer in ``[0, m)``
* ``choice(seq)``       -- uniform element of an ordered sequence
* ``pick_where(m, ok, listing)`` -- uniform index in ``[0, m)`` among those
  satisfying ``ok``; ``listing`` (optional) returns exactly those indices in
  ascending order and lets callers enumerate them faster than a full scan.

:class:`SeededSource` samples (rejection first, explicit listing as a
fallback).  :class:`ScriptedSource` follows a fixed path of option indices and
raises :class:`Branch` at the first choice beyond it, which is what the exact
oracle uses to enumerate the game tree.  Both give the same option sets in the
same order, so a fixed option index means the same outcome in either.
"""

from __future__ import annotations

import random
from typing import Callable, Optional, Sequence

MASK64 = (1 << 64) - 1

# Rejection attempts before falling back to explicit enumeration.
_REJECTION_TRIES = 32


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def mix_seed(master_seed: int, index: int) -> int:
    """64-bit seed for trial ``index`` of a run keyed by ``master_seed``."""
    return splitmix64((master_seed & MASK64) ^ splitmix64(index & MASK64))


class Branch(Exception):
    """Raised by :class:`ScriptedSource` when the scripted path runs out."""

    def __init__(self, options: int, actor: str):
        super().__init__(options)
        self.options = options
        self.actor = actor


class SeededSource:
    """Replayable pseudo-random source backed by :class:`random.Random`."""

    __slots__ = ("_rng", "actor")

    def __init__(self, seed: int):
        self._rng = random.Random(seed)
        self.actor = ""

    def randrange(self, m: int) -> int:
        return self._rng.randrange(m)

    def choice(self, seq: Sequence):
        return seq[self._rng.randrange(len(seq))]

    def pick_where(self, m: int, ok: Callable[[int], bool],
                   listing: Optional[Callable[[], Sequence[int]]] = None) -> Optional[int]:
        if m <= 0:
            return None
        rr = self._rng.randrange
        for _ in range(_REJECTION_TRIES):
            i = rr(m)
            if ok(i):
                return i
        opts = listing() if listing is not None else [i for i in range(m) if ok(i)]
        if not opts:
            return None
        return opts[rr(len(opts))]


class ScriptedSource:
    """Follows ``path`` (a sequence of option indices), then raises :class:`Branch`.

    Choices with a single option never consume the path.  ``trace`` collects
    ``(actor, option_count)`` for every choice point that was passed.
    """

    def __init__(self, path: Sequence[int] = (), record: bool = False):
        self.path = tuple(path)
        self.pos = 0
        self.actor = ""
        self.trace: Optional[list] = [] if record else None

    def _take(self, m: int) -> int:
        if self.trace is not None:
            self.trace.append((self.actor, m))
        if m == 1:
            return 0
        if self.pos < len(self.path):
            i = self.path[self.pos]
            self.pos += 1
            if not 0 <= i < m:
                raise ValueError(f"scripted option {i} out of range for {m} options")
            return i
        raise Branch(m, self.actor)

    def randrange(self, m: int) -> int:
        if m <= 0:
            raise ValueError("empty range")
        return self._take(m)

    def choice(self, seq: Sequence):
        return seq[self.randrange(len(seq))]

    def pick_where(self, m: int, ok: Callable[[int], bool],
                   listing: Optional[Callable[[], Sequence[int]]] = None) -> Optional[int]:
        if m <= 0:
            return None
        opts = listing() if listing is not None else [i for i in range(m) if ok(i)]
        if not opts:
            return None
        return opts[self._take(len(opts))]


class ProbeSource(ScriptedSource):
    """Like :class:`ScriptedSource` but, past the path, picks options with ``rng``.

    Used for Knuth's tree-size estimator: the product of option counts along a
    uniformly sampled root-to-leaf path is an unbiased estimate of the number
    of leaves.
    """

    def __init__(self, rng: random.Random, path: Sequence[int] = ()):
        super().__init__(path, record=True)
        self._rng = rng

    def _take(self, m: int) -> int:
        try:
            return super()._take(m)
        except Branch:
            return self._rng.randrange(m)

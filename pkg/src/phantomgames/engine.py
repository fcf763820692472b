"""Referee loop: plays one game between a Maker and a Breaker strategy.

:class:`Game` advances by atomic steps (one Maker attempt, one Breaker claim,
or a round change), so the exact oracle can snapshot and branch between any
two random choices.  :func:`run_game` just steps a game to completion.

Strategy protocol
-----------------
Maker: ``next_move(view, rng) -> Edge | FORFEIT``,
``observe(edge, outcome, view)``, ``certificate() -> partner map | cycle | None``.

Breaker: ``next_claim(state, rng) -> Edge | FORFEIT`` and
``on_maker_attempt(edge, outcome, state)``.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass, field
from typing import List, Optional

from .board import (BoardState, ContractError, Edge, GameConfig, MakerView, MoveOutcome,
                    attempt_claim_maker, claim_breaker, maker_view, new_game)
from .wincheck import WinTracker, dead_threshold, independent_check


class _Forfeit:
    __slots__ = ()

    def __repr__(self):
        return "FORFEIT"

    def __reduce__(self):
        return "FORFEIT"


FORFEIT = _Forfeit()


class Winner(enum.Enum):
    MAKER = "Maker"
    BREAKER = "Breaker"


class Reason(enum.Enum):
    MAKER_WIN = "MakerWin"
    MAKER_FORFEIT = "MakerForfeit"
    BREAKER_FORFEIT = "BreakerForfeit"
    BOARD_EXHAUSTED = "BoardExhausted"
    STALL_CAP = "StallCap"


@dataclass
class TrialRecord:
    winner: Winner
    reason: Reason
    rounds_used: int
    maker_failures: int
    seed: int
    dead_position: bool = False
    stalled: bool = False
    certified: Optional[bool] = None
    maker_attempts: int = 0
    digest: str = ""
    maker_edges: Optional[List[Edge]] = None
    certificate: Optional[list] = None
    transcript: Optional[list] = field(default=None, repr=False)

    def to_json(self) -> dict:
        out = {"winner": self.winner.value, "reason": self.reason.value,
               "rounds_used": self.rounds_used, "maker_failures": self.maker_failures,
               "maker_attempts": self.maker_attempts, "seed": self.seed,
               "dead_position": self.dead_position, "stalled": self.stalled,
               "certified": self.certified, "digest": self.digest}
        if self.maker_edges is not None:
            out["maker_edges"] = [list(e) for e in self.maker_edges]
        if self.transcript is not None:
            out["transcript"] = [[actor, list(e), o.value] for actor, e, o in self.transcript]
        return out


def transcript_digest(transcript) -> str:
    h = hashlib.blake2b(digest_size=16)
    for actor, (u, v), outcome in transcript:
        h.update(f"{actor}{u},{v}{outcome.value[0]};".encode())
    return h.hexdigest()


class Game:
    """One game in progress.  Call :meth:`step` until it returns True."""

    def __init__(self, config: GameConfig, maker, breaker, record: bool = True,
                 keep_edges: bool = False, verify: bool = True):
        self.config = config
        self.maker = maker
        self.breaker = breaker
        self.state: BoardState = new_game(config, record=record)
        self.view: MakerView = maker_view(self.state)
        self.tracker = WinTracker(config)
        self.need = dead_threshold(config)
        self.keep_edges = keep_edges
        self.verify = verify
        self.turn = "maker"
        self.breaker_left = 0
        self.attempts = 0
        self.result: Optional[TrialRecord] = None
        if config.n - 1 < self.need:
            self._finish(Winner.BREAKER, Reason.BOARD_EXHAUSTED, dead=True)

    @property
    def done(self) -> bool:
        return self.result is not None

    # -- termination -----------------------------------------------------
    def _finish(self, winner: Winner, reason: Reason, dead: bool = False,
                stalled: bool = False) -> None:
        st = self.state
        cert = None
        certified = None
        if reason is Reason.MAKER_WIN:
            cert = self.maker.certificate() if hasattr(self.maker, "certificate") else None
            if self.verify:
                certified = independent_check(self.config, st.edges_of(st.maker_edges), cert)
                if not certified:
                    raise AssertionError("Maker win not confirmed by an independent check")
        self.result = TrialRecord(
            winner=winner, reason=reason, rounds_used=st.round,
            maker_failures=st.maker_failures, seed=self.config.seed,
            dead_position=dead, stalled=stalled, certified=certified,
            maker_attempts=self.attempts,
            digest=transcript_digest(st.transcript) if st.record else "",
            maker_edges=st.edges_of(st.maker_edges) if self.keep_edges else None,
            certificate=list(cert) if cert is not None else None,
            transcript=list(st.transcript) if st.record else None,
        )
        self.turn = "done"

    def _final_evaluation(self) -> None:
        cert = self.maker.certificate() if hasattr(self.maker, "certificate") else None
        if self.tracker.won(cert, exhaustive=True):
            self._finish(Winner.MAKER, Reason.MAKER_WIN)
        else:
            self._finish(Winner.BREAKER, Reason.BOARD_EXHAUSTED)

    def _end_round(self) -> None:
        st = self.state
        if st.round >= self.config.round_cap:
            self._finish(Winner.BREAKER, Reason.STALL_CAP, stalled=True)
            return
        st.round += 1
        st.maker_attempts_this_round = 0
        self.view.round = st.round
        self.view.my_attempt_budget_left = self.config.a
        self.turn = "maker"

    # -- stepping --------------------------------------------------------
    def step(self, rng) -> bool:
        """Advance by one atomic action; return True once the game is over."""
        if self.result is not None:
            return True
        st = self.state
        if self.turn == "maker":
            if st.free_count == 0:
                self._final_evaluation()
                return True
            if st.maker_attempts_this_round >= self.config.a:
                self.turn = "breaker"
                self.breaker_left = min(self.config.b, st.free_count)
                return False
            rng.actor = "maker"
            move = self.maker.next_move(self.view, rng)
            if move is FORFEIT:
                self._finish(Winner.BREAKER, Reason.MAKER_FORFEIT)
                return True
            outcome = attempt_claim_maker(st, move)
            self.attempts += 1
            self.view.my_attempt_budget_left -= 1
            u, v = move
            self.maker.observe(move, outcome, self.view)
            self.breaker.on_maker_attempt(move, outcome, st)
            if outcome is MoveOutcome.CLAIMED:
                self.tracker.add(u, v)
                cert = self.maker.certificate() if hasattr(self.maker, "certificate") else None
                if self.tracker.won(cert):
                    self._finish(Winner.MAKER, Reason.MAKER_WIN)
                    return True
            return False
        # Breaker's turn
        if self.breaker_left <= 0 or st.free_count == 0:
            if st.free_count == 0:
                self._final_evaluation()
                return True
            self._end_round()
            return self.result is not None
        rng.actor = "breaker"
        e = self.breaker.next_claim(st, rng)
        if e is FORFEIT:
            self._finish(Winner.MAKER, Reason.BREAKER_FORFEIT)
            return True
        claim_breaker(st, e)
        self.breaker_left -= 1
        n, need, bdeg = st.n, self.need, st.breaker_deg
        u, v = e
        if n - 1 - bdeg[u] < need or n - 1 - bdeg[v] < need:
            self._finish(Winner.BREAKER, Reason.BOARD_EXHAUSTED, dead=True)
            return True
        return False

    def play(self, rng) -> TrialRecord:
        step = self.step
        while not step(rng):
            pass
        return self.result


def run_game(config: GameConfig, maker, breaker, rng, record: bool = True,
             keep_edges: bool = False) -> TrialRecord:
    return Game(config, maker, breaker, record=record, keep_edges=keep_edges).play(rng)


def replay_known_breaker(transcript) -> set:
    """Edges on which Maker's attempts failed, recomputed from a transcript."""
    return {e for actor, e, outcome in transcript
            if actor == "M" and outcome is MoveOutcome.FAILURE}


__all__ = ["FORFEIT", "Game", "Reason", "TrialRecord", "Winner", "run_game",
           "replay_known_breaker", "transcript_digest", "ContractError"]

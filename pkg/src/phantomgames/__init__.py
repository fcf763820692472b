"""Simulator and experiment harness for biased Maker-PhantomBreaker games on K_n."""

from .board import (BoardState, ConfigError, ContractError, GameConfig, GameKind, MakerView,
                    MoveOutcome, attempt_claim_maker, claim_breaker, maker_view, new_game)
from .engine import FORFEIT, Game, Reason, TrialRecord, Winner, run_game
from .randomness import ScriptedSource, SeededSource, mix_seed

__all__ = [
    "BoardState", "ConfigError", "ContractError", "GameConfig", "GameKind", "MakerView",
    "MoveOutcome", "attempt_claim_maker", "claim_breaker", "maker_view", "new_game",
    "FORFEIT", "Game", "Reason", "TrialRecord", "Winner", "run_game",
    "ScriptedSource", "SeededSource", "mix_seed",
]

__version__ = "0.1.0"

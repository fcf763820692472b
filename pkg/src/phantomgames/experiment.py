"""Seeded Monte Carlo runs, Wilson intervals and parameter sweeps.

Trial ``i`` of a run always uses seed ``mix_seed(master_seed, i)``, and
results are merged from integer partial sums, so the aggregate does not
depend on how trials are split across worker processes.
"""

from __future__ import annotations

import csv
import hashlib
import itertools
import math
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .board import GameConfig, GameKind
from .engine import Game, Reason, TrialRecord, Winner
from .randomness import SeededSource, mix_seed
from .registry import make_breaker, make_maker

RESERVOIR = 100
DEFAULT_BUDGET = 10 ** 8
Z_95 = 1.959963984540054


class TrialError(RuntimeError):
    """A trial raised; the message carries its index and seed for replay."""


class BudgetError(RuntimeError):
    """A sweep would exceed its trial budget."""


def wilson_interval(wins: int, trials: int, z: float = Z_95) -> Tuple[float, float]:
    if trials < 1:
        raise ValueError("trials must be positive")
    if not 0 <= wins <= trials:
        raise ValueError(f"wins={wins} outside [0, {trials}]")
    if not z > 0:
        raise ValueError("z must be positive")
    p = wins / trials
    z2 = z * z
    denom = 1 + z2 / trials
    centre = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom
    lo = 0.0 if wins == 0 else max(0.0, centre - half)
    hi = 1.0 if wins == trials else min(1.0, centre + half)
    return lo, hi


@dataclass
class Partial:
    """Integer sums over a block of trials; merging is associative and commutative."""

    trials: int = 0
    maker_wins: int = 0
    rounds: int = 0
    failures: int = 0
    dead: int = 0
    stalled: int = 0
    certified: int = 0
    reasons: Counter = field(default_factory=Counter)
    digest: int = 0
    records: List[Tuple[int, TrialRecord]] = field(default_factory=list)

    def add(self, index: int, rec: TrialRecord) -> None:
        self.trials += 1
        self.maker_wins += rec.winner is Winner.MAKER
        self.rounds += rec.rounds_used
        self.failures += rec.maker_failures
        self.dead += rec.dead_position
        self.stalled += rec.stalled
        self.certified += bool(rec.certified)
        self.reasons[rec.reason.value] += 1
        h = hashlib.blake2b(f"{index}:{rec.reason.value}:{rec.rounds_used}:{rec.digest}".encode(),
                            digest_size=16).digest()
        self.digest = (self.digest + int.from_bytes(h, "big")) % (1 << 128)

    def merge(self, other: "Partial") -> None:
        self.trials += other.trials
        self.maker_wins += other.maker_wins
        self.rounds += other.rounds
        self.failures += other.failures
        self.dead += other.dead
        self.stalled += other.stalled
        self.certified += other.certified
        self.reasons.update(other.reasons)
        self.digest = (self.digest + other.digest) % (1 << 128)
        self.records.extend(other.records)


@dataclass
class AggregateStats:
    trials: int
    maker_wins: int
    maker_frequency: float
    wilson_low: float
    wilson_high: float
    z: float
    mean_rounds: float
    mean_failures: float
    reasons: Dict[str, int]
    dead_positions: int
    stall_caps: int
    certified_wins: int
    digest: str

    @classmethod
    def from_partial(cls, p: Partial, z: float = Z_95) -> "AggregateStats":
        lo, hi = wilson_interval(p.maker_wins, p.trials, z)
        reasons = {r.value: p.reasons.get(r.value, 0) for r in Reason}
        return cls(p.trials, p.maker_wins, p.maker_wins / p.trials, lo, hi, z,
                   p.rounds / p.trials, p.failures / p.trials, reasons, p.dead, p.stalled,
                   p.certified, f"{p.digest:032x}")

    def to_json(self) -> dict:
        return {"trials": self.trials, "maker_wins": self.maker_wins,
                "frequency": self.maker_frequency, "wilson": [self.wilson_low, self.wilson_high],
                "z": self.z, "mean_rounds": self.mean_rounds, "mean_failures": self.mean_failures,
                "reasons": self.reasons, "dead_positions": self.dead_positions,
                "stall_caps": self.stall_caps, "certified_wins": self.certified_wins,
                "digest": self.digest}


@dataclass
class RunResult:
    config: GameConfig
    maker: str
    breaker: str
    master_seed: int
    stats: AggregateStats
    records: List[TrialRecord]


def play_trial(config: GameConfig, maker: str, breaker: str, index: int, master_seed: int,
               overrides: Optional[Dict[str, str]] = None, transcript: bool = True,
               keep_edges: bool = False) -> TrialRecord:
    seed = mix_seed(master_seed, index)
    cfg = replace(config, seed=seed)
    try:
        game = Game(cfg, make_maker(maker, cfg, overrides), make_breaker(breaker, cfg),
                    record=transcript, keep_edges=keep_edges or index < RESERVOIR)
        return game.play(SeededSource(seed))
    except Exception as exc:  # noqa: BLE001 - re-raised with replay info
        raise TrialError(f"trial {index} (seed {seed}) failed: {exc!r}") from exc


def _run_block(args) -> Partial:
    config, maker, breaker, start, stop, master_seed, overrides, keep_all, keep_edges = args
    part = Partial()
    for i in range(start, stop):
        rec = play_trial(config, maker, breaker, i, master_seed, overrides, keep_edges=keep_edges)
        part.add(i, rec)
        if i < RESERVOIR:
            part.records.append((i, rec))
        elif keep_all:
            rec.transcript = None
            part.records.append((i, rec))
        else:
            rec.transcript = None
    return part


def _blocks(trials: int, workers: int) -> List[Tuple[int, int]]:
    size = max(1, min(2000, -(-trials // (workers * 8))))
    return [(s, min(trials, s + size)) for s in range(0, trials, size)]


def default_workers() -> int:
    raw = os.environ.get("PHANTOM_WORKERS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_trials(config: GameConfig, maker: str, breaker: str, trials: int, master_seed: int = 0,
               workers: Optional[int] = None, keep_records: bool = False,
               overrides: Optional[Dict[str, str]] = None, z: float = Z_95,
               keep_edges: bool = False) -> RunResult:
    """Play ``trials`` independent games and aggregate them.

    The first ``RESERVOIR`` records always keep their transcripts.  Other
    records are returned only with ``keep_records``, without transcripts.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    workers = default_workers() if workers is None else max(1, workers)
    # fail fast on unknown names before spawning anything
    make_maker(maker, config, overrides)
    make_breaker(breaker, config)
    tasks = [(config, maker, breaker, s, e, master_seed, overrides, keep_records, keep_edges)
             for s, e in _blocks(trials, workers)]
    total = Partial()
    if workers == 1:
        for t in tasks:
            total.merge(_run_block(t))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_run_block, tasks):
                total.merge(part)
    records = [rec for _, rec in sorted(total.records, key=lambda p: p[0])]
    return RunResult(config, maker, breaker, master_seed,
                     AggregateStats.from_partial(total, z), records)


# ---------------------------------------------------------------------------
# output


def dump_json(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with floats pinned to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return "true" if obj is True else "false" if obj is False else "null"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            raise ValueError("non-finite float")
        text = format(obj, ".17g")
        return text if any(c in text for c in ".en") else text + ".0"
    if isinstance(obj, str):
        import json
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{dump_json(str(k))}: {dump_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in obj):
            return "[" + ", ".join(dump_json(x) for x in obj) + "]"
        items = [pad + dump_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def result_json(result: RunResult, include_records: bool = False, extra: Optional[dict] = None) -> dict:
    cfg = dict(result.config.as_dict())
    cfg.pop("seed")
    cfg.update({"maker": result.maker, "breaker": result.breaker, "seed": result.master_seed})
    if extra:
        cfg.update(extra)
    out = {"config": cfg, "stats": result.stats.to_json()}
    if include_records:
        out["records"] = [r.to_json() for r in result.records]
    return out


# ---------------------------------------------------------------------------
# sweeps

CSV_COLUMNS = ["game", "n", "a", "b", "k", "maker", "breaker", "trials", "maker_wins",
               "frequency", "wilson_lo", "wilson_hi", "mean_rounds"]


@dataclass
class SweepSpec:
    games: Sequence[GameKind]
    ns: Sequence[int]
    a_values: Sequence[int]
    b_values: Sequence[int]
    k_values: Sequence[int] = (1,)
    pairs: Sequence[Tuple[str, str]] = (("random", "random"),)
    trials: int = 100
    master_seed: int = 0
    budget: int = DEFAULT_BUDGET
    overrides: Optional[Dict[str, str]] = None

    def cells(self) -> List[Tuple[GameKind, int, int, int, int, str, str]]:
        grids = [self.games, self.ns, self.a_values, self.b_values, self.k_values, self.pairs]
        if any(len(g) == 0 for g in grids):
            raise ValueError("every sweep grid must be nonempty")
        return [(g, n, a, b, k, m, br) for g, n, a, b, k, (m, br)
                in itertools.product(*grids)]


def _fmt(x) -> str:
    return format(x, ".17g") if isinstance(x, float) else str(x)


def cell_row(game: GameKind, n, a, b, k, maker, breaker, stats: AggregateStats) -> List[str]:
    return [game.value, str(n), str(a), str(b), str(k), maker, breaker, str(stats.trials),
            str(stats.maker_wins), _fmt(stats.maker_frequency), _fmt(stats.wilson_low),
            _fmt(stats.wilson_high), _fmt(stats.mean_rounds)]


def _done_cells(path: str) -> set:
    if not path or not os.path.exists(path):
        return set()
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != CSV_COLUMNS:
        return set()
    return {tuple(r[:7]) for r in rows[1:] if len(r) == len(CSV_COLUMNS)}


def run_sweep(spec: SweepSpec, out_path: Optional[str] = None, workers: Optional[int] = None,
              stream=None) -> List[List[str]]:
    """Run every grid cell; rows are appended (and flushed) one cell at a time.

    With ``out_path``, cells already present in the file are skipped, so an
    interrupted sweep resumes where it stopped.
    """
    cells = spec.cells()
    if len(cells) * spec.trials > spec.budget:
        raise BudgetError(f"{len(cells)} cells x {spec.trials} trials exceeds budget {spec.budget}")
    configs = [GameConfig(n, a, b, g, k) for g, n, a, b, k, _, _ in cells]
    done = _done_cells(out_path) if out_path else set()
    fh = None
    if out_path:
        fresh = not done
        fh = open(out_path, "w" if fresh else "a", newline="")
        writer = csv.writer(fh, lineterminator="\n")
        if fresh:
            writer.writerow(CSV_COLUMNS)
            fh.flush()
    elif stream is not None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
    else:
        writer = None
    rows = []
    try:
        for cell, cfg in zip(cells, configs):
            g, n, a, b, k, maker, breaker = cell
            key = (g.value, str(n), str(a), str(b), str(k), maker, breaker)
            if key in done:
                continue
            res = run_trials(cfg, maker, breaker, spec.trials, spec.master_seed, workers,
                             overrides=spec.overrides)
            row = cell_row(g, n, a, b, k, maker, breaker, res.stats)
            rows.append(row)
            if writer is not None:
                writer.writerow(row)
                (fh or stream).flush()
    finally:
        if fh is not None:
            fh.close()
    return rows


def parse_grid(text: str) -> List[int]:
    """``"1,2,5"``, ``"1..6"`` or a mix such as ``"1..3,8"``."""
    out: List[int] = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            raise ValueError(f"empty item in grid {text!r}")
        if ".." in part:
            lo, hi = part.split("..", 1)
            lo_i, hi_i = int(lo), int(hi)
            if hi_i < lo_i:
                raise ValueError(f"empty range {part!r}")
            out.extend(range(lo_i, hi_i + 1))
        else:
            out.append(int(part))
    return out


def iter_records(result: RunResult) -> Iterable[TrialRecord]:
    return iter(result.records)

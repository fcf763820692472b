"""Command-line entry point: ``simulate``, ``sweep``, ``exact`` and ``verify``.

Exit codes: 0 success, 1 verification failure, 2 usage or config error,
3 resource refusal.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Dict, List, Optional

from .board import ConfigError, GameConfig, GameKind
from .experiment import (DEFAULT_BUDGET, BudgetError, SweepSpec, TrialError, default_workers,
                         dump_json, parse_grid, result_json, run_sweep, run_trials)
from .oracle import DEFAULT_TREE_CAP, InfeasibleError, exact_win_probability, fixture_record
from .registry import BREAKERS, MAKERS, UnknownStrategy

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_REFUSED = 0, 1, 2, 3

GAME_ALIASES = {
    "mindegree": GameKind.MIN_DEGREE, "min-degree": GameKind.MIN_DEGREE,
    "mindeg": GameKind.MIN_DEGREE,
    "connectivity": GameKind.CONNECTIVITY, "conn": GameKind.CONNECTIVITY,
    "perfectmatching": GameKind.PERFECT_MATCHING, "perfect-matching": GameKind.PERFECT_MATCHING,
    "pm": GameKind.PERFECT_MATCHING, "matching": GameKind.PERFECT_MATCHING,
    "hamiltonicity": GameKind.HAMILTONICITY, "hamilton": GameKind.HAMILTONICITY,
    "ham": GameKind.HAMILTONICITY,
}


class UsageError(Exception):
    pass


def parse_game(text: str) -> GameKind:
    try:
        return GAME_ALIASES[str(text).strip().lower()]
    except KeyError:
        raise UsageError(f"unknown game {text!r}; choose from {', '.join(sorted(GAME_ALIASES))}") from None


def read_config_file(path: str) -> Dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out: Dict[str, str] = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from None
    for num, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{num}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def merged(args: argparse.Namespace, name: str, default=None, required: bool = False):
    """Flag value if given, else the config file's, else ``default``."""
    val = getattr(args, name, None)
    if val is None:
        val = args.file_values.get(name)
    if val is None:
        if required:
            raise UsageError(f"missing required setting --{name.replace('_', '-')}")
        return default
    return val


def merged_int(args, name, default=None, required=False) -> Optional[int]:
    val = merged(args, name, default, required)
    if val is None:
        return None
    try:
        return int(val)
    except (TypeError, ValueError):
        raise UsageError(f"--{name.replace('_', '-')} expects an integer, got {val!r}") from None


def parse_params(items: Optional[List[str]], args) -> Optional[Dict[str, str]]:
    out: Dict[str, str] = {}
    for key, value in args.file_values.items():
        if key.startswith("param."):
            out[key[len("param."):]] = value
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"--param expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out or None


def registry_text() -> str:
    return f"makers: {', '.join(MAKERS)}\nbreakers: {', '.join(BREAKERS)}"


def build_config(args) -> GameConfig:
    game = parse_game(merged(args, "game", required=True))
    return GameConfig(merged_int(args, "n", required=True), merged_int(args, "a", required=True),
                      merged_int(args, "b", required=True), game, merged_int(args, "k", 1),
                      stall_cap=merged_int(args, "stall_cap"))


def write_text(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def workers_of(args) -> int:
    w = merged_int(args, "workers")
    return default_workers() if w is None else max(1, w)


# ---------------------------------------------------------------------------


def cmd_simulate(args) -> int:
    cfg = build_config(args)
    maker = merged(args, "maker", required=True)
    breaker = merged(args, "breaker", required=True)
    trials = merged_int(args, "trials", required=True)
    seed = merged_int(args, "seed", 0)
    if trials < 1:
        raise UsageError("--trials must be at least 1")
    overrides = parse_params(args.param, args)
    records = str(merged(args, "records", "false")).lower() in ("1", "true", "yes")
    res = run_trials(cfg, maker, breaker, trials, seed, workers_of(args),
                     keep_records=records, overrides=overrides)
    extra = {"trials": trials}
    if overrides:
        extra["params"] = overrides
    out = result_json(res, include_records=records, extra=extra)
    write_text(dump_json(out) + "\n", merged(args, "out"))
    return EXIT_OK


def _list(args, name: str, default: Optional[str] = None, required: bool = True) -> List[str]:
    raw = merged(args, name, default, required)
    items = [s.strip() for s in str(raw).split(",") if s.strip()]
    if not items:
        raise UsageError(f"--{name} is empty")
    return items


def cmd_sweep(args) -> int:
    def grid(name, default=None):
        raw = merged(args, name, default, required=default is None)
        try:
            return parse_grid(raw)
        except ValueError as exc:
            raise UsageError(f"bad --{name} grid: {exc}") from None

    games = [parse_game(g) for g in _list(args, "game")]
    makers = _list(args, "maker")
    breakers = _list(args, "breaker")
    spec = SweepSpec(games=games, ns=grid("n"), a_values=grid("a"), b_values=grid("b"),
                     k_values=grid("k", "1"),
                     pairs=[(m, b) for m in makers for b in breakers],
                     trials=merged_int(args, "trials", required=True),
                     master_seed=merged_int(args, "seed", 0),
                     budget=merged_int(args, "budget", DEFAULT_BUDGET),
                     overrides=parse_params(args.param, args))
    if spec.trials < 1:
        raise UsageError("--trials must be at least 1")
    for m, b in spec.pairs:
        if m not in MAKERS or b not in BREAKERS:
            raise UnknownStrategy(f"unknown strategy pair {m}/{b}")
    out = merged(args, "out")
    run_sweep(spec, out_path=out, workers=workers_of(args),
              stream=None if out else sys.stdout)
    return EXIT_OK


def _update_fixture_file(path: str, rec: dict) -> None:
    key = tuple(rec[f] for f in ("game", "n", "a", "b", "k", "maker", "breaker"))
    lines = []
    if os.path.exists(path):
        with open(path) as fh:
            for line in fh:
                if not line.strip():
                    continue
                old = json.loads(line)
                if tuple(old.get(f) for f in ("game", "n", "a", "b", "k", "maker", "breaker")) != key:
                    lines.append(line.rstrip("\n"))
    lines.append(json.dumps(rec))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def cmd_exact(args) -> int:
    cfg = build_config(args)
    maker = merged(args, "maker", "random")
    breaker = merged(args, "breaker", "random")
    cap = float(merged(args, "tree_cap", DEFAULT_TREE_CAP))
    res = exact_win_probability(cfg, maker, breaker, parse_params(args.param, args),
                                memo=not args.no_memo, tree_cap=cap)
    p: Fraction = res.probability
    print(f"{p.numerator}/{p.denominator}")
    print(format(float(p), ".17g"))
    fixture = merged(args, "fixture_file")
    if fixture:
        _update_fixture_file(fixture, fixture_record(cfg, maker, breaker, p))
    return EXIT_OK


def cmd_verify(args) -> int:
    from .acceptance import SCALES, run_checks

    scale = merged(args, "scale", "quick")
    if scale not in SCALES:
        raise UsageError(f"unknown scale {scale!r}; choose from {', '.join(SCALES)}")
    only = None
    if args.only:
        try:
            only = parse_grid(args.only)
        except ValueError as exc:
            raise UsageError(f"bad --only: {exc}") from None
    try:
        results = run_checks(scale, only, workers_of(args), out=sys.stdout)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} checks passed")
    return EXIT_OK if passed == len(results) else EXIT_VERIFY


# ---------------------------------------------------------------------------


def _game_flags(p: argparse.ArgumentParser, grids: bool = False) -> None:
    kind = str
    p.add_argument("--game", type=kind, help="mindegree, connectivity, pm or hamiltonicity"
                   + (" (comma list)" if grids else ""))
    for name, helptext in (("n", "board size"), ("a", "Maker bias"), ("b", "Breaker bias"),
                           ("k", "min-degree target (default 1)")):
        p.add_argument(f"--{name}", type=kind, help=helptext + (" (grid: 1,2,5 or 1..6)" if grids else ""))
    p.add_argument("--maker", help="Maker strategy" + (" (comma list)" if grids else ""))
    p.add_argument("--breaker", help="Breaker strategy" + (" (comma list)" if grids else ""))
    p.add_argument("--param", action="append", metavar="KEY=VALUE",
                   help="override a strategy parameter (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phantomgames",
                                     description="Biased Maker-PhantomBreaker games on K_n.")
    parser.add_argument("--config", help="key = value file; command-line flags take precedence")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="Monte Carlo trials for one configuration")
    _game_flags(sim)
    sim.add_argument("--stall-cap", dest="stall_cap")
    sim.add_argument("--trials")
    sim.add_argument("--seed")
    sim.add_argument("--workers", help="worker processes (default $PHANTOM_WORKERS or 1)")
    sim.add_argument("--out", help="write JSON here instead of stdout")
    sim.add_argument("--records", action="store_true", default=None,
                     help="include per-trial records")

    sw = sub.add_parser("sweep", help="grid of configurations, one CSV row per cell")
    _game_flags(sw, grids=True)
    sw.add_argument("--trials")
    sw.add_argument("--seed")
    sw.add_argument("--workers")
    sw.add_argument("--budget", help=f"maximum cells x trials (default {DEFAULT_BUDGET})")
    sw.add_argument("--out", help="CSV file; existing rows are kept and their cells skipped")

    ex = sub.add_parser("exact", help="exact Maker win probability on a small board")
    _game_flags(ex)
    ex.add_argument("--stall-cap", dest="stall_cap")
    ex.add_argument("--tree-cap", dest="tree_cap", help="refuse above this estimated tree size")
    ex.add_argument("--no-memo", action="store_true", help="disable the position cache")
    ex.add_argument("--fixture-file", dest="fixture_file",
                    help="add or replace this configuration's line in a JSONL fixture file")

    ver = sub.add_parser("verify", help="run the acceptance checks")
    ver.add_argument("--scale", help="quick or full (default quick)")
    ver.add_argument("--only", help="check numbers, e.g. 2,9 or 1..3")
    ver.add_argument("--workers")
    return parser


COMMANDS = {"simulate": cmd_simulate, "sweep": cmd_sweep, "exact": cmd_exact, "verify": cmd_verify}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.file_values = read_config_file(args.config) if args.config else {}
        return COMMANDS[args.command](args)
    except UnknownStrategy as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        print(registry_text(), file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ConfigError, KeyError, ValueError) as exc:
        msg = exc.args[0] if exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except (BudgetError, InfeasibleError) as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except TrialError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())

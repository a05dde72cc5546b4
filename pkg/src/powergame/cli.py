"""Command-line front end.

Subcommands:

* ``solve``          one game config -> equilibrium JSON
* ``sweep``          experiment spec -> CSV of utilities per sweep point
* ``mc``             simulate the equilibrium policy -> estimate CSV
* ``dump-dynamics``  transition matrix / payoff vectors as a text dump

Exit codes: 0 on success, 1 on file or input problems, 2 on usage errors.
The ``GAME_LOG`` environment variable (error, info, debug) controls
diagnostic verbosity on standard error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from contextlib import nullcontext
from dataclasses import replace

from .dynamics import build_W, build_Z, dump_dynamics
from .equilibrium import compute_mpe, equilibrium_to_dict
from .experiment import load_experiment, run_experiment
from .mc import estimate_utilities
from .model import ConfigFormatError, InvalidConfigError, load_config
from .solver import DEFAULT_TOL, NonConvergenceError
from .statespace import ExactSpace, MalformedStateError, build_space

log = logging.getLogger("powergame.cli")

_LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}


def _setup_logging() -> None:
    raw = os.environ.get("GAME_LOG", "error").strip().lower()
    level = _LOG_LEVELS.get(raw)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.ERROR if level is None else level,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if level is None and raw:
        log.error("GAME_LOG=%r not recognized (use error, info or debug)", raw)


def _out_stream(path: str | None):
    if path is None:
        return nullcontext(sys.stdout)
    return open(path, "w", encoding="utf-8", newline="\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="powergame",
        description="Equilibrium solver and simulator for power-investment games",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True, help="input JSON path")
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--mode", choices=("auto", "exact", "reduced"), default="auto",
                       help="state-space mode")

    p_solve = sub.add_parser("solve", help="compute the equilibrium for one config")
    add_common(p_solve)
    p_solve.add_argument("--method", choices=("auto", "iterative", "direct"),
                         default="auto", help="utility solver")
    p_solve.add_argument("--tol", type=float, default=DEFAULT_TOL,
                         help="residual target for the iterative solver")

    p_sweep = sub.add_parser("sweep", help="run an experiment spec to CSV")
    p_sweep.add_argument("--config", required=True, help="experiment spec JSON path")
    p_sweep.add_argument("--out", default=None,
                         help="CSV path (default: the spec's 'out', else stdout)")
    p_sweep.add_argument("--seed", type=int, default=None, help="override spec seed")
    p_sweep.add_argument("--episodes", type=int, default=None,
                         help="override spec mc_episodes")

    p_mc = sub.add_parser("mc", help="Monte Carlo estimate under the equilibrium policy")
    add_common(p_mc)
    p_mc.add_argument("--episodes", type=int, default=10_000)
    p_mc.add_argument("--seed", type=int, default=0)
    p_mc.add_argument("--initial", type=int, default=None,
                      help="initial state ordinal (default: everyone present)")

    p_dump = sub.add_parser("dump-dynamics",
                            help="dump the transition matrix and payoff vectors")
    add_common(p_dump)

    return parser


def _cmd_solve(args) -> int:
    config = load_config(args.config)
    space = build_space(config, args.mode)
    result = compute_mpe(config, space, method=args.method, tol=args.tol)
    doc = equilibrium_to_dict(result, config, space)
    with _out_stream(args.out) as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def _cmd_sweep(args) -> int:
    spec = load_experiment(args.config)
    if args.seed is not None:
        spec = replace(spec, seed=args.seed)
    if args.episodes is not None:
        spec = replace(spec, mc_episodes=args.episodes)
    result = run_experiment(spec)
    out = args.out if args.out is not None else spec.out
    if out is None:
        sys.stdout.write(result.to_csv())
    else:
        result.write_csv(out)
        log.info("wrote %d rows to %s", len(result.rows), out)
    return 0


def _cmd_mc(args) -> int:
    config = load_config(args.config)
    space = build_space(config, args.mode)
    result = compute_mpe(config, space, method="auto")
    initial = args.initial if args.initial is not None else space.size - 1
    est = estimate_utilities(config, space, result.policy, initial,
                             args.episodes, args.seed)
    with _out_stream(args.out) as fh:
        fh.write("player,mean,std_error,n_episodes,seed\n")
        for pos, i in enumerate(est.players):
            pid = config.players[i].id if isinstance(space, ExactSpace) else "focal"
            fh.write(f"{pid},{est.mean[pos]:.17g},{est.std_error[pos]:.17g},"
                     f"{est.n_episodes},{est.seed}\n")
    return 0


def _cmd_dump(args) -> int:
    config = load_config(args.config)
    space = build_space(config, args.mode)
    result = compute_mpe(config, space, method="auto")
    w = build_W(config, result.policy, space)
    players = range(config.n_players) if isinstance(space, ExactSpace) else (0,)
    zs = {i: build_Z(config, result.policy, space, i) for i in players}
    with _out_stream(args.out) as fh:
        dump_dynamics(w, zs, fh)
    return 0


_COMMANDS = {
    "solve": _cmd_solve,
    "sweep": _cmd_sweep,
    "mc": _cmd_mc,
    "dump-dynamics": _cmd_dump,
}


def cli_main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse handles usage/help text itself
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (OSError, json.JSONDecodeError, ConfigFormatError, InvalidConfigError,
            MalformedStateError, NonConvergenceError, ValueError) as exc:
        print(f"powergame: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())

import argparse
import logging
import pathlib
import sys
from typing import Optional, Sequence

import toml

from prefgame import VERSION, loggers
from prefgame.core.errors import BaseError, ConfigurationError, GameFileError
from prefgame.core.storage import load_game, load_structured_file, save_game
from prefgame.core.validation import validate_game
from prefgame.data.config import Algorithm, ExperimentConfig, SolverConfig
from prefgame.envs import GENERATORS, generate
from prefgame.experiment import run_experiment
from prefgame.metrics import nash_gap
from prefgame.solvers.runner import run_solver

l = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

PRESETS_DIR = pathlib.Path(__file__).parent / "presets"


def preset_path(name: str) -> pathlib.Path:
    path = PRESETS_DIR / f"{name}.toml"
    if not path.exists():
        known = ", ".join(sorted(p.stem for p in PRESETS_DIR.glob("*.toml")))
        raise ConfigurationError("preset", f"unknown preset {name!r}, expected one of {known}")
    return path


def load_experiment(path) -> ExperimentConfig:
    return ExperimentConfig.load(load_structured_file(path))


def parse_param(text: str):
    """
    key=value with the value read as a TOML value, or kept as a string when it is not one.
    """
    if "=" not in text:
        raise ConfigurationError(text, "parameters are given as key=value")
    key, raw = text.split("=", 1)
    try:
        value = toml.loads(f"v = {raw}")["v"]
    except (ValueError, IndexError, TypeError):
        value = raw
    return key.strip(), value


#
# Commands
#

def cmd_run(args) -> int:
    path = preset_path(args.preset) if args.preset else pathlib.Path(args.config)
    config = load_experiment(path)
    rows = run_experiment(config, out_dir=args.out)
    out = args.out if args.out is not None else config.output_dir
    print(f"wrote {len(rows)} rows to {pathlib.Path(out) / 'results.csv'}")
    return EXIT_OK


def _policy_table(policy):
    return [[[round(float(p), 10) for p in row] for row in stage] for stage in policy.probs]


def cmd_solve(args) -> int:
    game = load_game(args.game)
    config = SolverConfig(
        algorithm=args.algorithm, beta=args.beta, iterations=args.iterations,
        eval_every=max(1, args.iterations), seed=args.seed
    )
    trace = run_solver(game, config)
    gap_max, gap_min = nash_gap(game, trace.averaged_policy)
    final = trace.final_record
    report = {
        "game": game.summary(),
        "algorithm": config.algorithm,
        "beta": float(trace.beta),
        "iterations": config.iterations,
        "last_iterate_exploitability": float(final.last_exploitability) if final else 0.0,
        "averaged_exploitability": float(final.averaged_exploitability) if final else 0.0,
        "nash_gap_max": gap_max,
        "nash_gap_min": gap_min,
        "averaged_policy": _policy_table(trace.averaged_policy),
        "last_policy": _policy_table(trace.last_policy),
    }
    sys.stdout.write(toml.dumps(report))
    return EXIT_OK


def cmd_validate(args) -> int:
    game = load_game(args.game)
    violations = validate_game(game)
    if not violations:
        print("OK")
        return EXIT_OK

    for v in violations:
        print(v)
    return EXIT_FAILURE


def cmd_gen(args) -> int:
    params = dict(parse_param(p) for p in args.param)
    game = generate(args.generator, seed=args.seed, prefix="gen", **params)
    save_game(game, args.out)
    print(f"wrote {game.summary()} to {args.out}")
    return EXIT_OK


#
# Entry
#

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prefgame", description="Tabular equilibrium solvers for two-player preference Markov games"
    )
    parser.add_argument("--version", action="version", version=f"prefgame {VERSION}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log debug messages")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment config and write results.csv and summary.csv")
    run.add_argument("config", nargs="?", help="experiment config (TOML, or JSON by suffix)")
    run.add_argument("--preset", help="use a bundled config, e.g. fig3a")
    run.add_argument("--out", help="output directory overriding the config")
    run.set_defaults(func=cmd_run)

    solve = sub.add_parser("solve", help="solve a game file and print the policies")
    solve.add_argument("game")
    solve.add_argument("--algorithm", default=Algorithm.OMPO_EXACT, choices=Algorithm.ALL)
    solve.add_argument("--beta", type=float, default=None)
    solve.add_argument("--iterations", type=int, default=500)
    solve.add_argument("--seed", type=int, default=0)
    solve.set_defaults(func=cmd_solve)

    validate = sub.add_parser("validate", help="check a game file")
    validate.add_argument("game")
    validate.set_defaults(func=cmd_validate)

    gen = sub.add_parser("gen", help="write a generated game to a file")
    gen.add_argument("generator", choices=sorted(GENERATORS))
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.add_argument("--param", action="append", default=[], help="generator parameter as key=value")
    gen.set_defaults(func=cmd_gen)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        loggers.set_level(logging.DEBUG)

    if args.command == "run" and bool(args.config) == bool(args.preset):
        parser.error("run needs exactly one of a config path or --preset")

    try:
        return args.func(args)
    except (ConfigurationError, GameFileError) as e:
        l.error("%s", e)
        return EXIT_USAGE
    except BaseError as e:
        l.error("%s", e)
        return EXIT_FAILURE
    except Exception:
        l.exception("unexpected failure")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())

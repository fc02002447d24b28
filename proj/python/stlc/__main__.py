"""Command line front end that also accepts TOML configs.

    python -m stlc simulate --config scenario.toml --out out/
"""

import argparse
import json
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from . import run_command

EXIT_INPUT_ERROR = 2


def load_config(path):
    path = Path(path)
    try:
        if path.suffix == ".toml":
            with path.open("rb") as f:
                return tomllib.load(f)
        return json.loads(path.read_text())
    except OSError as e:
        raise ValueError(f"cannot read config {path}: {e.strerror}") from e
    except tomllib.TOMLDecodeError as e:
        raise ValueError(f"{path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ValueError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from e


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="scenario config (.toml or .json)")
    common.add_argument("--out", help="output directory, overrides output_dir")
    common.add_argument("--seed", type=int, help="overrides the config seed")
    common.add_argument("--threads", type=int, default=1)

    parser = argparse.ArgumentParser(prog="python -m stlc")
    sub = parser.add_subparsers(dest="command", required=True)
    sim = sub.add_parser("simulate", parents=[common])
    sim.add_argument("--dt-halve", action="store_true")
    moment = sub.add_parser("solve-moment", parents=[common])
    moment.add_argument("targets")
    control = sub.add_parser("control", parents=[common])
    control.add_argument("endpoints")
    control.add_argument("--mode", choices=["linear", "nonlinear"], default="linear")
    sub.add_parser("verify", parents=[common])
    sub.add_parser("sweep", parents=[common])
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else EXIT_INPUT_ERROR
    if args.seed is not None and args.seed < 0:
        print("error: --seed must be non-negative", file=sys.stderr)
        return EXIT_INPUT_ERROR
    try:
        config = load_config(args.config)
    except ValueError as e:
        print(f"error: ConfigError: {e}", file=sys.stderr)
        print("hint: fix the config syntax at the reported position", file=sys.stderr)
        return EXIT_INPUT_ERROR

    code, out, err = run_command(
        args.command,
        config,
        out_dir=args.out,
        seed=args.seed,
        threads=args.threads,
        dt_halve=getattr(args, "dt_halve", False),
        targets=getattr(args, "targets", ""),
        endpoints=getattr(args, "endpoints", ""),
        mode=getattr(args, "mode", "linear"),
    )
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())

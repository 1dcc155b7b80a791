"""Command-line entry point: ``vlasov-memory <study> --config C --out D --seed S``.

Exit status 0 when every check passes, 1 on a failed numerical check and 2
on an invalid configuration.
"""

import argparse
import sys
from pathlib import Path

from .config import ConfigError, load_config, parse_config
from .studies import STUDIES

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2


def _u64(text):
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 unsigned bits, got {value}")
    return value


def build_parser():
    parser = argparse.ArgumentParser(prog="vlasov-memory", description="Run one numerical study and write summary.json plus CSV files.")
    sub = parser.add_subparsers(dest="study", required=True)
    for name, fn in STUDIES.items():
        p = sub.add_parser(name, help=(fn.__doc__ or name).splitlines()[0])
        p.add_argument("--config", type=Path, help="JSON configuration (defaults to the bundled one)")
        p.add_argument("--out", type=Path, required=True, help="output directory")
        p.add_argument("--seed", type=_u64, default=None, help="overrides the seed of the configuration")
    return parser


def default_config_path(study):
    return Path(__file__).with_name("configs") / f"{study}.json"


def run(study, config=None, out=".", seed=None):
    """Run one study; returns the Summary. Raises ConfigError on bad input."""
    cfg = load_config(config if config is not None else default_config_path(study), seed)
    return STUDIES[study](cfg, out)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        summary = run(args.study, args.config, args.out, args.seed)
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for c in summary.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.value} {c.comparison} {c.tolerance}")
    print(f"{args.study}: {'passed' if summary.passed else 'FAILED'} -> {Path(args.out) / 'summary.json'}")
    return EXIT_OK if summary.passed else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())

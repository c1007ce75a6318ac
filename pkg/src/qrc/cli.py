"""Command-line entry point: ``qrc <experiment> --config PATH [options] [key=value ...]``.

Exit status is 0 on success, 2 for invalid input and 3 for numerical
failures (divergence or truncation in strict mode, integrator breakdown).
"""
from __future__ import annotations

import argparse
import sys

from .config import EXPERIMENTS, build_config, load_config_file
from .errors import NumericalError, QRCWarning, ValidationError
from .experiments import run_experiment, write_outputs

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qrc", description="Run a quantum reservoir experiment.")
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", required=True, metavar="PATH",
                   help="flat 'key = value' file; '#' starts a comment")
    p.add_argument("--seed", type=int, help="dataset seed")
    p.add_argument("--out", metavar="DIR", help="output directory (default: current)")
    p.add_argument("--strict", action="store_true", default=None,
                   help="turn truncation, trace-drift and divergence warnings into failures")
    p.add_argument("--reset-state", action="store_true", default=None,
                   help="restart the reservoir from vacuum before the test segment")
    p.add_argument("overrides", nargs="*", metavar="key=value")
    return p


def _collect_overrides(args) -> dict:
    out = {}
    for item in args.overrides:
        if "=" not in item:
            raise ValidationError(f"override {item!r} is not of the form key=value")
        key, value = item.split("=", 1)
        out[key] = value
    for key in ("seed", "out", "strict", "reset_state"):
        value = getattr(args, key)
        if value is not None:
            out[key] = value
    return out


def main(argv=None) -> int:
    args = _parser().parse_intermixed_args(argv)
    try:
        cfg = build_config(args.experiment, load_config_file(args.config),
                           _collect_overrides(args))
        result = run_experiment(cfg)
        csv_path, json_path = write_outputs(result, cfg.out)
    except ValidationError as exc:
        print(f"qrc: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NumericalError, QRCWarning) as exc:
        print(f"qrc: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"qrc: cannot write output: {exc}", file=sys.stderr)
        return EXIT_INVALID
    for w in result.summary.warnings:
        print(f"qrc: warning: {w}", file=sys.stderr)
    print(f"wrote {csv_path} and {json_path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""Command line front end: ``dkt <job> [options]``.

Exit codes: 0 success, 2 configuration error, 3 tolerance breach in
``validate``, 4 resource exhaustion.
"""

import argparse
import json
import sys

from .sweeps import (SweepConfig, ConfigError, execute_sweep, write_outputs,
                     JOBS, MEASURES)
from .spin import DimensionLimitError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VALIDATE = 3
EXIT_RESOURCE = 4


def _parse_range(text):
    try:
        lo, hi, count = text.split(":")
        return float(lo), float(hi), int(count)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"range must be lo:hi:count, got {text!r}")


def _parse_state(text):
    try:
        th, ph = text.split(",")
        return float(th), float(ph)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"state must be theta,phi in radians, got {text!r}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dkt",
        description="Double kicked top sweeps: classical chaos maps, "
                    "quantum correlation maps and oracle validation.",
    )
    sub = parser.add_subparsers(dest="job", required=True, metavar="JOB",
                                help=f"one of: {', '.join(JOBS)}")
    for job in JOBS:
        p = sub.add_parser(job)
        kk = p.add_argument_group("kick strengths")
        kk.add_argument("--k", type=float, help="z-torsion strength")
        kk.add_argument("--kprime", type=float, help="x-torsion strength")
        kk.add_argument("--kr", type=float, help="(k + k')/2")
        kk.add_argument("--ktheta", type=float, help="(k - k')/2")
        p.add_argument("--kr-range", type=_parse_range, metavar="LO:HI:N",
                       help="sweep k_r over N evenly spaced values")
        p.add_argument("--ktheta-range", type=_parse_range, metavar="LO:HI:N",
                       help="sweep k_theta over N evenly spaced values")
        p.add_argument("--j", type=float, help="spin quantum number (half-integers allowed)")
        p.add_argument("--grid", type=int, help="grid size per axis")
        p.add_argument("--kicks", type=int, help="kicks per trajectory/state")
        p.add_argument("--state", type=_parse_state, metavar="THETA,PHI",
                       help="initial coherent state angles")
        p.add_argument("--measure", choices=MEASURES,
                       help="correlation measure for quantum maps")
        p.add_argument("--out", help="output path prefix (.csv/.json[/.png])")
        p.add_argument("--png", action="store_true",
                       help="also render an advisory heatmap")
        p.add_argument("--workers", type=int,
                       help="parallel workers (env DKT_WORKERS overrides)")
        p.add_argument("--config", metavar="FILE",
                       help="JSON file with the same keys as the flags")
    return parser


_FLAG_KEYS = ("k", "kprime", "kr", "ktheta", "kr_range", "ktheta_range", "j",
              "grid", "kicks", "state", "measure", "out", "png", "workers")

_RENAME = {"kprime": "k_prime", "kr": "k_r", "ktheta": "k_theta"}


def parse_config(argv=None):
    """Flags (plus optional --config file) -> validated SweepConfig."""
    args = build_parser().parse_args(argv)
    merged = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {args.config}: {exc}")
        if not isinstance(doc, dict):
            raise ConfigError(f"config file {args.config} must hold a JSON object")
        for key, val in doc.items():
            norm = key.replace("-", "_")
            if norm not in _FLAG_KEYS:
                raise ConfigError(
                    f"unknown key {key!r} in {args.config}; "
                    f"valid: {', '.join(sorted(_FLAG_KEYS))}")
            if norm in ("kr_range", "ktheta_range", "state") and val is not None:
                val = tuple(val)
            merged[norm] = val
    for key in _FLAG_KEYS:
        val = getattr(args, key, None)
        if val is not None and val is not False:
            merged[key] = val
    merged = {_RENAME.get(k, k): v for k, v in merged.items()}
    return SweepConfig(job=args.job, **merged)


def main(argv=None) -> int:
    try:
        config = parse_config(argv)
    except ConfigError as exc:
        print(f"dkt: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        result = execute_sweep(config)
    except DimensionLimitError as exc:
        print(f"dkt: resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ConfigError as exc:
        print(f"dkt: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if config.job == "validate":
        for name, status, err, tol in result.rows:
            print(f"{status:>4}  {name}  (max err {err:.3e}, tol {tol:.0e})")
        if result.failures:
            print(f"dkt: validate: {result.failures} check(s) failed",
                  file=sys.stderr)
            return EXIT_VALIDATE
        if config.out:
            write_outputs(result, config.out, png=False)
        return EXIT_OK

    if config.out:
        files = write_outputs(result, config.out, png=config.png)
        print("wrote " + " ".join(files))
    else:
        for key, val in result.manifest.items():
            if key != "config":
                print(f"# {key}: {val}")
        limit = 20
        print(",".join(result.header))
        for row in result.rows[:limit]:
            print(",".join(str(c) for c in row))
        if len(result.rows) > limit:
            print(f"... ({len(result.rows)} rows total; use --out to save)")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""Command line entry point.

Exit codes: 0 success, 2 configuration problems, 3 sizing guard,
4 validation or fit failures at run time.

CSV columns by file:
    sweep.csv                t, E, bound, argmax_theta, argmax_phi
    bound_check.csv          t, E, bound, stab_bound, ok
    threshold.csv            coupling_bound, x0, threshold_time
    single_flip.csv          t, E
    pair_flip.csv            t, E
    fit_summary.csv          scenario, exponent, log_coefficient,
                             window_min, window_max, residual
    periodic_<i>_<tag>.csv   cycle, total_t, fidelity   (tag: on | off)
    rates.csv                dt, corrected, rate
    bounds.csv               n, k, hamming_ok, gv_ok

Floats are %.16e, line endings LF; manifest.json lists a sha256 per file.
"""

from __future__ import annotations

import argparse
import sys

from .codes import asymptotic_x0, hamming_gv_check
from .errors import ConfigError, FitError, ShapeError, SizingError, ValidationError
from .runner import run
from .scenario import load_scenario


def _cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    manifest = run(
        scenario,
        out_dir=args.out,
        seed=args.seed,
        workers=args.workers,
        plots=False if args.no_svg else None,
    )
    print(f"wrote {len(manifest.files)} files to {args.out or scenario.out} (seed {manifest.seed})")
    for warning in manifest.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return 0


def _cmd_bounds(args) -> int:
    print("n,k,hamming_ok,gv_ok")
    for n in range(1, args.n_max + 1):
        for k in range(0, min(args.k_max, n) + 1):
            row = hamming_gv_check(n, k)
            print(f"{row.n},{row.k},{'true' if row.hamming_ok else 'false'},{'true' if row.gv_ok else 'false'}")
    return 0


def _cmd_x0(args) -> int:
    print(f"{asymptotic_x0():.17g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="decoq", description="desk-scale decoherence and recovery experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a scenario file")
    p_run.add_argument("scenario", help="path to a scenario config")
    p_run.add_argument("--out", default=None, help="output directory (overrides the scenario)")
    p_run.add_argument("--seed", type=int, default=None, help="seed override")
    p_run.add_argument("--workers", type=int, default=1, help="process count for sweep points")
    p_run.add_argument("--no-svg", action="store_true", help="skip plot emission")
    p_run.set_defaults(func=_cmd_run)

    p_bounds = sub.add_parser("bounds", help="print the packing and covering feasibility table")
    p_bounds.add_argument("--k-max", type=int, default=3)
    p_bounds.add_argument("--n-max", type=int, default=20)
    p_bounds.set_defaults(func=_cmd_bounds)

    p_x0 = sub.add_parser("x0", help="print the asymptotic rate constant")
    p_x0.set_defaults(func=_cmd_x0)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SizingError as exc:
        print(f"sizing error: {exc}", file=sys.stderr)
        return 3
    except (ValidationError, ShapeError, FitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main(argv=sys.argv[1:]))

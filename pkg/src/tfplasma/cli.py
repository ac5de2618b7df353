"""Command-line entry point: run, convergence, and inspect verbs.

Exit codes: 0 success, 2 configuration error, 3 admissibility or stiff-solve
failure.
"""

import argparse
import sys

from .config import apply_overrides, parse_config, resolve_config, serialize_config
from .driver import convergence_study, inspect_snapshot, run
from .errors import (AdmissibilityError, ConfigError, RecoveryError,
                     StiffSolveError)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICS = 3


def _build_parser():
    ap = argparse.ArgumentParser(prog="tfplasma",
                                 description="Two-fluid relativistic plasma solver")
    sub = ap.add_subparsers(dest="verb", required=True)

    p_run = sub.add_parser("run", help="run a configured simulation")
    p_run.add_argument("--config", required=True, help="config file path")
    p_run.add_argument("--override", action="append", default=[],
                       metavar="KEY=VALUE", help="override a config key")
    p_run.add_argument("--paper-scale", action="store_true",
                       help="use the full published resolutions and end times")
    p_run.add_argument("--quiet", action="store_true")

    p_conv = sub.add_parser("convergence", help="resolution sweep on a smooth case")
    p_conv.add_argument("--case", required=True,
                        choices=("accuracy1d", "smooth2d"))
    p_conv.add_argument("--integrator", required=True,
                        choices=("explicit", "imex"))
    p_conv.add_argument("--cells", required=True,
                        help="comma-separated resolutions, e.g. 32,64,128")
    p_conv.add_argument("--t-end", type=float, default=None)

    p_ins = sub.add_parser("inspect", help="print a snapshot header and norms")
    p_ins.add_argument("--snapshot", required=True)
    return ap


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.verb == "run":
            cfg = parse_config(args.config)
            apply_overrides(cfg, args.override)
            if args.paper_scale:
                cfg.paper_scale = True
            rcfg = resolve_config(cfg)
            if not args.quiet:
                print(serialize_config(rcfg), end="")

            def progress(step, t, rep):
                if not args.quiet and step % 50 == 0:
                    print(f"step {step:6d}  t={t:.6f}  divB_L1={rep.divB_L1:.3e}")

            result = run(cfg, progress=progress)
            last = result.reports[-1] if result.reports else None
            print(f"done: {result.steps} steps to t={result.t:.6f}"
                  + (f", divB_L1={last.divB_L1:.3e}" if last else ""))
        elif args.verb == "convergence":
            cells = [int(c) for c in args.cells.split(",")]
            print("cells,L1_error,order")
            rows = convergence_study(args.case, args.integrator, cells,
                                     t_end=args.t_end)
            for n, err, order in rows:
                print(f"{n},{err:.6e},{'' if order != order else f'{order:.4f}'}")
        elif args.verb == "inspect":
            print(inspect_snapshot(args.snapshot))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (AdmissibilityError, RecoveryError, StiffSolveError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICS
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

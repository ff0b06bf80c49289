"""``pbx`` command line: run the diagnostic suites for one model.

Exit codes: 0 all suites pass, 1 some suite failed, 2 usage error,
3 numerical failure (report carries an error block), 4 output not writable.
"""

from __future__ import annotations

import argparse
import sys

from .report import SUITES, ConfigError, RunConfig, exit_code, run, write_report


def _suite_list(text: str):
    if text.strip() == "all":
        return SUITES
    names = tuple(s.strip() for s in text.split(",") if s.strip())
    if not names:
        raise argparse.ArgumentTypeError("empty suite list")
    return names


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pbx", description="Pseudo-boson diagnostics on a truncated Fock space.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dim", type=int, default=128, help="truncation dimension D (default 128)")
    common.add_argument("--nmax", type=int, default=16, help="largest family index (default 16)")
    common.add_argument("--tol", type=float, default=1e-8, help="base tolerance (default 1e-8)")
    common.add_argument("--suites", type=_suite_list, default=SUITES,
                        help="comma-separated subset of " + ",".join(SUITES) + ", or 'all'")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", help="JSON file or CSV directory (JSON defaults to stdout)")
    common.add_argument("--no-d-check", dest="d_check", action="store_false",
                        help="skip the rerun at twice the dimension")
    sub = parser.add_subparsers(dest="model", required=True)

    p = sub.add_parser("eqho", parents=[common], help="extended quantum harmonic oscillator")
    p.add_argument("--beta", type=float, required=True)
    p = sub.add_parser("swanson", parents=[common], help="Swanson model")
    p.add_argument("--theta", type=float, required=True, help="angle in (-pi/4, pi/4), radians")
    p = sub.add_parser("generalized", parents=[common], help="generalized squeezing pair")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta-g", dest="beta_g", type=float, required=True)
    return parser


def config_from_args(args) -> RunConfig:
    params = {
        "eqho": lambda: {"beta": args.beta},
        "swanson": lambda: {"theta": args.theta},
        "generalized": lambda: {"alpha": args.alpha, "beta_g": args.beta_g},
    }[args.model]()
    return RunConfig(model=args.model, params=params, D=args.dim, n_max=args.nmax, tol=args.tol,
                     suites=args.suites, output_path=args.output, format=args.format,
                     d_check=args.d_check)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        parser.print_usage(sys.stderr)
        print(f"pbx: error: {exc}", file=sys.stderr)
        return 2
    report = run(cfg)
    try:
        write_report(report, cfg.format, cfg.output_path, sys.stdout)
    except OSError as exc:
        print(f"pbx: cannot write report: {exc}", file=sys.stderr)
        return 4
    if report["error"] is not None:
        print(f"pbx: numerical failure: {report['error']['message']}", file=sys.stderr)
    return exit_code(report)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: ``dynheat {forward,reconstruct,refine,selftest}``."""
import argparse
import sys

from .config import ExperimentConfig, apply_example, load_config
from .experiments import build_setup, cmd_forward, cmd_reconstruct, cmd_refine
from .landweber import NOISE_MODES
from .selftest import format_matrix, run_suites


def _config(args):
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    if args.example is not None:
        cfg = apply_example(cfg, args.example)
    changes = {
        "mode": args.noise_mode,
        "seed": args.seed,
        "n_cells": args.n_cells,
        "n_steps": args.n_steps,
        "directory": args.out,
    }
    return cfg.replace(**{k: v for k, v in changes.items() if v is not None})


def _forward(cfg, args):
    for path in cmd_forward(cfg):
        print(path)
    return 0


def _reconstruct(cfg, args):
    _, traces = cmd_reconstruct(cfg, jobs=args.jobs)
    print(f"{'p':>6} {'stop':>6} {'reason':<10} {'J':>12} {'E':>12}")
    for p, trace in traces.items():
        last = trace.rows[-1]
        print(f"{p:>6g} {trace.stop_iteration:>6d} {trace.stop_reason:<10} {last.J:>12.4e} {last.E:>12.4e}")
    return 0


def _refine(cfg, args):
    report = cmd_refine(cfg)
    for name, entry in report.items():
        errs = " ".join(f"{e:.3e}" for e in entry["errors"])
        order = "n/a" if entry["order"] is None else f"{entry['order']:.3f}"
        print(f"{name:<18} order {order:>6}  errors {errs}")
    return 0


def _selftest(cfg, args):
    results = run_suites(build_setup(cfg))
    print(format_matrix(results))
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


COMMANDS = {"forward": _forward, "reconstruct": _reconstruct, "refine": _refine, "selftest": _selftest}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dynheat",
        description="Heat-source reconstruction for the 1-D heat equation with dynamic boundary conditions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="sectioned key-value experiment file")
        p.add_argument("--out", help="output directory (overrides [output] directory)")
        p.add_argument("--example", type=int, choices=(1, 2, 3), help="load a numerical-example preset")
        p.add_argument("--noise-mode", choices=NOISE_MODES)
        p.add_argument("--seed", type=int)
        p.add_argument("--n-cells", type=int)
        p.add_argument("--n-steps", type=int)
        if name == "reconstruct":
            p.add_argument("--jobs", type=int, default=1, help="worker processes across noise levels")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        return COMMANDS[args.command](cfg, args)
    except (ValueError, OSError, ArithmeticError) as exc:
        print(f"dynheat {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

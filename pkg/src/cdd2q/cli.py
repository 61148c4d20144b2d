"""Command-line front end: ``run``, ``list``, ``verify-decoupling``, ``check-gate``."""
import argparse
import sys

from .engine import IntegrationError
from .experiments import (UsageError, check_gate, list_scenarios, load_config_file,
                          parse_assignments, residual_table, resolve_params, run_scenario)

_LABELS = "IXYZ"


def _cmd_run(args):
    overrides = load_config_file(args.config) if args.config else {}
    overrides.update(parse_assignments(args.set or []))
    name = args.scenario or overrides.pop("scenario", None)
    overrides.pop("scenario", None)
    if name is None:
        raise UsageError("no scenario given (use --scenario or a 'scenario' key in --config)")
    out = args.out or overrides.pop("out", None)
    if out is None:
        out = f"{name}-{resolve_params(name, overrides)['variant']}.csv"
    series, params = run_scenario(name, overrides, out=out)
    print(f"{params['scenario']}:{params['variant']}  {len(series.times)} rows -> {out}  "
          f"final concurrence {series.concurrence[-1]:.6f}")
    return 0


def _cmd_list(args):
    print(list_scenarios(machine=args.machine))
    return 0


def _cmd_verify(args):
    try:
        harmonics = tuple(int(v) for v in args.tuple.split(","))
    except ValueError:
        raise UsageError(f"--tuple needs four comma-separated integers, got {args.tuple!r}") from None
    if len(harmonics) != 4:
        raise UsageError(f"--tuple needs four integers, got {args.tuple!r}")
    table, violated = residual_table(harmonics, tc=args.tc, npoints=args.npoints)
    for (k, l), r in table.items():
        print(f"{_LABELS[k]}{_LABELS[l]}  {r:.6e}")
    if violated:
        print("violated: " + "; ".join(violated))
    return 0


def _cmd_check_gate(args):
    d = check_gate(args.gate, dt=args.dt)
    print(f"{args.gate}: distance to target up to global phase = {d:.3e}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="cdd2q", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a registered scenario and write CSV")
    p.add_argument("--scenario")
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.add_argument("--config", help="flat key = value parameter file")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("list", help="list registered scenarios")
    p.add_argument("--machine", action="store_true", help="one scenario name per line")
    p.set_defaults(func=_cmd_list)

    p = sub.add_parser("verify-decoupling", help="residual norms of the 15 two-qubit Paulis")
    p.add_argument("--tuple", required=True, metavar="NX1,NZ1,NX2,NZ2")
    p.add_argument("--npoints", type=int, default=4096)
    p.add_argument("--tc", type=float, default=0.5)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("check-gate", help="closed-system protected-gate distance")
    p.add_argument("--gate", choices=("cnotbar", "cz"), required=True)
    p.add_argument("--dt", type=float, default=1e-4)
    p.set_defaults(func=_cmd_check_gate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except IntegrationError as exc:
        print(f"integration aborted: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

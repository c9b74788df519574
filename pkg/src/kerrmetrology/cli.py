"""Command-line entry point.

Exit codes: 0 success, 1 invalid input, 2 numerical failure (including a
``validate`` run with failing criteria).
"""

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from .channels import build_model, make_params
from .errors import InvalidInputError, KerrMetrologyError
from .estimation import EPS_EIG, qfim, scalar_bound, uhlmann, quantumness
from .fock import EPS_TRUNC
from .measurements import CRITERIA, fim_double_homodyne, fi_direct, fim_homodyne, optimize_phase
from .presets import DEFAULT_POINTS, FIGURES, reproduce
from .sweep import BASE_QUANTITIES, SweepSpec, run_sweep

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2
POVMS = ("homodyne", "dh", "direct")


class _Parser(argparse.ArgumentParser):
    """Usage errors count as invalid input."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _add_point_flags(p, multi):
    nargs = "+" if multi else None
    p.add_argument("--scenario", choices=("lossy", "dephasing"),
                   help="defaults to the scenario implied by --tau or --sigma")
    noise = p.add_mutually_exclusive_group()
    noise.add_argument("--tau", type=float, nargs=nargs, help="photon-loss parameter (lossy scenario)")
    noise.add_argument("--sigma", type=float, nargs=nargs, help="phase-noise width (dephasing scenario)")
    p.add_argument("--delta", type=float, nargs=nargs, default=None if multi else 0.0, help="Kerr nonlinearity")
    p.add_argument("--nbar", type=float, nargs=nargs, default=None if multi else 1.0,
                   help="mean probe photon number; alpha = sqrt(nbar) is taken real")
    p.add_argument("--epsilon-trunc", type=float, default=None if multi else EPS_TRUNC)
    p.add_argument("--epsilon-eig", type=float, default=None if multi else EPS_EIG)


def build_parser():
    parser = _Parser(prog="kerrmetrology", description="Two-parameter estimation of loss/dephasing and Kerr nonlinearity.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("qfim", help="QFIM, Uhlmann curvature, quantumness and SLD bound at one point")
    _add_point_flags(p, multi=False)

    p = sub.add_parser("fim", help="classical FIM of a measurement at one point")
    _add_point_flags(p, multi=False)
    p.add_argument("--povm", choices=POVMS, default="homodyne")
    p.add_argument("--criterion", choices=CRITERIA, default="a",
                   help="homodyne phase-optimization criterion: a = F_11, b = F_22, c = scalar bound")
    p.add_argument("--theta", type=float, default=None, help="fixed homodyne phase (skips optimization)")

    p = sub.add_parser("sweep", help="grid sweep to CSV; flags override the config file")
    p.add_argument("--config", type=Path, help="JSON file with SweepSpec fields")
    _add_point_flags(p, multi=True)
    p.add_argument("--quantities", nargs="+", help=f"subset of {', '.join(BASE_QUANTITIES)}")
    p.add_argument("--out", type=Path, help="CSV path (default: stdout)")
    p.add_argument("--threads", type=int)

    p = sub.add_parser("reproduce", help="run a figure preset, one CSV per panel")
    p.add_argument("figure", metavar="fig-id", help=f"one of {FIGURES[0]}..{FIGURES[-1]}")
    p.add_argument("--out", type=Path, default=None, help="output directory (default: ./<fig-id>)")
    p.add_argument("--points", type=int, default=DEFAULT_POINTS, help="points per swept axis")
    p.add_argument("--delta-range", type=float, nargs=2, metavar=("LO", "HI"), help="delta axis for fig14")
    p.add_argument("--threads", type=int)

    p = sub.add_parser("validate", help="run the acceptance criteria")
    p.add_argument("--only", nargs="+", metavar="ID", help="criterion ids, e.g. 1 12c 13a")
    return parser


def _noise(args):
    return args.tau if args.tau is not None else args.sigma


def _scenario(args, fallback=None):
    implied = "lossy" if args.tau is not None else "dephasing" if args.sigma is not None else None
    scenario = args.scenario or implied or fallback
    if implied and scenario != implied:
        raise InvalidInputError("use --tau with the lossy scenario and --sigma with the dephasing scenario")
    return scenario


def _point_model(args):
    noise = _noise(args)
    if noise is None:
        raise InvalidInputError("--tau (lossy) or --sigma (dephasing) is required")
    params = make_params(_scenario(args), noise, args.delta, args.nbar)
    return build_model(params, epsilon=args.epsilon_trunc)


def _matrix(m):
    return [[float(v) for v in row] for row in m]


def _optional(fn, *a):
    try:
        return fn(*a)
    except KerrMetrologyError:
        return None


def _header(model):
    return {"scenario": model.scenario, "parameters": list(model.param_names),
            "values": [float(v) for v in model.params.values], "nbar": float(model.params.nbar), "dim": model.dim}


def cmd_qfim(args):
    model = _point_model(args)
    h = qfim(model, args.epsilon_eig)
    u = uhlmann(model, args.epsilon_eig)
    out = _header(model)
    out.update(qfim=_matrix(h), uhlmann=_matrix(u), quantumness=_optional(quantumness, h, u),
               scalar_bound=_optional(scalar_bound, h))
    return out


def cmd_fim(args):
    model = _point_model(args)
    out = _header(model)
    out["povm"] = args.povm
    if args.povm == "homodyne":
        if args.theta is not None:
            f = fim_homodyne(model, args.theta)
            out["theta"] = float(args.theta)
        else:
            res = optimize_phase(model, args.criterion)
            f = res.fim
            out.update(theta=res.theta_opt, criterion=args.criterion, degenerate=res.degenerate)
    elif args.povm == "dh":
        f = fim_double_homodyne(model)
    else:
        f = fi_direct(model)
    h = qfim(model, args.epsilon_eig)
    out.update(fim=_matrix(f), qfim=_matrix(h), scalar_bound=_optional(scalar_bound, f))
    out["ratios"] = [float(f[i, i] / h[i, i]) if h[i, i] > 0 else None for i in range(2)]
    return out


def _sweep_spec(args):
    base = {}
    if args.config is not None:
        try:
            base = json.loads(args.config.read_text(encoding="utf-8"))
        except OSError as exc:
            raise InvalidInputError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(base, dict):
            raise InvalidInputError("config must be a JSON object")
        for alias in ("tau", "sigma"):
            if alias in base and "noise" not in base:
                base["noise"] = base.pop(alias)
    overrides = {
        "scenario": _scenario(args, base.get("scenario")),
        "noise": _noise(args),
        "delta": args.delta,
        "nbar": args.nbar,
        "quantities": args.quantities,
        "epsilon_trunc": args.epsilon_trunc,
        "epsilon_eig": args.epsilon_eig,
        "output_path": str(args.out) if args.out else None,
        "threads": args.threads,
    }
    base.update({k: v for k, v in overrides.items() if v is not None})
    missing = [k for k in ("scenario", "noise", "delta", "nbar", "quantities") if k not in base]
    if missing:
        raise InvalidInputError(f"sweep is missing {', '.join(missing)} (give --config or flags)")
    return SweepSpec.from_dict(base)


def cmd_sweep(args):
    spec = _sweep_spec(args)
    table = run_sweep(spec)
    if spec.output_path is None:
        table.write_csv(sys.stdout)
    else:
        print(f"wrote {len(table.rows)} rows to {spec.output_path}", file=sys.stderr)
    for e in table.errors:
        print(f"point ({e['noise']}, {e['delta']}, {e['nbar']}) failed: {e['kind']}: {e['message']}", file=sys.stderr)
    return None


def cmd_reproduce(args):
    out = args.out if args.out is not None else Path(args.figure.lower())
    tables = reproduce(args.figure, out, args.points, args.threads, args.delta_range)
    for name, table in tables.items():
        print(f"{out / (name + '.csv')}: {len(table.rows)} rows, {len(table.errors)} failed points")
    return None


def cmd_validate(args):
    from .acceptance import CHECKS, run_all

    if args.only:
        unknown = [i for i in args.only if i not in CHECKS]
        if unknown:
            raise InvalidInputError(f"unknown criterion ids: {', '.join(unknown)}")
    results = run_all(args.only)
    failed = [r.id for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed" + (f"; failed: {', '.join(failed)}" if failed else ""))
    return EXIT_NUMERICAL if failed else None


COMMANDS = {"qfim": cmd_qfim, "fim": cmd_fim, "sweep": cmd_sweep, "reproduce": cmd_reproduce, "validate": cmd_validate}


def _json_default(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    raise TypeError(type(v).__name__)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        result = COMMANDS[args.command](args)
    except InvalidInputError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except KerrMetrologyError as exc:
        print(f"numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if isinstance(result, dict):
        json.dump(result, sys.stdout, indent=2, default=_json_default)
        sys.stdout.write("\n")
        return EXIT_OK
    return result or EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

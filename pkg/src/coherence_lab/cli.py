"""Command-line entry point.

Exit status: 0 success, 2 invalid input or I/O failure, 3 a ``verify``
invariant failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import dissipation as dis
from . import einselection as ein
from .entanglement import (
    XState,
    bell_state,
    concurrence_two_qubit,
    entanglement_mixed,
    entanglement_state,
    natural_point_x,
    werner_state,
)
from .errors import CoherenceLabError
from .hilbert import DensityMatrix, StateVector
from .sampling import DEFAULT_SEED
from .statefile import load_state, state_to_json
from .swapping import BipartyCF, conservation_check
from .verify import SUITES, run_suite

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_VERIFY = 3


class UsageError(CoherenceLabError):
    pass


def fmt(x) -> str:
    """Locale-free float text with 12 significant digits."""
    return f"{float(x):.12g}"


def _round(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (float, np.floating)):
        return float(fmt(obj))
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    raise TypeError(f"cannot emit {type(obj).__name__}")


def to_json(obj) -> str:
    return json.dumps(_round(obj), indent=2) + "\n"


def to_csv(header: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        cells = []
        for key in header:
            v = row[key]
            if isinstance(v, bool):
                cells.append("true" if v else "false")
            elif isinstance(v, (float, np.floating, int, np.integer)):
                cells.append(fmt(v))
            else:
                cells.append("" if v is None else str(v))
        writer.writerow(cells)
    return buf.getvalue()


def parse_complex(text: str) -> complex:
    """``re`` or ``re,im``."""
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected 're' or 're,im', got {text!r}")


def _warn(msg: str) -> None:
    print(f"warning: {msg}", file=sys.stderr)


# -- subcommands -------------------------------------------------------------


def cmd_measure(args) -> str:
    fam = args.family
    rho = psi = None
    if fam == "werner":
        if args.z is None:
            raise UsageError("--family werner needs --z")
        rho = werner_state(args.z)
    elif fam == "xstate":
        missing = [n for n in ("rho11", "rho22", "rho33", "rho44") if getattr(args, n) is None]
        if missing:
            raise UsageError("--family xstate needs " + ", ".join("--" + m for m in missing))
        x = XState(
            args.rho11, args.rho22, args.rho33, args.rho44,
            complex(args.w_re, args.w_im), complex(args.z_re, args.z_im),
        )
        rho = x.density()
    elif fam == "bell":
        psi = bell_state(args.kind)
    elif fam == "file":
        if args.state is None:
            raise UsageError("--family file needs --state PATH")
        loaded = load_state(args.state, normalize_check=not args.no_normalize_check)
        if isinstance(loaded, StateVector):
            psi = loaded
        else:
            rho = loaded

    result = {"family": fam}
    if psi is not None:
        result["E"] = entanglement_state(psi, args.cut)
        result["pi"] = 1.0
        dims = psi.dims
        if dims == (2, 2):
            result["concurrence"] = concurrence_two_qubit(psi.density())
    else:
        point = natural_point_x(XState.from_density(rho))
        result["E"] = entanglement_mixed(point)
        result["pi"] = point.pi
        result["concurrence"] = concurrence_two_qubit(rho)

    if args.format == "csv":
        header = ["family", "E", "pi"] + (["concurrence"] if "concurrence" in result else [])
        return to_csv(header, [result])
    return to_json(result)


def _cf_from_args(c1: complex, c2: complex, label: str, system: str, frame: str) -> BipartyCF:
    n2 = abs(c1) ** 2 + abs(c2) ** 2
    if n2 == 0:
        raise UsageError(f"{label} coefficients are both zero")
    if abs(n2 - 1.0) > 1e-6:
        _warn(f"{label} coefficients have norm^2 {fmt(n2)}; normalizing")
    return BipartyCF.normalized(c1, c2, system, frame)


def cmd_swap(args) -> str:
    A = _cf_from_args(args.a1, args.a2, "a", "A", "alpha")
    B = _cf_from_args(args.b1, args.b2, "b", "B", "beta")
    rep = conservation_check(A, B)
    if args.format == "csv":
        row = {"lhs": rep.lhs, "rhs": rep.rhs, "residual": rep.residual}
        header = ["lhs", "rhs", "residual"]
        for b in rep.branches:
            for key in ("E_AB", "E_ab"):
                col = f"{b['name']}_{key}"
                header.append(col)
                row[col] = b[key]
        return to_csv(header, [row])
    return to_json({"lhs": rep.lhs, "branches": rep.branches, "rhs": rep.rhs, "residual": rep.residual})


DISSIPATE_HEADER = ["t", "xi", "chi", "E_cav", "E_res", "E_sum", "concurrence_cav"]


def cmd_dissipate(args) -> str:
    a2b2 = args.alpha**2 + args.beta**2
    p = dis.CavityParams.normalized(args.alpha, args.beta, args.kappa)
    if abs(a2b2 - 1.0) > 1e-10:
        _warn(f"alpha^2 + beta^2 = {fmt(a2b2)}; normalizing")
    t_max = args.t_max if args.t_max is not None else 5.0 / p.kappa
    if args.esdb:
        return to_json(dis.esdb_compare(p, t_max, args.steps).to_dict())
    series = dis.timeseries(p, t_max, args.steps)
    rows = [s.row() for s in series]
    if args.format == "json":
        if args.full:
            for row, snap in zip(rows, series):
                row["state"] = state_to_json(snap.state)
                row["rho_cc"] = state_to_json(snap.rho_cc)
                row["rho_rr"] = state_to_json(snap.rho_rr)
        return to_json(rows)
    return to_csv(DISSIPATE_HEADER, rows)


EINSELECT_HEADER = [
    "angle", "basis", "branch1_weight", "branch1_purity",
    "branch2_weight", "branch2_purity", "is_pointer",
]


def cmd_einselect(args) -> str:
    if args.angle is not None and args.sweep is not None:
        raise UsageError("use either --angle or --sweep, not both")
    if args.sweep is not None:
        angles = ein.uniform_angles(args.sweep)
    else:
        angles = [args.angle if args.angle is not None else math.pi / 4]
    bases = ["ud", "apm"] if args.basis == "both" else [args.basis]
    rows = [r.row() for r in ein.pointer_sweep(angles, bases)]
    if args.format == "json":
        return to_json(rows)
    return to_csv(EINSELECT_HEADER, rows)


def cmd_doubleslit(args) -> str:
    amps = [args.a1, args.a2]
    n2 = abs(amps[0]) ** 2 + abs(amps[1]) ** 2
    if n2 == 0:
        raise UsageError("path amplitudes are both zero")
    if abs(n2 - 1.0) > 1e-6:
        _warn(f"path amplitudes have norm^2 {fmt(n2)}; normalizing")
    amps = [a / math.sqrt(n2) for a in amps]
    rep = ein.doubleslit(args.scenario, amps)
    if args.format == "csv":
        m = rep.reduced.matrix
        row = {
            "scenario": rep.scenario,
            "visibility": rep.visibility,
            "rho_ll": m[0, 0].real,
            "rho_rr": m[1, 1].real,
            "rho_lr_re": m[0, 1].real,
            "rho_lr_im": m[0, 1].imag,
        }
        return to_csv(list(row), [row])
    return to_json(rep.to_dict())


def cmd_verify(args) -> tuple[str, int]:
    results = run_suite(args.suite, args.seed, args.tolerance)
    failed = sum(not r.passed for r in results)
    if args.format == "json":
        text = to_json([r.__dict__ for r in results])
    else:
        lines = [r.line() for r in results]
        lines.append(f"{len(results) - failed}/{len(results)} invariants passed")
        text = "\n".join(lines) + "\n"
    return text, (EXIT_VERIFY if failed else EXIT_OK)


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["csv", "json"], help="output format")
    common.add_argument("--output", "-o", help="write output to this path instead of stdout")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for randomized commands (default 42)")
    common.add_argument(
        "--tolerance", type=float, default=1.0,
        help="multiplier applied to every verify tolerance (default 1.0)",
    )

    parser = argparse.ArgumentParser(
        prog="coherence-lab",
        description="Entanglement measure, swapping, dissipation and einselection toolkit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", parents=[common], help="entanglement of a named family or state file")
    p.add_argument("--family", choices=["werner", "xstate", "bell", "file"], required=True)
    p.add_argument("--z", type=float, help="Werner singlet fraction in [0, 1]")
    for name in ("rho11", "rho22", "rho33", "rho44"):
        p.add_argument(f"--{name}", type=float, help="X-state diagonal element")
    for name in ("w-re", "w-im", "z-re", "z-im"):
        p.add_argument(f"--{name}", type=float, default=0.0, help="X-state coherence part")
    p.add_argument("--kind", default="phi+", choices=["phi+", "phi-", "psi+", "psi-"], help="Bell state")
    p.add_argument("--state", help="JSON state file (with --family file)")
    p.add_argument("--cut", type=int, default=1, help="number of leading subsystems on the left of the cut")
    p.add_argument("--no-normalize-check", action="store_true", help="renormalize instead of rejecting")
    p.set_defaults(func=cmd_measure, default_format="json")

    p = sub.add_parser("swap", parents=[common], help="entanglement conservation under swapping")
    for name in ("a1", "a2", "b1", "b2"):
        p.add_argument(f"--{name}", type=parse_complex, required=True, metavar="RE[,IM]")
    p.set_defaults(func=cmd_swap, default_format="json")

    p = sub.add_parser("dissipate", parents=[common], help="cavity-reservoir time series")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--t-max", type=float, help="default 5/kappa")
    p.add_argument("--steps", type=int, default=201)
    p.add_argument("--full", action="store_true", help="include states in JSON output")
    p.add_argument("--esdb", action="store_true", help="emit the concurrence death-time report instead")
    p.set_defaults(func=cmd_dissipate, default_format="csv")

    p = sub.add_parser("einselect", parents=[common], help="pointer-basis branch purities")
    p.add_argument("--angle", type=float, help="coupling angle A(t) in radians (default pi/4)")
    p.add_argument("--sweep", type=int, help="number of uniform angles in [0, pi/2]")
    p.add_argument("--basis", choices=["ud", "apm", "both"], default="both")
    p.set_defaults(func=cmd_einselect, default_format="csv")

    p = sub.add_parser("doubleslit", parents=[common], help="reduced particle state and visibility")
    p.add_argument("--scenario", choices=["trivial", "measured", "classical"], required=True)
    p.add_argument("--a1", type=parse_complex, required=True, metavar="RE[,IM]")
    p.add_argument("--a2", type=parse_complex, required=True, metavar="RE[,IM]")
    p.set_defaults(func=cmd_doubleslit, default_format="json")

    p = sub.add_parser("verify", parents=[common], help="run the invariant suite")
    p.add_argument("--suite", choices=("all",) + SUITES, default="all")
    p.set_defaults(func=cmd_verify, default_format=None)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    try:
        out = args.func(args)
        code = EXIT_OK
        if isinstance(out, tuple):
            out, code = out
    except (CoherenceLabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    if args.output:
        try:
            Path(args.output).write_text(out)
        except OSError as exc:
            print(f"error: cannot write {args.output}: {exc.strerror or exc}", file=sys.stderr)
            return EXIT_INPUT
    else:
        sys.stdout.write(out)
    return code


def main() -> None:
    sys.exit(run())

"""Command line front end.

Exit codes: 0 success, 1 check or validation failure, 2 runtime failure
(singular Hessian, non-convergent implicit stage).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from .checks import parse_fault, run_checks
from .config import ConfigError, load_config
from .dynamics import DynamicsError, ELPairingTable, diagnose, integrate, pairing_table
from .geometry import LABELS, make_structure
from .parser import ExpressionError

EXIT_OK, EXIT_FAILED, EXIT_RUNTIME = 0, 1, 2


def _coord(block: int, latex: bool = False) -> str:
    if block == 0:
        return "x_{i}" if latex else "x_i"
    k = "n" if block == 1 else f"{block}n"
    return f"x_{{{k}+i}}"


def render_ascii(table: ELPairingTable, n: int) -> str:
    lines = [f"# Euler-Lagrange equations for {table.structure_label} on R^{8 * n} (n={n}, i = 1..{n})"]
    for b, p, s in table.rows():
        op = "+" if s > 0 else "-"
        lines.append(f"d/dt(dL/d{_coord(b)}) {op} dL/d{_coord(p)} = 0")
    return "\n".join(lines) + "\n"


def render_latex(table: ELPairingTable, n: int) -> str:
    lines = [f"% Euler-Lagrange equations for {table.structure_label}, n={n}, i = 1..{n}", r"\begin{array}{c}"]
    for b, p, s in table.rows():
        op = "+" if s > 0 else "-"
        lines.append(
            rf"\frac{{\partial }}{{\partial t}}\left( \frac{{\partial L}}{{\partial {_coord(b, True)}}}\right) "
            rf"{op}\frac{{\partial L}}{{\partial {_coord(p, True)}}}=0, \\"
        )
    lines.append(r"\end{array}")
    return "\n".join(lines) + "\n"


def render_json(table: ELPairingTable, n: int) -> str:
    data = table.as_dict()
    data["n"] = n
    return json.dumps(data, indent=2) + "\n"


RENDERERS = {"ascii": render_ascii, "latex": render_latex, "json": render_json}


def cmd_derive(structure: str, n: int, fmt: str) -> str:
    if fmt not in RENDERERS:
        raise ValueError(f"unknown format {fmt!r}; expected one of {', '.join(RENDERERS)}")
    if structure not in LABELS:
        raise ValueError(f"unknown structure {structure!r}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return RENDERERS[fmt](pairing_table(structure), n)


def write_csv(traj, path, size: int) -> None:
    header = ["t"] + [f"x_{a}" for a in range(size)] + [f"v_{a}" for a in range(size)] + ["energy", "residual_max"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for t, x, v, E, r in zip(traj.times, traj.states, traj.velocities, traj.energies, traj.residuals):
            # repr gives the shortest round-trip decimal
            w.writerow([repr(float(t))] + [repr(float(c)) for c in x] + [repr(float(c)) for c in v] + [repr(E), repr(r)])


def cmd_simulate(config_path, out_path, out=None, err=None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    try:
        cfg = load_config(config_path)
        L = cfg.build_lagrangian()
    except (ConfigError, ExpressionError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_FAILED
    S = make_structure(cfg.structure, cfg.dim)
    try:
        traj = integrate(S, L, cfg.initial_x, cfg.dt, cfg.steps, cfg.integrator)
    except DynamicsError as exc:
        partial = getattr(exc, "partial", None)
        if partial is not None and len(partial):
            write_csv(partial, out_path, S.size)
        print(f"error: {exc}", file=err)
        return EXIT_RUNTIME
    except ExpressionError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_RUNTIME
    write_csv(traj, out_path, S.size)
    print(diagnose(traj, S, L).summary(), file=out)
    return EXIT_OK


def cmd_check(ns, seed: int, fault: str | None = None, out=None, err=None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    if any(n < 1 for n in ns):
        print(f"error: n must be >= 1, got {list(ns)}", file=err)
        return EXIT_FAILED
    try:
        fault_spec = parse_fault(fault) if fault else None
        results = run_checks(ns, seed, fault_spec)
    except ValueError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_FAILED
    for r in results:
        print(r.line(), file=out)
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed", file=out)
    return EXIT_OK if failed == 0 else EXIT_FAILED


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cliffmech", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("derive", help="print the Euler-Lagrange system of a structure")
    p.add_argument("--structure", choices=LABELS, required=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--format", choices=sorted(RENDERERS), default="ascii")

    p = sub.add_parser("simulate", help="integrate a configured system to CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("check", help="run the invariant suite")
    p.add_argument("--n", type=_int_list, default=[1, 2], help="comma-separated list, default 1,2")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--inject-fault", metavar="LABEL:INDEX", help="flip one sign of a structure, e.g. J2:3")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "derive":
        if args.n < 1:
            print(f"error: n must be >= 1, got {args.n}", file=sys.stderr)
            return EXIT_FAILED
        sys.stdout.write(cmd_derive(args.structure, args.n, args.format))
        return EXIT_OK
    if args.command == "simulate":
        return cmd_simulate(args.config, args.out)
    return cmd_check(args.n, args.seed, args.inject_fault)


if __name__ == "__main__":
    sys.exit(main())

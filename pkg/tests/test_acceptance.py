"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the report lines.
"""

import io
import json
import time
from pathlib import Path

import numpy as np
import pytest

from cliffmech import cli
from cliffmech.checks import random_regular_lagrangian, random_symmetric
from cliffmech.dynamics import (
    SingularHessian,
    el_residual,
    energy_differential,
    expansion_matrix_j1,
    integrate,
    kahler_form,
    kahler_matrix,
    pairing_table_from,
    solve_semispray,
)
from cliffmech.geometry import LABELS, Dimension, fundamental_form, make_structure, metric_compatibility, verify_algebra
from cliffmech.lagrangian import BuiltinLagrangian, ExpressionLagrangian, SemisprayState, energy

from conftest import PRINTED_EL, QuadraticLagrangian, fd_gradient, fd_jacobian, rel_err

GOLDEN = Path(__file__).resolve().parent / "golden"
SEED = 20261016


def report(number, title, passed, detail):
    print(f"\n[{'PASS' if passed else 'FAIL'}] criterion {number}: {title} ({detail})")
    assert passed, detail


def test_01_structure_algebra():
    start = time.perf_counter()
    failures = []
    for n in (1, 2, 4):
        failures += [f"n={n} {c}" for c in verify_algebra(Dimension(n)).failures()]
    elapsed = time.perf_counter() - start
    report(1, "structure algebra n in {1,2,4}", not failures and elapsed < 1.0,
           f"{len(failures)} failing identities, {elapsed:.3f}s")


def test_02_metric_compatibility():
    worst = 0.0
    for n in (1, 2):
        for label in LABELS:
            worst = max(worst, metric_compatibility(make_structure(label, Dimension(n)), 1000, SEED))
    report(2, "metric compatibility, 1000 pairs", worst <= 1e-12, f"max deviation {worst:.2e}")


def test_03_fundamental_forms():
    bad = []
    for n in (1, 2):
        for label in LABELS:
            S = make_structure(label, Dimension(n))
            phi = fundamental_form(S).matrix
            if not np.array_equal(phi, -phi.T) or not np.array_equal(phi, -S.dense()):
                bad.append(f"{label} n={n}")
    report(3, "fundamental forms antisymmetric and equal to -J", not bad, ", ".join(bad) or "exact")


def test_04_kahler_equivalence():
    rng = np.random.default_rng(SEED)
    worst, count = 0.0, 0
    for n in (1, 2):
        S = make_structure("J1", Dimension(n))
        for _ in range(20):
            H = random_symmetric(8 * n, rng)
            worst = max(worst, float(np.max(np.abs(kahler_matrix(S, H) - expansion_matrix_j1(H, n)))))
            count += 1
    report(4, "Kahler closed form vs term-by-term expansion", worst <= 1e-12,
           f"{count} Hessians, max deviation {worst:.2e}")


def test_05_formulation_consistency():
    rng = np.random.default_rng(SEED)
    worst_form, worst_el = 0.0, 0.0
    for label in LABELS:
        for k in range(100):
            dim = Dimension(1 + k % 2)
            S = make_structure(label, dim)
            L = random_regular_lagrangian(dim, rng)
            x = rng.uniform(-1, 1, dim.total)
            v = solve_semispray(S, L, x)
            lhs = kahler_form(S, L, x).contract(v)
            worst_form = max(worst_form, float(np.max(np.abs(lhs - energy_differential(S, L, x, v)))))
            worst_el = max(worst_el, float(np.max(np.abs(el_residual(S, L, x, v)))))
    report(5, "dynamics equation vs Euler-Lagrange system", max(worst_form, worst_el) <= 1e-9,
           f"form residual {worst_form:.2e}, EL residual {worst_el:.2e}")


def test_06_pairing_tables():
    matched = 0
    for label in LABELS:
        table = pairing_table_from(make_structure(label, Dimension(1)), label)
        matched += sum(row == (b, p, s) for row, (b, s, p) in zip(table.rows(), PRINTED_EL[label]))
    report(6, "pairing tables vs printed systems", matched == 24, f"{matched}/24 block entries")


def test_07_analytic_trajectory():
    dim = Dimension(1)
    S = make_structure("J1", dim)
    L = BuiltinLagrangian(dim)
    x0 = np.eye(8)[0]
    start = time.perf_counter()
    traj = integrate(S, L, x0, 1e-3, 1000, "rk4")
    elapsed = time.perf_counter() - start
    t = np.array(traj.times)[:, None]
    exact = np.cos(t) * x0 + np.sin(t) * S.apply(x0)
    err = float(np.max(np.abs(np.array(traj.states) - exact)))
    drift = float(np.max(np.abs(np.linalg.norm(traj.states, axis=1) - 1.0)))
    ok = err <= 1e-8 and drift <= 1e-8 and elapsed < 1.0
    report(7, "analytic rotation under rk4", ok, f"error {err:.2e}, norm drift {drift:.2e}, {elapsed:.3f}s")


@pytest.mark.parametrize("method, tol", [("rk4", 1e-6), ("implicit_midpoint", 1e-10)])
def test_08_energy_conservation(method, tol):
    dim = Dimension(1)
    S = make_structure("J1", dim)
    L = BuiltinLagrangian(dim)
    traj = integrate(S, L, np.eye(8)[0], 1e-3, 10_000, method)
    E = [energy(S, L, SemisprayState(x, v)) for x, v in zip(traj.states, traj.velocities)]
    drift = max(abs(e - E[0]) for e in E)
    report(8, f"energy conservation over t=10, {method}", drift <= tol, f"drift {drift:.2e}, bound {tol:.0e}")


@pytest.mark.parametrize(
    "L",
    [
        BuiltinLagrangian(Dimension(1), masses=1.7, gravity=9.8, height_index=3),
        ExpressionLagrangian("0.5*x0^2*x1 + sin(x2)*cos(x3) + exp(0.3*x4) + x5*x6 - x7^3/3", Dimension(1)),
    ],
    ids=["builtin", "expression"],
)
def test_09_ad_vs_finite_differences(L):
    rng = np.random.default_rng(SEED)
    g_err = h_err = 0.0
    for _ in range(100):
        x = rng.uniform(-1, 1, 8)
        j = L.eval_jet(x)
        g_err = max(g_err, rel_err(j.gradient, fd_gradient(L.value, x)))
        h_err = max(h_err, rel_err(j.hessian, fd_jacobian(lambda y: L.eval_jet(y).gradient, x)))
    backend = type(L).__name__
    report(9, f"AD vs central differences, {backend}", g_err <= 1e-6 and h_err <= 1e-5,
           f"gradient {g_err:.2e}, Hessian {h_err:.2e}")


def test_10_degenerate_lagrangian(tmp_path, capsys):
    raised = 0
    for label in LABELS:
        S = make_structure(label, Dimension(1))
        for L in (QuadraticLagrangian(np.zeros((8, 8)), b=np.arange(8.0)), ExpressionLagrangian("x0", Dimension(1))):
            try:
                solve_semispray(S, L, np.zeros(8))
            except SingularHessian:
                raised += 1
    cfg = tmp_path / "linear.json"
    cfg.write_text(json.dumps({
        "schema_version": 1, "n": 1, "structure": "J1", "lagrangian": {"expression": "x0"},
        "initial_x": [0] * 8, "integrator": "rk4", "dt": 0.01, "steps": 5, "rng_seed": 0,
    }))
    capsys.readouterr()
    code = cli.main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o.csv")])
    err = capsys.readouterr().err
    ok = raised == 6 and code == 2 and "singular Hessian" in err
    with capsys.disabled():
        report(10, "linear Lagrangian is rejected", ok, f"{raised}/6 raised, CLI exit {code}")


def test_11_cli_determinism(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "schema_version": 1, "n": 2, "structure": "J2",
        "lagrangian": {"expression": "0.5*(x0^2+x1^2+x2^2+x3^2+x4^2+x5^2+x6^2+x7^2+x8^2+x9^2+x10^2+x11^2"
                                     "+x12^2+x13^2+x14^2+x15^2) + 0.1*cos(x0-x5)"},
        "initial_x": [0.1 * k for k in range(16)], "integrator": "implicit_midpoint",
        "dt": 0.01, "steps": 200, "rng_seed": 7,
    }))
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    codes = [cli.cmd_simulate(cfg, p, out=io.StringIO()) for p in paths]
    identical = codes == [0, 0] and paths[0].read_bytes() == paths[1].read_bytes()
    ext = {"ascii": "txt", "latex": "tex", "json": "json"}
    golden_ok = all(
        cli.cmd_derive(label, 1, fmt) == (GOLDEN / f"derive_{label}_n1.{e}").read_text()
        for label in LABELS
        for fmt, e in ext.items()
    )
    report(11, "byte-identical CSV and golden derive output", identical and golden_ok,
           f"csv identical={identical}, golden files match={golden_ok}")

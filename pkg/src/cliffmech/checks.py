"""Invariant suite behind ``cliffmech check``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import (
    ELPairingTable,
    el_residual,
    energy_differential,
    expansion_matrix_j1,
    kahler_form,
    kahler_matrix,
    pairing_table_from,
    solve_semispray,
)
from .geometry import LABELS, Dimension, StructureMatrix, fundamental_form, make_structure, metric_compatibility, verify_algebra
from .lagrangian import ExpressionLagrangian

# Euler-Lagrange systems as printed, block -> (partner block, sign).
REFERENCE_EL_TABLES = {
    "J1": ELPairingTable("J1", (1, 0, 4, 5, 2, 3, 7, 6), (+1, -1, +1, +1, -1, -1, +1, -1)),
    "J2": ELPairingTable("J2", (2, 4, 0, 6, 1, 7, 3, 5), (+1, -1, -1, +1, +1, -1, -1, +1)),
    "J3": ELPairingTable("J3", (3, 5, 6, 0, 7, 1, 2, 4), (+1, -1, -1, -1, +1, +1, +1, -1)),
}


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}" + (f": {self.detail}" if self.detail else "")


def parse_fault(spec: str) -> tuple[str, int]:
    """``"J2:3"`` -> flip the sign of column 3 of J2."""
    label, _, index = spec.partition(":")
    if label not in LABELS or not index.isdigit():
        raise ValueError(f"fault spec must look like J2:3, got {spec!r}")
    return label, int(index)


def structures_for(dim: Dimension, fault: tuple[str, int] | None = None) -> dict[str, StructureMatrix]:
    out = {label: make_structure(label, dim) for label in LABELS}
    if fault is not None:
        label, index = fault
        if index >= dim.total:
            raise ValueError(f"fault index {index} outside [0, {dim.total}) for n={dim.n}")
        out[label] = out[label].with_sign_flipped(index)
    return out


def random_symmetric(m: int, rng: np.random.Generator) -> np.ndarray:
    A = rng.standard_normal((m, m))
    return 0.5 * (A + A.T)


def random_regular_lagrangian(dim: Dimension, rng: np.random.Generator) -> ExpressionLagrangian:
    """Quadratic plus small trigonometric terms, diagonally dominant Hessian."""
    m = dim.total
    terms = []
    for a in range(m):
        terms.append(f"{rng.uniform(1.5, 2.5) * 0.5!r}*x{a}^2")
        terms.append(f"{rng.uniform(-1, 1)!r}*x{a}")
    for _ in range(2 * m):
        a, b = rng.choice(m, size=2, replace=False)
        terms.append(f"{rng.uniform(-0.05, 0.05)!r}*x{a}*x{b}")
    for _ in range(m):
        a, b = rng.choice(m, size=2, replace=False)
        fn = "sin" if rng.random() < 0.5 else "cos"
        terms.append(f"{rng.uniform(-0.1, 0.1)!r}*{fn}(x{a} - {rng.uniform(-1, 1)!r}*x{b})")
    return ExpressionLagrangian(" + ".join(terms).replace("+ -", "- "), dim)


def _check_algebra(dim, structures):
    report = verify_algebra(dim, structures)
    detail = "; ".join(str(c) for c in report.failures())
    return CheckResult(f"structure algebra (n={dim.n})", report.ok, detail)


def _check_metric(dim, structures, seed):
    worst = {label: metric_compatibility(S, 1000, seed) for label, S in structures.items()}
    dev = max(worst.values())
    return CheckResult(f"metric compatibility (n={dim.n})", dev <= 1e-12, f"max deviation {dev:.3e}")


def _check_fundamental(dim, structures):
    bad = []
    for label, S in structures.items():
        phi = fundamental_form(S).matrix
        if not (np.array_equal(phi, -phi.T) and np.array_equal(phi, -S.dense())):
            bad.append(label)
    return CheckResult(
        f"fundamental forms antisymmetric and equal to -J (n={dim.n})", not bad, ", ".join(bad) and f"fails for {', '.join(bad)}"
    )


def _check_kahler(dim, structures, rng):
    S = structures["J1"]
    worst = 0.0
    for _ in range(20):
        H = random_symmetric(dim.total, rng)
        worst = max(worst, float(np.max(np.abs(kahler_matrix(S, H) - expansion_matrix_j1(H, dim.n)))))
    return CheckResult(f"Kahler form closed form vs expansion (n={dim.n})", worst <= 1e-12, f"max diff {worst:.3e}")


def _check_tables(dim, structures):
    bad = [label for label, S in structures.items() if pairing_table_from(S, label) != REFERENCE_EL_TABLES[label]]
    return CheckResult(f"pairing tables match reference (n={dim.n})", not bad, bad and f"mismatch for {', '.join(bad)}" or "")


def _check_consistency(dim, structures, rng, points):
    worst_form = worst_el = 0.0
    for _ in range(points):
        L = random_regular_lagrangian(dim, rng)
        x = rng.uniform(-1.0, 1.0, dim.total)
        for S in structures.values():
            v = solve_semispray(S, L, x)
            lhs = kahler_form(S, L, x).contract(v)
            worst_form = max(worst_form, float(np.max(np.abs(lhs - energy_differential(S, L, x, v)))))
            worst_el = max(worst_el, float(np.max(np.abs(el_residual(S, L, x, v)))))
    ok = worst_form <= 1e-9 and worst_el <= 1e-9
    return CheckResult(
        f"dynamics equation vs Euler-Lagrange residual (n={dim.n})",
        ok,
        f"max |i_v Phi - dE| {worst_form:.3e}, max EL residual {worst_el:.3e}",
    )


def run_checks(ns=(1, 2), seed: int = 42, fault: tuple[str, int] | None = None, points: int = 20) -> list[CheckResult]:
    results = []
    for n in ns:
        dim = Dimension(n)
        structures = structures_for(dim, fault)
        rng = np.random.default_rng([seed, n])
        results.append(_check_algebra(dim, structures))
        results.append(_check_metric(dim, structures, seed))
        results.append(_check_fundamental(dim, structures))
        results.append(_check_kahler(dim, structures, rng))
        results.append(_check_tables(dim, structures))
        results.append(_check_consistency(dim, structures, rng, points))
    return results

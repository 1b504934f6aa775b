import numpy as np
import pytest

from cliffmech.geometry import Dimension
from cliffmech.jet import Jet2
from cliffmech.lagrangian import LagrangianField

# The structure action transcribed row by row as (structure, source block, image block, sign),
# kept separate from the library's table so the two can be compared.
PRINTED_ACTIONS = [
    ("J1", 0, 1, +1), ("J1", 1, 0, -1), ("J1", 2, 4, +1), ("J1", 3, 5, +1),
    ("J1", 4, 2, -1), ("J1", 5, 3, -1), ("J1", 6, 7, +1), ("J1", 7, 6, -1),
    ("J2", 0, 2, +1), ("J2", 1, 4, -1), ("J2", 2, 0, -1), ("J2", 3, 6, +1),
    ("J2", 4, 1, +1), ("J2", 5, 7, -1), ("J2", 6, 3, -1), ("J2", 7, 5, +1),
    ("J3", 0, 3, +1), ("J3", 1, 5, -1), ("J3", 2, 6, -1), ("J3", 3, 0, -1),
    ("J3", 4, 7, +1), ("J3", 5, 1, +1), ("J3", 6, 2, +1), ("J3", 7, 4, -1),
]

# Printed Euler-Lagrange systems: block -> (partner, sign)
PRINTED_EL = {
    "J1": [(0, +1, 1), (1, -1, 0), (2, +1, 4), (3, +1, 5), (4, -1, 2), (5, -1, 3), (6, +1, 7), (7, -1, 6)],
    "J2": [(0, +1, 2), (1, -1, 4), (2, -1, 0), (3, +1, 6), (4, +1, 1), (5, -1, 7), (6, -1, 3), (7, +1, 5)],
    "J3": [(0, +1, 3), (1, -1, 5), (2, -1, 6), (3, -1, 0), (4, +1, 7), (5, +1, 1), (6, +1, 2), (7, -1, 4)],
}


def dense_from_printed(label: str, n: int) -> np.ndarray:
    m = 8 * n
    J = np.zeros((m, m))
    for lab, src, dst, s in PRINTED_ACTIONS:
        if lab != label:
            continue
        for i in range(n):
            J[dst * n + i, src * n + i] = s
    return J


class QuadraticLagrangian(LagrangianField):
    """``L = 1/2 x^T H x + b.x + c`` with a prescribed Hessian."""

    def __init__(self, H, b=None, c=0.0):
        H = np.asarray(H, dtype=float)
        self.dim = Dimension(H.shape[0] // 8)
        self.H = 0.5 * (H + H.T)
        self.b = np.zeros(H.shape[0]) if b is None else np.asarray(b, dtype=float)
        self.c = float(c)

    def eval_jet(self, x):
        x = np.asarray(x, dtype=float)
        return Jet2(0.5 * x @ self.H @ x + self.b @ x + self.c, self.H @ x + self.b, self.H.copy())


def fd_gradient(f, x, h=1e-5):
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for a in range(x.size):
        e = np.zeros_like(x)
        e[a] = h
        g[a] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def fd_jacobian(F, x, h=1e-5):
    x = np.asarray(x, dtype=float)
    cols = []
    for a in range(x.size):
        e = np.zeros_like(x)
        e[a] = h
        cols.append((F(x + e) - F(x - e)) / (2 * h))
    # J[i, a] = dF_i / dx_a
    return np.array(cols).T


def rel_err(approx, exact):
    approx, exact = np.asarray(approx), np.asarray(exact)
    return float(np.max(np.abs(approx - exact)) / max(1.0, float(np.max(np.abs(exact)))))


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)

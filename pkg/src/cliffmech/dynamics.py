"""Kähler form of a Lagrangian, the dynamics equation and its integral curves.

With ``H`` the Hessian of ``L`` and ``S`` one of the structures:

* ``Phi_L = -d d_S L`` has matrix ``Omega = S^T H - H S``;
* ``dE_L = H (S v) - grad L`` with the semispray components held fixed;
* ``i_xi Phi_L = Omega^T v``.

Equating the last two gives ``S^T H v = grad L``, i.e. ``H v = S grad L``,
which is the velocity field integrated here.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .geometry import BLOCK_ACTION, Dimension, DimensionMismatch, StructureMatrix, apply, make_structure
from .lagrangian import LagrangianField, SemisprayState, energy

log = logging.getLogger(__name__)

DEFAULT_RCOND = 1e-10


class DynamicsError(RuntimeError):
    pass


class SingularHessian(DynamicsError):
    """The Lagrangian is not regular at the point: ``H`` cannot be inverted."""

    def __init__(self, rcond: float, x=None, step: int | None = None, partial: Trajectory | None = None):
        self.rcond = rcond
        self.x = x
        self.step = step
        self.partial = partial
        super().__init__(self._message())

    def _message(self) -> str:
        msg = f"singular Hessian (reciprocal condition {self.rcond:.3e})"
        if self.step is not None:
            msg += f" at step {self.step}"
        return msg

    def at_step(self, step: int, partial: Trajectory) -> SingularHessian:
        return SingularHessian(self.rcond, self.x, step, partial)


class StageNotConverged(DynamicsError):
    def __init__(self, step: int, residual: float, partial: Trajectory | None = None):
        self.step = step
        self.residual = residual
        self.partial = partial
        super().__init__(f"implicit midpoint stage did not converge at step {step} (last update {residual:.3e})")


def _hessian(L: LagrangianField, x):
    j = L.eval_jet(x)
    return j, j.hessian


# --- Kähler form ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class KahlerForm:
    dim: Dimension
    structure_label: str | None
    matrix: np.ndarray

    def __call__(self, X, Y) -> float:
        return float(np.asarray(X) @ self.matrix @ np.asarray(Y))

    def contract(self, v) -> np.ndarray:
        """``i_v Phi`` as a covector: ``(i_v Phi)(Y) = Phi(v, Y)``."""
        return self.matrix.T @ np.asarray(v, dtype=float)


def kahler_matrix(S: StructureMatrix, H: np.ndarray) -> np.ndarray:
    """``S^T H - H S`` for a symmetric ``H``."""
    StH = apply(S.transpose(), H)
    HS = apply(S.transpose(), H.T).T
    return StH - HS


def kahler_form(S: StructureMatrix, L: LagrangianField, x) -> KahlerForm:
    if S.dim != L.dim:
        raise DimensionMismatch(f"structure n={S.dim.n}, Lagrangian n={L.dim.n}")
    _, H = _hessian(L, x)
    return KahlerForm(S.dim, S.label, kahler_matrix(S, H))


# Wedge terms of Phi_L^{J1} as displayed term by term: for every block B of
# the first index j, the coefficient of dx_{Bn+j} ^ dx_{Cn+i} is
# sign * d^2L / dx_{Bn+j} dx_{Dn+i}.  Entries are (sign, D, C).
J1_EXPANSION_TERMS = (
    (-1, 1, 0),
    (+1, 0, 1),
    (-1, 4, 2),
    (-1, 5, 3),
    (+1, 2, 4),
    (+1, 3, 5),
    (-1, 7, 6),
    (+1, 6, 7),
)


def expansion_matrix_j1(H: np.ndarray, n: int) -> np.ndarray:
    """Assemble Phi_L^{J1} from the literal list of wedge terms."""
    m = 8 * n
    omega = np.zeros((m, m))
    for B in range(8):
        for sign, D, C in J1_EXPANSION_TERMS:
            for j in range(n):
                for i in range(n):
                    a = B * n + j
                    b = C * n + i
                    coef = sign * H[a, D * n + i]
                    # dx_a ^ dx_b (X, Y) = X_a Y_b - X_b Y_a
                    omega[a, b] += coef
                    omega[b, a] -= coef
    return omega


def expansion_oracle_kahler(label: str, L: LagrangianField, x) -> np.ndarray:
    if label != "J1":
        raise ValueError("the term-by-term expansion is only available for J1")
    _, H = _hessian(L, x)
    return expansion_matrix_j1(H, L.dim.n)


# --- dynamics equation -----------------------------------------------------


def energy_differential(S: StructureMatrix, L: LagrangianField, x, v) -> np.ndarray:
    """``dE_L`` with the semispray components ``v`` treated as constants."""
    j, H = _hessian(L, x)
    return H @ apply(S, np.asarray(v, dtype=float)) - j.gradient


def reciprocal_condition(H: np.ndarray) -> float:
    s = np.linalg.svd(H, compute_uv=False)
    if s[0] == 0.0 or not np.all(np.isfinite(s)):
        return 0.0
    return float(s[-1] / s[0])


def solve_semispray(S: StructureMatrix, L: LagrangianField, x, rcond: float = DEFAULT_RCOND) -> np.ndarray:
    """Semispray ``v`` solving ``i_v Phi_L = dE_L`` at ``x``."""
    if S.dim != L.dim:
        raise DimensionMismatch(f"structure n={S.dim.n}, Lagrangian n={L.dim.n}")
    j, H = _hessian(L, x)
    rc = reciprocal_condition(H)
    if rc < rcond:
        raise SingularHessian(rc, np.asarray(x, dtype=float).copy())
    return np.linalg.solve(H, apply(S, j.gradient))


# --- Euler-Lagrange tables -------------------------------------------------


@dataclass(frozen=True)
class ELPairingTable:
    """Row ``b`` encodes ``d/dt(dL/dx_{bn+i}) + sign[b] * dL/dx_{partner[b]n+i} = 0``."""

    structure_label: str
    partner: tuple[int, ...]
    sign: tuple[int, ...]

    def rows(self) -> list[tuple[int, int, int]]:
        return [(b, self.partner[b], self.sign[b]) for b in range(8)]

    def as_dict(self) -> dict:
        return {
            "structure": self.structure_label,
            "rows": [{"block": b, "partner": p, "sign": s} for b, p, s in self.rows()],
        }


def pairing_table_from(S: StructureMatrix, label: str | None = None) -> ELPairingTable:
    """Read the table off a blockwise structure.

    ``H v = S grad L`` row ``a`` reads ``(Hv)_a - sign_c dL/dx_c = 0`` with
    ``target[c] = a``; since ``S^2 = -I`` this is ``c = target[a]`` and
    ``-sign_c = sign[a]``.  The table is derived from ``S^T`` directly so a
    corrupted structure shows up as a mismatch.
    """
    n = S.dim.n
    St = S.transpose()
    partner, sign = [], []
    for b in range(8):
        col = b * n
        # (S grad)_col = S^T-partner: the c with target[c] == col
        c = St.target[col]
        partner.append(int(c // n))
        sign.append(int(-S.sign[c]))
    return ELPairingTable(label or S.label or "?", tuple(partner), tuple(sign))


def pairing_table(label: str) -> ELPairingTable:
    return pairing_table_from(make_structure(label, Dimension(1)), label)


def el_residual_from_table(table: ELPairingTable, dim: Dimension, H: np.ndarray, grad: np.ndarray, v) -> np.ndarray:
    n = dim.n
    Hv = H @ np.asarray(v, dtype=float)
    res = np.empty(dim.total)
    for b, p, s in table.rows():
        rows = slice(b * n, (b + 1) * n)
        res[rows] = Hv[rows] + s * grad[p * n:(p + 1) * n]
    return res


def el_residual(S: StructureMatrix, L: LagrangianField, x, v) -> np.ndarray:
    """Residuals of the Euler-Lagrange system, ``d/dt`` taken along the curve."""
    j, H = _hessian(L, x)
    return el_residual_from_table(pairing_table_from(S), S.dim, H, j.gradient, v)


# --- integration -----------------------------------------------------------


@dataclass
class Trajectory:
    dt: float
    times: list[float] = field(default_factory=list)
    states: list[np.ndarray] = field(default_factory=list)
    velocities: list[np.ndarray] = field(default_factory=list)
    energies: list[float] = field(default_factory=list)
    residuals: list[float] = field(default_factory=list)
    rconds: list[float] = field(default_factory=list)

    def __len__(self):
        return len(self.times)

    def record(self, t: float, x: np.ndarray, v: np.ndarray, E: float, residual: float, rc: float):
        self.times.append(t)
        self.states.append(x)
        self.velocities.append(v)
        self.energies.append(E)
        self.residuals.append(residual)
        self.rconds.append(rc)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def as_arrays(self) -> dict[str, np.ndarray]:
        return {
            "t": np.array(self.times),
            "x": np.array(self.states),
            "v": np.array(self.velocities),
            "energy": np.array(self.energies),
            "residual_max": np.array(self.residuals),
        }


def _sample(S, L, x, rcond):
    j, H = _hessian(L, x)
    rc = reciprocal_condition(H)
    if rc < rcond:
        raise SingularHessian(rc, x.copy())
    v = np.linalg.solve(H, apply(S, j.gradient))
    E = float(apply(S, v) @ j.gradient - j.value)
    res = el_residual_from_table(pairing_table_from(S), S.dim, H, j.gradient, v)
    return v, E, float(np.max(np.abs(res))), rc


def _rk4_step(f, x, dt):
    k1 = f(x)
    k2 = f(x + 0.5 * dt * k1)
    k3 = f(x + 0.5 * dt * k2)
    k4 = f(x + dt * k3)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _midpoint_step(f, x, dt, v0, tol, max_iter, step):
    x_next = x + dt * v0
    update = np.inf
    for _ in range(max_iter):
        candidate = x + dt * f(0.5 * (x + x_next))
        update = float(np.max(np.abs(candidate - x_next)))
        x_next = candidate
        if update <= tol:
            return x_next
    raise StageNotConverged(step, update)


METHODS = ("rk4", "implicit_midpoint")


def integrate(
    S: StructureMatrix,
    L: LagrangianField,
    x0,
    dt: float,
    steps: int,
    method: str = "rk4",
    *,
    rcond: float = DEFAULT_RCOND,
    stage_tol: float = 1e-12,
    max_stage_iter: int = 100,
) -> Trajectory:
    """Follow the integral curve of the semispray from ``x0``.

    On failure the raised error carries the samples computed so far in its
    ``partial`` attribute.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if steps < 0:
        raise ValueError("steps must be >= 0")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    if S.dim != L.dim:
        raise DimensionMismatch(f"structure n={S.dim.n}, Lagrangian n={L.dim.n}")
    x = np.array(x0, dtype=float)
    if x.shape != (S.size,):
        raise DimensionMismatch(f"x0 has shape {x.shape}, expected ({S.size},)")

    def f(y):
        return solve_semispray(S, L, y, rcond)

    traj = Trajectory(dt)
    step = 0
    try:
        v, E, res, rc = _sample(S, L, x, rcond)
        traj.record(0.0, x, v, E, res, rc)
        for step in range(1, steps + 1):
            if method == "rk4":
                x = _rk4_step(f, x, dt)
            else:
                x = _midpoint_step(f, x, dt, v, stage_tol, max_stage_iter, step)
            v, E, res, rc = _sample(S, L, x, rcond)
            traj.record(step * dt, x, v, E, res, rc)
    except SingularHessian as err:
        log.debug("integration stopped at step %d", step)
        raise err.at_step(step, traj) from None
    except StageNotConverged as err:
        err.partial = traj
        raise
    return traj


@dataclass
class Diagnostics:
    samples: int
    energy_drift: float
    max_residual: float
    min_rcond: float

    def summary(self) -> str:
        return (
            f"samples={self.samples} energy_drift={self.energy_drift:.6e} "
            f"max_residual={self.max_residual:.6e} min_rcond={self.min_rcond:.6e}"
        )


def diagnose(traj: Trajectory, S: StructureMatrix, L: LagrangianField) -> Diagnostics:
    """Energy drift, worst EL residual and worst Hessian conditioning along ``traj``."""
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    energies = [energy(S, L, SemisprayState(x, v)) for x, v in zip(traj.states, traj.velocities)]
    residuals = [float(np.max(np.abs(el_residual(S, L, x, v)))) for x, v in zip(traj.states, traj.velocities)]
    e0 = energies[0]
    return Diagnostics(
        samples=len(traj),
        energy_drift=max(abs(e - e0) for e in energies),
        max_residual=max(residuals),
        min_rcond=min(traj.rconds),
    )

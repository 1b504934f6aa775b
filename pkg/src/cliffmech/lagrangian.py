"""Lagrangian fields on R^{8n} and the vertical calculus built from them."""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from . import jet
from .geometry import Dimension, DimensionMismatch, StructureMatrix, apply
from .jet import Jet2
from .parser import Expr, eval_expr_jet, parse


def _check_length(dim: Dimension, x, what: str = "x") -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (dim.total,):
        raise DimensionMismatch(f"{what} has shape {x.shape}, expected ({dim.total},)")
    return x


class LagrangianField(ABC):
    """Autonomous scalar field ``L(x)`` with exact first and second derivatives."""

    dim: Dimension

    @abstractmethod
    def eval_jet(self, x) -> Jet2:
        ...

    def value(self, x) -> float:
        return self.eval_jet(x).value


class BuiltinLagrangian(LagrangianField):
    """``L = T - P`` with ``T = 1/2 sum_i m_i sum_b x_{bn+i}^2`` and ``P = m g x_h``.

    The potential uses the mass of the particle that owns the height
    coordinate ``height_index``.
    """

    def __init__(self, dim: Dimension, masses=1.0, gravity: float = 0.0, height_index: int = 0):
        masses = np.broadcast_to(np.asarray(masses, dtype=float), (dim.n,)).copy()
        if not 0 <= height_index < dim.total:
            raise IndexError(f"height_index {height_index} outside [0, {dim.total})")
        masses.flags.writeable = False
        self.dim = dim
        self.masses = masses
        self.gravity = float(gravity)
        self.height_index = int(height_index)

    def __repr__(self):
        return (
            f"BuiltinLagrangian(n={self.dim.n}, masses={self.masses.tolist()}, "
            f"gravity={self.gravity}, height_index={self.height_index})"
        )

    @property
    def mass_per_coordinate(self) -> np.ndarray:
        return np.tile(self.masses, 8)

    def eval_jet(self, x) -> Jet2:
        # closed form of the quadratic; jet_reference is the dual-number twin
        x = _check_length(self.dim, x)
        m = self.mass_per_coordinate
        h = self.height_index
        pull = m[h] * self.gravity
        gradient = m * x
        gradient[h] -= pull
        value = 0.5 * float(np.dot(m * x, x)) - pull * x[h]
        return Jet2(value, gradient, np.diag(m))

    def jet_reference(self, x) -> Jet2:
        """Same jet through dual-number arithmetic, one coordinate at a time."""
        x = _check_length(self.dim, x)
        xs = jet.seed(x)
        m = self.mass_per_coordinate
        kinetic = Jet2.constant(0.0, self.dim.total)
        for a, xa in enumerate(xs):
            kinetic = kinetic + (xa * xa) * (0.5 * m[a])
        potential = xs[self.height_index] * (m[self.height_index] * self.gravity)
        return (kinetic - potential).symmetrized()


class ExpressionLagrangian(LagrangianField):
    """Lagrangian given by a parsed expression over ``x0 .. x{8n-1}``."""

    def __init__(self, source: str, dim: Dimension):
        self.dim = dim
        self.source = source
        self.expr: Expr = parse(source, dim)

    def __repr__(self):
        return f"ExpressionLagrangian({self.source!r}, n={self.dim.n})"

    def eval_jet(self, x) -> Jet2:
        x = _check_length(self.dim, x)
        return eval_expr_jet(self.expr, x, self.source)


def eval_jet(L: LagrangianField, x) -> Jet2:
    return L.eval_jet(x)


@dataclass(frozen=True)
class SemisprayState:
    """Position ``x`` and semispray components ``v`` (``X^a = dx_a/dt``)."""

    x: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if x.ndim != 1 or x.shape != v.shape or x.shape[0] % 8:
            raise DimensionMismatch(f"x {x.shape} and v {v.shape} must both have length 8n")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "v", v)


def _same_dim(S: StructureMatrix, L: LagrangianField):
    if S.dim != L.dim:
        raise DimensionMismatch(f"structure n={S.dim.n}, Lagrangian n={L.dim.n}")


def liouville(S: StructureMatrix, st: SemisprayState) -> np.ndarray:
    """``V_J = J(xi)``."""
    if st.v.shape[0] != S.size:
        raise DimensionMismatch(f"state of length {st.v.shape[0]} for structure of size {S.size}")
    return apply(S, st.v)


def energy(S: StructureMatrix, L: LagrangianField, st: SemisprayState) -> float:
    """``E_L = V_J(L) - L``."""
    _same_dim(S, L)
    j = L.eval_jet(st.x)
    return float(liouville(S, st) @ j.gradient - j.value)


def vertical_differential(S: StructureMatrix, L: LagrangianField, x) -> np.ndarray:
    """Coefficients of ``d_J L``: ``(d_J L)_a = sum_b S_{ba} dL/dx_b``."""
    _same_dim(S, L)
    return apply(S.transpose(), L.eval_jet(x).gradient)


def vertical_derivation_form(S: StructureMatrix, omega) -> np.ndarray:
    """``i_J`` on a 1-form (covector) or a 2-form (antisymmetric matrix)."""
    omega = np.asarray(omega, dtype=float)
    if omega.ndim not in (1, 2):
        raise ValueError(f"only 1-forms and 2-forms are supported, got rank {omega.ndim}")
    if any(d != S.size for d in omega.shape):
        raise DimensionMismatch(f"form of shape {omega.shape} for structure of size {S.size}")
    St = S.transpose()
    if omega.ndim == 1:
        return apply(St, omega)
    # S^T Omega + Omega S
    return apply(St, omega) + apply(St, omega.T).T

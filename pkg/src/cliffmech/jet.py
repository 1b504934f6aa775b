"""Second-order forward-mode jets (vectorised hyper-dual numbers).

A :class:`Jet2` carries a value together with its full gradient and Hessian
with respect to all ``m`` coordinates.  Arithmetic propagates the three
parts exactly, so polynomials come out exact up to rounding.
"""

from __future__ import annotations

import math

import numpy as np


class Jet2:
    __slots__ = ("value", "gradient", "hessian")

    def __init__(self, value: float, gradient: np.ndarray, hessian: np.ndarray):
        self.value = float(value)
        self.gradient = gradient
        self.hessian = hessian

    def __repr__(self):
        return f"Jet2(value={self.value!r}, m={self.gradient.shape[0]})"

    @classmethod
    def constant(cls, value: float, m: int) -> Jet2:
        return cls(value, np.zeros(m), np.zeros((m, m)))

    @classmethod
    def variable(cls, index: int, value: float, m: int) -> Jet2:
        g = np.zeros(m)
        g[index] = 1.0
        return cls(value, g, np.zeros((m, m)))

    @property
    def size(self) -> int:
        return self.gradient.shape[0]

    def symmetrized(self) -> Jet2:
        """Mirror the upper triangle so the Hessian is exactly symmetric."""
        upper = np.triu(self.hessian)
        h = upper + np.triu(self.hessian, 1).T
        return Jet2(self.value, self.gradient.copy(), h)

    def _lift(self, other) -> Jet2:
        if isinstance(other, Jet2):
            return other
        return Jet2.constant(other, self.size)

    def __add__(self, other):
        if not isinstance(other, Jet2):
            return Jet2(self.value + other, self.gradient, self.hessian)
        return Jet2(self.value + other.value, self.gradient + other.gradient, self.hessian + other.hessian)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.value, -self.gradient, -self.hessian)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet2):
            return Jet2(self.value * other, self.gradient * other, self.hessian * other)
        a, b = self, other
        cross = np.outer(a.gradient, b.gradient)
        return Jet2(
            a.value * b.value,
            a.value * b.gradient + b.value * a.gradient,
            a.value * b.hessian + b.value * a.hessian + cross + cross.T,
        )

    __rmul__ = __mul__

    def chain(self, f0: float, f1: float, f2: float) -> Jet2:
        """Compose with a scalar function given f, f', f'' at ``self.value``."""
        g = self.gradient
        return Jet2(f0, f1 * g, f1 * self.hessian + f2 * np.outer(g, g))

    def reciprocal(self) -> Jet2:
        a = self.value
        if a == 0.0:
            raise ZeroDivisionError("reciprocal of zero")
        return self.chain(1.0 / a, -1.0 / a**2, 2.0 / a**3)

    def __truediv__(self, other):
        if not isinstance(other, Jet2):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self * (1.0 / other)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def ipow(self, k: int) -> Jet2:
        """Integer power by repeated squaring; negative powers via reciprocal."""
        if k < 0:
            return self.reciprocal().ipow(-k)
        result = Jet2.constant(1.0, self.size)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result


def sin(a: Jet2) -> Jet2:
    s, c = math.sin(a.value), math.cos(a.value)
    return a.chain(s, c, -s)


def cos(a: Jet2) -> Jet2:
    s, c = math.sin(a.value), math.cos(a.value)
    return a.chain(c, -s, -c)


def exp(a: Jet2) -> Jet2:
    e = math.exp(a.value)
    return a.chain(e, e, e)


def sqrt(a: Jet2) -> Jet2:
    if a.value <= 0.0:
        raise ValueError("sqrt needs a positive argument for its derivatives")
    r = math.sqrt(a.value)
    return a.chain(r, 0.5 / r, -0.25 / (r * a.value))


def log(a: Jet2) -> Jet2:
    if a.value <= 0.0:
        raise ValueError("ln needs a positive argument")
    return a.chain(math.log(a.value), 1.0 / a.value, -1.0 / a.value**2)


def seed(x) -> list[Jet2]:
    """One independent variable jet per coordinate of ``x``."""
    x = np.asarray(x, dtype=float)
    m = x.shape[0]
    return [Jet2.variable(i, x[i], m) for i in range(m)]

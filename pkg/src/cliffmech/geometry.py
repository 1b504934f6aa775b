"""Canonical Cliffordian structures J1, J2, J3 on R^{8n}.

Coordinates are flat and block-major: flat index ``block * n + offset`` with
``block`` in ``[0, 8)`` and ``offset`` in ``[0, n)``.  Block ``k`` holds the
coordinates usually written ``x_{kn+i}``.

Each structure is a signed permutation, stored as two integer arrays so the
algebraic identities can be checked exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

LABELS = ("J1", "J2", "J3")

# (image block, sign) for basis blocks 0..7
BLOCK_ACTION = {
    "J1": ((1, 1), (0, -1), (4, 1), (5, 1), (2, -1), (3, -1), (7, 1), (6, -1)),
    "J2": ((2, 1), (4, -1), (0, -1), (6, 1), (1, 1), (7, -1), (3, -1), (5, 1)),
    "J3": ((3, 1), (5, -1), (6, -1), (0, -1), (7, 1), (1, 1), (2, 1), (4, -1)),
}


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Dimension:
    n: int

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)):
            raise TypeError(f"n must be an integer, got {self.n!r}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")

    @property
    def total(self) -> int:
        return 8 * self.n

    def flat(self, block: int, offset: int) -> int:
        if not (0 <= block < 8 and 0 <= offset < self.n):
            raise IndexError(f"block {block}, offset {offset} out of range for n={self.n}")
        return block * self.n + offset

    def split(self, index: int) -> tuple[int, int]:
        """Inverse of :meth:`flat`: ``(block, offset)`` of a flat index."""
        if not 0 <= index < self.total:
            raise IndexError(f"flat index {index} out of range [0, {self.total})")
        return divmod(index, self.n)


def _frozen(a) -> np.ndarray:
    out = np.array(a, dtype=np.int64)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class StructureMatrix:
    """Signed permutation ``S`` with ``S e_a = sign[a] * e_{target[a]}``."""

    dim: Dimension
    target: np.ndarray
    sign: np.ndarray
    label: str | None = field(default=None)

    def __post_init__(self):
        target = _frozen(self.target)
        sign = _frozen(self.sign)
        m = self.dim.total
        if target.shape != (m,) or sign.shape != (m,):
            raise DimensionMismatch(f"expected arrays of length {m}")
        if sorted(target.tolist()) != list(range(m)):
            raise ValueError("target is not a permutation")
        if not np.all(np.abs(sign) == 1):
            raise ValueError("signs must be +1 or -1")
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "sign", sign)

    def __eq__(self, other):
        if not isinstance(other, StructureMatrix):
            return NotImplemented
        return (
            self.dim == other.dim
            and np.array_equal(self.target, other.target)
            and np.array_equal(self.sign, other.sign)
        )

    def __hash__(self):
        return hash((self.dim, self.target.tobytes(), self.sign.tobytes()))

    def __repr__(self):
        name = self.label or "StructureMatrix"
        return f"<{name} n={self.dim.n}>"

    @property
    def size(self) -> int:
        return self.dim.total

    def apply(self, v) -> np.ndarray:
        return apply(self, v)

    def transpose(self) -> StructureMatrix:
        inv = np.empty_like(self.target)
        inv[self.target] = np.arange(self.size)
        # S^T e_b = sign[a] e_a where target[a] = b
        return StructureMatrix(self.dim, inv, self.sign[inv], None)

    def negate(self) -> StructureMatrix:
        return StructureMatrix(self.dim, self.target, -self.sign, None)

    def dense(self) -> np.ndarray:
        m = self.size
        out = np.zeros((m, m))
        out[self.target, np.arange(m)] = self.sign
        return out

    def is_blockwise(self) -> bool:
        """True when target and sign only depend on the block of a column."""
        n = self.dim.n
        t = self.target.reshape(8, n)
        s = self.sign.reshape(8, n)
        offsets = np.arange(n)
        return bool(
            np.all(t % n == offsets)
            and np.all(t // n == (t[:, :1] // n))
            and np.all(s == s[:, :1])
        )

    def with_sign_flipped(self, index: int) -> StructureMatrix:
        """Copy with the sign of one column negated (fault injection)."""
        sign = self.sign.copy()
        sign[index] = -sign[index]
        return StructureMatrix(self.dim, self.target, sign, self.label)


def make_structure(label: str, dim: Dimension) -> StructureMatrix:
    if label not in BLOCK_ACTION:
        raise ValueError(f"unknown structure {label!r}; expected one of {LABELS}")
    n = dim.n
    target = np.empty(dim.total, dtype=np.int64)
    sign = np.empty(dim.total, dtype=np.int64)
    for block, (image, s) in enumerate(BLOCK_ACTION[label]):
        cols = slice(block * n, (block + 1) * n)
        target[cols] = image * n + np.arange(n)
        sign[cols] = s
    return StructureMatrix(dim, target, sign, label)


def identity(dim: Dimension) -> StructureMatrix:
    m = dim.total
    return StructureMatrix(dim, np.arange(m), np.ones(m, dtype=np.int64), "I")


def apply(S: StructureMatrix, v) -> np.ndarray:
    v = np.asarray(v)
    if v.shape[0] != S.size:
        raise DimensionMismatch(f"vector of length {v.shape[0]} for structure of size {S.size}")
    out = np.zeros(v.shape, dtype=np.result_type(v.dtype, np.int64))
    out[S.target] = S.sign.reshape((-1,) + (1,) * (v.ndim - 1)) * v
    return out


def compose(A: StructureMatrix, B: StructureMatrix) -> StructureMatrix:
    """Signed permutation of ``A @ B``."""
    if A.dim != B.dim:
        raise DimensionMismatch(f"n={A.dim.n} vs n={B.dim.n}")
    target = A.target[B.target]
    sign = A.sign[B.target] * B.sign
    label = f"{A.label}{B.label}" if A.label and B.label else None
    return StructureMatrix(A.dim, target, sign, label)


@dataclass
class IdentityCheck:
    name: str
    holds: bool
    counterexample: int | None = None

    def __str__(self):
        if self.holds:
            return f"{self.name}: ok"
        return f"{self.name}: FAILS at basis index {self.counterexample}"


@dataclass
class AlgebraReport:
    n: int
    squares: list[IdentityCheck]
    anticommutators: list[IdentityCheck]

    @property
    def ok(self) -> bool:
        return all(c.holds for c in self.squares + self.anticommutators)

    def failures(self) -> list[IdentityCheck]:
        return [c for c in self.squares + self.anticommutators if not c.holds]


def _first_mismatch(lhs: StructureMatrix, rhs: StructureMatrix) -> int | None:
    bad = np.flatnonzero((lhs.target != rhs.target) | (lhs.sign != rhs.sign))
    return int(bad[0]) if bad.size else None


def verify_algebra(dim: Dimension, structures: dict[str, StructureMatrix] | None = None) -> AlgebraReport:
    """Check ``J_k^2 = -I`` and ``J_a J_b = -J_b J_a`` on every basis vector.

    ``structures`` overrides the canonical ones (used to feed corrupted
    structures through the checker).
    """
    if structures is None:
        structures = {label: make_structure(label, dim) for label in LABELS}
    minus_id = identity(dim).negate()
    squares = []
    for label, S in structures.items():
        bad = _first_mismatch(compose(S, S), minus_id)
        squares.append(IdentityCheck(f"{label}^2 = -I", bad is None, bad))
    anticommutators = []
    for a, b in combinations(structures, 2):
        ab = compose(structures[a], structures[b])
        ba = compose(structures[b], structures[a])
        bad = _first_mismatch(ab, ba.negate())
        anticommutators.append(IdentityCheck(f"{a}{b} = -{b}{a}", bad is None, bad))
    return AlgebraReport(dim.n, squares, anticommutators)


def metric_compatibility(S: StructureMatrix, trials: int, rng_seed: int) -> float:
    """Largest ``|g(SX, SY) - g(X, Y)|`` over seeded Gaussian pairs."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(rng_seed)
    X = rng.standard_normal((S.size, trials))
    Y = rng.standard_normal((S.size, trials))
    lhs = np.einsum("at,at->t", apply(S, X), apply(S, Y))
    rhs = np.einsum("at,at->t", X, Y)
    return float(np.max(np.abs(lhs - rhs)))


@dataclass(frozen=True, eq=False)
class FundamentalForm:
    dim: Dimension
    matrix: np.ndarray


def fundamental_form(S: StructureMatrix) -> FundamentalForm:
    """Matrix of ``Phi(X, Y) = g(S X, Y)`` with the Euclidean metric."""
    m = S.size
    phi = np.zeros((m, m))
    # Phi[a, b] = g(S e_a, e_b) = sign[a] when b == target[a]
    phi[np.arange(m), S.target] = S.sign
    phi.flags.writeable = False
    return FundamentalForm(S.dim, phi)

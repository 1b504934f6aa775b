import numpy as np
import pytest
from hypothesis import given, strategies as st

from cliffmech.geometry import (
    LABELS,
    Dimension,
    DimensionMismatch,
    StructureMatrix,
    apply,
    compose,
    fundamental_form,
    identity,
    make_structure,
    metric_compatibility,
    verify_algebra,
)

from conftest import dense_from_printed

ns = st.integers(min_value=1, max_value=6)
labels = st.sampled_from(LABELS)


def basis(m, a):
    e = np.zeros(m, dtype=np.int64)
    e[a] = 1
    return e


def test_dimension():
    d = Dimension(3)
    assert d.total == 24
    assert d.flat(4, 2) == 14
    assert d.split(14) == (4, 2)
    with pytest.raises(ValueError):
        Dimension(0)
    with pytest.raises(TypeError):
        Dimension(1.5)


@given(ns)
def test_flat_index_bijective(n):
    d = Dimension(n)
    flats = [d.flat(b, o) for b in range(8) for o in range(n)]
    assert sorted(flats) == list(range(8 * n))
    assert all(d.split(d.flat(b, o)) == (b, o) for b in range(8) for o in range(n))


@pytest.mark.parametrize(
    "label, n, col, row, sign",
    [
        ("J1", 1, 0, 1, +1),
        ("J1", 1, 1, 0, -1),
        ("J2", 1, 3, 6, +1),
        ("J3", 2, 8, 14, +1),
    ],
)
def test_make_structure_examples(label, n, col, row, sign):
    S = make_structure(label, Dimension(n))
    assert S.target[col] == row
    assert S.sign[col] == sign


@pytest.mark.parametrize("label", LABELS)
@pytest.mark.parametrize("n", [1, 2, 3])
def test_matches_transcribed_table(label, n):
    S = make_structure(label, Dimension(n))
    assert np.array_equal(S.dense(), dense_from_printed(label, n))
    assert S.is_blockwise()


def test_apply_examples():
    J1 = make_structure("J1", Dimension(1))
    assert np.array_equal(apply(J1, basis(8, 0)), basis(8, 1))
    assert np.array_equal(apply(J1, np.zeros(8)), np.zeros(8))
    assert np.array_equal(apply(J1, [1, 1, 0, 0, 0, 0, 0, 0]), [-1, 1, 0, 0, 0, 0, 0, 0])
    with pytest.raises(DimensionMismatch):
        apply(J1, np.zeros(9))


def test_apply_matches_dense(rng):
    for label in LABELS:
        S = make_structure(label, Dimension(2))
        v = rng.standard_normal(16)
        np.testing.assert_array_equal(apply(S, v), S.dense() @ v)
        M = rng.standard_normal((16, 3))
        np.testing.assert_array_equal(apply(S, M), S.dense() @ M)


def test_compose_examples():
    d = Dimension(1)
    J1, J2 = make_structure("J1", d), make_structure("J2", d)
    assert compose(J1, J1) == identity(d).negate()
    assert np.array_equal(apply(compose(J1, J2), basis(8, 0)), basis(8, 4))
    assert compose(J1, J2) == compose(J2, J1).negate()
    with pytest.raises(DimensionMismatch):
        compose(J1, make_structure("J1", Dimension(2)))


def test_j3_is_not_j1j2():
    d = Dimension(1)
    J1, J2, J3 = (make_structure(k, d) for k in LABELS)
    assert apply(compose(J1, J2), basis(8, 0))[4] == 1
    assert apply(J3, basis(8, 0))[3] == 1
    assert compose(J1, J2) != J3


@given(ns, labels)
def test_square_is_minus_identity(n, label):
    S = make_structure(label, Dimension(n))
    m = 8 * n
    for a in range(m):
        assert np.array_equal(apply(S, apply(S, basis(m, a))), -basis(m, a))


@given(ns, labels, labels)
def test_anticommute(n, a, b):
    if a == b:
        return
    d = Dimension(n)
    A, B = make_structure(a, d), make_structure(b, d)
    assert compose(A, B) == compose(B, A).negate()
    dense = A.dense() @ B.dense() + B.dense() @ A.dense()
    assert not dense.any()


@given(ns, labels)
def test_transpose_is_negation(n, label):
    S = make_structure(label, Dimension(n))
    assert S.transpose() == S.negate()
    assert np.array_equal(S.transpose().dense(), S.dense().T)


@pytest.mark.parametrize("n", [1, 3])
def test_verify_algebra_holds(n):
    report = verify_algebra(Dimension(n))
    assert report.ok
    assert len(report.squares) == 3 and len(report.anticommutators) == 3


def test_verify_algebra_negative_control():
    d = Dimension(1)
    structures = {k: make_structure(k, d) for k in LABELS}
    structures["J2"] = structures["J2"].with_sign_flipped(3)
    report = verify_algebra(d, structures)
    assert not report.ok
    failing = {c.name: c.counterexample for c in report.failures()}
    assert failing["J2^2 = -I"] == 3
    assert "J1J2 = -J2J1" in failing


def test_structure_validation():
    d = Dimension(1)
    with pytest.raises(ValueError):
        StructureMatrix(d, [0, 0, 1, 2, 3, 4, 5, 6], [1] * 8)
    with pytest.raises(ValueError):
        StructureMatrix(d, list(range(8)), [2] * 8)
    with pytest.raises(DimensionMismatch):
        StructureMatrix(d, list(range(7)), [1] * 7)


@pytest.mark.parametrize("label", LABELS)
def test_metric_compatibility(label):
    S = make_structure(label, Dimension(1))
    assert metric_compatibility(S, 1000, 7) <= 1e-12
    # deterministic in the seed
    assert metric_compatibility(S, 50, 3) == metric_compatibility(S, 50, 3)


def test_metric_compatibility_is_only_orthogonality():
    # a diagonal sign flip is orthogonal but not a complex structure
    fake = identity(Dimension(1)).with_sign_flipped(0)
    assert metric_compatibility(fake, 100, 0) <= 1e-12
    assert not verify_algebra(Dimension(1), {"fake": fake}).ok


def test_fundamental_form_examples():
    phi = fundamental_form(make_structure("J1", Dimension(1))).matrix
    assert phi[0, 1] == 1
    assert phi[1, 0] == -1
    assert not np.diag(phi).any()


@given(ns, labels)
def test_fundamental_form_properties(n, label):
    S = make_structure(label, Dimension(n))
    phi = fundamental_form(S).matrix
    assert np.array_equal(phi + phi.T, np.zeros_like(phi))
    assert np.array_equal(phi, -S.dense())
    # direct evaluation g(S e_a, e_b)
    m = 8 * n
    for a in range(0, m, max(1, m // 8)):
        Sa = apply(S, basis(m, a))
        for b in range(m):
            assert phi[a, b] == Sa[b]

"""Unit tests for the linear algebra substrate."""

import numpy as np
import pytest

from pisomlab.numlin import (
    DEFAULT_TOL,
    IllConditionedSplit,
    NonCommuting,
    NotSquare,
    ShapeMismatch,
    Subspace,
    ToleranceConfig,
    approx_equal,
    commutator_norm,
    full_subspace,
    intersect_with_projection,
    is_projection,
    kernel_basis,
    range_basis,
    rank,
    zero_subspace,
)
from conftest import coord_projection, golden_generators, half_projection


def test_tolerance_config_bounds():
    ToleranceConfig(1e-10, 1e-10, 1e-2)
    with pytest.raises(ValueError):
        ToleranceConfig(eq_tol=0.0)
    with pytest.raises(ValueError):
        ToleranceConfig(proj_tol=-1e-9)
    with pytest.raises(ValueError):
        ToleranceConfig(rank_tol=0.5)


def test_approx_equal_identity():
    assert approx_equal(np.eye(2), np.eye(2))


def test_approx_equal_visible_perturbation():
    a = np.eye(2)
    b = np.eye(2).astype(complex)
    b[0, 0] += 1e-3
    assert not approx_equal(a, b)


def test_approx_equal_below_threshold():
    E = half_projection()
    Ep = E.astype(complex)
    Ep[0, 0] += 1e-12
    assert approx_equal(E, Ep)


def test_approx_equal_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        approx_equal(np.eye(2), np.eye(3))


def test_approx_equal_reflexive_symmetric():
    rng = np.random.default_rng(0)
    for _ in range(20):
        a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        b = a + rng.standard_normal((3, 3)) * 1e-10
        assert approx_equal(a, a)
        assert approx_equal(a, b) == approx_equal(b, a)


def test_is_projection_examples():
    assert is_projection(half_projection())
    assert is_projection(np.zeros((2, 2)))
    # E @ F is not hermitian: [[.5, 0], [.5, 0]] by direct 2x2 arithmetic
    EF = half_projection() @ coord_projection()
    assert np.allclose(EF, [[0.5, 0.0], [0.5, 0.0]])
    assert not is_projection(EF)


def test_is_projection_requires_square():
    with pytest.raises(NotSquare):
        is_projection(np.zeros((2, 3)))


def test_rank_examples():
    assert rank(np.eye(5)) == 5
    # E has eigenvalues {0, 1}: rank one
    assert rank(half_projection()) == 1
    assert rank(np.zeros((3, 3))) == 0


def test_range_basis_examples():
    assert range_basis(np.eye(3)).dim == 3
    sub = range_basis(half_projection())
    assert sub.dim == 1
    direction = sub.basis[:, 0]
    expected = np.array([1.0, 1.0]) / np.sqrt(2)
    # equal up to phase
    assert abs(abs(np.vdot(direction, expected)) - 1.0) < 1e-12
    assert range_basis(np.zeros((4, 4))).dim == 0


def test_range_basis_reprojection_bound():
    rng = np.random.default_rng(1)
    for _ in range(10):
        a = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        sub = range_basis(a)
        resid = (np.eye(5) - sub.projection()) @ a
        assert np.linalg.norm(resid) <= DEFAULT_TOL.rank_tol * np.linalg.norm(a)


def test_kernel_basis_complements_range():
    rng = np.random.default_rng(2)
    a = rng.standard_normal((4, 6))
    k = kernel_basis(a)
    assert k.dim == 6 - rank(a)
    assert np.linalg.norm(a @ k.basis) < 1e-10


def test_subspace_validation():
    sub = full_subspace(3)
    assert sub.validate()
    assert zero_subspace(3).dim == 0
    with pytest.raises(ShapeMismatch):
        Subspace(2, np.zeros((3, 1)))


def test_intersect_with_projection_coordinate():
    F = coord_projection()
    full = full_subspace(2)
    inside = intersect_with_projection(full, F, True)
    assert inside.dim == 1
    assert abs(abs(inside.basis[0, 0]) - 1.0) < 1e-12
    e1 = Subspace(2, np.array([[1.0], [0.0]], dtype=complex))
    outside = intersect_with_projection(e1, F, False)
    assert outside.dim == 0


def test_intersect_with_projection_golden_block():
    # final projection of B is the identity on the first 2x2 block
    _, B, _ = golden_generators()
    QB = B @ B.conj().T
    sub = intersect_with_projection(full_subspace(8), QB, True)
    assert sub.dim == 2
    proj = sub.projection()
    expected = np.zeros((8, 8))
    expected[0, 0] = expected[1, 1] = 1.0
    assert np.allclose(proj, expected)


def test_intersect_with_projection_noncommuting():
    E = half_projection()
    e1 = Subspace(2, np.array([[1.0], [0.0]], dtype=complex))
    with pytest.raises(NonCommuting):
        intersect_with_projection(e1, E, True)


def test_intersect_dimension_additivity():
    rng = np.random.default_rng(3)
    for _ in range(10):
        n = 6
        d = np.diag(rng.integers(0, 2, size=n).astype(complex))
        sub = full_subspace(n)
        inside = intersect_with_projection(sub, d, True)
        outside = intersect_with_projection(sub, d, False)
        assert inside.dim + outside.dim == n


def test_commutator_norm_examples():
    E = half_projection()
    F = coord_projection()
    assert commutator_norm(E, E) == 0.0
    # EF - FE = [[0, -1/2], [1/2, 0]] by direct arithmetic, Frobenius 1/sqrt(2)
    assert commutator_norm(E, F) == pytest.approx(1.0 / np.sqrt(2), abs=1e-15)
    rng = np.random.default_rng(4)
    x = rng.standard_normal((4, 4))
    assert commutator_norm(np.eye(4), x) < 1e-14


def test_commutator_norm_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        commutator_norm(np.eye(2), np.eye(3))


def test_projection_rank_complement():
    rng = np.random.default_rng(5)
    for _ in range(10):
        n = 5
        q, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        k = int(rng.integers(0, n + 1))
        p = q[:, :k] @ q[:, :k].conj().T
        assert is_projection(p)
        assert rank(p) + rank(np.eye(n) - p) == n
        assert range_basis(p).dim == rank(p)


def test_ill_conditioned_split_guard():
    # a "projection" with a singular value sitting exactly on the cutoff scale
    bad = np.diag([1.0, 1e-8, 0.0])
    with pytest.raises(IllConditionedSplit):
        range_basis(bad, ambiguity_factor=10.0)

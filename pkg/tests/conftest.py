import pathlib

import numpy as np
import pytest

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def half_projection():
    return np.array([[0.5, 0.5], [0.5, 0.5]])


def coord_projection():
    return np.array([[1.0, 0.0], [0.0, 0.0]])


def golden_generators():
    """The 8x8 generators A, B, C built from the non-commuting pair E, F."""
    E = half_projection()
    F = coord_projection()
    Z = np.zeros((2, 2))
    I2 = np.eye(2)
    A = np.block([[Z, E, Z, Z], [Z, Z, Z, Z], [Z, Z, Z, Z], [Z, Z, Z, Z]])
    B = np.block([[Z, Z, Z, I2], [Z, Z, Z, Z], [Z, Z, Z, Z], [Z, Z, Z, Z]])
    C = np.block([[Z, Z, Z, Z], [Z, Z, Z, Z], [Z, Z, Z, F], [Z, Z, Z, Z]])
    return A, B, C


def block_diag_matrix(E, position, blocks=4):
    """Place the 2x2 block E at the given diagonal block of an 8x8 matrix."""
    out = np.zeros((2 * blocks, 2 * blocks), dtype=complex)
    out[2 * position:2 * position + 2, 2 * position:2 * position + 2] = E
    return out


def matrix_unit(n, i, j):
    m = np.zeros((n, n), dtype=complex)
    m[i, j] = 1.0
    return m


@pytest.fixture
def golden():
    return golden_generators()


@pytest.fixture
def fixtures_dir():
    return FIXTURES

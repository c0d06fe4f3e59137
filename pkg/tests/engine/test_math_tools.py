"""Tests for exact integer matrix tools."""

import pytest
import sys
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from sympy import ImmutableMatrix

from src.errors import DomainError, NotInvertibleError
from src.math_tools import (
    block_diagonal,
    charpoly_coefficients,
    cyclotomic_orders,
    identity,
    integer_det,
    integer_inverse,
    integer_kernel_basis,
    integer_row_echelon,
    lcm_of,
    matrix_power,
    permanent_power,
    smith_diagonal,
    to_integer_matrix,
)


def test_to_integer_matrix_validation():
    assert to_integer_matrix([[1, 2], [3, 4]]).shape == (2, 2)
    with pytest.raises(DomainError, match="ragged"):
        to_integer_matrix([[1, 2], [3]])
    with pytest.raises(DomainError, match="not an integer"):
        to_integer_matrix([[True, 0], [0, 1]])
    with pytest.raises(DomainError):
        to_integer_matrix("[[1]]")


def test_integer_inverse():
    A = ImmutableMatrix([[2, 1], [1, 1]])
    assert A * integer_inverse(A) == identity(2)
    with pytest.raises(NotInvertibleError) as excinfo:
        integer_inverse(ImmutableMatrix([[2, 0], [0, 1]]), degree=3)
    assert "degree 3" in str(excinfo.value)


def test_negative_powers():
    A = ImmutableMatrix([[2, 1], [1, 1]])
    assert matrix_power(A, -2) * matrix_power(A, 2) == identity(2)
    assert matrix_power(A, 0) == identity(2)


def test_empty_matrix_conventions():
    empty = ImmutableMatrix.zeros(0, 0)
    assert integer_det(empty) == 1
    assert charpoly_coefficients(empty) == [1]
    assert block_diagonal([]).shape == (0, 0)


def test_cyclotomic_orders():
    assert cyclotomic_orders([1, 0, 1]) == [4]
    assert cyclotomic_orders([1, -2, 1]) == [1]
    # x^2 - 3x + 1
    assert cyclotomic_orders([1, -3, 1]) == []
    # (x^2 - 1)(x^2 + x + 1) = x^4 + x^3 - x - 1
    assert cyclotomic_orders([1, 1, 0, -1, -1]) == [1, 2, 3]
    assert lcm_of([2, 3, 4]) == 12
    assert lcm_of([]) == 1


def test_permanent_power():
    """Products of commuting square-zero classes pick up permanents, not minors."""
    A = ImmutableMatrix([[1, 1], [1, -1]])
    assert permanent_power(A, 2) == ImmutableMatrix([[0]])
    assert permanent_power(A, 0) == ImmutableMatrix([[1]])
    assert permanent_power(ImmutableMatrix([[0, 1], [1, 0]]), 2) == ImmutableMatrix([[1]])
    with pytest.raises(DomainError):
        permanent_power(A, 3)


def test_row_echelon_transform_is_unimodular():
    M = ImmutableMatrix([[4, 6, 2], [2, 3, 1], [1, 0, 5]])
    H, U, rank = integer_row_echelon(M)
    assert H == U * M
    assert integer_det(U) in (1, -1)
    assert rank == 2


def test_kernel_basis_is_saturated():
    """ker [2, 4] over Z is spanned by (-2, 1), not (-4, 2)."""
    K = integer_kernel_basis(ImmutableMatrix([[2, 4]]))
    assert K.shape == (2, 1)
    assert ImmutableMatrix([[2, 4]]) * K == ImmutableMatrix([[0]])
    assert sorted(abs(int(v)) for v in K) == [1, 2]
    assert integer_kernel_basis(identity(3)).shape == (3, 0)


def test_smith_diagonal():
    assert smith_diagonal(ImmutableMatrix([[2, 0], [0, 3]])) == [1, 6]
    assert smith_diagonal(ImmutableMatrix([[1, 1], [1, 1]])) == [1, 0]

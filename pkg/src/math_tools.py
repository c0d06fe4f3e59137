"""Exact integer matrix tools using SymPy."""

from functools import reduce
from itertools import combinations
from typing import Any, List, Sequence, Tuple

from sympy import ImmutableMatrix, Poly, Symbol, cyclotomic_poly, diag, ilcm, totient
from sympy.matrices import MatrixBase
from sympy.matrices.normalforms import smith_normal_form
from sympy.polys.domains import ZZ

try:
    from sympy.core.intfunc import igcdex
except ImportError:  # sympy < 1.13
    from sympy.core.numbers import igcdex

from src.errors import DomainError, NotInvertibleError

X = Symbol("x")


def _is_integer_entry(value: Any) -> bool:
    if isinstance(value, bool):
        return False
    if isinstance(value, int):
        return True
    return bool(getattr(value, "is_Integer", False))


def to_integer_matrix(rows: Any, name: str = "matrix") -> ImmutableMatrix:
    """Convert nested lists (or a SymPy matrix) into an integer matrix.

    Args:
        rows: Nested list of integers or a SymPy matrix
        name: Name used in error messages

    Returns:
        Immutable integer matrix

    Raises:
        DomainError: If the input is ragged or has non-integer entries
    """
    if isinstance(rows, MatrixBase):
        if not all(_is_integer_entry(v) for v in rows):
            raise DomainError(f"{name} has non-integer entries")
        return ImmutableMatrix(rows)
    if not isinstance(rows, (list, tuple)):
        raise DomainError(f"{name} must be a list of rows")
    if len(rows) == 0:
        return ImmutableMatrix.zeros(0, 0)
    width = None
    flat = []
    for i, row in enumerate(rows):
        if not isinstance(row, (list, tuple)):
            raise DomainError(f"{name} row {i} is not a list")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise DomainError(f"{name} is ragged: row {i} has {len(row)} entries, expected {width}")
        for j, value in enumerate(row):
            if not _is_integer_entry(value):
                raise DomainError(f"{name}[{i}][{j}] = {value!r} is not an integer")
            flat.append(int(value))
    return ImmutableMatrix(len(rows), width, flat)


def matrix_to_lists(matrix: MatrixBase) -> List[List[int]]:
    """Plain nested integer lists, for JSON output."""
    return [[int(matrix[i, j]) for j in range(matrix.cols)] for i in range(matrix.rows)]


def require_square(matrix: MatrixBase, name: str = "matrix") -> int:
    if matrix.rows != matrix.cols:
        raise DomainError(f"{name} must be square, got {matrix.rows}x{matrix.cols}")
    return matrix.rows


def identity(n: int) -> ImmutableMatrix:
    return ImmutableMatrix.eye(n)


def integer_det(matrix: MatrixBase) -> int:
    """Exact determinant (fraction-free Bareiss elimination)."""
    require_square(matrix)
    if matrix.rows == 0:
        return 1
    return int(matrix.det(method="bareiss"))


def is_unimodular(matrix: MatrixBase) -> bool:
    return matrix.rows == matrix.cols and integer_det(matrix) in (1, -1)


def integer_inverse(matrix: MatrixBase, degree: int = None) -> ImmutableMatrix:
    """Inverse over the integers as adjugate times determinant.

    Since det is +1 or -1, dividing by det is the same as multiplying by it,
    so no rational intermediate ever appears.

    Raises:
        NotInvertibleError: If det is not +1 or -1
    """
    det = integer_det(matrix)
    if det not in (1, -1):
        where = f" in degree {degree}" if degree is not None else ""
        raise NotInvertibleError(f"matrix{where} is not invertible over Z (det = {det})", degree)
    if matrix.rows == 0:
        return ImmutableMatrix(matrix)
    return ImmutableMatrix(matrix.adjugate() * det)


def matrix_power(matrix: MatrixBase, exponent: int) -> ImmutableMatrix:
    """Integer matrix power; negative exponents go through the adjugate inverse."""
    require_square(matrix)
    if matrix.rows == 0:
        return ImmutableMatrix(matrix)
    if exponent >= 0:
        return ImmutableMatrix(matrix ** exponent)
    return ImmutableMatrix(integer_inverse(matrix) ** (-exponent))


def integer_trace(matrix: MatrixBase) -> int:
    if matrix.rows == 0:
        return 0
    return int(matrix.trace())


def charpoly_coefficients(matrix: MatrixBase) -> List[int]:
    """Characteristic polynomial det(x I - M), highest degree first."""
    require_square(matrix)
    if matrix.rows == 0:
        return [1]
    return [int(c) for c in matrix.charpoly(X).all_coeffs()]


def cyclotomic_orders(coefficients: Sequence[int]) -> List[int]:
    """Orders k such that the k-th cyclotomic polynomial divides the polynomial.

    Only k with totient(k) <= degree can occur; totient(k) >= sqrt(k/2)
    bounds the scan by 2*degree**2 + 2.
    """
    degree = len(coefficients) - 1
    if degree < 1:
        return []
    poly = Poly(list(coefficients), X)
    orders = []
    for k in range(1, 2 * degree * degree + 3):
        if totient(k) > degree:
            continue
        if poly.rem(Poly(cyclotomic_poly(k, X), X)).is_zero:
            orders.append(k)
    return orders


def lcm_of(values: Sequence[int]) -> int:
    return reduce(ilcm, values, 1)


def permanent_power(matrix: MatrixBase, k: int) -> ImmutableMatrix:
    """Matrix of k x k permanents indexed by lexicographic k-subsets.

    This is the action induced on products of k distinct square-zero
    commuting classes.
    """
    n = require_square(matrix)
    if not 0 <= k <= n:
        raise DomainError(f"permanent power {k} out of range for a {n}x{n} matrix")
    subsets = list(combinations(range(n), k))
    if k == 0:
        return ImmutableMatrix([[1]])
    entries = [
        int(matrix.extract(list(rows), list(cols)).per())
        for rows in subsets
        for cols in subsets
    ]
    return ImmutableMatrix(len(subsets), len(subsets), entries)


def block_diagonal(blocks: Sequence[MatrixBase]) -> ImmutableMatrix:
    if not blocks:
        return ImmutableMatrix.zeros(0, 0)
    return ImmutableMatrix(diag(*blocks))


def integer_row_echelon(matrix: MatrixBase) -> Tuple[ImmutableMatrix, ImmutableMatrix, int]:
    """Row echelon form over Z with the unimodular transform.

    Rows are combined pairwise with extended-gcd coefficients, so every step
    is an invertible integer operation.

    Returns:
        (H, U, rank) with H = U * matrix and det U = +1 or -1
    """
    rows, cols = matrix.shape
    H = [[int(matrix[i, j]) for j in range(cols)] for i in range(rows)]
    U = [[int(i == j) for j in range(rows)] for i in range(rows)]
    pivot = 0
    for col in range(cols):
        if pivot == rows:
            break
        for r in range(pivot + 1, rows):
            b = H[r][col]
            if b == 0:
                continue
            a = H[pivot][col]
            s, t, g = igcdex(a, b)
            ag, bg = a // g, b // g
            for M in (H, U):
                top, bottom = M[pivot], M[r]
                M[pivot] = [s * u + t * v for u, v in zip(top, bottom)]
                M[r] = [-bg * u + ag * v for u, v in zip(top, bottom)]
        if H[pivot][col] == 0:
            continue
        if H[pivot][col] < 0:
            H[pivot] = [-v for v in H[pivot]]
            U[pivot] = [-v for v in U[pivot]]
        pivot += 1
    echelon = ImmutableMatrix(rows, cols, [v for row in H for v in row])
    transform = ImmutableMatrix(rows, rows, [v for row in U for v in row])
    return echelon, transform, pivot


def integer_kernel_basis(matrix: MatrixBase) -> ImmutableMatrix:
    """Saturated basis (as columns) of {v in Z^n : matrix * v = 0}.

    The trailing rows of the unimodular transform that reduces the transpose
    are a Z-basis of the kernel lattice, hence saturated.
    """
    n = matrix.cols
    _, transform, rank = integer_row_echelon(matrix.T)
    if rank == n:
        return ImmutableMatrix.zeros(n, 0)
    rows = [transform.row(i) for i in range(rank, n)]
    return ImmutableMatrix(ImmutableMatrix.vstack(*rows).T)


def smith_diagonal(matrix: MatrixBase) -> List[int]:
    """Absolute values of the Smith normal form diagonal."""
    snf = smith_normal_form(matrix.as_mutable(), domain=ZZ)
    return [abs(int(snf[i, i])) for i in range(min(snf.shape))]

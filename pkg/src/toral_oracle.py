"""Periodic-point counts of toral automorphisms, used as ground truth.

A unimodular n x n matrix A acts on the n-torus; A^l fixes exactly
|det(A^l - I)| points when that determinant is nonzero. This agrees with
the Lefschetz number of the induced map on H*((S^1)^n) and with the order
of the cokernel of A^l - I.
"""

import csv
import io
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import mpmath
import numpy as np
from sympy import ImmutableMatrix, Matrix, Poly

from src.automorphism import GradedAutomorphism, induce
from src.config import Config
from src.errors import (
    DomainError,
    NonIsolatedFixedPointsError,
    OracleMismatchError,
    PreconditionError,
    SearchBoundExceededError,
)
from src.graded_ring import torus_ring
from src.lefschetz import TraceConvention, certified_roots, growth_analysis, lefschetz_sequence
from src.logger import setup_logger
from src.math_tools import (
    X,
    charpoly_coefficients,
    cyclotomic_orders,
    identity,
    integer_det,
    matrix_power,
    matrix_to_lists,
    smith_diagonal,
    to_integer_matrix,
)

logger = setup_logger(__name__)


def _irreducible_factors(coefficients: List[int]):
    _, factors = Poly(coefficients, X).factor_list()
    return [([int(c) for c in f.all_coeffs()], m) for f, m in factors if f.degree() > 0]


@dataclass(frozen=True)
class ToralMap:
    matrix: ImmutableMatrix

    @classmethod
    def from_matrix(cls, rows: Any) -> "ToralMap":
        """Wrap a matrix in GL(n, Z).

        Raises:
            PreconditionError: If the matrix is not square with det +1 or -1
        """
        A = to_integer_matrix(rows, "A")
        if A.rows == 0 or A.rows != A.cols:
            raise PreconditionError(f"toral map needs a non-empty square matrix, got {A.rows}x{A.cols}")
        det = integer_det(A)
        if det not in (1, -1):
            raise PreconditionError(f"toral map needs det +1 or -1, got {det}")
        return cls(A)

    @property
    def dimension(self) -> int:
        return self.matrix.rows

    @property
    def hyperbolic(self) -> bool:
        """No eigenvalue on the unit circle.

        A unit-circle root z of an integer polynomial p is also a root of its
        reciprocal, since 1/z is the conjugate of z. Roots of unity are ruled
        out exactly; the remaining common roots of p and its reciprocal are
        located numerically.
        """
        coefficients = charpoly_coefficients(self.matrix)
        if cyclotomic_orders(coefficients):
            return False
        common = Poly(coefficients, X).gcd(Poly(coefficients[::-1], X))
        if common.degree() == 0:
            return True
        precision = Config.EIGEN_PRECISION
        with mpmath.workdps(precision):
            slack = mpmath.mpf(10) ** (-(precision // 2))
            for factor, _ in _irreducible_factors([int(c) for c in common.all_coeffs()]):
                for root in certified_roots(factor, precision):
                    if abs(abs(root.value) - 1) <= root.error + slack:
                        return False
        return True

    def expanding_product(self) -> float:
        """Product of |lambda| over eigenvalues outside the unit circle."""
        with mpmath.workdps(Config.EIGEN_PRECISION):
            total = mpmath.mpf(1)
            for factor, multiplicity in _irreducible_factors(charpoly_coefficients(self.matrix)):
                for root in certified_roots(factor):
                    if abs(root.value) > 1:
                        total *= abs(root.value) ** multiplicity
            return float(total)

    def automorphism(self) -> GradedAutomorphism:
        """Induced map on H*((S^1)^n) with f*(x_i) given by row i of A."""
        ring = torus_ring(self.dimension)
        images = {g.label: [int(v) for v in self.matrix.row(i)] for i, g in enumerate(ring.generators)}
        return induce(ring, images)


def _shifted_power(toral: ToralMap, l: int) -> ImmutableMatrix:
    if l < 1:
        raise DomainError(f"period must be at least 1, got {l}")
    return ImmutableMatrix(matrix_power(toral.matrix, l) - identity(toral.dimension))


def fixed_point_count(toral: ToralMap, l: int) -> int:
    """Number of points fixed by A^l, as |det(A^l - I)|.

    Raises:
        NonIsolatedFixedPointsError: If det(A^l - I) = 0
    """
    det = integer_det(_shifted_power(toral, l))
    if det == 0:
        raise NonIsolatedFixedPointsError(f"A^{l} - I is singular; fixed points are not isolated", l)
    return abs(det)


def smith_count(toral: ToralMap, l: int) -> int:
    """Order of Z^n / (A^l - I) Z^n from the Smith normal form."""
    diagonal = smith_diagonal(_shifted_power(toral, l))
    order = 1
    for d in diagonal:
        order *= d
    if order == 0:
        raise NonIsolatedFixedPointsError(f"A^{l} - I has infinite cokernel", l)
    return order


@dataclass(frozen=True)
class CrossCheckRow:
    l: int
    lefschetz: int
    det_count: int
    smith_count: int


@dataclass(frozen=True)
class CrossCheckReport:
    matrix: ImmutableMatrix
    rows: List[CrossCheckRow]
    dominant_modulus: float
    expected_modulus: float
    coefficient: float
    entropy: float

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["l", "lefschetz", "det_count", "smith_count"])
        for row in self.rows:
            writer.writerow([row.l, row.lefschetz, row.det_count, row.smith_count])
        return buffer.getvalue()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "matrix": matrix_to_lists(self.matrix),
            "rows": [
                {"l": r.l, "lefschetz": r.lefschetz, "det_count": r.det_count, "smith_count": r.smith_count}
                for r in self.rows
            ],
            "dominant_modulus": self.dominant_modulus,
            "expected_modulus": self.expected_modulus,
            "coefficient": self.coefficient,
            "entropy": self.entropy,
        }


def lefschetz_cross_check(toral: ToralMap, length: Optional[int] = None) -> CrossCheckReport:
    """Compare three periodic-point counts and the growth law for l = 1..length.

    Args:
        toral: A hyperbolic toral map
        length: Number of periods (Config.LEFSCHETZ_LENGTH by default)

    Returns:
        CrossCheckReport with one row per period

    Raises:
        PreconditionError: If the map is not hyperbolic
        OracleMismatchError: If any two counts disagree, or the growth law
            does not have coefficient 1 at the product of expanding eigenvalues
    """
    if not toral.hyperbolic:
        raise PreconditionError(f"{matrix_to_lists(toral.matrix)} is not hyperbolic")
    length = Config.LEFSCHETZ_LENGTH if length is None else length
    aut = toral.automorphism()
    sequence = lefschetz_sequence(aut, length, TraceConvention.FORWARD_TRACES).values
    rows = []
    for l in range(1, length + 1):
        row = CrossCheckRow(l, sequence[l - 1], fixed_point_count(toral, l), smith_count(toral, l))
        if abs(row.lefschetz) != row.det_count or row.det_count != row.smith_count:
            raise OracleMismatchError(
                f"counts disagree at l={l}: lefschetz {row.lefschetz}, "
                f"det {row.det_count}, smith {row.smith_count}",
                l,
            )
        rows.append(row)

    summary = growth_analysis(aut, TraceConvention.FORWARD_TRACES)
    tolerance = Config.GROWTH_RELATIVE_TOLERANCE
    leading = next(g for g in summary.groups if g.coefficient > tolerance)
    expected = toral.expanding_product()
    if abs(leading.coefficient - 1) > tolerance:
        raise OracleMismatchError(f"leading growth coefficient is {leading.coefficient:.8g}, expected 1")
    if abs(leading.modulus - expected) > tolerance * expected:
        raise OracleMismatchError(
            f"growth rate {leading.modulus:.10g} differs from expanding product {expected:.10g}"
        )
    logger.info(f"toral cross-check passed for l = 1..{length}, rate {expected:.10g}")
    return CrossCheckReport(
        matrix=toral.matrix,
        rows=rows,
        dominant_modulus=leading.modulus,
        expected_modulus=expected,
        coefficient=leading.coefficient,
        entropy=summary.entropy,
    )


def random_unimodular_matrix(
    n: int,
    rng: np.random.Generator,
    steps: Optional[int] = None,
    determinant: Optional[int] = None,
) -> ImmutableMatrix:
    """Product of random elementary matrices, with a row sign flip for det -1.

    Args:
        n: Dimension
        rng: NumPy generator
        steps: Number of elementary row operations (2n + 2 by default)
        determinant: Required determinant, or None to pick +1 or -1 at random
    """
    if n < 1:
        raise DomainError("dimension must be positive")
    if determinant not in (None, 1, -1):
        raise DomainError(f"determinant must be +1 or -1, got {determinant}")
    M = Matrix.eye(n)
    for _ in range(steps if steps is not None else 2 * n + 2):
        if n == 1:
            break
        i, j = (int(v) for v in rng.choice(n, size=2, replace=False))
        M[i, :] = M[i, :] + int(rng.choice([-1, 1])) * M[j, :]
    flip = bool(rng.integers(2)) if determinant is None else determinant == -1
    if flip:
        M[0, :] = -M[0, :]
    return ImmutableMatrix(M)


def random_hyperbolic_matrix(
    n: int,
    rng: np.random.Generator,
    entry_bound: int = 10,
    max_attempts: int = 500,
    determinant: Optional[int] = None,
) -> ToralMap:
    """Rejection-sample a hyperbolic map with entries bounded by entry_bound.

    Raises:
        PreconditionError: If n < 2 (no hyperbolic map exists)
        SearchBoundExceededError: If no sample is accepted within max_attempts
    """
    if n < 2:
        raise PreconditionError("hyperbolic toral maps need dimension at least 2")
    for _ in range(max_attempts):
        A = random_unimodular_matrix(n, rng, determinant=determinant)
        if max(abs(int(v)) for v in A) > entry_bound:
            continue
        toral = ToralMap(A)
        if toral.hyperbolic:
            return toral
    raise SearchBoundExceededError(f"no hyperbolic {n}x{n} sample in {max_attempts} attempts")

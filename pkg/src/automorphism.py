"""Graded ring automorphisms as per-degree integer matrices.

Matrices follow the row convention: row i of M_d holds the coordinates of
f*(basis_d[i]) in basis_d.
"""

from dataclasses import dataclass
from enum import Enum
from itertools import combinations, product
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from sympy import ImmutableMatrix, kronecker_product

from src.errors import DomainError, NotInvertibleError, NotRingMapError
from src.graded_ring import (
    Element,
    GradedRingDescription,
    betti,
    build_basis,
    basis_index,
    cup,
    element_from_vector,
    element_to_vector,
    intersection_pairing,
    multiply,
)
from src.logger import setup_logger
from src.math_tools import (
    identity,
    integer_det,
    integer_inverse,
    matrix_power,
    to_integer_matrix,
)

logger = setup_logger(__name__)

# Generator label -> coordinate vector over build_basis(ring, generator.degree)
GeneratorImages = Mapping[str, Sequence[int]]


class Normalization(str, Enum):
    """How the middle solver treats the top class."""
    OMEGA_FIXED = "omega_fixed"      # f* fixes the top class
    MAPPING_CLASS = "mapping_class"  # f* may reverse the top class


@dataclass(frozen=True)
class GradedAutomorphism:
    """Per-degree unimodular matrices of an induced map f*."""

    ring: GradedRingDescription
    matrices: Tuple[ImmutableMatrix, ...]

    def matrix(self, d: int) -> ImmutableMatrix:
        if not 0 <= d < len(self.matrices):
            raise DomainError(f"degree {d} outside [0, {len(self.matrices) - 1}]")
        return self.matrices[d]

    @property
    def top_sign(self) -> int:
        return int(self.matrices[-1][0, 0])

    def degree_matrices(self) -> Dict[int, ImmutableMatrix]:
        """Non-empty degrees only."""
        return {d: m for d, m in enumerate(self.matrices) if m.rows}


@dataclass(frozen=True)
class CupViolation:
    """f*(a cup b) differs from f*a cup f*b for basis_d[i], basis_e[j]."""

    d: int
    e: int
    i: int
    j: int
    lhs: Tuple[int, ...]
    rhs: Tuple[int, ...]


def identity_automorphism(ring: GradedRingDescription) -> GradedAutomorphism:
    return GradedAutomorphism(
        ring, tuple(identity(betti(ring, d)) for d in range(ring.top_degree + 1))
    )


def _check_unimodular(matrices: Sequence[ImmutableMatrix]) -> None:
    for d, m in enumerate(matrices):
        det = integer_det(m)
        if det not in (1, -1):
            raise NotInvertibleError(f"f* in degree {d} is not invertible over Z (det = {det})", d)


def from_degree_matrices(
    ring: GradedRingDescription, degree_matrices: Mapping
) -> GradedAutomorphism:
    """Build an automorphism from an explicit per-degree matrix family.

    The family is not required to respect cup products; use
    check_cup_preservation for that.

    Args:
        ring: Ring the matrices act on
        degree_matrices: Degree (int or numeric string) -> square integer matrix.
            Degree 0 may be omitted and defaults to [1].

    Returns:
        GradedAutomorphism

    Raises:
        DomainError: On shape mismatches, missing degrees, or M_0 != [1]
        NotInvertibleError: If some M_d has det other than +1 or -1
    """
    given: Dict[int, ImmutableMatrix] = {}
    for key, rows in degree_matrices.items():
        try:
            d = int(key)
        except (TypeError, ValueError):
            raise DomainError(f"degree key {key!r} is not an integer")
        given[d] = to_integer_matrix(rows, name=f"M_{d}")
    matrices = []
    for d in range(ring.top_degree + 1):
        b = betti(ring, d)
        if d not in given:
            if d == 0:
                matrices.append(identity(1))
                continue
            if b:
                raise DomainError(f"missing matrix for degree {d} (betti number {b})")
            matrices.append(identity(0))
            continue
        m = given.pop(d)
        if m.shape != (b, b):
            raise DomainError(f"M_{d} must be {b}x{b}, got {m.rows}x{m.cols}")
        matrices.append(m)
    if given:
        raise DomainError(f"degrees outside [0, {ring.top_degree}]: {sorted(given)}")
    if matrices[0] != identity(1):
        raise DomainError("M_0 must be [1]")
    _check_unimodular(matrices)
    return GradedAutomorphism(ring, tuple(matrices))


def _element_power(ring: GradedRingDescription, element: Element, n: int) -> Element:
    result: Element = {ring.unit(): 1}
    for _ in range(n):
        result = multiply(ring, result, element)
    return result


def induce(ring: GradedRingDescription, images: GeneratorImages) -> GradedAutomorphism:
    """Extend generator images multiplicatively to every basis monomial.

    Args:
        ring: Ring description
        images: Generator label -> coordinates of f*(generator)

    Returns:
        The induced GradedAutomorphism

    Raises:
        NotRingMapError: If some image violates its generator's nilpotency
        NotInvertibleError: If some induced M_d is not unimodular
    """
    unknown = set(images) - {g.label for g in ring.generators}
    if unknown:
        raise DomainError(f"images given for unknown generators: {', '.join(sorted(unknown))}")
    elements: List[Element] = []
    for g in ring.generators:
        if g.label not in images:
            raise DomainError(f"no image given for generator {g.label}")
        element = element_from_vector(ring, g.degree, list(images[g.label]))
        if _element_power(ring, element, g.nilpotency):
            raise NotRingMapError(
                f"image of {g.label} does not satisfy {g.label}^{g.nilpotency} = 0", g.label
            )
        elements.append(element)

    power_cache: Dict[Tuple[int, int], Element] = {}

    def generator_power(i: int, e: int) -> Element:
        if (i, e) not in power_cache:
            power_cache[(i, e)] = _element_power(ring, elements[i], e)
        return power_cache[(i, e)]

    matrices = []
    for d in range(ring.top_degree + 1):
        rows = []
        for monomial in build_basis(ring, d):
            image: Element = {ring.unit(): 1}
            for i, e in enumerate(monomial.exponents):
                if e:
                    image = multiply(ring, image, generator_power(i, e))
            rows.append(element_to_vector(ring, d, image))
        matrices.append(ImmutableMatrix(len(rows), len(rows), [v for row in rows for v in row]))
    _check_unimodular(matrices)
    logger.debug(f"induced automorphism on {ring.size} generators, top degree {ring.top_degree}")
    return GradedAutomorphism(ring, tuple(matrices))


def _check_shapes(aut: GradedAutomorphism) -> None:
    ring = aut.ring
    if len(aut.matrices) != ring.top_degree + 1:
        raise DomainError("automorphism degree range does not match the ring")
    for d, m in enumerate(aut.matrices):
        b = betti(ring, d)
        if m.shape != (b, b):
            raise DomainError(f"M_{d} must be {b}x{b}, got {m.rows}x{m.cols}")


def check_cup_preservation(aut: GradedAutomorphism) -> List[CupViolation]:
    """All basis pairs on which f* fails to be multiplicative.

    Pairs with d > e are skipped: both sides of the identity pick up the
    same Koszul sign under swapping the factors.
    """
    _check_shapes(aut)
    ring = aut.ring
    top = ring.top_degree
    rows = {
        d: [[int(v) for v in aut.matrices[d].row(i)] for i in range(aut.matrices[d].rows)]
        for d in range(top + 1)
    }
    violations = []
    for d in range(top + 1):
        for e in range(d, top + 1 - d):
            left_basis, right_basis = build_basis(ring, d), build_basis(ring, e)
            target = basis_index(ring, d + e)
            width = len(target)
            for i, a in enumerate(left_basis):
                fa = element_from_vector(ring, d, rows[d][i])
                for j, b in enumerate(right_basis):
                    product_ = cup(ring, a, b)
                    lhs = [0] * width
                    if not product_.is_zero:
                        lhs = [product_.sign * v for v in rows[d + e][target[product_.monomial]]]
                    fb = element_from_vector(ring, e, rows[e][j])
                    rhs = element_to_vector(ring, d + e, multiply(ring, fa, fb))
                    if lhs != rhs:
                        violations.append(CupViolation(d, e, i, j, tuple(lhs), tuple(rhs)))
    if violations:
        logger.debug(f"{len(violations)} cup-product violations")
    return violations


def compose(first: GradedAutomorphism, second: GradedAutomorphism) -> GradedAutomorphism:
    """Degree-wise product first * second."""
    if first.ring != second.ring:
        raise DomainError("cannot compose automorphisms of different rings")
    return GradedAutomorphism(
        first.ring,
        tuple(ImmutableMatrix(a * b) for a, b in zip(first.matrices, second.matrices)),
    )


def power(aut: GradedAutomorphism, m: int) -> GradedAutomorphism:
    """Degree-wise matrix power; negative m uses the integer inverse."""
    return GradedAutomorphism(aut.ring, tuple(matrix_power(a, m) for a in aut.matrices))


def inverse(aut: GradedAutomorphism) -> GradedAutomorphism:
    return GradedAutomorphism(
        aut.ring, tuple(integer_inverse(a, degree=d) for d, a in enumerate(aut.matrices))
    )


def exterior_power(A: ImmutableMatrix, k: int) -> ImmutableMatrix:
    """k-th exterior power: k x k minors over lexicographic k-subsets.

    Raises:
        DomainError: If k is outside [0, n]
    """
    n = A.rows
    if A.cols != n:
        raise DomainError(f"exterior power needs a square matrix, got {A.rows}x{A.cols}")
    if not 0 <= k <= n:
        raise DomainError(f"exterior power {k} out of range for a {n}x{n} matrix")
    if k == 0:
        return ImmutableMatrix([[1]])
    subsets = list(combinations(range(n), k))
    entries = [
        int(A.extract(list(rows), list(cols)).det(method="bareiss"))
        for rows in subsets
        for cols in subsets
    ]
    return ImmutableMatrix(len(subsets), len(subsets), entries)


def kronecker(*matrices: ImmutableMatrix) -> ImmutableMatrix:
    """Kronecker product in row-major block order; no factors gives [1]."""
    if not matrices:
        return ImmutableMatrix([[1]])
    return ImmutableMatrix(kronecker_product(*matrices))


def duality_check(
    aut: GradedAutomorphism, pairings: Optional[Mapping[int, ImmutableMatrix]] = None
) -> bool:
    """Whether f* is compatible with Poincare duality in every degree.

    Checks M_d P_d M_(top-d)^T = m_top P_d, where m_top is the action on the
    top class and P_d the intersection pairing.
    """
    _check_shapes(aut)
    ring = aut.ring
    top = ring.top_degree
    sign = aut.top_sign
    for d in range(top + 1):
        P = pairings[d] if pairings is not None else intersection_pairing(ring, d)
        lhs = aut.matrices[d] * P * aut.matrices[top - d].T
        if lhs != sign * P:
            logger.debug(f"duality fails in degree {d}")
            return False
    return True


def _allowed_signs(normalization: Normalization) -> Tuple[int, ...]:
    return (1,) if normalization == Normalization.OMEGA_FIXED else (1, -1)


def _allowed_dets(det: Optional[int]) -> Tuple[int, ...]:
    if det is None:
        return (1, -1)
    if det not in (1, -1):
        raise DomainError(f"det constraint must be +1 or -1, got {det}")
    return (det,)


def _sort_key(M: ImmutableMatrix) -> Tuple:
    flat = [int(v) for v in M]
    return (flat != [1, 0, 0, 1], flat != [-1, 0, 0, -1], flat)


def solve_rank2_middle(
    q: int,
    det: Optional[int] = None,
    normalization: Normalization = Normalization.OMEGA_FIXED,
) -> List[ImmutableMatrix]:
    """All [[a, b], [c, d]] preserving a rank-2 middle ring x^2 = q w, xy = w, y^2 = 0.

    With f*x = ax + by, f*y = cx + dy and f*w = s w, the cup relations are
    c^2 q + 2cd = 0, acq + ad + bc = s, a^2 q + 2ab = s q, and ad - bc = det.

    If c = 0 then ad = s = det, so a = +-1, d = det*a, b = a(s - 1)q/2.
    If c != 0 then d = -cq/2, and with u = aq + 2b the relations give
    cu = s - det, au = sq and cu = -2 det. Hence s = -det, u divides 2,
    c = -2 det/u lies in {+-1, +-2}, a = cq/2 = -d and
    b = (-4 det - c^2 q^2) / (4c). Every solution has one of these shapes,
    so the list is complete with no search.

    Args:
        q: Self-intersection of x
        det: Required determinant, or None for both
        normalization: OMEGA_FIXED forces s = 1; MAPPING_CLASS allows s = -1

    Returns:
        Solution matrices: Id, -Id first, then lexicographic by entries
    """
    signs = _allowed_signs(normalization)
    solutions = set()
    for delta in _allowed_dets(det):
        if delta in signs:
            for a in (1, -1):
                b = a * (delta - 1) * q // 2
                solutions.add(ImmutableMatrix([[a, b], [0, delta * a]]))
        if -delta not in signs:
            continue
        for c in (-2, -1, 1, 2):
            if (c * q) % 2:
                continue
            numerator = -4 * delta - c * c * q * q
            if numerator % (4 * c):
                continue
            a = c * q // 2
            solutions.add(ImmutableMatrix([[a, numerator // (4 * c)], [c, -a]]))
    return sorted(solutions, key=_sort_key)


def brute_force_rank2_middle(
    q: int,
    det: Optional[int] = None,
    normalization: Normalization = Normalization.OMEGA_FIXED,
    bound: int = 3,
) -> List[ImmutableMatrix]:
    """Exhaustive search of the same system over entries in [-bound, bound]."""
    signs = _allowed_signs(normalization)
    dets = _allowed_dets(det)
    found = []
    entries = range(-bound, bound + 1)
    for a, b, c, d in product(entries, repeat=4):
        if a * d - b * c not in dets:
            continue
        if c * c * q + 2 * c * d != 0:
            continue
        s = a * c * q + a * d + b * c
        if s not in signs or a * a * q + 2 * a * b != s * q:
            continue
        found.append(ImmutableMatrix([[a, b], [c, d]]))
    return sorted(found, key=_sort_key)

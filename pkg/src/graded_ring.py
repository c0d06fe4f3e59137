"""Graded-commutative cohomology rings over Z with ordered monomial bases."""

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement, product
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator
from sympy import ImmutableMatrix, Symbol

from src.errors import DomainError
from src.logger import setup_logger

logger = setup_logger(__name__)

T = Symbol("t")


class Generator(BaseModel):
    """A ring generator: a class of positive degree with x^nilpotency = 0."""

    model_config = ConfigDict(frozen=True)

    label: str = Field(..., min_length=1, description="Generator label, e.g. x1^3")
    degree: int = Field(..., ge=1, description="Cohomological degree")
    nilpotency: int = Field(2, ge=2, description="Smallest power that vanishes")

    @model_validator(mode="after")
    def _odd_classes_square_to_zero(self) -> "Generator":
        if self.degree % 2 == 1 and self.nilpotency != 2:
            raise ValueError(
                f"generator {self.label} has odd degree {self.degree}; nilpotency must be 2"
            )
        return self


class GradedRingDescription(BaseModel):
    """Free graded-commutative ring on generators truncated by nilpotency."""

    model_config = ConfigDict(frozen=True)

    generators: Tuple[Generator, ...] = Field(..., description="Generators grouped by degree")

    @model_validator(mode="after")
    def _check_generators(self) -> "GradedRingDescription":
        labels = [g.label for g in self.generators]
        duplicates = sorted({label for label in labels if labels.count(label) > 1})
        if duplicates:
            raise ValueError(f"duplicate generator labels: {', '.join(duplicates)}")
        degrees = [g.degree for g in self.generators]
        if degrees != sorted(degrees):
            raise ValueError("generators must be listed with non-decreasing degrees")
        return self

    @computed_field
    @property
    def top_degree(self) -> int:
        return sum(g.degree * (g.nilpotency - 1) for g in self.generators)

    @property
    def size(self) -> int:
        return len(self.generators)

    def index_of(self, label: str) -> int:
        for i, g in enumerate(self.generators):
            if g.label == label:
                return i
        raise DomainError(f"unknown generator label: {label}")

    def degree_groups(self) -> List[Tuple[int, List[int]]]:
        """(degree, generator indices) for each distinct degree, in order."""
        groups: List[Tuple[int, List[int]]] = []
        for i, g in enumerate(self.generators):
            if groups and groups[-1][0] == g.degree:
                groups[-1][1].append(i)
            else:
                groups.append((g.degree, [i]))
        return groups

    def monomial(self, exponents: Sequence[int]) -> "Monomial":
        """Validated monomial from a full exponent vector."""
        if len(exponents) != self.size:
            raise DomainError(f"expected {self.size} exponents, got {len(exponents)}")
        for g, e in zip(self.generators, exponents):
            if not 0 <= e < g.nilpotency:
                raise DomainError(f"exponent {e} of {g.label} outside [0, {g.nilpotency - 1}]")
        degree = sum(g.degree * e for g, e in zip(self.generators, exponents))
        return Monomial(tuple(int(e) for e in exponents), degree)

    def unit(self) -> "Monomial":
        return Monomial((0,) * self.size, 0)

    def top_monomial(self) -> "Monomial":
        return self.monomial([g.nilpotency - 1 for g in self.generators])

    def generator_monomial(self, label: str) -> "Monomial":
        exponents = [0] * self.size
        exponents[self.index_of(label)] = 1
        return self.monomial(exponents)


@dataclass(frozen=True)
class Monomial:
    """Product of generators in canonical order, as a full exponent vector."""

    exponents: Tuple[int, ...]
    degree: int

    def as_map(self, ring: GradedRingDescription) -> Dict[str, int]:
        return {g.label: e for g, e in zip(ring.generators, self.exponents) if e}

    def format(self, ring: GradedRingDescription) -> str:
        factors = []
        for g, e in zip(ring.generators, self.exponents):
            if e == 1:
                factors.append(g.label)
            elif e > 1:
                factors.append(f"({g.label})^{e}")
        return "·".join(factors) if factors else "1"


@dataclass(frozen=True)
class SignedMonomial:
    """Result of a cup product: a signed basis monomial or zero."""

    monomial: Optional[Monomial]
    sign: int = 1

    @property
    def is_zero(self) -> bool:
        return self.monomial is None

    @property
    def coefficient(self) -> int:
        return 0 if self.monomial is None else self.sign


ZERO = SignedMonomial(None, 0)

# Ring elements are sparse coefficient maps over basis monomials.
Element = Dict[Monomial, int]


def _group_maxima(ring: GradedRingDescription) -> List[int]:
    return [
        sum(ring.generators[i].nilpotency - 1 for i in members)
        for _, members in ring.degree_groups()
    ]


def ring_splittings(ring: GradedRingDescription, d: int) -> List[Tuple[int, ...]]:
    """Per-degree-group total exponents summing to degree d, ascending lexicographically."""
    groups = ring.degree_groups()
    ranges = [range(m + 1) for m in _group_maxima(ring)]
    return [
        alpha
        for alpha in product(*ranges)
        if sum(a * deg for a, (deg, _) in zip(alpha, groups)) == d
    ]


def _group_choices(ring: GradedRingDescription, members: List[int], total: int) -> List[Dict[int, int]]:
    choices = []
    for combo in combinations_with_replacement(members, total):
        counts: Dict[int, int] = {}
        for i in combo:
            counts[i] = counts.get(i, 0) + 1
        if all(c < ring.generators[i].nilpotency for i, c in counts.items()):
            choices.append(counts)
    return choices


@lru_cache(maxsize=None)
def build_basis(ring: GradedRingDescription, d: int) -> Tuple[Monomial, ...]:
    """Ordered monomial basis of the degree-d part.

    Monomials are grouped by splitting (total exponent per degree group,
    ascending), then ordered lexicographically on generator indices inside
    each splitting.

    Args:
        ring: Ring description
        d: Degree, 0 <= d <= top degree

    Returns:
        Tuple of monomials in canonical order

    Raises:
        DomainError: If d is out of range
    """
    if not 0 <= d <= ring.top_degree:
        raise DomainError(f"degree {d} outside [0, {ring.top_degree}]")
    groups = ring.degree_groups()
    basis: List[Monomial] = []
    for alpha in ring_splittings(ring, d):
        per_group = [
            _group_choices(ring, members, total)
            for total, (_, members) in zip(alpha, groups)
        ]
        for picks in product(*per_group):
            exponents = [0] * ring.size
            for counts in picks:
                for i, c in counts.items():
                    exponents[i] = c
            basis.append(Monomial(tuple(exponents), d))
    logger.debug(f"basis of degree {d}: {len(basis)} monomials")
    return tuple(basis)


@lru_cache(maxsize=None)
def basis_index(ring: GradedRingDescription, d: int) -> Dict[Monomial, int]:
    return {m: i for i, m in enumerate(build_basis(ring, d))}


def cup(ring: GradedRingDescription, a: Monomial, b: Monomial) -> SignedMonomial:
    """Cup product of two basis monomials with the Koszul sign.

    Moving a factor of b past a factor of a with a larger generator index
    costs (-1)^(deg*deg'), so only pairs of odd generators contribute.
    """
    combined = tuple(x + y for x, y in zip(a.exponents, b.exponents))
    if any(e >= g.nilpotency for g, e in zip(ring.generators, combined)):
        return ZERO
    odd = [g.degree % 2 == 1 for g in ring.generators]
    swaps = 0
    for h, b_h in enumerate(b.exponents):
        if not b_h or not odd[h]:
            continue
        swaps += b_h * sum(a.exponents[g] for g in range(h + 1, ring.size) if odd[g])
    sign = -1 if swaps % 2 else 1
    return SignedMonomial(Monomial(combined, a.degree + b.degree), sign)


def multiply(ring: GradedRingDescription, x: Element, y: Element) -> Element:
    """Bilinear extension of cup to sparse ring elements."""
    result: Element = {}
    for a, ca in x.items():
        for b, cb in y.items():
            product_ = cup(ring, a, b)
            if product_.is_zero:
                continue
            key = product_.monomial
            result[key] = result.get(key, 0) + product_.sign * ca * cb
    return {m: c for m, c in result.items() if c}


def element_from_vector(ring: GradedRingDescription, d: int, vector: Sequence[int]) -> Element:
    basis = build_basis(ring, d)
    if len(vector) != len(basis):
        raise DomainError(f"degree-{d} vector must have {len(basis)} entries, got {len(vector)}")
    return {m: int(c) for m, c in zip(basis, vector) if c}


def element_to_vector(ring: GradedRingDescription, d: int, element: Element) -> List[int]:
    index = basis_index(ring, d)
    vector = [0] * len(index)
    for m, c in element.items():
        if m.degree != d:
            raise DomainError(f"element is not homogeneous of degree {d}")
        vector[index[m]] += c
    return vector


def betti(ring: GradedRingDescription, d: int) -> int:
    if not 0 <= d <= ring.top_degree:
        return 0
    return len(build_basis(ring, d))


def betti_numbers(ring: GradedRingDescription) -> List[int]:
    return [betti(ring, d) for d in range(ring.top_degree + 1)]


def euler_characteristic(ring: GradedRingDescription) -> int:
    return sum((-1) ** d * b for d, b in enumerate(betti_numbers(ring)))


def poincare_polynomial(ring: GradedRingDescription):
    """Poincare polynomial sum_d b_d t^d as a SymPy expression."""
    return sum(b * T ** d for d, b in enumerate(betti_numbers(ring)))


def intersection_pairing(ring: GradedRingDescription, d: int) -> ImmutableMatrix:
    """Matrix of top-monomial coefficients of basis_d[i] cup basis_(top-d)[j].

    Args:
        ring: Ring with a top monomial
        d: Degree in [0, top]

    Returns:
        betti(d) x betti(top - d) matrix with entries in {-1, 0, 1}
    """
    top = ring.top_degree
    left = build_basis(ring, d)
    right = build_basis(ring, top - d)
    top_monomial = ring.top_monomial()
    entries = []
    for a in left:
        for b in right:
            product_ = cup(ring, a, b)
            entries.append(product_.sign if product_.monomial == top_monomial else 0)
    return ImmutableMatrix(len(left), len(right), entries)


def parse_monomial(ring: GradedRingDescription, text: str) -> Monomial:
    """Parse 'x1^1,x2^1' or 'a:2' style factor lists into a monomial."""
    exponents = [0] * ring.size
    text = text.strip()
    if text in ("", "1"):
        return ring.unit()
    for token in text.split(","):
        label, _, power = token.strip().partition(":")
        try:
            e = int(power) if power else 1
        except ValueError:
            raise DomainError(f"bad exponent in factor {token!r}")
        exponents[ring.index_of(label)] += e
    return ring.monomial(exponents)


def sphere_product_ring(factors: Sequence[Tuple[int, int]]) -> GradedRingDescription:
    """Cohomology ring of a product of spheres.

    Args:
        factors: (sphere dimension, multiplicity) pairs, dimensions increasing

    Returns:
        Ring with generators x{q}^{p} for the q-th sphere of the p-th factor group
    """
    generators = []
    previous = 0
    for p, (dim, count) in enumerate(factors, start=1):
        if dim <= previous:
            raise DomainError("sphere dimensions must be strictly increasing")
        if count < 1:
            raise DomainError(f"multiplicity of S^{dim} must be positive")
        previous = dim
        for q in range(1, count + 1):
            generators.append(Generator(label=f"x{q}^{p}", degree=dim, nilpotency=2))
    return GradedRingDescription(generators=tuple(generators))


def torus_ring(n: int) -> GradedRingDescription:
    if n < 1:
        raise DomainError("torus dimension must be positive")
    return sphere_product_ring([(1, n)])


def projective_space_ring(n: int) -> GradedRingDescription:
    """H*(CP^n): one degree-2 class a with a^(n+1) = 0."""
    if n < 1:
        raise DomainError("projective space dimension must be positive")
    return GradedRingDescription(generators=(Generator(label="a", degree=2, nilpotency=n + 1),))


def product_ring(*rings: GradedRingDescription) -> GradedRingDescription:
    """Tensor product of rings, relabelled canonically as x{q}^{p}."""
    pooled = sorted(
        (g for ring in rings for g in ring.generators), key=lambda g: g.degree
    )
    generators = []
    group, q, last_degree = 0, 0, None
    for g in pooled:
        if g.degree != last_degree:
            group, q, last_degree = group + 1, 0, g.degree
        q += 1
        generators.append(Generator(label=f"x{q}^{group}", degree=g.degree, nilpotency=g.nilpotency))
    return GradedRingDescription(generators=tuple(generators))

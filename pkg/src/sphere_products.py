"""Products of spheres: splittings, block decompositions and growth checks.

A degree-d basis monomial of (S^d_1)^n_1 x ... x (S^d_m)^n_m has a splitting
alpha, the number of its factors taken from each sphere group. Induced maps
are block upper-triangular with respect to the splitting order, and the
diagonal block of an odd splitting is a Kronecker product of exterior powers
of the generator blocks A_p.
"""

from dataclasses import dataclass, field
from enum import Enum
from math import comb, factorial, gcd
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator
from sympy import ImmutableMatrix

from src.automorphism import (
    GradedAutomorphism,
    exterior_power,
    induce,
    kronecker,
)
from src.config import Config
from src.errors import (
    DomainError,
    InvariantViolation,
    NotInvertibleError,
    PreconditionError,
    SearchBoundExceededError,
)
from src.graded_ring import GradedRingDescription, betti, ring_splittings, sphere_product_ring
from src.lefschetz import (
    CompatibilityRecord,
    LefschetzSequence,
    TraceConvention,
    anosov_compatibility,
    lefschetz_sequence,
    spectral_summary,
)
from src.logger import setup_logger
from src.math_tools import (
    block_diagonal,
    identity,
    integer_det,
    integer_inverse,
    integer_trace,
    matrix_power,
    permanent_power,
    to_integer_matrix,
)

logger = setup_logger(__name__)

# Generator block A_p keyed by sphere dimension d_p.
GeneratorBlocks = Mapping[int, ImmutableMatrix]


class SphereFactor(BaseModel):
    model_config = ConfigDict(frozen=True)

    dim: int = Field(..., ge=1, description="Sphere dimension d_p")
    count: int = Field(..., ge=1, description="Multiplicity n_p")


class SphereProductSpec(BaseModel):
    """(S^d_1)^n_1 x ... x (S^d_m)^n_m with d_1 < ... < d_m."""

    model_config = ConfigDict(frozen=True)

    factors: Tuple[SphereFactor, ...] = Field(..., min_length=1)

    @model_validator(mode="after")
    def _strictly_increasing(self) -> "SphereProductSpec":
        dims = [f.dim for f in self.factors]
        if any(b <= a for a, b in zip(dims, dims[1:])):
            raise ValueError(f"sphere dimensions must be strictly increasing, got {dims}")
        return self

    @classmethod
    def of(cls, *pairs: Tuple[int, int]) -> "SphereProductSpec":
        return cls(factors=tuple(SphereFactor(dim=d, count=n) for d, n in pairs))

    @property
    def e(self) -> int:
        """Total number of even-degree generators."""
        return sum(f.count for f in self.factors if f.dim % 2 == 0)

    @property
    def dimension(self) -> int:
        return sum(f.dim * f.count for f in self.factors)

    @property
    def ring(self) -> GradedRingDescription:
        return sphere_product_ring([(f.dim, f.count) for f in self.factors])

    def factor(self, dim: int) -> Optional[SphereFactor]:
        return next((f for f in self.factors if f.dim == dim), None)

    def describe(self) -> str:
        parts = []
        for f in self.factors:
            parts.append(f"S^{f.dim}" if f.count == 1 else f"(S^{f.dim})^{f.count}")
        return " x ".join(parts)


@dataclass(frozen=True)
class Splitting:
    alpha: Tuple[int, ...]
    degree: int
    is_odd: bool
    parity: int

    def odd_part(self, spec: SphereProductSpec) -> Tuple[int, ...]:
        return tuple(a if f.dim % 2 else 0 for a, f in zip(self.alpha, spec.factors))


def make_splitting(spec: SphereProductSpec, alpha: Sequence[int]) -> Splitting:
    if len(alpha) != len(spec.factors):
        raise DomainError(f"splitting needs {len(spec.factors)} entries, got {len(alpha)}")
    for a, f in zip(alpha, spec.factors):
        if not 0 <= a <= f.count:
            raise DomainError(f"splitting entry {a} outside [0, {f.count}] for S^{f.dim}")
    degree = sum(a * f.dim for a, f in zip(alpha, spec.factors))
    is_odd = all(a == 0 for a, f in zip(alpha, spec.factors) if f.dim % 2 == 0)
    return Splitting(tuple(alpha), degree, is_odd, degree % 2)


def enumerate_splittings(spec: SphereProductSpec, d: int) -> List[Splitting]:
    """Splittings of d, smallest first in the order of the first differing entry."""
    if not 0 <= d <= spec.dimension:
        return []
    return [make_splitting(spec, alpha) for alpha in ring_splittings(spec.ring, d)]


def _validated_blocks(spec: SphereProductSpec, blocks: GeneratorBlocks, odd_only: bool = True) -> Dict[int, ImmutableMatrix]:
    blocks = {int(dim): A for dim, A in blocks.items()}
    known = {f.dim for f in spec.factors}
    unknown = set(blocks) - known
    if unknown:
        raise DomainError(f"blocks given for dimensions not in the product: {sorted(unknown)}")
    result = {}
    for f in spec.factors:
        if f.dim not in blocks:
            if f.dim % 2 and odd_only:
                raise DomainError(f"missing generator block A_{f.dim}")
            result[f.dim] = identity(f.count)
            continue
        A = to_integer_matrix(blocks[f.dim], name=f"A_{f.dim}")
        if A.shape != (f.count, f.count):
            raise DomainError(f"A_{f.dim} must be {f.count}x{f.count}, got {A.rows}x{A.cols}")
        det = integer_det(A)
        if det not in (1, -1):
            raise NotInvertibleError(f"A_{f.dim} is not unimodular (det = {det})", f.dim)
        result[f.dim] = A
    return result


def block(spec: SphereProductSpec, blocks: GeneratorBlocks, splitting: Splitting) -> ImmutableMatrix:
    """B(alpha): Kronecker product over odd factors of the alpha_p-th exterior powers.

    Even splittings give the 1x1 identity.
    """
    checked = _validated_blocks(spec, blocks)
    factors = [
        exterior_power(checked[f.dim], a)
        for a, f in zip(splitting.alpha, spec.factors)
        if f.dim % 2
    ]
    return kronecker(*factors)


def splitting_block(spec: SphereProductSpec, blocks: GeneratorBlocks, splitting: Splitting) -> ImmutableMatrix:
    """Full diagonal block of f* on the span of one splitting.

    Even generators commute and square to zero, so their part acts by
    permanents rather than minors.
    """
    checked = _validated_blocks(spec, blocks)
    factors = []
    for a, f in zip(splitting.alpha, spec.factors):
        A = checked[f.dim]
        factors.append(exterior_power(A, a) if f.dim % 2 else permanent_power(A, a))
    return kronecker(*factors)


def block_label(spec: SphereProductSpec, splitting: Splitting) -> str:
    parts = []
    for a, f in zip(splitting.alpha, spec.factors):
        if f.dim % 2 == 0 or a == 0:
            continue
        parts.append(f"A{f.dim}" if a == 1 else f"A{f.dim}^∧{a}")
    return " ⊗ ".join(parts) if parts else "Id_Z"


def block_multiplicity(spec: SphereProductSpec, splitting: Splitting) -> int:
    result = 1
    for a, f in zip(splitting.alpha, spec.factors):
        if f.dim % 2 == 0:
            result *= comb(f.count, a)
    return result


@dataclass(frozen=True)
class BlockEntry:
    splitting: Splitting
    label: str
    matrix: ImmutableMatrix
    multiplicity: int


@dataclass(frozen=True)
class BlockDecomposition:
    """Diagonal blocks of every f*d, in splitting order."""

    spec: SphereProductSpec
    entries: Tuple[Tuple[BlockEntry, ...], ...]
    appearances: Dict[Tuple[int, ...], int] = field(default_factory=dict)

    def degree(self, d: int) -> Tuple[BlockEntry, ...]:
        return self.entries[d]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "spec": self.spec.model_dump(),
            "e": self.spec.e,
            "degrees": [
                {
                    "degree": d,
                    "blocks": [
                        {
                            "alpha": list(entry.splitting.alpha),
                            "label": entry.label,
                            "size": entry.matrix.rows,
                            "multiplicity": entry.multiplicity,
                            "odd": entry.splitting.is_odd,
                        }
                        for entry in entries
                    ],
                }
                for d, entries in enumerate(self.entries)
            ],
        }


def block_layout(spec: SphereProductSpec, blocks: GeneratorBlocks) -> BlockDecomposition:
    """Per-degree block entries, without the global consistency checks."""
    checked = _validated_blocks(spec, blocks)
    entries = []
    for d in range(spec.dimension + 1):
        row = []
        for splitting in enumerate_splittings(spec, d):
            row.append(
                BlockEntry(
                    splitting=splitting,
                    label=block_label(spec, splitting),
                    matrix=block(spec, checked, splitting),
                    multiplicity=block_multiplicity(spec, splitting),
                )
            )
        entries.append(tuple(row))
    return BlockDecomposition(spec, tuple(entries))


def block_table(spec: SphereProductSpec, blocks: GeneratorBlocks) -> BlockDecomposition:
    """Block decomposition with the size and appearance-count checks applied.

    Every degree's blocks must fill the whole basis, and every odd block
    must appear exactly 2^e times, always in degrees of one parity.

    Raises:
        InvariantViolation: If either count fails
    """
    layout = block_layout(spec, blocks)
    ring = spec.ring
    appearances: Dict[Tuple[int, ...], int] = {}
    parities: Dict[Tuple[int, ...], set] = {}
    for d, row in enumerate(layout.entries):
        size = sum(entry.matrix.rows * entry.multiplicity for entry in row)
        if size != betti(ring, d):
            raise InvariantViolation(f"blocks of degree {d} cover {size} of {betti(ring, d)} basis elements")
        for entry in row:
            key = entry.splitting.odd_part(spec)
            appearances[key] = appearances.get(key, 0) + entry.multiplicity
            parities.setdefault(key, set()).add(entry.splitting.parity)
    expected = 2 ** spec.e
    for key, count in appearances.items():
        if count != expected:
            raise InvariantViolation(f"odd block {key} appears {count} times, expected {expected}")
        if len(parities[key]) != 1:
            raise InvariantViolation(f"odd block {key} appears in degrees of both parities")
    return BlockDecomposition(spec, layout.entries, appearances)


def format_block_table(decomposition: BlockDecomposition) -> str:
    """One line per degree: 'f*d = X' or 'f*d = upp.tr(X, Y, ...)'."""
    lines = []
    for d, row in enumerate(decomposition.entries):
        items = []
        for entry in row:
            if entry.splitting.odd_part(decomposition.spec) == (0,) * len(entry.splitting.alpha):
                items.append("Id_Z" if entry.multiplicity == 1 else f"Id_Z^{entry.multiplicity}")
            else:
                items.extend([entry.label] * entry.multiplicity)
        if not items:
            continue
        body = items[0] if len(items) == 1 else f"upp.tr({', '.join(items)})"
        lines.append(f"f*{d} = {body}")
    return "\n".join(lines) + "\n"


def generator_blocks(spec: SphereProductSpec, aut: GradedAutomorphism) -> Dict[int, ImmutableMatrix]:
    """A_p: the leading n_p x n_p block of M_(d_p), acting on the generators of S^d_p."""
    if aut.ring != spec.ring:
        raise DomainError("automorphism does not act on this sphere product")
    return {
        f.dim: ImmutableMatrix(aut.matrix(f.dim)[: f.count, : f.count])
        for f in spec.factors
    }


def product_automorphism(spec: SphereProductSpec, blocks: GeneratorBlocks) -> GradedAutomorphism:
    """Automorphism sending x_q^p to row q of A_p; missing even blocks are identities.

    Raises:
        NotRingMapError: If an even block is not a signed permutation
    """
    checked = _validated_blocks(spec, blocks)
    ring = spec.ring
    images = {}
    for p, f in enumerate(spec.factors, start=1):
        width = betti(ring, f.dim)
        A = checked[f.dim]
        for q in range(f.count):
            row = [int(v) for v in A.row(q)] + [0] * (width - f.count)
            images[f"x{q + 1}^{p}"] = row
    return induce(ring, images)


def block_lefschetz_sequence(
    spec: SphereProductSpec,
    blocks: GeneratorBlocks,
    length: Optional[int] = None,
    convention: TraceConvention = TraceConvention.INVERSE_TRACES,
) -> LefschetzSequence:
    """Lambda(f^l) from the diagonal blocks alone."""
    length = Config.LEFSCHETZ_LENGTH if length is None else length
    terms = []
    for d in range(spec.dimension + 1):
        for splitting in enumerate_splittings(spec, d):
            B = splitting_block(spec, blocks, splitting)
            if convention == TraceConvention.INVERSE_TRACES:
                B = integer_inverse(B)
            terms.append((B, (-1) ** d))
    values = []
    powers = [B for B, _ in terms]
    for _ in range(length):
        values.append(sum(sign * integer_trace(P) for P, (_, sign) in zip(powers, terms)))
        powers = [P * B for P, (B, _) in zip(powers, terms)]
    return LefschetzSequence(tuple(values), convention)


def _block_order(A: ImmutableMatrix, bound: int) -> Optional[int]:
    current = A
    target = identity(A.rows)
    for l in range(1, bound + 1):
        if current == target:
            return l
        current = current * A
    return None


def even_generator_order(spec: SphereProductSpec, aut: GradedAutomorphism) -> int:
    """Smallest l >= 1 with (f*)^l fixing every even-degree generator modulo the filtration.

    Raises:
        SearchBoundExceededError: If no l up to 2 (max n_p)! 2^(sum n_p) works
    """
    blocks = generator_blocks(spec, aut)
    even = [blocks[f.dim] for f in spec.factors if f.dim % 2 == 0]
    if not even:
        return 1
    bound = 2 * factorial(max(f.count for f in spec.factors)) * 2 ** sum(f.count for f in spec.factors)
    powers = list(even)
    for l in range(1, bound + 1):
        if all(P == identity(P.rows) for P in powers):
            return l
        powers = [P * A for P, A in zip(powers, even)]
    raise SearchBoundExceededError(f"even generator blocks have no fixing power up to {bound}")


def filtration_invariance_test(
    spec: SphereProductSpec,
    aut: GradedAutomorphism,
    basis_permutation: Optional[Mapping[int, Sequence[int]]] = None,
) -> bool:
    """Whether each f*d is block upper-triangular for the splitting order.

    Args:
        spec: Sphere product
        aut: Automorphism of its ring
        basis_permutation: Optional degree -> list of basis indices. The
            matrix is read in that order while positions keep their
            canonical splitting labels.
    """
    basis_permutation = basis_permutation or {}
    for d in range(spec.dimension + 1):
        labels = []
        for rank, splitting in enumerate(enumerate_splittings(spec, d)):
            size = block_multiplicity(spec, splitting)
            for f, a in zip(spec.factors, splitting.alpha):
                if f.dim % 2:
                    size *= comb(f.count, a)
            labels.extend([rank] * size)
        M = aut.matrix(d)
        order = list(basis_permutation.get(d, range(M.rows)))
        if sorted(order) != list(range(M.rows)):
            raise DomainError(f"basis permutation for degree {d} is not a permutation")
        for i in range(M.rows):
            for j in range(M.rows):
                if labels[j] < labels[i] and M[order[i], order[j]] != 0:
                    logger.debug(f"degree {d}: entry ({i}, {j}) leaves the filtration")
                    return False
    return True


class CheckOutcome(str, Enum):
    NO_ANOSOV = "no_anosov"
    NO_TRANSITIVE_ANOSOV = "no_transitive_anosov"


@dataclass(frozen=True)
class GrowthCheck:
    """Result of the even-factor or odd-factor growth check."""

    outcome: CheckOutcome
    power_reductions: Tuple[str, ...]
    sequence: Tuple[int, ...]
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "outcome": self.outcome.value,
            "power_reductions": list(self.power_reductions),
            "sequence": list(self.sequence),
            **self.details,
        }


def _reduce_blocks(spec: SphereProductSpec, blocks: Dict[int, ImmutableMatrix]) -> Tuple[Dict[int, ImmutableMatrix], List[str]]:
    """Pass to a power making even blocks identities and odd blocks det 1."""
    reductions = []
    m = 1
    bound = 2 * factorial(max(f.count for f in spec.factors)) * 2 ** sum(f.count for f in spec.factors)
    for f in spec.factors:
        if f.dim % 2 == 0 and blocks[f.dim] != identity(f.count):
            order = _block_order(blocks[f.dim], bound)
            if order is None:
                raise PreconditionError(f"A_{f.dim} has infinite order; even blocks must be signed permutations")
            m *= order // gcd(m, order)
    if m > 1:
        reductions.append(f"f^{m}: even generator blocks become identities")
    powered = {dim: matrix_power(A, m) for dim, A in blocks.items()}
    if any(integer_det(powered[f.dim]) == -1 for f in spec.factors if f.dim % 2):
        powered = {dim: A * A for dim, A in powered.items()}
        reductions.append("f^2: odd generator blocks get det 1")
        m *= 2
    for f in spec.factors:
        if f.dim % 2 == 0:
            powered[f.dim] = identity(f.count)
    return powered, reductions


def even_factor_check(spec: SphereProductSpec, blocks: GeneratorBlocks) -> GrowthCheck:
    """Growth check for sphere products with at least one even-dimensional factor.

    Each odd block B(alpha) appears 2^e times with sign (-1)^parity, so the
    odd splittings contribute 2^e sum (-1)^parity Tr B(alpha)^(-l) to
    Lambda(f^l). The smallest block-eigenvalue modulus below 1 whose signed
    coefficient w survives gives |Fix f^l| ~ 2^e |w| lambda^(-l); the leading
    coefficient is even, so the map cannot be transitive. If every modulus
    below 1 cancels, Lambda stays bounded and no Anosov map exists.

    Raises:
        PreconditionError: If the product has no even-dimensional factor
        SearchBoundExceededError: If the cascade runs past CASCADE_STEP_LIMIT
    """
    if spec.e < 1:
        raise PreconditionError("even-factor check needs an even-dimensional sphere factor")
    checked = _validated_blocks(spec, blocks, odd_only=False)
    reduced, reductions = _reduce_blocks(spec, checked)

    terms = []
    seen = set()
    for d in range(spec.dimension + 1):
        for splitting in enumerate_splittings(spec, d):
            if not splitting.is_odd or splitting.alpha in seen:
                continue
            seen.add(splitting.alpha)
            terms.append((integer_inverse(block(spec, reduced, splitting)), (-1) ** splitting.parity))
    summary = spectral_summary(terms, TraceConvention.INVERSE_TRACES)
    threshold = Config.GROWTH_RELATIVE_TOLERANCE
    sequence = block_lefschetz_sequence(spec, reduced).values

    steps = 0
    for group in summary.groups:
        if group.modulus <= 1 + threshold:
            break
        steps += 1
        if steps > Config.CASCADE_STEP_LIMIT:
            raise SearchBoundExceededError(f"cascade exceeded {Config.CASCADE_STEP_LIMIT} steps")
        if group.coefficient > threshold:
            w = group.coefficient
            rounded = round(w)
            if abs(w - rounded) <= threshold:
                w = float(rounded)
            leading = 2 ** spec.e * w
            logger.info(f"{spec.describe()}: leading coefficient {leading} at step {steps}")
            return GrowthCheck(
                outcome=CheckOutcome.NO_TRANSITIVE_ANOSOV,
                power_reductions=tuple(reductions),
                sequence=sequence,
                details={
                    "lambda": 1 / group.modulus,
                    "w": w,
                    "leading_coefficient": leading,
                    "cascade_steps": steps,
                    "e": spec.e,
                },
            )
    logger.info(f"{spec.describe()}: every cascade step cancels; Lambda bounded")
    return GrowthCheck(
        outcome=CheckOutcome.NO_ANOSOV,
        power_reductions=tuple(reductions),
        sequence=sequence,
        details={"cascade_steps": steps, "e": spec.e, "bounded": True},
    )


def odd_factor_cancellation_check(
    spec: SphereProductSpec,
    blocks: GeneratorBlocks,
    k: int,
    length: Optional[int] = None,
) -> GrowthCheck:
    """Lambda(f^l) = 0 for products containing an odd sphere S^k exactly once.

    Every splitting alpha with alpha_k = 0 in degree d pairs with
    alpha_bullet (alpha_k = 1) in degree d + k, carrying the same block and
    the opposite sign. The pairing sum is compared with the generic trace
    computation on the induced automorphism.

    Raises:
        PreconditionError: If k is even, or S^k does not appear exactly once
        InvariantViolation: If either path gives a nonzero value
    """
    length = Config.LEFSCHETZ_LENGTH if length is None else length
    factor = spec.factor(k)
    if k % 2 == 0 or factor is None or factor.count != 1:
        raise PreconditionError(f"S^{k} must be an odd sphere appearing exactly once")
    checked = _validated_blocks(spec, blocks, odd_only=False)
    reductions = []
    if checked[k] == ImmutableMatrix([[-1]]):
        checked = {dim: A * A for dim, A in checked.items()}
        reductions.append(f"f^2: A_{k} = [-1]")
    position = [f.dim for f in spec.factors].index(k)

    pairs = []
    for d in range(spec.dimension + 1):
        for splitting in enumerate_splittings(spec, d):
            if splitting.alpha[position]:
                continue
            bullet_alpha = list(splitting.alpha)
            bullet_alpha[position] = 1
            bullet = make_splitting(spec, bullet_alpha)
            minus = splitting_block(spec, checked, splitting)
            plus = splitting_block(spec, checked, bullet)
            if minus != plus:
                raise InvariantViolation(f"blocks of {splitting.alpha} and {bullet.alpha} differ")
            pairs.append((integer_inverse(minus), (-1) ** d, integer_inverse(plus), (-1) ** bullet.degree))

    pairing_values = []
    powers = [(m, p) for m, _, p, _ in pairs]
    for _ in range(length):
        pairing_values.append(
            sum(
                s_minus * integer_trace(m) + s_plus * integer_trace(p)
                for (m, p), (_, s_minus, _, s_plus) in zip(powers, pairs)
            )
        )
        powers = [(m * base_m, p * base_p) for (m, p), (base_m, _, base_p, _) in zip(powers, pairs)]

    generic = lefschetz_sequence(product_automorphism(spec, checked), length).values
    if tuple(pairing_values) != generic or any(generic):
        raise InvariantViolation(
            f"cancellation failed: pairing path {pairing_values[:5]}, generic path {list(generic[:5])}"
        )
    logger.info(f"{spec.describe()}: Lambda vanishes for l = 1..{length}")
    return GrowthCheck(
        outcome=CheckOutcome.NO_ANOSOV,
        power_reductions=tuple(reductions),
        sequence=generic,
        details={"k": k, "pairs": len(pairs)},
    )


def _companion_cubic() -> ImmutableMatrix:
    # companion matrix of x^3 - x - 1, no roots on the unit circle
    return ImmutableMatrix([[0, 1, 0], [0, 0, 1], [1, 1, 0]])


def witness_blocks(spec: SphereProductSpec) -> Dict[int, ImmutableMatrix]:
    """Generator blocks hyperbolic on every odd group of size at least 2."""
    cat = ImmutableMatrix([[2, 1], [1, 1]])
    blocks = {}
    for f in spec.factors:
        if f.dim % 2 == 0:
            continue
        parts = []
        remaining = f.count
        if remaining >= 3 and remaining % 2:
            parts.append(_companion_cubic())
            remaining -= 3
        parts.extend([cat] * (remaining // 2))
        remaining %= 2
        if remaining:
            parts.append(identity(1))
        blocks[f.dim] = block_diagonal(parts)
    return blocks


def witness_compatibility(spec: SphereProductSpec) -> Tuple[Dict[int, ImmutableMatrix], CompatibilityRecord]:
    """Growth record of the witness automorphism built from witness_blocks."""
    blocks = witness_blocks(spec)
    return blocks, anosov_compatibility(product_automorphism(spec, blocks))

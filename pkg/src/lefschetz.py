"""Exact Lefschetz sequences and spectral growth analysis."""

import csv
import io
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
from sympy import Poly

from src.automorphism import GradedAutomorphism, power
from src.config import Config
from src.errors import DomainError, InvariantViolation, UnresolvedGroupingError
from src.logger import setup_logger
from src.math_tools import X, charpoly_coefficients, integer_inverse, integer_trace, lcm_of

logger = setup_logger(__name__)

# A matrix whose powers are traced, with the integer weight of its trace.
TraceTerm = Tuple[Any, int]


class TraceConvention(str, Enum):
    """Which powers of f* enter the trace sum."""
    INVERSE_TRACES = "inverse"
    FORWARD_TRACES = "forward"


class GrowthClass(str, Enum):
    BOUNDED = "bounded"
    IDENTICALLY_ZERO = "identically_zero"
    COEFFICIENT = "coefficient"


class Consistency(str, Enum):
    """What the growth law allows for an Anosov map inducing this action."""
    NOT_ANOSOV = "not_anosov"
    TRANSITIVE_POSSIBLE = "transitive_possible"
    TRANSITIVE_EXCLUDED = "transitive_excluded"
    INCONSISTENT = "inconsistent"


@dataclass(frozen=True)
class LefschetzSequence:
    """Exact values Lambda(f^l) for l = 1..L."""

    values: Tuple[int, ...]
    convention: TraceConvention

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["l", "lefschetz"])
        for l, value in enumerate(self.values, start=1):
            writer.writerow([l, value])
        return buffer.getvalue()

    def to_dict(self) -> Dict[str, Any]:
        return {"convention": self.convention.value, "values": list(self.values)}


def _trace_base(aut: GradedAutomorphism, convention: TraceConvention) -> Dict[int, Any]:
    bases = {}
    for d, m in aut.degree_matrices().items():
        bases[d] = integer_inverse(m, degree=d) if convention == TraceConvention.INVERSE_TRACES else m
    return bases


def lefschetz_number(
    aut: GradedAutomorphism,
    l: int,
    convention: TraceConvention = TraceConvention.INVERSE_TRACES,
) -> int:
    """Alternating sum of traces of (f*)^(-l) (or (f*)^l for FORWARD_TRACES).

    Raises:
        DomainError: If l < 1
        NotInvertibleError: If an inverse is needed and some M_d is not unimodular
    """
    if l < 1:
        raise DomainError(f"period l must be at least 1, got {l}")
    return sum(
        (-1) ** d * integer_trace(base ** l)
        for d, base in _trace_base(aut, convention).items()
    )


def lefschetz_sequence(
    aut: GradedAutomorphism,
    length: Optional[int] = None,
    convention: TraceConvention = TraceConvention.INVERSE_TRACES,
) -> LefschetzSequence:
    """Lambda(f^l) for l = 1..length, reusing each power for the next."""
    length = Config.LEFSCHETZ_LENGTH if length is None else length
    if length < 1:
        raise DomainError(f"sequence length must be positive, got {length}")
    bases = _trace_base(aut, convention)
    powers = dict(bases)
    values = []
    for _ in range(length):
        values.append(sum((-1) ** d * integer_trace(p) for d, p in powers.items()))
        powers = {d: powers[d] * bases[d] for d in powers}
    return LefschetzSequence(tuple(values), convention)


@dataclass(frozen=True)
class CertifiedRoot:
    """A root with a radius guaranteed to contain an exact root."""

    value: Any
    error: Any


def _newton(coefficients: Sequence[int], z, eps, steps: int = 200):
    for _ in range(steps):
        p, dp = mpmath.polyval(coefficients, z, derivative=True)
        if dp == 0:
            break
        step = p / dp
        z -= step
        if abs(step) <= eps * (1 + abs(z)):
            break
    return z


def certified_roots(coefficients: Sequence[int], precision: Optional[int] = None) -> List[CertifiedRoot]:
    """Roots of a squarefree integer polynomial with a posteriori error radii.

    NumPy companion-matrix roots seed a Newton refinement in mpmath. The
    disk |z - root| <= n |p(z)| / |p'(z)| contains a root of p. If two
    refined seeds land in overlapping disks the seeds are discarded and
    mpmath.polyroots is used instead.
    """
    precision = Config.EIGEN_PRECISION if precision is None else precision
    coefficients = [int(c) for c in coefficients]
    n = len(coefficients) - 1
    if n < 1:
        return []
    with mpmath.workdps(precision):
        if n == 1:
            return [CertifiedRoot(mpmath.mpc(-mpmath.mpf(coefficients[1]) / coefficients[0]), mpmath.mpf(0))]
        eps = mpmath.mpf(10) ** (5 - precision)
        seeds = np.roots(np.array(coefficients, dtype=float))
        roots = [_newton(coefficients, mpmath.mpc(complex(s)), eps) for s in seeds]
        errors = []
        for z in roots:
            p, dp = mpmath.polyval(coefficients, z, derivative=True)
            errors.append(mpmath.inf if dp == 0 else n * abs(p) / abs(dp))
        collided = any(
            abs(roots[i] - roots[j]) <= errors[i] + errors[j]
            for i in range(n)
            for j in range(i + 1, n)
        )
        if collided or any(mpmath.isinf(e) for e in errors):
            logger.debug(f"Newton seeds collided for degree-{n} factor; using polyroots")
            try:
                roots, error = mpmath.polyroots(
                    coefficients, maxsteps=50 * n + 100, extraprec=2 * precision, error=True
                )
            except mpmath.libmp.NoConvergence:
                raise UnresolvedGroupingError(
                    f"roots of a degree-{n} factor did not converge; raise EIGEN_PRECISION"
                )
            roots = [mpmath.mpc(z) for z in roots]
            errors = [mpmath.mpf(error)] * n
        return [CertifiedRoot(z, e) for z, e in zip(roots, errors)]


def trace_terms(aut: GradedAutomorphism, convention: TraceConvention) -> List[TraceTerm]:
    """(matrix whose powers are traced, sign) for every non-empty degree."""
    return [(base, (-1) ** d) for d, base in _trace_base(aut, convention).items()]


def signed_factors(terms: Sequence[TraceTerm]) -> List[Tuple[Tuple[int, ...], int]]:
    """Irreducible characteristic factors with net multiplicity sum weight * mult.

    Factors shared by terms of opposite sign cancel exactly here.
    """
    net: Dict[Tuple[int, ...], int] = {}
    for matrix, weight in terms:
        _, factors = Poly(charpoly_coefficients(matrix), X).factor_list()
        for factor, multiplicity in factors:
            key = tuple(int(c) for c in factor.all_coeffs())
            net[key] = net.get(key, 0) + weight * multiplicity
    return sorted((key, m) for key, m in net.items() if m)


def _phase_order(phase, limit: int, eps) -> Optional[int]:
    value = mpmath.mpc(1)
    for k in range(1, limit + 1):
        value *= phase
        if abs(value - 1) <= eps:
            return k
    return None


@dataclass(frozen=True)
class ModulusGroup:
    """Eigenvalues of one modulus with their signed weights.

    residue_coefficients[r] is the real part of sum weight * (mu / modulus)^l
    for l = r modulo period; when the phases are not roots of unity of
    order at most the residue limit, period is None and the coefficients
    are sampled for l = 0..limit - 1.
    """

    modulus: float
    signed_multiplicity: int
    members: Tuple[Tuple[Any, int], ...]
    period: Optional[int]
    residue_coefficients: Tuple[float, ...]

    @property
    def coefficient(self) -> float:
        return max(abs(c) for c in self.residue_coefficients)

    @property
    def coefficient_varies(self) -> bool:
        first = self.residue_coefficients[0]
        return any(abs(c - first) > Config.GROWTH_RELATIVE_TOLERANCE for c in self.residue_coefficients)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "modulus": self.modulus,
            "signed_multiplicity": self.signed_multiplicity,
            "period": self.period,
            "coefficient": self.coefficient,
            "coefficient_varies": self.coefficient_varies,
            "residue_coefficients": list(self.residue_coefficients),
        }


@dataclass(frozen=True)
class SpectralSummary:
    """Grouped eigenvalue data of the trace matrices, by decreasing modulus."""

    convention: TraceConvention
    groups: Tuple[ModulusGroup, ...]
    entropy: float
    max_error: float
    deviation: float = 0.0

    def reconstruct(self, l: int) -> float:
        """sum over all eigenvalues of weight * mu^l; equals Lambda(f^l)."""
        with mpmath.workdps(Config.EIGEN_PRECISION):
            total = mpmath.mpc(0)
            for group in self.groups:
                for mu, weight in group.members:
                    total += weight * mu ** l
            return float(total.real)

    @property
    def dominant_modulus(self) -> float:
        return self.groups[0].modulus if self.groups else 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "convention": self.convention.value,
            "entropy": self.entropy,
            "max_error": self.max_error,
            "deviation": self.deviation,
            "groups": [g.to_dict() for g in self.groups],
        }


def _group_roots(
    weighted: List[Tuple[CertifiedRoot, int]], tolerance: float, precision: int
) -> List[List[Tuple[CertifiedRoot, int]]]:
    ordered = sorted(weighted, key=lambda item: -abs(item[0].value))
    slack = mpmath.mpf(10) ** (10 - precision)
    clusters: List[List[Tuple[CertifiedRoot, int]]] = []
    for item in ordered:
        modulus = abs(item[0].value)
        if clusters:
            head = abs(clusters[-1][0][0].value)
            if head - modulus <= tolerance * max(1, head):
                spread = head - modulus
                certified = clusters[-1][0][0].error + item[0].error + slack
                if spread > certified:
                    raise UnresolvedGroupingError(
                        f"moduli {float(head):.12g} and {float(modulus):.12g} differ by "
                        f"{float(spread):.3g}, inside the grouping tolerance; use a smaller "
                        "tolerance or a longer exact sequence"
                    )
                clusters[-1].append(item)
                continue
        clusters.append([item])
    return clusters


def spectral_summary(
    terms: Sequence[TraceTerm],
    convention: TraceConvention,
    tolerance: Optional[float] = None,
) -> SpectralSummary:
    """Group the eigenvalues behind sum weight * Tr(matrix^l) by modulus.

    Args:
        terms: (matrix, integer weight) pairs
        convention: Convention the matrices were taken in, for the record
        tolerance: Relative grouping tolerance on moduli

    Returns:
        SpectralSummary with groups by decreasing modulus

    Raises:
        UnresolvedGroupingError: If distinct moduli cannot be separated
    """
    tolerance = Config.GROUPING_TOLERANCE if tolerance is None else tolerance
    precision = Config.EIGEN_PRECISION
    limit = Config.RESIDUE_PERIOD_LIMIT
    with mpmath.workdps(precision):
        weighted = []
        for coefficients, weight in signed_factors(terms):
            for root in certified_roots(coefficients, precision):
                weighted.append((root, weight))

        dominant_all = mpmath.mpf(1)
        for matrix, _ in terms:
            for root in certified_roots(_squarefree(charpoly_coefficients(matrix)), precision):
                dominant_all = max(dominant_all, abs(root.value))
        entropy = float(mpmath.log(dominant_all))

        phase_eps = mpmath.mpf(10) ** (-(precision // 2))
        groups = []
        for cluster in _group_roots(weighted, tolerance, precision):
            modulus = abs(cluster[0][0].value)
            phases = [(root.value / abs(root.value), w) for root, w in cluster]
            orders = [_phase_order(ph, limit, phase_eps) for ph, _ in phases]
            if all(o is not None for o in orders):
                period = lcm_of(orders)
                period = period if period <= limit else None
            else:
                period = None
            count = period if period is not None else limit
            residues = tuple(
                float(sum(w * ph ** r for ph, w in phases).real) for r in range(count)
            )
            groups.append(
                ModulusGroup(
                    modulus=float(modulus),
                    signed_multiplicity=sum(w for _, w in cluster),
                    members=tuple((root.value, w) for root, w in cluster),
                    period=period,
                    residue_coefficients=residues,
                )
            )
            if period is None:
                logger.warning(f"phases at modulus {float(modulus):.8g} are not periodic up to {limit}")
        max_error = float(max((root.error for root, _ in weighted), default=0))
    return SpectralSummary(convention, tuple(groups), entropy, max_error)


def growth_analysis(
    aut: GradedAutomorphism,
    convention: TraceConvention = TraceConvention.INVERSE_TRACES,
    tolerance: Optional[float] = None,
) -> SpectralSummary:
    """Spectral summary of Lambda(f^l), cross-checked against the exact sequence.

    Raises:
        UnresolvedGroupingError: If distinct moduli cannot be separated
        InvariantViolation: If the reconstruction disagrees with the exact values
    """
    summary = spectral_summary(trace_terms(aut, convention), convention, tolerance)
    return replace(summary, deviation=_cross_check(aut, summary, convention))


def _squarefree(coefficients: Sequence[int]) -> List[int]:
    poly = Poly(list(coefficients), X)
    return [int(c) for c in poly.quo(poly.gcd(poly.diff(X))).all_coeffs()]


def _cross_check(aut: GradedAutomorphism, summary: SpectralSummary, convention: TraceConvention) -> float:
    length = Config.LEFSCHETZ_LENGTH
    exact = lefschetz_sequence(aut, length, convention).values
    scale = max(1.0, summary.dominant_modulus)
    deviation = 0.0
    for l in range(max(1, length - 10), length + 1):
        relative = abs(exact[l - 1] - summary.reconstruct(l)) / scale ** l
        deviation = max(deviation, relative)
    if deviation > Config.GROWTH_RELATIVE_TOLERANCE:
        raise InvariantViolation(
            f"spectral reconstruction deviates from exact Lefschetz numbers by {deviation:.3g}"
        )
    return deviation


@dataclass(frozen=True)
class CompatibilityRecord:
    """Outcome of comparing Lambda(f^l) growth with the periodic-orbit growth law."""

    growth: GrowthClass
    consistency: Consistency
    convention: TraceConvention
    dominant_modulus: Optional[float]
    coefficient: Optional[float]
    entropy: float
    coefficient_varies: bool = False
    power_reductions: Tuple[str, ...] = field(default_factory=tuple)
    sequence: Tuple[int, ...] = field(default_factory=tuple)

    @property
    def integer_coefficient(self) -> Optional[int]:
        if self.coefficient is None:
            return None
        rounded = round(self.coefficient)
        if abs(self.coefficient - rounded) <= Config.GROWTH_RELATIVE_TOLERANCE:
            return int(rounded)
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "growth": self.growth.value,
            "consistency": self.consistency.value,
            "convention": self.convention.value,
            "dominant_modulus": self.dominant_modulus,
            "coefficient": self.coefficient,
            "entropy": self.entropy,
            "coefficient_varies": self.coefficient_varies,
            "power_reductions": list(self.power_reductions),
            "sequence": list(self.sequence),
        }


def anosov_compatibility(
    aut: GradedAutomorphism,
    convention: TraceConvention = TraceConvention.INVERSE_TRACES,
    length: Optional[int] = None,
) -> CompatibilityRecord:
    """Classify Lambda(f^l) growth against the periodic-orbit growth law.

    A map reversing the top class is replaced by f^2 first; the reduction
    is recorded.
    """
    reductions: List[str] = []
    if aut.top_sign == -1:
        aut = power(aut, 2)
        reductions.append("f^2: top class reversed")
    sequence = lefschetz_sequence(aut, length, convention)
    summary = growth_analysis(aut, convention)
    threshold = Config.GROWTH_RELATIVE_TOLERANCE
    leading = next((g for g in summary.groups if g.coefficient > threshold), None)

    if leading is None and not any(sequence.values):
        growth, consistency = GrowthClass.IDENTICALLY_ZERO, Consistency.NOT_ANOSOV
        modulus = coefficient = None
        varies = False
    elif leading is None or leading.modulus <= 1 + threshold:
        growth, consistency = GrowthClass.BOUNDED, Consistency.NOT_ANOSOV
        modulus = leading.modulus if leading else None
        coefficient = leading.coefficient if leading else None
        varies = False
    else:
        growth = GrowthClass.COEFFICIENT
        modulus, coefficient, varies = leading.modulus, leading.coefficient, leading.coefficient_varies
        rounded = round(coefficient)
        if abs(coefficient - rounded) > threshold or rounded < 1:
            consistency = Consistency.INCONSISTENT
        elif rounded == 1:
            consistency = Consistency.TRANSITIVE_POSSIBLE
        else:
            consistency = Consistency.TRANSITIVE_EXCLUDED
        if abs(coefficient - rounded) <= threshold:
            coefficient = float(rounded)

    logger.info(f"growth {growth.value}, consistency {consistency.value}")
    return CompatibilityRecord(
        growth=growth,
        consistency=consistency,
        convention=convention,
        dominant_modulus=modulus,
        coefficient=coefficient,
        entropy=summary.entropy,
        coefficient_varies=varies,
        power_reductions=tuple(reductions),
        sequence=sequence.values,
    )

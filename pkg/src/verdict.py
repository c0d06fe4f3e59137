"""Rule engine turning a manifold description into an obstruction report.

Rules fire in a fixed order: Betti bounds, codimension bounds,
characteristic-class bounds, bundle shapes, sphere products and middle
intersection forms. A rule that does not apply adds nothing.
"""

from typing import Any, Callable, Dict, List, Optional

from src.automorphism import Normalization, solve_rank2_middle
from src.config import Config
from src.errors import OutsideHypothesesError, PreconditionError
from src.graded_ring import betti_numbers
from src.intersection_form import UnimodularForm, middle_form_check
from src.logger import setup_logger
from src.math_tools import matrix_to_lists
from src.records import (
    Conclusion,
    EvidenceItem,
    EvidenceStatus,
    ObstructionReport,
    VerdictRecord,
)
from src.schemas import (
    FiberOverSphereManifold,
    FormManifold,
    ManifoldSpec,
    RingManifold,
    SphereBundleManifold,
    SphereProductManifold,
)
from src.sphere_products import (
    even_factor_check,
    odd_factor_cancellation_check,
    witness_blocks,
    witness_compatibility,
)

logger = setup_logger(__name__)

ORIENTABLE_SCOPE = "Anosov diffeomorphisms with orientable invariant distributions"
PARITY_SCOPE = "Anosov diffeomorphisms with orientable unstable distribution on an oriented total space"


def _item(constraint: str, status: EvidenceStatus, citation: str, **data: Any) -> EvidenceItem:
    return EvidenceItem(constraint=constraint, status=status, citation=citation, data=data)


def _verdict(conclusion: Conclusion, rule: str, evidence: List[EvidenceItem], scope: Optional[str] = None) -> VerdictRecord:
    return VerdictRecord(conclusion=conclusion, rule=rule, scope=scope, evidence=evidence)


def _sphere_dimension(spec: ManifoldSpec) -> Optional[int]:
    """Dimension of spec when it is a single sphere."""
    if isinstance(spec, SphereProductManifold) and len(spec.factors) == 1 and spec.factors[0].count == 1:
        return spec.factors[0].dim
    return None


def _shifted_sum(base: List[int], shift: int) -> List[int]:
    """b_k = base_k + base_(k - shift): the Gysin/Wang profile with vanishing connecting maps."""
    top = len(base) - 1 + shift
    return [
        (base[k] if k < len(base) else 0) + (base[k - shift] if 0 <= k - shift < len(base) else 0)
        for k in range(top + 1)
    ]


def dimension_of(spec: ManifoldSpec) -> int:
    return len(betti_profile(spec)) - 1


def betti_profile(spec: ManifoldSpec) -> List[int]:
    """Rational Betti numbers b_0..b_dim of the described manifold.

    Raises:
        OutsideHypothesesError: For bundle dimension regimes where the
            Gysin or Wang sequence does not determine the answer
    """
    if isinstance(spec, SphereProductManifold):
        return betti_numbers(spec.product.ring)
    if isinstance(spec, RingManifold):
        return betti_numbers(spec.ring)
    if isinstance(spec, SphereBundleManifold):
        return _sphere_bundle_profile(spec)
    if isinstance(spec, FiberOverSphereManifold):
        fiber = betti_profile(spec.fiber)
        n, m = len(fiber) - 1, spec.base_sphere_dim
        if m <= n + 1:
            raise OutsideHypothesesError(
                f"bundle over S^{m} with {n}-dimensional fiber needs m > n + 1"
            )
        return _shifted_sum(fiber, m)
    if isinstance(spec, FormManifold):
        if not spec.connected_below_middle:
            raise OutsideHypothesesError("form manifolds must be (2n-1)-connected")
        profile = [0] * (4 * spec.n + 1)
        profile[0] = profile[-1] = 1
        profile[2 * spec.n] = len(spec.form)
        return profile
    raise OutsideHypothesesError(f"unsupported manifold kind {type(spec).__name__}")


def _sphere_bundle_profile(spec: SphereBundleManifold) -> List[int]:
    base = betti_profile(spec.base)
    n, m = len(base) - 1, spec.fiber_dim
    base_sphere = _sphere_dimension(spec.base)
    if spec.euler_number != 0:
        if base_sphere != m + 1:
            raise OutsideHypothesesError("a nonzero Euler number is only supported over S^(m+1)")
        profile = [0] * (n + m + 1)
        profile[0] = profile[-1] = 1
        return profile
    if m > n or (m == n and m % 2 == 0) or base_sphere is not None:
        return _shifted_sum(base, m)
    raise OutsideHypothesesError(
        f"S^{m}-bundle over a {n}-manifold: the Euler class may not vanish (need m > n or m = n even)"
    )


def euler_characteristic_of(profile: List[int]) -> int:
    return sum((-1) ** k * b for k, b in enumerate(profile))


def standing_assumptions(spec: ManifoldSpec) -> List[str]:
    assumptions = [
        "orientations of the manifold and of the invariant distributions are arranged by passing to a finite cover",
        "f is replaced by f^2 where it reverses an orientation",
    ]
    if isinstance(spec, SphereBundleManifold):
        if spec.fiber_orientable:
            assumptions.append("the sphere bundle is fiber-oriented")
        else:
            assumptions.append("Betti numbers are those of the fiber-orienting double cover")
    if spec.hypotheses.has_nonzero_exponential_char_class:
        assumptions.append("user-supplied: c(TM) != 0 for a characteristic class with the exponential property")
    if spec.hypotheses.codimension_hint is not None:
        assumptions.append(f"user-supplied: codimension {spec.hypotheses.codimension_hint}")
    return assumptions


def _simply_connected(spec: ManifoldSpec) -> bool:
    return spec.hypotheses.simply_connected or isinstance(spec, FormManifold)


def _betti_rules(spec: ManifoldSpec, profile: List[int], chi: int) -> List[VerdictRecord]:
    verdicts = []
    dim = len(profile) - 1

    if max(profile) <= 1:
        verdicts.append(
            _verdict(
                Conclusion.NO_ANOSOV,
                "betti-at-most-one",
                [_item("every Betti number is at most 1", EvidenceStatus.HOLDS, "an Anosov map needs some b_k >= 2", betti=profile)],
            )
        )

    k = spec.hypotheses.codimension_hint
    if k is not None and 1 <= k < dim and profile[k] <= 1:
        verdicts.append(
            _verdict(
                Conclusion.NO_TRANSITIVE_ANOSOV,
                "codimension-betti",
                [_item(f"b_{k} <= 1", EvidenceStatus.HOLDS, "codimension-k maps need b_k >= 2", k=k, b_k=profile[k])],
                scope=f"codimension-{k} {ORIENTABLE_SCOPE}",
            )
        )

    char_class = spec.hypotheses.has_nonzero_exponential_char_class
    scope = None if _simply_connected(spec) else ORIENTABLE_SCOPE
    if max(profile[1:]) <= 2 and (chi != 0 or char_class):
        source = "Euler class" if chi != 0 else "user-supplied exponential characteristic class"
        verdicts.append(
            _verdict(
                Conclusion.NO_TRANSITIVE_ANOSOV,
                "characteristic-class-betti",
                [
                    _item("c(TM) != 0", EvidenceStatus.ASSUMED if chi == 0 else EvidenceStatus.HOLDS, source, chi=chi),
                    _item("b_i <= 2 for i >= 1", EvidenceStatus.HOLDS, "transitive maps need b_k >= 3", betti=profile),
                ],
                scope=scope,
            )
        )
    elif char_class and k is not None and 1 <= k < dim and profile[k] <= 2:
        verdicts.append(
            _verdict(
                Conclusion.NO_TRANSITIVE_ANOSOV,
                "characteristic-class-betti",
                [
                    _item("c(TM) != 0", EvidenceStatus.ASSUMED, "user-supplied exponential characteristic class"),
                    _item(f"b_{k} <= 2", EvidenceStatus.HOLDS, "transitive codimension-k maps need b_k >= 3", k=k, b_k=profile[k]),
                ],
                scope=f"codimension-{k} {ORIENTABLE_SCOPE}",
            )
        )

    if _simply_connected(spec) and dim % 4 == 0 and dim > 0 and chi != 0:
        middle = dim // 2
        if profile[middle] <= 4 and all(b <= 1 for i, b in enumerate(profile) if i != middle):
            verdicts.append(
                _verdict(
                    Conclusion.NO_ANOSOV,
                    "simply-connected-middle-betti",
                    [
                        _item("simply connected with chi != 0", EvidenceStatus.HOLDS, "simply connected 4n-manifolds", chi=chi),
                        _item(
                            f"b_{middle} <= 4 and b_k <= 1 otherwise",
                            EvidenceStatus.HOLDS,
                            "middle isometries need rank >= 4 plus a fixed class",
                            betti=profile,
                        ),
                    ],
                )
            )
    return verdicts


def _parity(rule: str, citation: str, **data: Any) -> VerdictRecord:
    return _verdict(
        Conclusion.PARITY_CONSTRAINT,
        rule,
        [_item("leading coefficient of |Fix f^l| is even", EvidenceStatus.HOLDS, citation, **data)],
        scope=PARITY_SCOPE,
    )


def _sphere_bundle_rules(spec: SphereBundleManifold) -> List[VerdictRecord]:
    verdicts = []
    base = betti_profile(spec.base)
    n, m = len(base) - 1, spec.fiber_dim
    shape = {"fiber_dim": m, "base_dim": n}

    base_sphere = _sphere_dimension(spec.base)
    if base_sphere is not None and (m != base_sphere or m % 2 == 0):
        verdicts.append(
            _verdict(
                Conclusion.NO_ANOSOV,
                "sphere-bundle-over-sphere",
                [_item("S^m-bundle over S^n with m != n or m even", EvidenceStatus.HOLDS, "Gysin sequence and Betti bound", **shape)],
            )
        )

    if m == n and m % 2 == 0:
        q = spec.self_intersection if spec.self_intersection is not None else 0
        forced = solve_rank2_middle(q, det=1, normalization=Normalization.OMEGA_FIXED)
        middle = [
            _item(
                "f* on H^m(E) = <x, y> preserves x.x = q w, x.y = w, y.y = 0",
                EvidenceStatus.COMPUTED,
                "middle cohomology of an S^2n-bundle over a 2n-manifold",
                q=q,
                solutions=[matrix_to_lists(A) for A in forced],
            ),
            _item(
                "traces in degrees above m repeat those below m",
                EvidenceStatus.HOLDS,
                "cup with the fixed class y is an isomorphism",
                leading_coefficient_factor=2,
            ),
        ]
        verdicts.append(_verdict(Conclusion.NO_TRANSITIVE_ANOSOV, "even-sphere-bundle", middle))
        verdicts.append(_parity("even-sphere-bundle-parity", "leading coefficient is twice an integer", **shape))
        if max(base) <= 1:
            verdicts.append(
                _verdict(
                    Conclusion.NO_ANOSOV,
                    "even-sphere-bundle-small-base",
                    middle + [_item("every Betti number of the base is at most 1", EvidenceStatus.HOLDS, "|Fix f^l| stays bounded", betti=base)],
                )
            )
    elif m > n:
        verdicts.extend(_high_sphere_rules("high-sphere-bundle", m, shape))
    return verdicts


def _high_sphere_rules(rule: str, m: int, shape: Dict[str, int]) -> List[VerdictRecord]:
    if m % 2:
        return [
            _verdict(
                Conclusion.NO_ANOSOV,
                rule,
                [_item("sphere dimension m is odd", EvidenceStatus.HOLDS, "Lefschetz numbers cancel in pairs", **shape)],
            )
        ]
    return [
        _verdict(
            Conclusion.NO_TRANSITIVE_ANOSOV,
            rule,
            [_item("sphere dimension m is even", EvidenceStatus.HOLDS, "Lefschetz numbers double up", **shape)],
        ),
        _parity(f"{rule}-parity", "leading coefficient is twice an integer", **shape),
    ]


def _fiber_over_sphere_rules(spec: FiberOverSphereManifold) -> List[VerdictRecord]:
    n = dimension_of(spec.fiber)
    return _high_sphere_rules("bundle-over-high-sphere", spec.base_sphere_dim, {"fiber_dim": n, "base_sphere_dim": spec.base_sphere_dim})


def _example_blocks(spec: SphereProductManifold) -> Dict[int, Any]:
    if spec.generator_blocks is not None:
        return dict(spec.generator_blocks)
    return {dim: matrix_to_lists(A) for dim, A in witness_blocks(spec.product).items()}


def _sphere_product_rules(spec: SphereProductManifold) -> List[VerdictRecord]:
    verdicts = []
    product = spec.product
    blocks = _example_blocks(spec)
    source = "supplied automorphism" if spec.generator_blocks is not None else "example automorphism"
    odd_factors = [f for f in product.factors if f.dim % 2]

    if not odd_factors:
        evidence = [
            _item(
                "even generator blocks are signed permutations",
                EvidenceStatus.HOLDS,
                "even-degree generators square to zero",
            )
        ]
        if len(product.factors) == 1 and product.factors[0].count == 2:
            evidence.append(
                _item(
                    "H^d automorphisms preserving x.x = y.y = 0, x.y = w",
                    EvidenceStatus.COMPUTED,
                    "mapping classes of a product of two even spheres",
                    omega_fixed=[matrix_to_lists(A) for A in solve_rank2_middle(0, 1, Normalization.OMEGA_FIXED)],
                    mapping_class=[matrix_to_lists(A) for A in solve_rank2_middle(0, None, Normalization.MAPPING_CLASS)],
                )
            )
        check = even_factor_check(product, blocks)
        evidence.append(_item("Lambda(f^l) is bounded", EvidenceStatus.COMPUTED, source, **check.to_dict()))
        verdicts.append(_verdict(Conclusion.NO_ANOSOV, "all-even-spheres", evidence))
        return verdicts

    if product.e >= 1:
        check = even_factor_check(product, blocks)
        verdicts.append(
            _verdict(
                Conclusion.NO_TRANSITIVE_ANOSOV,
                "even-sphere-factor",
                [
                    _item("some sphere factor is even-dimensional", EvidenceStatus.HOLDS, "odd blocks appear 2^e times", e=product.e),
                    _item("leading coefficient is divisible by 2^e", EvidenceStatus.COMPUTED, source, **check.to_dict()),
                ],
            )
        )
        verdicts.append(_parity("even-sphere-factor-parity", "odd blocks appear 2^e times", e=product.e))

    once = [f.dim for f in odd_factors if f.count == 1]
    if once:
        k = once[0]
        check = odd_factor_cancellation_check(product, blocks, k)
        verdicts.append(
            _verdict(
                Conclusion.NO_ANOSOV,
                "odd-sphere-once",
                [
                    _item(f"S^{k} appears exactly once", EvidenceStatus.HOLDS, "splittings pair with and without S^k", k=k),
                    _item("Lambda(f^l) = 0", EvidenceStatus.COMPUTED, source, **check.to_dict()),
                ],
            )
        )

    if (
        len(product.factors) == 2
        and product.factors[0].dim == 1
        and product.factors[1].count == 1
        and product.factors[1].dim >= 2
    ):
        k = product.factors[1].dim
        conclusion = Conclusion.NO_ANOSOV if k % 2 else Conclusion.NO_TRANSITIVE_ANOSOV
        verdicts.append(
            _verdict(
                conclusion,
                "torus-times-sphere",
                [_item("torus times a sphere of dimension >= 2", EvidenceStatus.HOLDS, "special case of the sphere-product rules", n=product.factors[0].count, k=k)],
            )
        )
    return verdicts


def _form_rules(spec: FormManifold) -> List[VerdictRecord]:
    form = UnimodularForm.from_matrix(spec.form, "Q")
    try:
        return [middle_form_check(form, chi_nonzero=True, entry_bound=spec.entry_bound)]
    except PreconditionError as e:
        logger.warning(f"Middle form search skipped: {e}")
        return [
            _verdict(
                Conclusion.INCONCLUSIVE,
                "middle-form-search",
                [_item("form rank within the search limit", EvidenceStatus.VIOLATED, str(e), limit=Config.FORM_SEARCH_LIMIT)],
            )
        ]


def _witness_evidence(spec: SphereProductManifold) -> List[EvidenceItem]:
    blocks, record = witness_compatibility(spec.product)
    return [
        _item(
            "an automorphism hyperbolic on odd cohomology exists",
            EvidenceStatus.COMPUTED,
            "witness built from hyperbolic blocks",
            blocks={dim: matrix_to_lists(A) for dim, A in blocks.items()},
            **record.to_dict(),
        )
    ]


SHAPE_RULES: Dict[type, Callable[[Any], List[VerdictRecord]]] = {
    SphereBundleManifold: _sphere_bundle_rules,
    FiberOverSphereManifold: _fiber_over_sphere_rules,
}


def _drop_implied(verdicts: List[VerdictRecord]) -> List[VerdictRecord]:
    if any(v.conclusion == Conclusion.NO_ANOSOV for v in verdicts):
        return [v for v in verdicts if v.conclusion != Conclusion.NO_TRANSITIVE_ANOSOV]
    return verdicts


def apply_rules(spec: ManifoldSpec) -> ObstructionReport:
    """Run every applicable rule and assemble the report.

    Args:
        spec: Validated manifold description

    Returns:
        ObstructionReport with at least one verdict; INCONCLUSIVE when no
        rule applies

    Raises:
        OutsideHypothesesError: If the Betti profile cannot be determined
    """
    profile = betti_profile(spec)
    chi = euler_characteristic_of(profile)
    verdicts = _betti_rules(spec, profile, chi)

    rule = SHAPE_RULES.get(type(spec))
    if rule is not None:
        verdicts.extend(rule(spec))
    if isinstance(spec, SphereProductManifold):
        verdicts.extend(_sphere_product_rules(spec))
    if isinstance(spec, FormManifold):
        verdicts.extend(_form_rules(spec))

    verdicts = _drop_implied(verdicts)
    if not verdicts:
        evidence = [_item("no rule applies", EvidenceStatus.COMPUTED, "rule engine", betti=profile, chi=chi)]
        if isinstance(spec, SphereProductManifold):
            evidence.extend(_witness_evidence(spec))
        verdicts = [_verdict(Conclusion.INCONCLUSIVE, "no-rule-applies", evidence)]

    report = ObstructionReport(
        kind=spec.kind,
        dimension=len(profile) - 1,
        betti_profile=profile,
        chi=chi,
        assumptions=standing_assumptions(spec),
        verdicts=verdicts,
    )
    logger.info(f"{spec.kind}: {', '.join(c.value for c in report.conclusions())}")
    return report

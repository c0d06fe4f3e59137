"""Seeded property checks across the engine."""

import pytest
import sys
from itertools import product
from math import comb
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

import numpy as np
from sympy import ImmutableMatrix

from src.automorphism import duality_check, exterior_power, induce, kronecker
from src.errors import SpecFormatError
from src.graded_ring import (
    Generator,
    GradedRingDescription,
    build_basis,
    intersection_pairing,
    multiply,
    projective_space_ring,
    sphere_product_ring,
    torus_ring,
)
from src.intersection_form import RANK2_FORMS, UnimodularForm, enumerate_isometries, middle_form_check
from src.lefschetz import TraceConvention, growth_analysis, lefschetz_sequence
from src.math_tools import identity, integer_det, integer_inverse, integer_trace
from src.records import Completeness, Conclusion, ObstructionReport
from src.schemas import load_manifold_spec, parse_manifold
from src.sphere_products import SphereProductSpec, filtration_invariance_test, product_automorphism
from src.toral_oracle import ToralMap, random_unimodular_matrix
from src.verdict import apply_rules

SPECS_DIR = Path(__file__).parent.parent.parent / "data" / "specs"
CAT = [[2, 1], [1, 1]]
S1S2S3_BLOCKS = {1: CAT, 3: [[1, 1], [1, 2]]}
PROFILE_RULES = {
    "betti-at-most-one",
    "characteristic-class-betti",
    "simply-connected-middle-betti",
    "no-rule-applies",
}


def cp2_times_t2() -> GradedRingDescription:
    return GradedRingDescription(
        generators=(
            Generator(label="x1", degree=1),
            Generator(label="x2", degree=1),
            Generator(label="a", degree=2, nilpotency=3),
        )
    )


def full_basis(ring):
    return [m for d in range(ring.top_degree + 1) for m in build_basis(ring, d)]


def random_integer_matrix(rng, n, bound=3):
    return ImmutableMatrix(rng.integers(-bound, bound + 1, size=(n, n)).tolist())


def ring_cases():
    return [
        sphere_product_ring([(1, 2), (2, 2), (3, 2)]),
        sphere_product_ring([(2, 2)]),
        cp2_times_t2(),
        torus_ring(4),
        projective_space_ring(3),
    ]


def automorphism_cases():
    """Automorphisms with a hyperbolic part, keyed for readable failures."""
    s1s2s3 = SphereProductSpec.of((1, 2), (2, 2), (3, 2))
    s3s3 = sphere_product_ring([(3, 2)])
    return {
        "cat map": ToralMap.from_matrix(CAT).automorphism(),
        "T^3": ToralMap.from_matrix([[0, 1, 0], [0, 0, 1], [1, 1, 0]]).automorphism(),
        "S^3 x S^3": induce(s3s3, {"x1^1": CAT[0], "x2^1": CAT[1]}),
        "CP^2 x T^2": induce(cp2_times_t2(), {"x1": CAT[0], "x2": CAT[1], "a": [1, 0]}),
        "(S^1)^2 x (S^2)^2 x (S^3)^2": product_automorphism(s1s2s3, S1S2S3_BLOCKS),
    }


@pytest.mark.parametrize("ring", ring_cases())
def test_cup_product_is_graded_commutative(ring):
    """a . b = (-1)^(|a||b|) b . a on every pair of basis monomials."""
    basis = full_basis(ring)
    for a, b in product(basis, repeat=2):
        sign = (-1) ** (a.degree * b.degree)
        swapped = multiply(ring, {b: 1}, {a: 1})
        assert multiply(ring, {a: 1}, {b: 1}) == {m: sign * c for m, c in swapped.items()}


@pytest.mark.parametrize(
    "ring",
    [
        cp2_times_t2(),
        torus_ring(4),
        projective_space_ring(3),
        sphere_product_ring([(1, 2), (2, 1), (3, 2)]),
    ],
)
def test_cup_product_is_associative(ring):
    basis = full_basis(ring)
    for a, b, c in product(basis, repeat=3):
        left = multiply(ring, multiply(ring, {a: 1}, {b: 1}), {c: 1})
        right = multiply(ring, {a: 1}, multiply(ring, {b: 1}, {c: 1}))
        assert left == right


def test_exterior_power_is_multiplicative():
    """Lambda^k(AB) = Lambda^k(A) Lambda^k(B) and Lambda^k(I) = I."""
    rng = np.random.default_rng(31)
    for n in range(1, 6):
        for k in range(n + 1):
            assert exterior_power(identity(n), k) == identity(comb(n, k))
            for _ in range(4):
                A = random_integer_matrix(rng, n)
                B = random_integer_matrix(rng, n)
                assert exterior_power(A * B, k) == exterior_power(A, k) * exterior_power(B, k)


def test_kronecker_is_multiplicative():
    """(A x C)(B x D) = AB x CD."""
    rng = np.random.default_rng(32)
    for n, m in product(range(1, 6), range(1, 4)):
        A, B = random_integer_matrix(rng, n), random_integer_matrix(rng, n)
        C, D = random_integer_matrix(rng, m), random_integer_matrix(rng, m)
        assert kronecker(A * B, C * D) == kronecker(A, C) * kronecker(B, D)
    assert kronecker() == ImmutableMatrix([[1]])


def test_alternating_exterior_traces_give_det():
    """sum (-1)^k Tr Lambda^k(A) = det(I - A)."""
    rng = np.random.default_rng(33)
    for n in range(1, 7):
        for _ in range(6):
            A = random_integer_matrix(rng, n)
            alternating = sum((-1) ** k * integer_trace(exterior_power(A, k)) for k in range(n + 1))
            assert alternating == integer_det(identity(n) - A)


@pytest.mark.parametrize("ring", ring_cases())
def test_intersection_pairing_symmetry(ring):
    """P_(top-d) = (-1)^(d(top-d)) P_d^T in every degree."""
    top = ring.top_degree
    for d in range(top + 1):
        expected = (-1) ** (d * (top - d)) * intersection_pairing(ring, d).T
        assert intersection_pairing(ring, top - d) == expected


def test_torus_automorphisms_respect_duality():
    rng = np.random.default_rng(34)
    for n in (2, 3, 4):
        for _ in range(8):
            toral = ToralMap(random_unimodular_matrix(n, rng))
            assert duality_check(toral.automorphism())


def test_random_filtered_automorphisms_preserve_splitting_order():
    """T^2 x S^2 x S^3: y may pick up x_i z terms, z only changes sign."""
    spec = SphereProductSpec.of((1, 2), (2, 1), (3, 1))
    rng = np.random.default_rng(35)
    for _ in range(50):
        rows = [[int(v) for v in row] for row in random_unimodular_matrix(2, rng).tolist()]
        z_sign, y_sign = (int(v) for v in rng.choice([-1, 1], size=2))
        shear = [int(v) for v in rng.integers(-3, 4, size=2)]
        images = {
            "x1^1": rows[0],
            "x2^1": rows[1],
            "x1^2": [z_sign, 0],
            "x1^3": [y_sign, *shear],
        }
        assert filtration_invariance_test(spec, induce(spec.ring, images))


@pytest.mark.parametrize(
    "rows",
    [
        [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        [[2, 1], [1, 1]],
        *RANK2_FORMS.values(),
    ],
)
def test_certified_isometries_form_a_group(rows):
    search = enumerate_isometries(UnimodularForm.from_matrix(rows))
    assert search.completeness == Completeness.CERTIFIED
    group = set(search.isometries)
    assert len(group) == len(search.isometries)
    assert identity(len(rows)) in group
    for A in group:
        assert integer_inverse(A) in group
        for B in group:
            assert A * B in group


@pytest.mark.parametrize("name", list(automorphism_cases()))
def test_conventions_agree_up_to_sign(name):
    """Duality makes |Lambda(f^l)| independent of the trace convention."""
    aut = automorphism_cases()[name]
    inverse = lefschetz_sequence(aut, 12, TraceConvention.INVERSE_TRACES).values
    forward = lefschetz_sequence(aut, 12, TraceConvention.FORWARD_TRACES).values
    assert [abs(v) for v in inverse] == [abs(v) for v in forward]


@pytest.mark.parametrize("name", list(automorphism_cases()))
@pytest.mark.parametrize("convention", list(TraceConvention))
def test_spectral_reconstruction_matches_exact_values(name, convention):
    aut = automorphism_cases()[name]
    summary = growth_analysis(aut, convention)
    exact = lefschetz_sequence(aut, 30, convention).values
    scale = max(1.0, summary.dominant_modulus)
    for l in range(20, 31):
        assert abs(exact[l - 1] - summary.reconstruct(l)) / scale ** l < 1e-6


def monotonicity_specs():
    return [
        {"kind": "sphere_product", "factors": [{"dim": 2, "count": 2}]},
        {"kind": "sphere_product", "factors": [{"dim": 3, "count": 2}]},
        {"kind": "sphere_product", "factors": [{"dim": 1, "count": 2}, {"dim": 2, "count": 1}]},
        {
            "kind": "ring",
            "generators": [
                {"label": "x", "degree": 1},
                {"label": "a", "degree": 2},
                {"label": "b", "degree": 2},
            ],
        },
        {"kind": "ring", "generators": [{"label": "a", "degree": 2, "nilpotency": 3}]},
        {
            "kind": "ring",
            "generators": [
                {"label": "x1", "degree": 1},
                {"label": "x2", "degree": 1},
                {"label": "a", "degree": 2, "nilpotency": 3},
            ],
        },
    ]


@pytest.mark.parametrize("data", monotonicity_specs())
def test_extra_hypotheses_never_retract_verdicts(data):
    """Adding hypotheses keeps every conclusive rule unless NO_ANOSOV now holds."""
    base = apply_rules(parse_manifold(data))
    fired = {v.rule for v in base.verdicts if v.conclusion != Conclusion.INCONCLUSIVE}
    for char_class, simply_connected, codimension in product((False, True), (False, True), (None, 1, 2)):
        hypotheses = {
            "has_nonzero_exponential_char_class": char_class,
            "simply_connected": simply_connected,
            "codimension_hint": codimension,
        }
        report = apply_rules(parse_manifold({**data, "hypotheses": hypotheses}))
        rules = {v.rule for v in report.verdicts}
        assert fired <= rules or Conclusion.NO_ANOSOV in report.conclusions()


@pytest.mark.parametrize("path", sorted(SPECS_DIR.glob("*.json")))
def test_reports_round_trip_and_quote_their_profile(path):
    try:
        spec = load_manifold_spec(path)
    except SpecFormatError:
        pytest.skip(f"{path.name} is not a manifold description")
    report = apply_rules(spec)
    payload = report.model_dump_json()
    assert ObstructionReport.model_validate_json(payload).model_dump_json() == payload
    for verdict in report.verdicts:
        for item in verdict.evidence:
            if verdict.rule in PROFILE_RULES and "betti" in item.data:
                assert item.data["betti"] == report.betti_profile
        if verdict.rule == "betti-at-most-one":
            assert max(verdict.evidence[0].data["betti"]) <= 1
    if spec.kind == "form_manifold":
        form = UnimodularForm.from_matrix(spec.form, "Q")
        rerun = middle_form_check(form, chi_nonzero=True, entry_bound=spec.entry_bound)
        assert rerun in report.verdicts

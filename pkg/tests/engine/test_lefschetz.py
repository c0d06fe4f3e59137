"""Tests for Lefschetz sequences and growth classification."""

import pytest
import sys
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from src.automorphism import identity_automorphism, induce
from src.errors import DomainError
from src.graded_ring import Generator, GradedRingDescription, sphere_product_ring, torus_ring
from src.lefschetz import (
    Consistency,
    GrowthClass,
    TraceConvention,
    anosov_compatibility,
    certified_roots,
    growth_analysis,
    lefschetz_number,
    lefschetz_sequence,
    signed_factors,
    trace_terms,
)

GOLDEN_RATIO_SQUARED = 2.6180339887


def torus_map(rows):
    return induce(torus_ring(2), {"x1^1": rows[0], "x2^1": rows[1]})


def test_cat_map_sequence():
    """Lambda(f^l) = 2 - tr(A^l) for the cat map in both conventions."""
    aut = torus_map([[2, 1], [1, 1]])
    for convention in TraceConvention:
        assert lefschetz_sequence(aut, 3, convention).values == (-1, -5, -16)
    assert lefschetz_number(aut, 2) == -5


def test_conventions_differ_when_top_class_reverses():
    """For det -1 the inverse and forward traces give different numbers."""
    aut = torus_map([[1, 1], [1, 0]])
    assert lefschetz_number(aut, 1, TraceConvention.FORWARD_TRACES) == -1
    assert lefschetz_number(aut, 1, TraceConvention.INVERSE_TRACES) == 1


def test_period_must_be_positive():
    with pytest.raises(DomainError):
        lefschetz_number(torus_map([[2, 1], [1, 1]]), 0)
    with pytest.raises(DomainError):
        lefschetz_sequence(torus_map([[2, 1], [1, 1]]), 0)


def test_sequence_csv():
    csv_text = lefschetz_sequence(torus_map([[2, 1], [1, 1]]), 2).to_csv()
    assert csv_text == "l,lefschetz\n1,-1\n2,-5\n"


def test_signed_factors_cancel():
    """Degrees 0 and 2 contribute (x - 1) twice; the cat factor enters with weight -1."""
    aut = torus_map([[2, 1], [1, 1]])
    factors = dict(signed_factors(trace_terms(aut, TraceConvention.FORWARD_TRACES)))
    assert factors[(1, -1)] == 2
    assert factors[(1, -3, 1)] == -1


def test_certified_roots_of_golden_polynomial():
    roots = certified_roots([1, -3, 1])
    moduli = sorted(abs(complex(r.value)) for r in roots)
    assert moduli[1] == pytest.approx(GOLDEN_RATIO_SQUARED, rel=1e-9)
    assert all(float(r.error) < 1e-20 for r in roots)


def test_growth_analysis_reconstructs_sequence():
    aut = torus_map([[2, 1], [1, 1]])
    summary = growth_analysis(aut)
    assert summary.dominant_modulus == pytest.approx(GOLDEN_RATIO_SQUARED, rel=1e-9)
    assert summary.groups[0].coefficient == pytest.approx(1.0)
    assert summary.reconstruct(5) == pytest.approx(lefschetz_number(aut, 5))
    assert summary.deviation < 1e-6


def test_cat_map_allows_transitive_anosov():
    record = anosov_compatibility(torus_map([[2, 1], [1, 1]]))
    assert record.growth == GrowthClass.COEFFICIENT
    assert record.consistency == Consistency.TRANSITIVE_POSSIBLE
    assert record.integer_coefficient == 1
    assert record.dominant_modulus == pytest.approx(GOLDEN_RATIO_SQUARED, rel=1e-9)


def test_coefficient_two_excludes_transitivity():
    """Cat map on T^2 times the identity on S^2 doubles every Lefschetz number."""
    ring = GradedRingDescription(
        generators=(
            Generator(label="x1", degree=1),
            Generator(label="x2", degree=1),
            Generator(label="s", degree=2),
        )
    )
    aut = induce(ring, {"x1": [2, 1], "x2": [1, 1], "s": [1, 0]})
    record = anosov_compatibility(aut)
    assert record.integer_coefficient == 2
    assert record.consistency == Consistency.TRANSITIVE_EXCLUDED


def test_rotation_is_bounded():
    """A finite-order map has bounded Lefschetz numbers."""
    aut = torus_map([[0, -1], [1, 0]])
    assert lefschetz_sequence(aut, 4).values == (2, 4, 2, 0)
    record = anosov_compatibility(aut)
    assert record.growth == GrowthClass.BOUNDED
    assert record.consistency == Consistency.NOT_ANOSOV


def test_identity_on_torus_is_identically_zero():
    record = anosov_compatibility(identity_automorphism(torus_ring(2)))
    assert record.growth == GrowthClass.IDENTICALLY_ZERO
    assert record.consistency == Consistency.NOT_ANOSOV


def test_top_class_reversal_squares_first():
    """A map reversing the orientation class is replaced by f^2."""
    record = anosov_compatibility(torus_map([[1, 1], [1, 0]]))
    assert record.power_reductions == ("f^2: top class reversed",)
    assert record.consistency == Consistency.TRANSITIVE_POSSIBLE


def test_compatibility_record_dict():
    ring = sphere_product_ring([(3, 2)])
    aut = induce(ring, {"x1^1": [2, 1], "x2^1": [1, 1]})
    payload = anosov_compatibility(aut, length=5).to_dict()
    assert payload["growth"] == "coefficient"
    assert payload["convention"] == "inverse"
    assert len(payload["sequence"]) == 5

"""Tests for the toral automorphism oracle."""

import numpy as np
import pytest
import sys
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from src.errors import DomainError, NonIsolatedFixedPointsError, PreconditionError
from src.lefschetz import TraceConvention, lefschetz_sequence
from src.math_tools import identity, integer_det, matrix_power
from src.toral_oracle import (
    ToralMap,
    fixed_point_count,
    lefschetz_cross_check,
    random_hyperbolic_matrix,
    random_unimodular_matrix,
    smith_count,
)

GOLDEN_RATIO_SQUARED = 2.6180339887


def test_cat_map_fixed_points():
    cat = ToralMap.from_matrix([[2, 1], [1, 1]])
    assert [fixed_point_count(cat, l) for l in range(1, 5)] == [1, 5, 16, 45]
    assert [smith_count(cat, l) for l in range(1, 5)] == [1, 5, 16, 45]


def test_orientation_reversing_map():
    """|det(A^l - I)| = |(-1)^l - L_l + 1| with L_l the Lucas numbers."""
    fibonacci = ToralMap.from_matrix([[1, 1], [1, 0]])
    assert [fixed_point_count(fibonacci, l) for l in range(1, 5)] == [1, 1, 4, 5]


def test_hyperbolicity():
    assert ToralMap.from_matrix([[2, 1], [1, 1]]).hyperbolic
    assert not ToralMap.from_matrix([[1, 1], [0, 1]]).hyperbolic
    assert not ToralMap.from_matrix([[0, -1], [1, 0]]).hyperbolic


def test_salem_companion_is_not_hyperbolic():
    """x^4 - x^3 - x^2 - x + 1 has two roots on the unit circle that are not roots of unity."""
    salem = ToralMap.from_matrix([[0, 0, 0, -1], [1, 0, 0, 1], [0, 1, 0, 1], [0, 0, 1, 1]])
    assert not salem.hyperbolic


def test_from_matrix_preconditions():
    with pytest.raises(PreconditionError):
        ToralMap.from_matrix([[2, 0], [0, 1]])
    with pytest.raises(PreconditionError):
        ToralMap.from_matrix([[1, 0, 0], [0, 1, 0]])


def test_singular_shift_is_reported():
    shear = ToralMap.from_matrix([[1, 1], [0, 1]])
    with pytest.raises(NonIsolatedFixedPointsError):
        fixed_point_count(shear, 1)
    with pytest.raises(NonIsolatedFixedPointsError):
        smith_count(shear, 2)
    with pytest.raises(DomainError):
        fixed_point_count(shear, 0)


def test_cross_check_csv():
    report = lefschetz_cross_check(ToralMap.from_matrix([[2, 1], [1, 1]]), 3)
    assert report.to_csv() == (
        "l,lefschetz,det_count,smith_count\n"
        "1,-1,1,1\n"
        "2,-5,5,5\n"
        "3,-16,16,16\n"
    )
    assert report.dominant_modulus == pytest.approx(GOLDEN_RATIO_SQUARED, rel=1e-9)
    assert report.coefficient == pytest.approx(1.0, abs=1e-6)


def test_cross_check_payload():
    payload = lefschetz_cross_check(ToralMap.from_matrix([[2, 1], [1, 1]]), 2).to_dict()
    assert payload["matrix"] == [[2, 1], [1, 1]]
    assert [row["det_count"] for row in payload["rows"]] == [1, 5]
    assert payload["expected_modulus"] == pytest.approx(GOLDEN_RATIO_SQUARED, rel=1e-9)


def test_cross_check_needs_hyperbolic_map():
    with pytest.raises(PreconditionError):
        lefschetz_cross_check(ToralMap.from_matrix([[0, -1], [1, 0]]), 5)


def test_random_unimodular_matrix():
    rng = np.random.default_rng(7)
    for n in (1, 2, 4):
        assert integer_det(random_unimodular_matrix(n, rng, determinant=-1)) == -1
        assert integer_det(random_unimodular_matrix(n, rng, determinant=1)) == 1
    with pytest.raises(DomainError):
        random_unimodular_matrix(0, rng)
    with pytest.raises(DomainError):
        random_unimodular_matrix(2, rng, determinant=2)


def test_random_hyperbolic_maps_pass_cross_check():
    """Lefschetz, determinant and Smith counts agree on sampled maps."""
    rng = np.random.default_rng(2024)
    for n in (2, 3):
        toral = random_hyperbolic_matrix(n, rng, determinant=1)
        assert toral.hyperbolic
        assert max(abs(int(v)) for v in toral.matrix) <= 10
        report = lefschetz_cross_check(toral, 6)
        assert len(report.rows) == 6


def test_lefschetz_counts_periodic_points():
    """|Lambda(f^l)| equals both point counts on 200 sampled hyperbolic maps, n = 2..5."""
    rng = np.random.default_rng(5)
    samples = [random_hyperbolic_matrix(n, rng) for n in (2, 3, 4, 5) for _ in range(50)]
    assert len(samples) == 200
    for toral in samples:
        values = lefschetz_sequence(toral.automorphism(), 5, TraceConvention.FORWARD_TRACES).values
        for l, value in enumerate(values, start=1):
            assert value == integer_det(identity(toral.dimension) - matrix_power(toral.matrix, l))
            assert abs(value) == fixed_point_count(toral, l) == smith_count(toral, l)


def test_no_hyperbolic_circle_maps():
    with pytest.raises(PreconditionError):
        random_hyperbolic_matrix(1, np.random.default_rng(0))

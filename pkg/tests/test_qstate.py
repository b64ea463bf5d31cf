import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mtp.errors import DomainError
from mtp.qstate import (
    BELL_LABELS,
    BellLabel,
    QubitState,
    apply_correction,
    concurrence,
    correction_unitary,
    fidelity,
    generalized_bell_state,
    pes_coefficients,
)

GRID = [round(0.1 * k, 1) for k in range(1, 11)]

amplitude = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)
states = st.tuples(amplitude, amplitude).filter(lambda t: abs(t[0]) + abs(t[1]) > 1e-3).map(
    lambda t: QubitState(*t).normalized()
)


def test_pes_coefficients_mes():
    f, g = pes_coefficients(1)
    assert f == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert g == pytest.approx(1 / math.sqrt(2), abs=1e-15)


def test_pes_coefficients_half():
    # f = 1/sqrt(1.25) = 2/sqrt(5), g = 0.5 f = 1/sqrt(5)
    f, g = pes_coefficients(0.5)
    assert f == pytest.approx(2 / math.sqrt(5), abs=1e-15)
    assert g == pytest.approx(1 / math.sqrt(5), abs=1e-15)
    assert f == pytest.approx(0.894427191, abs=1e-9)
    assert g == pytest.approx(0.447213595, abs=1e-9)


def test_pes_coefficients_product_limit():
    f, g = pes_coefficients(1e-9)
    assert f == pytest.approx(1.0, abs=1e-12)
    assert g < 1e-8


@pytest.mark.parametrize("n", GRID + [1e-6, 0.37, 0.999])
def test_pes_coefficients_normalized_and_ordered(n):
    f, g = pes_coefficients(n)
    assert abs(f * f + g * g - 1) < 1e-12
    assert f >= g
    assert (f == pytest.approx(g)) == (n == 1)


@pytest.mark.parametrize("bad", [0, -0.1, 1.0000001, 2, float("nan"), float("inf"), "x", None])
def test_parameter_domain(bad):
    with pytest.raises(DomainError):
        pes_coefficients(bad)
    with pytest.raises(DomainError):
        concurrence(bad)


def test_standard_bell_state():
    v = generalized_bell_state(BellLabel.PHI_PLUS, 1).as_array()
    np.testing.assert_allclose(v, np.array([1, 0, 0, 1]) / math.sqrt(2), atol=1e-15)


def test_psi_minus_layout():
    m = 0.3
    f, g = 1 / math.sqrt(1 + m * m), m / math.sqrt(1 + m * m)
    v = generalized_bell_state(BellLabel.PSI_MINUS, m).as_array()
    np.testing.assert_allclose(v, [0, g, -f, 0], atol=1e-15)


def test_pairwise_orthogonal_at_0_3():
    basis = [generalized_bell_state(label, 0.3) for label in BELL_LABELS]
    for a, b in itertools.combinations(basis, 2):
        assert abs(a.inner(b)) < 1e-12


@pytest.mark.parametrize("m", GRID)
def test_generalized_basis_orthonormal(m):
    mat = np.array([generalized_bell_state(label, m).as_array() for label in BELL_LABELS])
    np.testing.assert_allclose(mat @ mat.conj().T, np.eye(4), atol=1e-12)


@pytest.mark.parametrize("n, expected", [(1, 1.0), (0.5, 0.8), (0.9, 1.8 / 1.81)])
def test_concurrence_values(n, expected):
    assert concurrence(n) == pytest.approx(expected, abs=1e-15)


def test_concurrence_0_9_digits():
    assert concurrence(0.9) == pytest.approx(0.994475, abs=1e-6)


def test_concurrence_strictly_increasing():
    grid = np.linspace(0.01, 1, 200)
    values = [concurrence(n) for n in grid]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_correction_examples():
    s = QubitState(0.6, 0.8j)
    assert apply_correction(BellLabel.PHI_PLUS, s) == s
    assert apply_correction(BellLabel.PSI_PLUS, s) == QubitState(0.8j, 0.6)
    assert apply_correction(BellLabel.PSI_MINUS, s) == QubitState(0.8j, -0.6)


@pytest.mark.parametrize("label", BELL_LABELS)
def test_correction_matches_matrix(label):
    s = QubitState(0.3 - 0.1j, 0.2 + 0.9j)
    expected = correction_unitary(label) @ s.as_array()
    np.testing.assert_allclose(apply_correction(label, s).as_array(), expected, atol=1e-15)


@given(states, st.sampled_from(BELL_LABELS))
def test_correction_involution_up_to_phase(s, label):
    twice = apply_correction(label, apply_correction(label, s))
    assert abs(apply_correction(label, s).norm_sq - s.norm_sq) < 1e-12
    assert fidelity(twice, s) == pytest.approx(1.0, abs=1e-12)


def test_fidelity_examples():
    s = QubitState(0.6, 0.8)
    assert fidelity(s, s) == pytest.approx(1.0, abs=1e-15)
    assert fidelity(QubitState(1, 0), QubitState(0, 1)) == 0.0
    plus = QubitState(1 / math.sqrt(2), 1 / math.sqrt(2))
    # |<+|0>|^2 = 1/2
    assert fidelity(plus, QubitState(1, 0)) == pytest.approx(0.5, abs=1e-15)


@given(states, amplitude.filter(lambda z: abs(z) > 1e-3))
def test_fidelity_scale_invariant(s, c):
    scaled = QubitState(c * s.a0, c * s.a1)
    assert fidelity(s, scaled) == pytest.approx(1.0, abs=1e-12)


def test_zero_state_rejected():
    with pytest.raises(DomainError):
        QubitState(0, 0)


def test_label_types():
    assert [label.is_phi for label in BELL_LABELS] == [True, True, False, False]
    assert [label.is_psi for label in BELL_LABELS] == [False, False, True, True]

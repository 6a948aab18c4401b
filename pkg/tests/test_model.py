import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spde_damping.errors import InvalidParameters, ShapeMismatch
from spde_damping.model import (
    NoiseSpec,
    SpdeCoefficients,
    basis_1d,
    eigenfunction_eval,
    eigenvalue,
    mode_weight,
    project_initial_condition,
    weighted_inner_product,
)

UNIT = SpdeCoefficients(0.0, 0.0, 0.0, 1.0, 1.0)


def test_derived_quantities(reference_coeffs):
    assert reference_coeffs.kappa == pytest.approx(1.0)
    assert reference_coeffs.eta == pytest.approx(1.0)
    assert reference_coeffs.gamma == pytest.approx(0.5)


def test_eigenvalue_examples(reference_coeffs):
    assert eigenvalue(1, 1, UNIT) == pytest.approx(2 * math.pi**2)
    assert eigenvalue(1, 1, reference_coeffs) == pytest.approx(4.0478418, abs=5e-8)
    assert eigenvalue(3, 4, UNIT) == pytest.approx(25 * math.pi**2)


def test_nonpositive_lambda11_rejected():
    # Gamma = -theta0/theta2 must not push lambda_11 below zero
    with pytest.raises(InvalidParameters):
        SpdeCoefficients(theta0=2 * math.pi**2 + 1, theta1=0, eta1=0, theta2=1, sigma=1)
    with pytest.raises(InvalidParameters):
        SpdeCoefficients(0, 0, 0, 0.0, 1)


@given(st.integers(1, 50), st.integers(1, 50))
def test_eigenvalue_gap_is_gamma_free(l1, l2):
    c = SpdeCoefficients(0.3, 0.2, -0.4, 0.7, 1.0)
    gap = eigenvalue(l1, l2, c) - eigenvalue(1, 1, c)
    assert gap == pytest.approx(0.7 * math.pi**2 * (l1 * l1 + l2 * l2 - 2), rel=1e-12, abs=1e-12)


def test_eigenfunction_examples():
    assert eigenfunction_eval(3, 2, 0.0, 0.37, UNIT) == 0.0
    assert eigenfunction_eval(1, 1, 0.5, 0.5, UNIT) == pytest.approx(2.0)
    c = SpdeCoefficients(0.0, 1.0, 1.0, 1.0, 1.0)
    assert eigenfunction_eval(1, 1, 0.5, 0.5, c) == pytest.approx(1.2130613, abs=5e-8)
    assert eigenfunction_eval(2, 5, 1.0, 0.3, c) == pytest.approx(0.0, abs=1e-14)


def test_mode_weight_examples():
    assert mode_weight(1, 1, NoiseSpec(1.0, 0.0)) == pytest.approx(0.2250791, abs=5e-8)
    # (2 pi^2 - 19.5)^(-1/4) = 1.42990...; quoted as 1.4300 after rounding
    assert mode_weight(1, 1, NoiseSpec(0.5, -19.5)) == pytest.approx(1.4300, abs=1.5e-4)
    assert mode_weight(1, 1, NoiseSpec(0.5, -19.5)) == pytest.approx((2 * math.pi**2 - 19.5) ** -0.25, rel=1e-14)
    assert mode_weight(7, 3, NoiseSpec(1e-12, 3.0)) == pytest.approx(1.0, abs=1e-10)


@given(st.integers(1, 200), st.integers(1, 200), st.floats(0.01, 1.99))
def test_mode_weight_symmetric(l1, l2, alpha):
    n = NoiseSpec(alpha, -19.5)
    assert mode_weight(l1, l2, n) == mode_weight(l2, l1, n)


def test_noise_validation():
    for bad in (0.0, 2.0, -1.0):
        with pytest.raises(InvalidParameters):
            NoiseSpec(bad, 0.0)
    with pytest.raises(InvalidParameters):
        NoiseSpec(0.5, -2 * math.pi**2)
    with pytest.raises(InvalidParameters):
        NoiseSpec(0.5, 0.0, trunc_k=0)


@pytest.mark.parametrize("kappa,eta", [(0.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
def test_orthonormality_on_512_grid(kappa, eta):
    c = SpdeCoefficients(0.0, kappa, eta, 1.0, 1.0)
    g = np.linspace(0, 1, 513)
    e1 = basis_1d(4, g, c.kappa)
    e2 = basis_1d(4, g, c.eta)
    for a1 in range(4):
        for a2 in range(4):
            u = np.outer(e1[a1], e2[a2])
            for b1 in range(4):
                for b2 in range(4):
                    v = np.outer(e1[b1], e2[b2])
                    expected = float(a1 == b1 and a2 == b2)
                    assert weighted_inner_product(u, v, g, g, c) == pytest.approx(expected, abs=1e-6)


def test_inner_product_zero_and_mismatch():
    g = np.linspace(0, 1, 11)
    assert weighted_inner_product(np.zeros((11, 11)), np.ones((11, 11)), g, g, UNIT) == 0.0
    with pytest.raises(ShapeMismatch):
        weighted_inner_product(np.zeros((11, 11)), np.zeros((11, 10)), g, g, UNIT)


def test_project_initial_condition_recovers_coefficients():
    c = SpdeCoefficients(0.0, 1.0, -0.5, 1.0, 1.0)
    g = np.linspace(0, 1, 401)
    coef = np.array([[1.0, -0.5, 0.0], [0.25, 0.0, 2.0]])
    xi = basis_1d(2, g, c.kappa).T @ coef @ basis_1d(3, g, c.eta)
    got = project_initial_condition(xi, g, g, c, 2, 3)
    np.testing.assert_allclose(got, coef, atol=1e-6)

import math

import numpy as np
import pytest

from spde_damping.errors import InvalidParameters, ToleranceNotAchieved
from spde_damping.theory import (
    PsiQuery,
    ThetaVector,
    bessel_combination_identity_check,
    bessel_combination_integral,
    g_limit,
    mellin_constant,
    psi,
    psi_reference,
    psi_with_error,
    weight_integral,
)

# frozen from psi_reference at 128 and 256 panels (both give this value)
PSI_1_05_02 = 1.578934684866416


def test_regression_constant():
    assert psi(1.0, 0.5, 0.2) == pytest.approx(PSI_1_05_02, rel=1e-8)


@pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("alpha", [0.3, 0.5, 1.0, 1.5])
@pytest.mark.parametrize("theta2", [0.2, 1.0])
def test_positive_and_routes_agree(r, alpha, theta2):
    v = psi_with_error(PsiQuery(r, alpha, theta2))
    assert v.value > 0
    assert v.error_bound <= 1e-8 * v.value
    assert v.value == pytest.approx(psi_reference(r, alpha, theta2), rel=1e-8)


@pytest.mark.parametrize("r,alpha,theta2", [(0.5, 0.3, 0.2), (2.0, 1.5, 1.0), (1.3, 0.8, 0.45)])
def test_scaling_identity(r, alpha, theta2):
    lhs = psi(r, alpha, theta2, 1e-10)
    rhs = theta2 ** (alpha - 1) * psi(r / math.sqrt(theta2), alpha, 1.0, 1e-10)
    assert lhs == pytest.approx(rhs, rel=1e-8)


def test_mellin_constant_continuity_at_one():
    assert mellin_constant(1.0) == pytest.approx(0.5 * mellin_constant(1.0 - 1e-7) + 0.5 * mellin_constant(1.0 + 1e-7), rel=1e-12)
    # Gamma(1) / (8 Gamma(2)) * 2 log 2 = log(2) / 4
    assert mellin_constant(1.0) == pytest.approx(math.log(2) / 4, rel=1e-15)


def test_small_r_power_law():
    # psi ~ C r^{2 alpha} as r -> 0 (the Gaussian factor drops out)
    a, t2 = 0.5, 1.0
    ratio = psi(1e-3, a, t2) / psi(2e-3, a, t2)
    assert ratio == pytest.approx(2 ** (-2 * a), rel=1e-3)


def test_tolerance_failure_reports_bound():
    with pytest.raises(ToleranceNotAchieved) as info:
        psi_with_error(PsiQuery(1.0, 0.5, 0.2, 1e-12), cutoff=2.0)
    assert info.value.bound > 0


@pytest.mark.parametrize("kw", [dict(r=0.0), dict(alpha=2.0), dict(theta2=-1.0), dict(rel_tol=1e-2), dict(rel_tol=0.0)])
def test_query_validation(kw):
    args = dict(r=1.0, alpha=0.5, theta2=0.2, rel_tol=1e-8)
    args.update(kw)
    with pytest.raises(InvalidParameters):
        PsiQuery(**args)


def test_weight_integral():
    assert weight_integral(0.0, 0.1) == 0.8
    assert weight_integral(1.0, 0.1) == pytest.approx(math.exp(-0.1) - math.exp(-0.9), rel=1e-15)
    assert weight_integral(1.0, 0.1) == pytest.approx(0.4982678, abs=5e-8)
    for c in (1e-7, -5e-7, 9.9e-7):
        exact = (math.exp(-c * 0.1) - math.exp(-c * 0.9)) / c
        assert weight_integral(c, 0.1) == pytest.approx(exact, rel=1e-9)
    # the two branches meet at |c| = 1e-6
    assert weight_integral(1e-6 * (1 - 1e-12), 0.2) == pytest.approx(weight_integral(1e-6 * (1 + 1e-12), 0.2), rel=1e-14)


def test_g_limit_examples():
    p = psi(1.0, 0.5, 0.2)
    assert g_limit(1.0, 0.5, ThetaVector(0.0, 0.0, 0.2, 2.0), 0.1) == pytest.approx(2.0 * p, rel=1e-14)
    i1 = math.exp(-0.1) - math.exp(-0.9)
    assert g_limit(1.0, 0.5, ThetaVector(1.0, 1.0, 0.2, 1.0), 0.1) == pytest.approx(p * (i1 / 0.8) ** 2, rel=1e-12)
    with pytest.raises(InvalidParameters):
        g_limit(1.0, 0.5, ThetaVector(1.0, 1.0, 0.2, 1.0), 0.5)


def test_g_closed_form_vs_quadrature():
    from spde_damping.harness import weight_integral_2d_quadrature

    for kappa, eta, b in [(1.0, 1.0, 0.1), (2.5, -0.7, 0.02), (0.0, 0.0, 0.3)]:
        closed = weight_integral(kappa, b) * weight_integral(eta, b)
        assert closed == pytest.approx(weight_integral_2d_quadrature(kappa, eta, b), rel=1e-10)


@pytest.mark.parametrize("x", [0.1, 1.0, 5.0, 20.0])
def test_bessel_combination_identity(x):
    v = bessel_combination_identity_check(x)
    assert v >= -1e-12
    assert v == pytest.approx(bessel_combination_integral(x), abs=1e-8)
    assert bessel_combination_identity_check(0.0) == 0.0


def test_uncorrected_integrand_differs():
    # with cos(sin t) in place of cos(x sin t) the identity does not hold
    from spde_damping.theory.quadrature import adaptive_gk

    x = 5.0
    val, _ = adaptive_gk(lambda t: (1 - np.cos(x * np.cos(t))) * (1 - np.cos(np.sin(t))), 0.0, math.pi / 2)
    assert abs(2 / math.pi * val - bessel_combination_identity_check(x)) > 1e-2

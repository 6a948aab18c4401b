"""The limit constants psi_{r,alpha}(theta2) and g_{r,alpha}(theta).

    psi = 2 / (theta2^(1-alpha) pi) * int_0^inf (1 - e^{-x^2}) x^{-1-2 alpha}
                                      * (J0(sqrt2 c x) - 2 J0(c x) + 1) dx,
    c = r / sqrt(theta2).

``psi`` splits the integral at a cutoff T.  On [0, T] it uses adaptive
Gauss-Kronrod.  Beyond T the factor ``1 - e^{-x^2}`` is 1 to within
``e^{-T^2}``; the ``+1`` term integrates in closed form to ``T^{-2 alpha} / (2 alpha)``
and the two Bessel terms reduce to ``a^{2 alpha} int_{aT}^inf u^{-1-2 alpha} J0(u) du``,
summed over half periods and extrapolated with Wynn's epsilon algorithm.

``psi_reference`` is an independent route used for verification: without
the Gaussian factor the integral has the Mellin-transform closed form

    int_0^inf x^{-1-2 alpha} (J0(sqrt2 c x) - 2 J0(c x) + 1) dx
        = 2^{-2 alpha - 1} Gamma(2 - alpha) / (alpha Gamma(1 + alpha))
          * (2 - 2^alpha) / (1 - alpha) * c^{2 alpha},

(the ratio is continued by 2 log 2 at alpha = 1), and the remaining
Gaussian-damped integral is smooth and rapidly decaying, so a plain
composite Gauss-Legendre rule handles it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidParameters, ToleranceNotAchieved
from .bessel import bessel_combination, bessel_j0
from .quadrature import adaptive_gk, gauss_legendre_composite, oscillatory_tail


@dataclass(frozen=True)
class PsiQuery:
    r: float
    alpha: float
    theta2: float
    rel_tol: float = 1e-8

    def __post_init__(self):
        if not self.r > 0:
            raise InvalidParameters(f"r must be positive, got {self.r}")
        if not 0 < self.alpha < 2:
            raise InvalidParameters(f"alpha must lie in (0, 2), got {self.alpha}")
        if not self.theta2 > 0:
            raise InvalidParameters(f"theta2 must be positive, got {self.theta2}")
        if not 0 < self.rel_tol <= 1e-3:
            raise InvalidParameters(f"rel_tol must lie in (0, 1e-3], got {self.rel_tol}")


@dataclass(frozen=True)
class ThetaVector:
    kappa: float
    eta: float
    theta2: float
    sigma_sq: float

    def __post_init__(self):
        if not self.theta2 > 0:
            raise InvalidParameters(f"theta2 must be positive, got {self.theta2}")
        if not self.sigma_sq >= 0:
            raise InvalidParameters(f"sigma_sq must be nonnegative, got {self.sigma_sq}")

    @classmethod
    def from_coefficients(cls, coeffs) -> "ThetaVector":
        return cls(coeffs.kappa, coeffs.eta, coeffs.theta2, coeffs.sigma**2)


@dataclass(frozen=True)
class PsiValue:
    value: float
    error_bound: float


def _integrand(c: float, alpha: float):
    def f(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        pos = x > 0
        xp = x[pos]
        out[pos] = -np.expm1(-xp * xp) * xp ** (-1.0 - 2.0 * alpha) * bessel_combination(c * xp)
        return out

    return f


def _bessel_power_tail(alpha: float, start: float, abs_tol: float) -> tuple[float, float]:
    """``int_start^inf u^{-1-2 alpha} J0(u) du``."""

    def f(u):
        return u ** (-1.0 - 2.0 * alpha) * bessel_j0(u)

    return oscillatory_tail(f, start, math.pi, abs_tol)


def psi_with_error(q: PsiQuery, cutoff: float | None = None) -> PsiValue:
    c = q.r / math.sqrt(q.theta2)
    a = q.alpha
    # the cutoff must clear both the Gaussian factor and a few Bessel periods
    t = cutoff if cutoff is not None else max(10.0, 20.0 / c)
    prefactor = 2.0 / (q.theta2 ** (1.0 - a) * math.pi)

    # rough magnitude for the tolerance split: the +1 tail alone is a lower-order proxy
    scale = t ** (-2 * a) / (2 * a)
    head, head_err = adaptive_gk(_integrand(c, a), 0.0, t, rel_tol=q.rel_tol / 8, abs_tol=q.rel_tol * scale / 8)
    budget = q.rel_tol * max(abs(head), scale) / 8

    s2 = math.sqrt(2.0) * c
    g_s2, e_s2 = _bessel_power_tail(a, s2 * t, budget / s2 ** (2 * a))
    g_c, e_c = _bessel_power_tail(a, c * t, budget / c ** (2 * a))
    tail = scale + s2 ** (2 * a) * g_s2 - 2.0 * c ** (2 * a) * g_c
    tail_err = s2 ** (2 * a) * e_s2 + 2.0 * c ** (2 * a) * e_c

    # dropped e^{-x^2} part of the tail; |J0 combination| <= 4
    gauss_bound = 4.0 * math.exp(-t * t) * t ** (-2 * a) / (2 * a)

    total = head + tail
    bound = prefactor * (head_err + tail_err + gauss_bound)
    value = prefactor * total
    if not bound <= q.rel_tol * abs(value):
        raise ToleranceNotAchieved(
            f"psi(r={q.r}, alpha={q.alpha}, theta2={q.theta2}) error bound {bound:.3g} exceeds tolerance", bound
        )
    return PsiValue(value, bound)


def psi(r: float, alpha: float, theta2: float, rel_tol: float = 1e-8) -> float:
    return psi_with_error(PsiQuery(r, alpha, theta2, rel_tol)).value


def mellin_constant(alpha: float) -> float:
    """Closed form of ``int_0^inf x^{-1-2 alpha} (J0(sqrt2 x) - 2 J0(x) + 1) dx``."""
    eps = alpha - 1.0
    ratio = 2.0 * math.log(2.0) if eps == 0 else 2.0 * math.expm1(eps * math.log(2.0)) / eps
    return 2.0 ** (-2 * alpha - 1) * math.gamma(2 - alpha) / (alpha * math.gamma(1 + alpha)) * ratio


def psi_reference(r: float, alpha: float, theta2: float, panels: int = 64, upper: float = 9.0) -> float:
    """Independent evaluation: Mellin closed form minus the Gaussian-damped part.

    The damped integral is computed with ``x = s^3`` (which smooths the
    ``x^{3 - 2 alpha}`` behaviour at 0) and a composite 20-point
    Gauss-Legendre rule on ``panels`` equal panels.
    """
    c = r / math.sqrt(theta2)

    def damped(s):
        x = s**3
        out = np.zeros_like(s)
        pos = s > 0
        xs = x[pos]
        out[pos] = np.exp(-xs * xs) * xs ** (-1.0 - 2.0 * alpha) * bessel_combination(c * xs) * 3.0 * s[pos] ** 2
        return out

    damped_part = gauss_legendre_composite(damped, 0.0, upper ** (1.0 / 3.0), panels)
    return 2.0 / (theta2 ** (1.0 - alpha) * math.pi) * (mellin_constant(alpha) * c ** (2 * alpha) - damped_part)


def weight_integral(c: float, b: float) -> float:
    """``int_b^{1-b} exp(-c y) dy``."""
    w = 1.0 - 2.0 * b
    if abs(c) < 1e-6:
        # Taylor in c: w * (1 - c E[y] + c^2 E[y^2] / 2 - c^3 E[y^3] / 6), y uniform on [b, 1-b]
        m2 = (b * b + b * (1 - b) + (1 - b) ** 2) / 3.0
        m3 = (b + (1 - b)) * (b * b + (1 - b) ** 2) / 4.0
        return w * (1.0 - c * 0.5 + c * c * m2 / 2.0 - c**3 * m3 / 6.0)
    return math.exp(-c * b) * -math.expm1(-c * w) / c


def g_limit(r: float, alpha: float, theta: ThetaVector, b: float, rel_tol: float = 1e-8) -> float:
    """Probability limit of the normalized quadratic variation."""
    if not 0 < b < 0.5:
        raise InvalidParameters(f"b must lie in (0, 1/2), got {b}")
    p = psi(r, alpha, theta.theta2, rel_tol)
    w = 1.0 - 2.0 * b
    return theta.sigma_sq * p / (w * w) * weight_integral(theta.kappa, b) * weight_integral(theta.eta, b)


def bessel_combination_identity_check(x: float) -> float:
    """``J0(sqrt2 x) - 2 J0(x) + 1`` (nonnegative for x >= 0)."""
    return float(bessel_combination(x))


def bessel_combination_integral(x: float) -> float:
    """``(2/pi) int_0^{pi/2} (1 - cos(x cos t)) (1 - cos(x sin t)) dt`` by adaptive quadrature.

    Equal to :func:`bessel_combination_identity_check`; both factors use
    ``2 sin^2(u/2)`` to avoid cancellation for small x.
    """

    def f(t):
        return 4.0 * np.sin(x * np.cos(t) / 2) ** 2 * np.sin(x * np.sin(t) / 2) ** 2

    val, _ = adaptive_gk(f, 0.0, math.pi / 2, abs_tol=1e-15, rel_tol=1e-13)
    return 2.0 / math.pi * val

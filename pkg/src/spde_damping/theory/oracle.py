"""Exact second moments of triple increments under the truncated spectral model.

With zero initial value each mode is a centred OU process, modes are
independent, and a triple increment is a linear functional of the modes:

    T_{i,j,k} X = sum_{l1,l2} (x_{l1,l2}(t_i) - x_{l1,l2}(t_{i-1}))
                              * D1[j, l1] * D2[k, l2],

with ``D1[j, l1] = e^{(1)}_{l1}(y_j) - e^{(1)}_{l1}(y_{j-1})`` (likewise D2).
Hence

    E[(T_{i,j,k} X)^2] = sigma^2 sum mu^{-alpha} D1^2 D2^2 v(lambda, t_{i-1}, t_i),

where ``v`` is the variance of an OU increment started from zero.
"""

from __future__ import annotations

import math

import numpy as np

from ..model import NoiseSpec, SpdeCoefficients, basis_1d, eigenvalue_grid, mode_weight_grid
from ..sampling import Level, ThinnedDesign
from ..summation import ExactSum

_ROWS = 256  # modes are processed in blocks of rows to bound memory


def _as_level(design) -> Level:
    return design.fine if isinstance(design, ThinnedDesign) else design


def ou_increment_variance(lam, s, t):
    """``Var(x_t - x_s)`` for ``dx = -lam x dt + dw``, ``x_0 = 0``, ``s <= t``.

    Written as ``(1 - a)^2 Var(x_s) + (1 - a^2) / (2 lam)`` with
    ``a = exp(-lam (t - s))`` and expm1 everywhere, which avoids the
    cancellation of the three-term form when ``lam (t - s)`` is small.
    """
    lam = np.asarray(lam, dtype=float)
    h = t - s
    one_minus_a = -np.expm1(-lam * h)
    one_minus_a2 = -np.expm1(-2.0 * lam * h)
    var_s = -np.expm1(-2.0 * lam * s) / (2.0 * lam)
    return one_minus_a**2 * var_s + one_minus_a2 / (2.0 * lam)


def summed_increment_variance(lam, n_steps: int, dt: float):
    """``sum_{i=1}^{n} v(lam, (i-1) dt, i dt)`` in closed form."""
    lam = np.asarray(lam, dtype=float)
    one_minus_a = -np.expm1(-lam * dt)
    one_minus_q = -np.expm1(-2.0 * lam * dt)
    geom = np.expm1(-2.0 * lam * dt * n_steps) / np.expm1(-2.0 * lam * dt)  # sum_{i<n} q^i
    sum_var_s = (n_steps - geom) / (2.0 * lam)
    return one_minus_a**2 * sum_var_s + n_steps * one_minus_q / (2.0 * lam)


def _spatial_differences(level: Level, coeffs: SpdeCoefficients, noise: NoiseSpec):
    y = level.coords
    e1 = basis_1d(noise.trunc_k, y, coeffs.kappa)
    e2 = basis_1d(noise.trunc_l, y, coeffs.eta)
    return e1[:, 1:] - e1[:, :-1], e2[:, 1:] - e2[:, :-1]


def expected_triple_increment_sq(
    design, i: int, j: int, k: int, coeffs: SpdeCoefficients, noise: NoiseSpec
) -> float:
    """``E[(T_{i,j,k} X)^2]`` for 1 <= i <= N, 1 <= j, k <= m1 (zero initial value)."""
    level = _as_level(design)
    if not (1 <= i <= level.N and 1 <= j <= level.m1 and 1 <= k <= level.m1):
        raise IndexError(f"(i, j, k) = ({i}, {j}, {k}) outside the design")
    d1, d2 = _spatial_differences(level, coeffs, noise)
    lam = eigenvalue_grid(coeffs, noise.trunc_k, noise.trunc_l)
    mu_pow = mode_weight_grid(noise) ** 2
    v = ou_increment_variance(lam, (i - 1) * level.dt, i * level.dt)
    terms = mu_pow * (d1[:, j - 1] ** 2)[:, None] * (d2[:, k - 1] ** 2)[None, :] * v
    return coeffs.sigma**2 * math.fsum(terms.ravel())


def expected_sum_sq(design, coeffs: SpdeCoefficients, noise: NoiseSpec) -> float:
    """``sum_{i,j,k} E[(T_{i,j,k} X)^2]`` over one design level."""
    level = _as_level(design)
    d1, d2 = _spatial_differences(level, coeffs, noise)
    s1 = (d1**2).sum(axis=1)
    s2 = (d2**2).sum(axis=1)
    l2 = np.arange(1, noise.trunc_l + 1, dtype=float)
    acc = ExactSum()
    for r0 in range(0, noise.trunc_k, _ROWS):
        l1 = np.arange(r0 + 1, min(r0 + _ROWS, noise.trunc_k) + 1, dtype=float)[:, None]
        lam = coeffs.theta2 * (math.pi**2 * (l1 * l1 + l2 * l2) + coeffs.gamma)
        mu = math.pi**2 * (l1 * l1 + l2 * l2) + noise.mu0
        sv = summed_increment_variance(lam, level.N, level.dt)
        acc.add(mu ** (-noise.alpha) * s1[r0 : r0 + l1.shape[0], None] * s2[None, :] * sv)
    return coeffs.sigma**2 * acc.value


def expected_quadratic_variation(design, coeffs: SpdeCoefficients, noise: NoiseSpec) -> float:
    """``(1 / (m N Delta^alpha)) sum_{i,j,k} E[(T_{i,j,k} X)^2]``; tends to ``g_limit``."""
    level = _as_level(design)
    return expected_sum_sq(level, coeffs, noise) / (level.m * level.N * level.dt**noise.alpha)


def expected_alpha_hat(design: ThinnedDesign, coeffs: SpdeCoefficients, noise: NoiseSpec) -> float:
    """Estimator applied to expected (rather than realized) quadratic variations.

    A deterministic proxy for the Monte Carlo mean of ``alpha_hat``; it
    differs from it only by the O(1/(mN)) curvature of the logarithm.
    """
    v_f = expected_sum_sq(design.fine, coeffs, noise) / (design.fine.m * design.fine.N)
    v_c = expected_sum_sq(design.coarse, coeffs, noise) / (design.coarse.m * design.coarse.N)
    return math.log(v_c / v_f) / math.log(4.0)

"""SPDE parameterization, closed-form eigenpairs and Q-Wiener spectral weights.

The operator ``-A = theta2 * Laplacian + theta1 d/dy + eta1 d/dz + theta0`` on
the unit square with Dirichlet boundary has eigenfunctions

    e_{l1,l2}(y, z) = sqrt(2) sin(pi l1 y) exp(-kappa y / 2)
                      * sqrt(2) sin(pi l2 z) exp(-eta z / 2)

and eigenvalues ``theta2 * (pi^2 (l1^2 + l2^2) + Gamma)``.  They are
orthonormal for the inner product weighted by ``exp(kappa y + eta z)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameters, ShapeMismatch

PI2 = math.pi**2


@dataclass(frozen=True)
class SpdeCoefficients:
    theta0: float
    theta1: float
    eta1: float
    theta2: float
    sigma: float
    kappa: float = field(init=False)
    eta: float = field(init=False)
    gamma: float = field(init=False)

    def __post_init__(self):
        if not self.theta2 > 0:
            raise InvalidParameters(f"theta2 must be positive, got {self.theta2}")
        # sigma = 0 is allowed: it is the deterministic degenerate case used
        # by linearity tests; the estimator rejects the resulting zero field.
        if not self.sigma >= 0:
            raise InvalidParameters(f"sigma must be nonnegative, got {self.sigma}")
        kappa = self.theta1 / self.theta2
        eta = self.eta1 / self.theta2
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "gamma", -self.theta0 / self.theta2 + (kappa**2 + eta**2) / 4)
        if not self.lambda11 > 0:
            raise InvalidParameters(
                f"lambda_(1,1) = {self.lambda11:.6g} must be positive for A_theta to be positive definite"
            )

    @property
    def lambda11(self) -> float:
        return self.theta2 * (2 * PI2 + self.gamma)

    def with_sigma(self, sigma: float) -> "SpdeCoefficients":
        return SpdeCoefficients(self.theta0, self.theta1, self.eta1, self.theta2, sigma)

    def as_dict(self) -> dict:
        return {
            "theta0": self.theta0,
            "theta1": self.theta1,
            "eta1": self.eta1,
            "theta2": self.theta2,
            "sigma": self.sigma,
        }


@dataclass(frozen=True)
class NoiseSpec:
    """Q-Wiener spectrum ``mu_{l1,l2}^{-alpha/2}`` and the mode truncation K x L."""

    alpha: float
    mu0: float
    trunc_k: int = 1000
    trunc_l: int = 1000

    def __post_init__(self):
        if not 0 < self.alpha < 2:
            raise InvalidParameters(f"alpha must lie in (0, 2), got {self.alpha}")
        if not self.mu0 > -2 * PI2:
            raise InvalidParameters(f"mu0 must exceed -2 pi^2, got {self.mu0}")
        if int(self.trunc_k) != self.trunc_k or self.trunc_k < 1:
            raise InvalidParameters(f"trunc_k must be a positive integer, got {self.trunc_k}")
        if int(self.trunc_l) != self.trunc_l or self.trunc_l < 1:
            raise InvalidParameters(f"trunc_l must be a positive integer, got {self.trunc_l}")

    def with_truncation(self, k: int, l: int | None = None) -> "NoiseSpec":
        return NoiseSpec(self.alpha, self.mu0, k, k if l is None else l)

    def as_dict(self) -> dict:
        return {"alpha": self.alpha, "mu0": self.mu0, "trunc_k": self.trunc_k, "trunc_l": self.trunc_l}


def _check_index(l1, l2):
    if np.any(np.asarray(l1) < 1) or np.any(np.asarray(l2) < 1):
        raise InvalidParameters("mode indices must be >= 1")


def eigenvalue(l1, l2, coeffs: SpdeCoefficients):
    """lambda_{l1,l2}; broadcasts over array-valued indices."""
    _check_index(l1, l2)
    l1 = np.asarray(l1, dtype=float)
    l2 = np.asarray(l2, dtype=float)
    lam = coeffs.theta2 * (PI2 * (l1 * l1 + l2 * l2) + coeffs.gamma)
    return lam if lam.ndim else float(lam)


def eigenvalue_grid(coeffs: SpdeCoefficients, k: int, l: int) -> np.ndarray:
    """K x L array of eigenvalues, row index l1 - 1, column index l2 - 1."""
    return eigenvalue(np.arange(1, k + 1)[:, None], np.arange(1, l + 1)[None, :], coeffs)


def mode_weight(l1, l2, noise: NoiseSpec):
    """Noise amplitude ``mu_{l1,l2}^{-alpha/2}`` of mode (l1, l2)."""
    _check_index(l1, l2)
    l1 = np.asarray(l1, dtype=float)
    l2 = np.asarray(l2, dtype=float)
    mu = PI2 * (l1 * l1 + l2 * l2) + noise.mu0
    if np.any(mu <= 0):
        raise InvalidParameters("mu_{l1,l2} must be positive")
    w = mu ** (-noise.alpha / 2)
    return w if w.ndim else float(w)


def mode_weight_grid(noise: NoiseSpec) -> np.ndarray:
    return mode_weight(
        np.arange(1, noise.trunc_k + 1)[:, None], np.arange(1, noise.trunc_l + 1)[None, :], noise
    )


def basis_1d(n_modes: int, coords, decay: float) -> np.ndarray:
    """Matrix ``E[l-1, j] = sqrt(2) sin(pi l x_j) exp(-decay x_j / 2)``.

    ``decay`` is kappa for the y-axis and eta for the z-axis.
    """
    x = np.asarray(coords, dtype=float)
    l = np.arange(1, n_modes + 1, dtype=float)
    return math.sqrt(2) * np.sin(math.pi * np.outer(l, x)) * np.exp(-decay * x / 2)[None, :]


def eigenfunction_eval(l1, l2, y, z, coeffs: SpdeCoefficients):
    _check_index(l1, l2)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    ey = math.sqrt(2) * np.sin(math.pi * np.asarray(l1) * y) * np.exp(-coeffs.kappa * y / 2)
    ez = math.sqrt(2) * np.sin(math.pi * np.asarray(l2) * z) * np.exp(-coeffs.eta * z / 2)
    out = ey * ez
    return out if np.ndim(out) else float(out)


def _trapezoid_weights(x: np.ndarray) -> np.ndarray:
    w = np.zeros_like(x)
    dx = np.diff(x)
    w[:-1] += dx / 2
    w[1:] += dx / 2
    return w


def weighted_inner_product(u, v, ys, zs, coeffs: SpdeCoefficients) -> float:
    """Trapezoidal approximation of ``<u, v> = int int u v exp(kappa y + eta z)``.

    ``u`` and ``v`` are sampled on the tensor grid ``ys x zs`` (shape
    ``(len(ys), len(zs))``).
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    ys = np.asarray(ys, dtype=float)
    zs = np.asarray(zs, dtype=float)
    if u.shape != v.shape or u.shape != (ys.size, zs.size):
        raise ShapeMismatch(f"grids differ: u{u.shape}, v{v.shape}, coords ({ys.size}, {zs.size})")
    wy = _trapezoid_weights(ys) * np.exp(coeffs.kappa * ys)
    wz = _trapezoid_weights(zs) * np.exp(coeffs.eta * zs)
    return float(wy @ (u * v) @ wz)


def project_initial_condition(xi, ys, zs, coeffs: SpdeCoefficients, k: int, l: int) -> np.ndarray:
    """Coefficients ``<xi, e_{l1,l2}>`` for l1 <= k, l2 <= l, as a k x l array."""
    xi = np.asarray(xi, dtype=float)
    ys = np.asarray(ys, dtype=float)
    zs = np.asarray(zs, dtype=float)
    if xi.shape != (ys.size, zs.size):
        raise ShapeMismatch(f"xi has shape {xi.shape}, grid is ({ys.size}, {zs.size})")
    wy = _trapezoid_weights(ys) * np.exp(coeffs.kappa * ys)
    wz = _trapezoid_weights(zs) * np.exp(coeffs.eta * zs)
    e1 = basis_1d(k, ys, coeffs.kappa) * wy
    e2 = basis_1d(l, zs, coeffs.eta) * wz
    return e1 @ xi @ e2.T

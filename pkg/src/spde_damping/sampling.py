"""Thinned observation designs and triple increments.

A design keeps the spatial margin ``b``, ``m1 = m2`` cells per axis on the
fine level and ``N`` time steps.  The coarse level doubles the spatial step
and quadruples the time step, so ``delta / sqrt(Delta)`` is the same on both
levels and the coarse grid is an exact sub-grid of the fine one.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidDesign, ShapeMismatch
from .simulate import FieldSample


@dataclass(frozen=True)
class Level:
    """One observation level: ``m1 x m1`` cells, ``N`` time steps."""

    b: float
    m1: int
    N: int

    @property
    def m(self) -> int:
        return self.m1 * self.m1

    @property
    def delta(self) -> float:
        return (1 - 2 * self.b) / self.m1

    @property
    def dt(self) -> float:
        return 1.0 / self.N

    @property
    def r(self) -> float:
        return self.delta / math.sqrt(self.dt)

    @property
    def coords(self) -> np.ndarray:
        # b + (1-2b) * (j/m1): identical floats for equal ratios j/m1, so
        # coarse points coincide bitwise with fine ones
        return self.b + (1 - 2 * self.b) * (np.arange(self.m1 + 1) / self.m1)

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.N + 1) / self.N


@dataclass(frozen=True)
class ThinnedDesign:
    b: float
    m1: int
    N: int
    fine: Level = field(init=False, repr=False)
    coarse: Level = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "fine", Level(self.b, self.m1, self.N))
        object.__setattr__(self, "coarse", Level(self.b, self.m1 // 2, self.N // 4))

    @property
    def m2(self) -> int:
        return self.m1

    @property
    def delta(self) -> float:
        return self.fine.delta

    @property
    def dt(self) -> float:
        return self.fine.dt

    @property
    def r(self) -> float:
        return self.fine.r

    @property
    def fine_coords(self) -> np.ndarray:
        return self.fine.coords

    @property
    def coarse_coords(self) -> np.ndarray:
        return self.coarse.coords


def build_design(b: float, m1: int, N: int) -> ThinnedDesign:
    if not 0 < b < 0.5:
        raise InvalidDesign(f"b must lie in (0, 1/2), got {b}")
    if int(m1) != m1 or m1 < 2 or m1 % 2:
        raise InvalidDesign(f"m1 must be an even integer >= 2, got {m1}")
    if int(N) != N or N < 4 or N % 4:
        raise InvalidDesign(f"N must be a positive multiple of 4, got {N}")
    m1, N = int(m1), int(N)
    m = m1 * m1
    if m / N > 100 or N / m > 100:
        warnings.warn(f"unbalanced design: m = {m}, N = {N}; the rate result assumes m and N are comparable")
    return ThinnedDesign(float(b), m1, N)


@dataclass
class IncrementCube:
    """``values[i-1, j-1, k-1] = T_{i,j,k} X`` for one design level."""

    values: np.ndarray

    @property
    def shape(self):
        return self.values.shape


def spatial_double_difference(sl: np.ndarray) -> np.ndarray:
    """``X(y_j, z_k) - X(y_{j-1}, z_k) - X(y_j, z_{k-1}) + X(y_{j-1}, z_{k-1})``
    over the last two axes."""
    return sl[..., 1:, 1:] - sl[..., :-1, 1:] - sl[..., 1:, :-1] + sl[..., :-1, :-1]


def triple_increment_array(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.ndim != 3 or min(values.shape) < 2:
        raise ShapeMismatch(f"need at least 2 points along each axis, got shape {values.shape}")
    d = spatial_double_difference(values)
    return d[1:] - d[:-1]


def triple_increments(fld: FieldSample) -> IncrementCube:
    return IncrementCube(triple_increment_array(fld.values))


def _check_level(fld: FieldSample, level: Level):
    expected = (level.N + 1, level.m1 + 1, level.m1 + 1)
    if fld.values.shape != expected:
        raise ShapeMismatch(f"field has shape {fld.values.shape}, design level expects {expected}")


def coarsen(fld: FieldSample, design: ThinnedDesign) -> FieldSample:
    """Restrict a fine-level field to the coarse level (rows ``t_{4i}``, columns
    ``y_{2j}``, ``z_{2k}``); no interpolation."""
    _check_level(fld, design.fine)
    return FieldSample(fld.times[::4], fld.ys[::2], fld.zs[::2], fld.values[::4, ::2, ::2])


def _nearest(source: np.ndarray, targets: np.ndarray, tol: float, what: str) -> np.ndarray:
    order = np.argsort(source)
    s = source[order]
    pos = np.clip(np.searchsorted(s, targets), 1, max(s.size - 1, 1))
    left = s[pos - 1]
    right = s[np.minimum(pos, s.size - 1)]
    pick = np.where(np.abs(targets - left) <= np.abs(right - targets), pos - 1, pos)
    pick = np.minimum(pick, s.size - 1)
    err = np.abs(s[pick] - targets)
    if np.any(err > tol):
        worst = int(np.argmax(err))
        raise ShapeMismatch(f"{what} {targets[worst]:.12g} not present in the field (nearest off by {err[worst]:.3g})")
    return order[pick]


def restrict_to_design(fld: FieldSample, design: ThinnedDesign, snap: bool = False, tol: float = 1e-9) -> FieldSample:
    """Extract the fine-level observations of ``design`` from a larger field.

    Without ``snap`` every design time and coordinate must be present in the
    field within ``tol``.  With ``snap`` each design coordinate is mapped to the
    nearest available grid point (for data recorded on a regular lattice).
    """
    level = design.fine
    ti = _nearest(fld.times, level.times, tol, "time")
    if snap:
        yi = _nearest(fld.ys, level.coords, np.inf, "y")
        zi = _nearest(fld.zs, level.coords, np.inf, "z")
    else:
        yi = _nearest(fld.ys, level.coords, tol, "y")
        zi = _nearest(fld.zs, level.coords, tol, "z")
    vals = fld.values[np.ix_(ti, yi, zi)]
    return FieldSample(level.times, fld.ys[yi], fld.zs[zi], vals)

"""Quadratic variations of triple increments and the log-ratio estimator.

With ``V`` the mean squared triple increment on the fine level and ``V'`` the
same on the coarse level (twice the spatial step, four times the time step),
``V' / V -> 4**alpha`` and the damping parameter is estimated by

    alpha_hat = log(V' / V) / log(4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateVariation, ShapeMismatch
from .sampling import IncrementCube, ThinnedDesign, _check_level, coarsen, spatial_double_difference, triple_increments
from .simulate import FieldSample
from .summation import ExactSum

LOG4 = math.log(4.0)


@dataclass(frozen=True)
class QuadraticVariationPair:
    v_fine: float
    v_coarse: float
    m: int
    N: int
    m_coarse: int
    N_coarse: int


@dataclass(frozen=True)
class AlphaEstimate:
    alpha_hat: float
    v_pair: QuadraticVariationPair
    in_range: bool

    def csv_row(self) -> str:
        return f"{self.alpha_hat!r},{self.v_pair.v_fine!r},{self.v_pair.v_coarse!r},{str(self.in_range).lower()}"


def _mean_square(values: np.ndarray) -> tuple[float, int]:
    acc = ExactSum()
    for sl in values:  # one time index at a time, same grouping as the streaming path
        acc.add(sl * sl)
    return acc.value / acc.count, acc.count


def quadratic_variations(fine: IncrementCube, coarse: IncrementCube) -> QuadraticVariationPair:
    fv = np.asarray(fine.values)
    cv = np.asarray(coarse.values)
    if fv.size == 0 or cv.size == 0:
        raise ShapeMismatch("increment cubes must be nonempty")
    v_f, _ = _mean_square(fv)
    v_c, _ = _mean_square(cv)
    return QuadraticVariationPair(
        v_f, v_c, fv.shape[1] * fv.shape[2], fv.shape[0], cv.shape[1] * cv.shape[2], cv.shape[0]
    )


def alpha_hat(pair: QuadraticVariationPair) -> AlphaEstimate:
    if not (pair.v_fine > 0 and pair.v_coarse > 0):
        raise DegenerateVariation(
            f"quadratic variations must be positive (fine={pair.v_fine}, coarse={pair.v_coarse}); "
            "is sigma zero or the field constant?"
        )
    a = math.log(pair.v_coarse / pair.v_fine) / LOG4
    return AlphaEstimate(a, pair, 0.0 < a < 2.0)


class _LevelAccumulator:
    def __init__(self, t_stride: int, s_stride: int):
        self.t_stride = t_stride
        self.s_stride = s_stride
        self.prev = None
        self.sum = ExactSum()
        self.steps = 0
        self.cells = 0

    def push(self, index: int, sl: np.ndarray):
        if index % self.t_stride:
            return
        d = spatial_double_difference(sl[:: self.s_stride, :: self.s_stride])
        if self.prev is not None:
            inc = d - self.prev
            self.sum.add(inc * inc)
            self.steps += 1
        self.cells = d.size
        self.prev = d

    @property
    def mean(self) -> float:
        return self.sum.value / self.sum.count


class StreamingEstimator:
    """Accumulates both quadratic variations from fine-level time slices.

    Feed ``X_{t_i}`` on the fine coordinates for i = 0..N in order; nothing
    beyond two spatial slices per level is retained.
    """

    def __init__(self, design: ThinnedDesign):
        self.design = design
        self._fine = _LevelAccumulator(1, 1)
        self._coarse = _LevelAccumulator(4, 2)
        self._next = 0

    def push(self, sl: np.ndarray) -> None:
        n = self.design.m1 + 1
        if sl.shape != (n, n):
            raise ShapeMismatch(f"slice has shape {sl.shape}, expected {(n, n)}")
        if self._next > self.design.N:
            raise ShapeMismatch("more than N + 1 slices pushed")
        self._fine.push(self._next, sl)
        self._coarse.push(self._next, sl)
        self._next += 1

    def pair(self) -> QuadraticVariationPair:
        if self._next != self.design.N + 1:
            raise ShapeMismatch(f"received {self._next} slices, expected {self.design.N + 1}")
        f, c = self._fine, self._coarse
        return QuadraticVariationPair(f.mean, c.mean, f.cells, f.steps, c.cells, c.steps)

    def estimate(self) -> AlphaEstimate:
        return alpha_hat(self.pair())


def estimate_from_field(fld: FieldSample, design: ThinnedDesign, streaming: bool = True) -> AlphaEstimate:
    """alpha_hat for a field observed on the fine level of ``design``."""
    _check_level(fld, design.fine)
    if streaming:
        est = StreamingEstimator(design)
        for sl in fld.values:
            est.push(sl)
        return est.estimate()
    fine = triple_increments(fld)
    coarse = triple_increments(coarsen(fld, design))
    return alpha_hat(quadratic_variations(fine, coarse))

"""Truncated spectral simulation of the SPDE.

The solution is approximated by ``sum_{l1<=K, l2<=L} x_{l1,l2}(t) e_{l1,l2}(y, z)``
where every coordinate is an independent Ornstein-Uhlenbeck process

    dx = -lambda_{l1,l2} x dt + sigma mu_{l1,l2}^{-alpha/2} dw.

Coordinates are advanced with the exact Gaussian transition, so the only
approximation error is the mode truncation.  Only the current mode state is
kept in memory; field values are produced one time slice at a time.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numba
import numpy as np

from .errors import CoordinateOutOfRange, InvalidParameters, ShapeMismatch
from .model import NoiseSpec, SpdeCoefficients, basis_1d, eigenvalue_grid, mode_weight_grid
from .streams import _TWO_M53, _TWO_PI, raw_words, stream_key

# Flat mode chunk used for threaded evolution; a multiple of the Philox block.
CHUNK = 1 << 16


@dataclass
class ModeState:
    coefficients: np.ndarray  # K x L, x_{l1,l2}(current_time)
    current_time: float = 0.0
    step: int = 0

    @classmethod
    def zeros(cls, k: int, l: int) -> "ModeState":
        return cls(np.zeros((k, l)))

    def copy(self) -> "ModeState":
        return ModeState(self.coefficients.copy(), self.current_time, self.step)


@dataclass
class FieldSample:
    """Field values ``values[i, j, k] = X_{times[i]}(ys[j], zs[k])``."""

    times: np.ndarray
    ys: np.ndarray
    zs: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.ys = np.asarray(self.ys, dtype=float)
        self.zs = np.asarray(self.zs, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        expected = (self.times.size, self.ys.size, self.zs.size)
        if self.values.shape != expected:
            raise ShapeMismatch(f"values have shape {self.values.shape}, coordinates imply {expected}")
        if self.times.size and (self.times[0] != 0 or np.any(np.diff(self.times) <= 0)):
            raise ShapeMismatch("times must start at 0 and be strictly increasing")

    def scaled(self, c: float) -> "FieldSample":
        return FieldSample(self.times, self.ys, self.zs, c * self.values)


def ou_variance_factor(lam: float, dt: float) -> float:
    """``(1 - exp(-2 lam dt)) / (2 lam)``, continuous at ``lam = 0``."""
    if lam == 0:
        return dt
    return -math.expm1(-2.0 * lam * dt) / (2.0 * lam)


def ou_step(x: float, lam: float, noise_scale: float, dt: float, gaussian: float) -> float:
    """Exact one-step transition of ``dx = -lam x dt + noise_scale dw``."""
    if not dt > 0:
        raise InvalidParameters(f"dt must be positive, got {dt}")
    decay = math.exp(-lam * dt)
    return decay * x + (noise_scale * math.sqrt(ou_variance_factor(lam, dt))) * gaussian


@numba.njit(cache=True)
def _transition_kernel(lam, scale, dt, decay, spread):
    for n in range(lam.size):
        lm = lam[n]
        decay[n] = math.exp(-lm * dt)
        if lm == 0.0:
            var = dt
        else:
            var = -math.expm1(-2.0 * lm * dt) / (2.0 * lm)
        spread[n] = scale[n] * math.sqrt(var)


@lru_cache(maxsize=8)
def _transition(coeffs: SpdeCoefficients, noise: NoiseSpec, dt: float):
    lam = eigenvalue_grid(coeffs, noise.trunc_k, noise.trunc_l).ravel()
    scale = coeffs.sigma * mode_weight_grid(noise).ravel()
    decay = np.empty_like(lam)
    spread = np.empty_like(lam)
    _transition_kernel(lam, scale, dt, decay, spread)
    decay.flags.writeable = False
    spread.flags.writeable = False
    return decay, spread


@numba.njit(cache=True, nogil=True)
def _ou_update(x, decay, spread, raw):
    # Fused Box-Muller + exact OU step; same arithmetic as streams._box_muller.
    n = x.size
    for p in range(n // 2):
        u1 = ((raw[2 * p] >> 11) + 1.0) * _TWO_M53
        u2 = (raw[2 * p + 1] >> 11) * _TWO_M53
        rad = math.sqrt(-2.0 * math.log(u1))
        th = _TWO_PI * u2
        i = 2 * p
        x[i] = decay[i] * x[i] + spread[i] * (rad * math.cos(th))
        x[i + 1] = decay[i + 1] * x[i + 1] + spread[i + 1] * (rad * math.sin(th))
    if n % 2:
        p = n // 2
        u1 = ((raw[2 * p] >> 11) + 1.0) * _TWO_M53
        u2 = (raw[2 * p + 1] >> 11) * _TWO_M53
        g = math.sqrt(-2.0 * math.log(u1)) * math.cos(_TWO_PI * u2)
        x[n - 1] = decay[n - 1] * x[n - 1] + spread[n - 1] * g


def evolve(
    state: ModeState,
    coeffs: SpdeCoefficients,
    noise: NoiseSpec,
    dt: float,
    seed: int,
    replication: int = 0,
    threads: int = 1,
) -> ModeState:
    """Advance every mode one exact OU step of size ``dt``.

    Randomness for mode ``(l1, l2)`` at this step comes from the counter-based
    stream keyed by ``(seed, replication, state.step, l1, l2)``; the result is
    independent of ``threads``.
    """
    if not dt > 0:
        raise InvalidParameters(f"dt must be positive, got {dt}")
    k, l = noise.trunc_k, noise.trunc_l
    if state.coefficients.shape != (k, l):
        raise ShapeMismatch(f"mode state {state.coefficients.shape} does not match truncation ({k}, {l})")
    decay, spread = _transition(coeffs, noise, float(dt))
    x = np.array(state.coefficients, dtype=float, copy=True, order="C").ravel()
    key = stream_key(seed, replication)
    n = x.size

    def run(start: int):
        stop = min(start + CHUNK, n)
        size = stop - start
        raw = raw_words(key, state.step, start, size + (size % 2))
        _ou_update(x[start:stop], decay[start:stop], spread[start:stop], raw)

    starts = range(0, n, CHUNK)
    if threads > 1 and n > CHUNK:
        with ThreadPoolExecutor(threads) as pool:
            list(pool.map(run, starts))
    else:
        for s in starts:
            run(s)
    return ModeState(x.reshape(k, l), state.current_time + dt, state.step + 1)


def _check_coords(coords) -> np.ndarray:
    c = np.asarray(coords, dtype=float)
    if c.ndim != 1 or np.any(c < 0) or np.any(c > 1):
        raise CoordinateOutOfRange("coordinates must be a 1-D vector inside [0, 1]")
    return c


class FieldEvaluator:
    """Evaluates ``E1^T x E2`` for precomputed eigenfunction matrices."""

    def __init__(self, coeffs: SpdeCoefficients, k: int, l: int, ys, zs):
        self.ys = _check_coords(ys)
        self.zs = _check_coords(zs)
        self.e1t = np.ascontiguousarray(basis_1d(k, self.ys, coeffs.kappa).T)
        self.e2 = np.ascontiguousarray(basis_1d(l, self.zs, coeffs.eta))

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return (self.e1t @ x) @ self.e2


def evaluate_field(states: Sequence[ModeState], coeffs: SpdeCoefficients, ys, zs) -> FieldSample:
    if not states:
        raise ShapeMismatch("need at least one mode state")
    k, l = states[0].coefficients.shape
    ev = FieldEvaluator(coeffs, k, l, ys, zs)
    values = np.stack([ev(s.coefficients) for s in states])
    return FieldSample(np.array([s.current_time for s in states]), ev.ys, ev.zs, values)


def snap_to_lattice(coords, m: int) -> np.ndarray:
    """Round coordinates to the nearest point of the lattice ``{j / m}``."""
    return np.round(np.asarray(coords, dtype=float) * m) / m


def iter_field_slices(
    coeffs: SpdeCoefficients,
    noise: NoiseSpec,
    n_steps: int,
    ys,
    zs,
    seed: int,
    replication: int = 0,
    initial: np.ndarray | None = None,
    threads: int = 1,
) -> Iterator[tuple[float, np.ndarray]]:
    """Yield ``(t_i, X_{t_i}(ys, zs))`` for ``t_i = i / n_steps``, i = 0..n_steps.

    Memory use is O(K L + |ys| |zs|): mode histories are never stored.
    """
    k, l = noise.trunc_k, noise.trunc_l
    ev = FieldEvaluator(coeffs, k, l, ys, zs)
    if initial is None:
        state = ModeState.zeros(k, l)
    else:
        initial = np.asarray(initial, dtype=float)
        if initial.shape != (k, l):
            raise ShapeMismatch(f"initial coefficients {initial.shape} do not match ({k}, {l})")
        state = ModeState(initial.copy())
    dt = 1.0 / n_steps
    yield 0.0, ev(state.coefficients)
    for i in range(1, n_steps + 1):
        state = evolve(state, coeffs, noise, dt, seed, replication, threads)
        yield i / n_steps, ev(state.coefficients)


def simulate_dataset(
    coeffs: SpdeCoefficients,
    noise: NoiseSpec,
    design,
    seed: int,
    replication: int = 0,
    snap_to: int | None = None,
    initial: np.ndarray | None = None,
    threads: int = 1,
) -> FieldSample:
    """Simulate one replication observed on the fine level of ``design``.

    With ``snap_to=M`` the thinned coordinates are rounded to the ``j / M``
    lattice before evaluation.
    """
    coords = design.fine_coords if snap_to is None else snap_to_lattice(design.fine_coords, snap_to)
    times = np.empty(design.N + 1)
    values = np.empty((design.N + 1, coords.size, coords.size))
    for i, (t, sl) in enumerate(
        iter_field_slices(coeffs, noise, design.N, coords, coords, seed, replication, initial, threads)
    ):
        times[i] = t
        values[i] = sl
    return FieldSample(times, coords, coords, values)

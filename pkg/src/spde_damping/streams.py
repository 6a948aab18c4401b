"""Counter-based Gaussian streams for the mode processes.

Normals are produced from Philox4x64 raw words by Box-Muller.  The Philox key
is ``(seed, replication)`` and the 256-bit counter is ``(block, step, 0, 0)``;
mode ``n`` (flattened row-major over ``(l1, l2)``) of time step ``step`` reads
raw words ``2*(n//2)`` and ``2*(n//2)+1``.  A draw is therefore a pure
function of ``(seed, replication, step, l1, l2)``: any partition of the modes
into chunks reproduces the same numbers, which is what makes threaded and
multi-process runs bit-identical to serial ones.
"""

from __future__ import annotations

import math

import numba
import numpy as np

_MASK64 = (1 << 64) - 1
_TWO_M53 = 2.0**-53
_TWO_PI = 2.0 * math.pi


def stream_key(seed: int, replication: int) -> np.ndarray:
    return np.array([seed & _MASK64, replication & _MASK64], dtype=np.uint64)


def raw_words(key: np.ndarray, step: int, start: int, count: int) -> np.ndarray:
    """Raw words ``[start, start + count)`` of time step ``step``.

    ``start`` must be a multiple of 4 (one Philox block).
    """
    if start % 4:
        raise ValueError("start must be aligned to a Philox block (multiple of 4)")
    counter = np.array([start // 4, step & _MASK64, 0, 0], dtype=np.uint64)
    return np.random.Philox(key=key, counter=counter).random_raw(count)


@numba.njit(cache=True)
def _box_muller(raw, out):
    n = out.size
    for p in range(n // 2):
        u1 = ((raw[2 * p] >> 11) + 1.0) * _TWO_M53  # (0, 1]
        u2 = (raw[2 * p + 1] >> 11) * _TWO_M53
        rad = math.sqrt(-2.0 * math.log(u1))
        th = _TWO_PI * u2
        out[2 * p] = rad * math.cos(th)
        out[2 * p + 1] = rad * math.sin(th)
    if n % 2:
        p = n // 2
        u1 = ((raw[2 * p] >> 11) + 1.0) * _TWO_M53
        u2 = (raw[2 * p + 1] >> 11) * _TWO_M53
        out[n - 1] = math.sqrt(-2.0 * math.log(u1)) * math.cos(_TWO_PI * u2)


def gaussians(seed: int, replication: int, step: int, start: int, count: int) -> np.ndarray:
    """Standard normals for flat mode indices ``[start, start + count)``."""
    if start % 4:
        raise ValueError("start must be a multiple of 4")
    raw = raw_words(stream_key(seed, replication), step, start, count + (count % 2))
    out = np.empty(count)
    _box_muller(raw, out)
    return out


def gaussian_reference(seed: int, replication: int, step: int, mode: int) -> float:
    """Scalar normal for one flat mode index; slow, used by tests."""
    pair = mode - mode % 2
    block = pair - pair % 4
    raw = raw_words(stream_key(seed, replication), step, block, 4)
    w1, w2 = int(raw[pair - block]), int(raw[pair - block + 1])
    u1 = ((w1 >> 11) + 1.0) * _TWO_M53
    u2 = (w2 >> 11) * _TWO_M53
    rad = math.sqrt(-2.0 * math.log(u1))
    return rad * (math.cos(_TWO_PI * u2) if mode % 2 == 0 else math.sin(_TWO_PI * u2))

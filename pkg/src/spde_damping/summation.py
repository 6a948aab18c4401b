"""Order-independent accumulation of long floating-point sums.

``ExactSum`` keeps the running total as a short list of non-overlapping
partials (their exact sum equals the exact sum of everything added so far).
Each ``add`` is a handful of ``math.fsum`` passes, which are correctly
rounded, so the final value is the correctly rounded exact sum and does not
depend on the order or grouping in which terms arrive.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np


def _exact_partials(values: Iterable[float]) -> list[float]:
    terms = list(values)
    out = []
    while True:
        s = math.fsum(terms)
        if s == 0.0 or not math.isfinite(s):
            return out + ([s] if not math.isfinite(s) else [])
        out.append(s)
        terms.append(-s)


class ExactSum:
    __slots__ = ("_partials", "count")

    def __init__(self):
        self._partials: list[float] = []
        self.count = 0

    def add(self, values) -> None:
        arr = np.asarray(values, dtype=float).ravel()
        self.count += arr.size
        self._partials = _exact_partials(self._partials + arr.tolist())

    def merge(self, other: "ExactSum") -> None:
        self.count += other.count
        self._partials = _exact_partials(self._partials + other._partials)

    @property
    def value(self) -> float:
        return math.fsum(self._partials)

"""Orthonormal sine basis of L^2(0, T).

e_j(t) = sqrt(2/T) sin(j pi t / T),  1 <= j <= count.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class BasisRangeError(ValueError):
    pass


@dataclass(frozen=True)
class SineBasis:
    T: float
    count: int

    def __post_init__(self):
        if self.T <= 0:
            raise ValueError("T must be positive")
        if self.count < 1:
            raise ValueError("count must be >= 1")

    def _check(self, j: int, t) -> None:
        if not 1 <= j <= self.count:
            raise BasisRangeError(f"basis index {j} outside 1..{self.count}")
        tarr = np.asarray(t)
        if np.any(tarr < 0) or np.any(tarr > self.T):
            raise BasisRangeError(f"time {t} outside [0, {self.T}]")

    def eval(self, j: int, t):
        """e_j(t); t may be scalar or array."""
        self._check(j, t)
        return np.sqrt(2.0 / self.T) * np.sin(j * np.pi * np.asarray(t, dtype=float) / self.T)

    def eval_many(self, js: np.ndarray, t: float) -> np.ndarray:
        """e_j(t) for an array of indices at one time; no range checks (hot path)."""
        return np.sqrt(2.0 / self.T) * np.sin(js * (np.pi * t / self.T))

    def integral(self, j: int, t):
        """Closed-form antiderivative int_0^t e_j(s) ds."""
        self._check(j, t)
        w = j * np.pi / self.T
        return np.sqrt(2.0 / self.T) * (1.0 - np.cos(w * np.asarray(t, dtype=float))) / w

    def inner_product(self, i: int, j: int) -> float:
        """int_0^T e_i e_j dt by composite Gauss-Legendre quadrature.

        Panel count scales with the combined frequency so the rule stays
        below 1e-10 error for trigonometric integrands up to j = count.
        """
        self._check(i, 0.0)
        self._check(j, 0.0)
        panels = max(4, i + j)
        nodes, weights = np.polynomial.legendre.leggauss(12)
        h = self.T / panels
        total = 0.0
        for panel in range(panels):
            a = panel * h
            x = a + 0.5 * h * (nodes + 1.0)
            total += 0.5 * h * np.sum(weights * self.eval(i, x) * self.eval(j, x))
        return float(total)

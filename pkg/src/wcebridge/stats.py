"""Two-sample Kolmogorov-Smirnov test, QQ quantiles, and marginal extraction.

The KS statistic is the exact sup-distance between the two empirical CDFs
(right-continuous; computed by a merged sweep that only reads the running
difference where the pooled value changes, so ties are handled exactly).
The p-value uses the asymptotic Kolmogorov distribution with the standard
effective-size correction

    lambda = (sqrt(ne) + 0.12 + 0.11/sqrt(ne)) * d,   ne = n m / (n + m),
    Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2),

the series truncated once terms drop below 1e-12.  An exact small-sample
p-value (lattice-path counting) is available for n, m < 50.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .propagator import TimeGrid


@dataclass
class SampleSet:
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.size == 0:
            raise ValueError("sample set must be nonempty")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("sample set must be finite")


@dataclass
class KsResult:
    d: float
    p_value: float
    n: int
    m: int


def kolmogorov_sf(lam: float) -> float:
    """Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2), clipped to [0, 1]."""
    if lam < 0.06:
        # all mass: the series needs thousands of terms but Q -> 1
        return 1.0
    total = 0.0
    sign = 1.0
    for k in range(1, 100001):
        term = math.exp(-2.0 * k * k * lam * lam)
        total += sign * term
        if term < 1e-12:
            break
        sign = -sign
    return min(1.0, max(0.0, 2.0 * total))


def ks_statistic(x: np.ndarray, y: np.ndarray) -> float:
    """sup_x |F_x - F_y| over the pooled sample, exact under ties.

    The sweep accumulates integer counts (m per x-point, -n per y-point), so
    the statistic is the exactly-rounded rational max|count| / (n m).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n, m = x.size, y.size
    pooled = np.concatenate([x, y])
    steps = np.concatenate([np.full(n, m, dtype=np.int64), np.full(m, -n, dtype=np.int64)])
    order = np.argsort(pooled, kind="mergesort")
    pooled = pooled[order]
    diff = np.cumsum(steps[order])
    # the ECDF difference is only observable after the last copy of a tied value
    distinct = np.append(pooled[1:] != pooled[:-1], True)
    return float(int(np.max(np.abs(diff[distinct]))) / (n * m))


def _ks_exact_pvalue(d: float, n: int, m: int) -> float:
    """P(D >= d) under the null by counting monotone lattice paths that stay
    strictly inside |i/n - j/m| < d; exact for continuous data, n*m modest."""
    inside = np.zeros((n + 1, m + 1))
    inside[0, 0] = 1.0
    # normalize progressively to dodge overflow; track the log of the factor
    for i in range(n + 1):
        for j in range(m + 1):
            if i == 0 and j == 0:
                continue
            if abs(i / n - j / m) >= d - 1e-12:
                inside[i, j] = 0.0
                continue
            acc = 0.0
            if i > 0:
                acc += inside[i - 1, j]
            if j > 0:
                acc += inside[i, j - 1]
            inside[i, j] = acc
    total = math.comb(n + m, n)
    return float(min(1.0, max(0.0, 1.0 - inside[n, m] / total)))


def ks_two_sample(a: SampleSet, b: SampleSet, method: str = "asymptotic") -> KsResult:
    """Two-sample KS test.

    method="asymptotic" (default) or "exact" (lattice-path counting,
    restricted to samples below 50 points each).
    """
    n, m = a.values.size, b.values.size
    d = ks_statistic(a.values, b.values)
    if method == "exact":
        if max(n, m) >= 50:
            raise ValueError("exact p-value supported for n, m < 50 only")
        p = _ks_exact_pvalue(d, n, m)
    elif method == "asymptotic":
        ne = math.sqrt(n * m / (n + m))
        p = kolmogorov_sf((ne + 0.12 + 0.11 / ne) * d)
    else:
        raise ValueError(f"unknown method {method!r}")
    return KsResult(d=d, p_value=p, n=n, m=m)


def qq_pairs(a: SampleSet, b: SampleSet, k: int = 100) -> np.ndarray:
    """Matched empirical quantiles at levels (i - 0.5)/k, i = 1..k, with
    linear interpolation between order statistics.  Shape (k, 2)."""
    if k < 2:
        raise ValueError("need at least 2 quantile levels")
    levels = (np.arange(1, k + 1) - 0.5) / k
    qa = np.quantile(a.values, levels)
    qb = np.quantile(b.values, levels)
    return np.column_stack([qa, qb])


def marginal_at(paths: np.ndarray, grid: TimeGrid, t: float, label: str = "") -> SampleSet:
    """Linear interpolation of every path at time t; exact node values when
    t hits the grid."""
    if not 0.0 <= t <= grid.T:
        raise ValueError(f"time {t} outside [0, {grid.T}]")
    paths = np.atleast_2d(paths)
    pos = t / grid.dt
    j = min(int(pos), grid.N - 1)
    w = pos - j
    if w == 0.0:
        values = paths[:, j]
    else:
        values = (1.0 - w) * paths[:, j] + w * paths[:, j + 1]
    return SampleSet(values=values.copy(), label=label)

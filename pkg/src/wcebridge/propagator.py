"""Deterministic integration of the coefficient ODE system.

The coefficients X_m(t) of the chaos expansion solve the triangular system

    dX_m/dt = f_m(X) + sum_j sqrt(m_j) e_j(t) sigma_{m^-(j)}(X),
    X_m(0)  = x0 on the zero index, 0 otherwise,

where rows of order n are forced only by rows of order n-1.  The system is
integrated jointly (it is block-triangular, so stage values of the lower
orders feed the higher ones consistently).

Solvers:
  rk4       classical fixed-step Runge-Kutta on the output grid (default;
            deterministic across platforms)
  rk45      adaptive Dormand-Prince 5(4) stepping through the output nodes,
            for stiff parameter regimes
  exact-ou  closed forms, OU only: x0 e^{-at} for the zero row,
            sigma e^{-at} int_0^t e^{as} e_k(s) ds for singletons, zero above
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import SineBasis
from .indices import IndexSet
from .models import OrnsteinUhlenbeck, SdeModel


class DivergenceError(RuntimeError):
    """Integration produced a non-finite coefficient."""

    def __init__(self, index_label: str, time: float):
        super().__init__(f"non-finite coefficient for index {index_label} near t={time:.6g}")
        self.index_label = index_label
        self.time = time


@dataclass(frozen=True)
class TimeGrid:
    T: float
    N: int

    def __post_init__(self):
        if self.T <= 0:
            raise ValueError("T must be positive")
        if self.N < 2:
            raise ValueError("need at least 2 steps")

    @property
    def nodes(self) -> np.ndarray:
        cache = self.__dict__.get("_nodes")
        if cache is None:
            cache = np.linspace(0.0, self.T, self.N + 1)
            object.__setattr__(self, "_nodes", cache)
        return cache

    @property
    def dt(self) -> float:
        return self.T / self.N


@dataclass
class PropagatorSolution:
    grid: TimeGrid
    index_set: IndexSet
    values: np.ndarray  # shape (len(index_set), N+1)
    model: SdeModel
    basis: SineBasis

    def row(self, position: int) -> np.ndarray:
        return self.values[position]

    def at_time(self, t: float) -> np.ndarray:
        """Linear interpolation of every coefficient at one off-grid time."""
        nodes = self.grid.nodes
        if not nodes[0] <= t <= nodes[-1]:
            raise ValueError(f"time {t} outside the grid")
        j = min(int(t / self.grid.dt), self.grid.N - 1)
        w = (t - nodes[j]) / self.grid.dt
        return (1.0 - w) * self.values[:, j] + w * self.values[:, j + 1]

    def truncated_variance(self, node: int) -> float:
        """Variance of the truncated expansion at a grid node:
        sum over nonzero indices of X_m(t_node)^2 (the xi_m are orthonormal)."""
        orders = np.asarray(self.index_set.orders)
        return float(np.sum(self.values[orders >= 1, node] ** 2))


@dataclass(frozen=True)
class _ForcingGraph:
    """Sparse coupling of the diffusion terms: row dst accumulates
    weight * e_j(t) * sigma-closure(row src)."""

    dst: np.ndarray
    src: np.ndarray
    j: np.ndarray  # basis indices as float, for vectorized sine evaluation
    weight: np.ndarray


def _build_forcing(index_set: IndexSet) -> _ForcingGraph:
    dst, src, jj, w = [], [], [], []
    for r, m in enumerate(index_set):
        for k, mk in m.entries:
            lower = m.decrement(k)
            try:
                s = index_set.position(lower)
            except KeyError:
                raise ValueError(
                    f"index set is not closed under decrement: {m} needs {lower}"
                ) from None
            dst.append(r)
            src.append(s)
            jj.append(float(k))
            w.append(math.sqrt(mk))
    return _ForcingGraph(
        np.asarray(dst, dtype=np.intp),
        np.asarray(src, dtype=np.intp),
        np.asarray(jj, dtype=float),
        np.asarray(w, dtype=float),
    )


def _rhs(t, values, model, zero_mask, basis, forcing):
    deriv = model.drift(values, zero_mask)
    if forcing.dst.size:
        sig = model.diffusion(values, zero_mask)
        contrib = forcing.weight * basis.eval_many(forcing.j, t) * sig[forcing.src]
        np.add.at(deriv, forcing.dst, contrib)
    return deriv


def _initial_state(model, index_set) -> tuple[np.ndarray, np.ndarray]:
    zero_mask = np.zeros(len(index_set))
    zero_mask[0] = 1.0
    v0 = model.x0 * zero_mask
    return v0, zero_mask


def _check_finite(values, index_set, t):
    finite = np.isfinite(values)
    if not finite.all():
        raise DivergenceError(str(index_set[int(np.argmax(~finite))]), t)


@np.errstate(over="ignore", invalid="ignore")  # divergence is caught explicitly
def _solve_rk4(model, index_set, basis, grid) -> np.ndarray:
    forcing = _build_forcing(index_set)
    v, zero_mask = _initial_state(model, index_set)
    nodes = grid.nodes
    h = grid.dt
    out = np.empty((len(index_set), grid.N + 1))
    out[:, 0] = v
    for i in range(grid.N):
        t = nodes[i]
        k1 = _rhs(t, v, model, zero_mask, basis, forcing)
        k2 = _rhs(t + 0.5 * h, v + 0.5 * h * k1, model, zero_mask, basis, forcing)
        k3 = _rhs(t + 0.5 * h, v + 0.5 * h * k2, model, zero_mask, basis, forcing)
        k4 = _rhs(t + h, v + h * k3, model, zero_mask, basis, forcing)
        v = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[:, i + 1] = v
        _check_finite(v, index_set, t + h)
    return out


# Dormand-Prince 5(4) tableau
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)


def _solve_rk45(model, index_set, basis, grid, rtol=1e-8, atol=1e-10) -> np.ndarray:
    """Adaptive 5(4) pair; steps are clamped to land on every output node,
    so the result needs no dense-output interpolation."""
    forcing = _build_forcing(index_set)
    v, zero_mask = _initial_state(model, index_set)
    nodes = grid.nodes
    out = np.empty((len(index_set), grid.N + 1))
    out[:, 0] = v
    h = grid.dt
    t = 0.0
    for target_idx in range(1, grid.N + 1):
        target = nodes[target_idx]
        while t < target - 1e-14 * grid.T:
            h = min(h, target - t)
            ks = []
            for s in range(7):
                vs = v.copy()
                for a_coef, k_prev in zip(_DP_A[s], ks):
                    vs += h * a_coef * k_prev
                ks.append(_rhs(t + _DP_C[s] * h, vs, model, zero_mask, basis, forcing))
            v5 = v + h * sum(b * k for b, k in zip(_DP_B5, ks))
            v4 = v + h * sum(b * k for b, k in zip(_DP_B4, ks))
            scale = atol + rtol * np.maximum(np.abs(v), np.abs(v5))
            err = np.sqrt(np.mean(((v5 - v4) / scale) ** 2))
            if err <= 1.0:
                t += h
                v = v5
                if not np.all(np.isfinite(v)):
                    _check_finite(v, index_set, t)
            factor = 0.9 * (1.0 / err) ** 0.2 if err > 0 else 5.0
            h = h * min(5.0, max(0.2, factor))
        out[:, target_idx] = v
        t = target
    return out


def _solve_exact_ou(model: OrnsteinUhlenbeck, index_set, basis, grid) -> np.ndarray:
    a, sigma, x0 = model.a, model.sigma, model.x0
    t = grid.nodes
    out = np.zeros((len(index_set), grid.N + 1))
    out[0] = x0 * np.exp(-a * t)
    damp = sigma * np.exp(-a * t) * np.sqrt(2.0 / basis.T)
    for r, m in enumerate(index_set):
        if m.order != 1:
            continue
        k = m.entries[0][0]
        b = k * np.pi / basis.T
        integral = (np.exp(a * t) * (a * np.sin(b * t) - b * np.cos(b * t)) + b) / (a * a + b * b)
        out[r] = damp * integral
    return out


def solve_propagator(
    model: SdeModel,
    index_set: IndexSet,
    basis: SineBasis,
    grid: TimeGrid,
    method: str = "rk4",
    rtol: float = 1e-8,
    atol: float = 1e-10,
) -> PropagatorSolution:
    """Integrate the coefficient system on the grid.

    Deterministic for fixed inputs; raises DivergenceError (naming the
    offending index and time) if any coefficient leaves the finite range.
    """
    if index_set.L > basis.count:
        raise ValueError(f"index set needs {index_set.L} basis functions, basis has {basis.count}")
    if method == "rk4":
        values = _solve_rk4(model, index_set, basis, grid)
    elif method == "rk45":
        values = _solve_rk45(model, index_set, basis, grid, rtol=rtol, atol=atol)
    elif method == "exact-ou":
        if not isinstance(model, OrnsteinUhlenbeck):
            raise ValueError("exact-ou solver applies to the OU model only")
        values = _solve_exact_ou(model, index_set, basis, grid)
    else:
        raise ValueError(f"unknown solver {method!r}")
    return PropagatorSolution(grid=grid, index_set=index_set, values=values, model=model, basis=basis)


def wce_error_bound(
    p: int, L: int, T: float, x0: float, c1: float, c2: float, kappa: float
) -> float:
    """Mean-square truncation error bound at the terminal time, as a
    user-parameterized formula (the constants are problem-dependent and not
    prescribed numerically):

        c1 (1+x0^2) e^{(c1+kappa^2) T} (kappa^2 T)^{p+1} / (p+1)!
      + c2 (1+x0^2) (T^4 / L) e^{c2 T}
    """
    if min(c1, c2, kappa) <= 0:
        raise ValueError("constants must be positive")
    head = c1 * (1 + x0**2) * math.exp((c1 + kappa**2) * T)
    head *= (kappa**2 * T) ** (p + 1) / math.factorial(p + 1)
    tail = c2 * (1 + x0**2) * (T**4 / L) * math.exp(c2 * T)
    return head + tail

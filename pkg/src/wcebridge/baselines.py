"""Reference bridge samplers used to validate the chaos method.

Three constructions, all pinning both endpoints exactly:

  exact OU        exact Gaussian conditioning of an exactly-simulated OU
                  path: Z(t) = Y(t) + (theta - Y(T)) sinh(a t)/sinh(a T)
  Doob h          Euler-Maruyama with the score-corrected drift
                  b(z) = f(z) + sigma(z)^2 d/dz log p(t, z; T, theta);
                  integration stops one step short of T and the final node
                  is pinned (the correction is singular at t = T)
  Bladt-Sorensen  a forward path from eta and an independent time-reversed
                  path from theta, concatenated at their first crossing;
                  attempts without a crossing are rejected and retried

Per-path randomness follows the same counter-based contract as the chaos
sampler: path i of a batch consumes only the (seed, first_path + i) stream,
so results are independent of batch size and scheduling.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bridge import BridgeSpec
from .chaos import path_generator
from .models import GeometricBrownianMotion, OrnsteinUhlenbeck, SdeModel
from .propagator import TimeGrid

BASELINE_NAMES = ("exact-ou", "doob-h", "bladt-sorensen")


class RejectionExhaustedError(RuntimeError):
    """No crossing found within the attempt budget."""

    def __init__(self, attempts: int):
        super().__init__(
            f"forward and reversed paths did not meet in {attempts} attempts; "
            "the no-meet probability grows with T and |theta - eta|"
        )
        self.attempts = attempts


def baseline_supports(baseline: str, model_name: str) -> bool:
    if baseline == "exact-ou":
        return model_name == "ou"
    if baseline == "doob-h":
        return model_name in ("ou", "gbm")
    if baseline == "bladt-sorensen":
        return model_name == "ou"
    raise ValueError(f"unknown baseline {baseline!r}; expected one of {BASELINE_NAMES}")


def exact_ou_bridge_moments(a: float, sigma: float, spec: BridgeSpec, t: float) -> tuple[float, float]:
    """Mean and variance of the OU bridge marginal at time t (Gaussian
    conditioning of the OU covariance kernel)."""
    T = spec.T
    ratio = np.sinh(a * t) / np.sinh(a * T)
    mean = spec.eta * np.exp(-a * t) + (spec.theta - spec.eta * np.exp(-a * T)) * ratio
    var = sigma**2 * np.sinh(a * t) * np.sinh(a * (T - t)) / (a * np.sinh(a * T))
    return float(mean), float(var)


def _ou_exact_path(gen: np.random.Generator, x_start: float, a: float, sigma: float, grid: TimeGrid) -> np.ndarray:
    """One exactly-sampled unconditioned OU path on the grid."""
    dt = grid.dt
    ed = np.exp(-a * dt)
    sd = np.sqrt(sigma**2 * (1.0 - np.exp(-2.0 * a * dt)) / (2.0 * a))
    w = gen.standard_normal(grid.N) * sd
    # Y_i = e^{-a t_i} (Y_0 + sum_{j<=i} e^{a t_j} W_j): cumulative form of
    # the per-step recursion, bounded factors for moderate a T
    grow = np.exp(a * grid.nodes[1:])
    path = np.empty(grid.N + 1)
    path[0] = x_start
    path[1:] = (x_start + np.cumsum(grow * w)) / grow
    return path


def _path_noise(seed: int, n_paths: int, first_path: int, count: int) -> np.ndarray:
    """(n_paths, count) standard normals; row i from the (seed, first_path+i)
    stream, so batches of any size agree path-by-path."""
    out = np.empty((n_paths, count))
    for i in range(n_paths):
        out[i] = path_generator(seed, first_path + i).standard_normal(count)
    return out


def exact_ou_bridge_batch(
    a: float,
    sigma: float,
    spec: BridgeSpec,
    grid: TimeGrid,
    seed: int,
    n_paths: int,
    first_path: int = 0,
) -> np.ndarray:
    """Exact OU bridges from (0, eta) to (T, theta), shape (n_paths, N+1)."""
    if a <= 0:
        raise ValueError("exact OU bridge requires a > 0")
    t = grid.nodes
    sd = np.sqrt(sigma**2 * (1.0 - np.exp(-2.0 * a * grid.dt)) / (2.0 * a))
    w = _path_noise(seed, n_paths, first_path, grid.N) * sd
    grow = np.exp(a * t[1:])
    y = np.empty((n_paths, grid.N + 1))
    y[:, 0] = spec.eta
    y[:, 1:] = (spec.eta + np.cumsum(grow * w, axis=1)) / grow
    ratio = np.sinh(a * t) / np.sinh(a * grid.T)
    out = y + (spec.theta - y[:, -1])[:, None] * ratio
    out[:, 0] = spec.eta
    out[:, -1] = spec.theta
    return out


def _doob_drift_ou(model: OrnsteinUhlenbeck, spec: BridgeSpec, z: np.ndarray, tau: float) -> np.ndarray:
    decay = np.exp(-model.a * tau)
    var = model.sigma**2 * (1.0 - np.exp(-2.0 * model.a * tau)) / (2.0 * model.a)
    score = (spec.theta - z * decay) * decay / var
    return -model.a * z + model.sigma**2 * score


def _doob_drift_gbm(model: GeometricBrownianMotion, spec: BridgeSpec, z: np.ndarray, tau: float) -> np.ndarray:
    # lognormal transition: d/dz log p = (log(theta/z) - (a - sigma^2/2) tau) / (sigma^2 tau z)
    pull = (np.log(spec.theta / z) - (model.a - 0.5 * model.sigma**2) * tau) / tau
    return model.a * z + z * pull


@dataclass
class DoobResult:
    paths: np.ndarray
    reflected_steps: int  # GBM nonpositive-state guard events


def doob_h_bridge_batch(
    model: SdeModel,
    spec: BridgeSpec,
    grid: TimeGrid,
    seed: int,
    n_paths: int,
    first_path: int = 0,
    eps: float = 1e-12,
) -> DoobResult:
    """Euler-Maruyama bridges under the score-corrected drift.

    Supports the two models with a closed transition density (OU: Gaussian,
    GBM: lognormal).  The last Euler step is skipped and the final node set
    to theta exactly.
    """
    if model.name not in ("ou", "gbm"):
        raise ValueError(f"Doob h-transform baseline needs a known transition density; got {model.name!r}")
    dt = grid.dt
    t = grid.nodes
    noise = _path_noise(seed, n_paths, first_path, grid.N - 1) * np.sqrt(dt)
    out = np.empty((n_paths, grid.N + 1))
    out[:, 0] = spec.eta
    z = np.full(n_paths, spec.eta)
    reflected = 0
    for step in range(grid.N - 1):
        tau = grid.T - t[step]
        if model.name == "ou":
            drift = _doob_drift_ou(model, spec, z, tau)
            z = z + drift * dt + model.sigma * noise[:, step]
        else:
            drift = _doob_drift_gbm(model, spec, z, tau)
            z = z + drift * dt + model.sigma * z * noise[:, step]
            bad = z <= 0.0
            if bad.any():
                reflected += int(bad.sum())
                z = np.where(bad, eps, z)
        out[:, step + 1] = z
    out[:, -1] = spec.theta
    return DoobResult(paths=out, reflected_steps=reflected)


@dataclass
class BladtSorensenResult:
    paths: np.ndarray
    attempts: np.ndarray  # attempts consumed per delivered path


def _bs_forward_pair(gen, spec: BridgeSpec, a: float, sigma: float, grid: TimeGrid, transitions: str):
    if transitions == "exact":
        x1 = _ou_exact_path(gen, spec.eta, a, sigma, grid)
        x2 = _ou_exact_path(gen, spec.theta, a, sigma, grid)
    else:
        dt = grid.dt
        sd = sigma * np.sqrt(dt)
        w = gen.standard_normal(2 * grid.N) * sd
        x1 = np.empty(grid.N + 1)
        x2 = np.empty(grid.N + 1)
        x1[0], x2[0] = spec.eta, spec.theta
        for i in range(grid.N):
            x1[i + 1] = x1[i] - a * x1[i] * dt + w[i]
            x2[i + 1] = x2[i] - a * x2[i] * dt + w[grid.N + i]
    return x1, x2


def _first_crossing(diff: np.ndarray) -> int:
    """Index i of the first grid segment [t_i, t_{i+1}] where the sign of
    diff changes (a node exactly at zero counts); -1 if none."""
    prod = diff[:-1] * diff[1:]
    hits = np.flatnonzero((prod < 0) | (diff[:-1] == 0.0))
    if hits.size:
        return int(hits[0])
    if diff[-1] == 0.0:
        return int(diff.size - 2)
    return -1


def bladt_sorensen_bridge_batch(
    model: OrnsteinUhlenbeck,
    spec: BridgeSpec,
    grid: TimeGrid,
    seed: int,
    n_paths: int,
    first_path: int = 0,
    max_attempts: int = 100,
    transitions: str = "exact",
) -> BladtSorensenResult:
    """Coupling-and-time-reversal bridges for the OU model.

    Each delivered path concatenates a forward path from eta (up to the
    first crossing) with the time-reversal of an independent path from
    theta.  Retries with fresh noise up to max_attempts, then raises
    RejectionExhaustedError.
    """
    if model.name != "ou":
        raise ValueError("the coupling construction requires an ergodic model; only OU ships")
    if transitions not in ("exact", "euler"):
        raise ValueError(f"unknown transition scheme {transitions!r}")
    t = grid.nodes
    out = np.empty((n_paths, grid.N + 1))
    attempts = np.zeros(n_paths, dtype=int)
    for i in range(n_paths):
        gen = path_generator(seed, first_path + i)
        for attempt in range(1, max_attempts + 1):
            x1, x2 = _bs_forward_pair(gen, spec, model.a, model.sigma, grid, transitions)
            xr = x2[::-1]
            seg = _first_crossing(x1 - xr)
            if seg >= 0:
                d0, d1 = x1[seg] - xr[seg], x1[seg + 1] - xr[seg + 1]
                tau = t[seg] if d0 == d1 else t[seg] + grid.dt * d0 / (d0 - d1)
                path = np.where(t <= tau, x1, xr)
                path[0] = spec.eta
                path[-1] = spec.theta
                out[i] = path
                attempts[i] = attempt
                break
        else:
            raise RejectionExhaustedError(max_attempts)
    return BladtSorensenResult(paths=out, attempts=attempts)


def bladt_sorensen_acceptance_rate(
    model: OrnsteinUhlenbeck,
    spec: BridgeSpec,
    grid: TimeGrid,
    seed: int,
    n_attempts: int,
) -> float:
    """Fraction of independent attempt pairs whose paths cross, measured
    over n_attempts vectorized attempts (one attempt per path stream)."""
    a, sigma = model.a, model.sigma
    dt = grid.dt
    ed = np.exp(-a * dt)
    sd = np.sqrt(sigma**2 * (1.0 - np.exp(-2.0 * a * dt)) / (2.0 * a))
    gen = path_generator(seed, 0)
    grow = np.exp(a * grid.nodes[1:])
    crossed = 0
    block = 2000
    done = 0
    while done < n_attempts:
        nb = min(block, n_attempts - done)
        w1 = gen.standard_normal((nb, grid.N)) * sd
        w2 = gen.standard_normal((nb, grid.N)) * sd
        x1 = np.concatenate(
            [np.full((nb, 1), spec.eta), (spec.eta + np.cumsum(grow * w1, axis=1)) / grow], axis=1
        )
        x2 = np.concatenate(
            [np.full((nb, 1), spec.theta), (spec.theta + np.cumsum(grow * w2, axis=1)) / grow], axis=1
        )
        diff = x1 - x2[:, ::-1]
        prod = diff[:, :-1] * diff[:, 1:]
        crossed += int(np.sum((prod <= 0.0).any(axis=1)))
        done += nb
    return crossed / n_attempts

"""Hermite chaos variables and reproducible Gaussian draws.

Convention: ``hermite`` evaluates the ORTHONORMAL Hermite family, i.e.
E[H_i(Z) H_j(Z)] = delta_ij for Z ~ N(0,1).  The chaos variable of a
multi-index m is then

    xi_m = prod_k H_{m_k}(chi_k),

which makes {xi_m} an orthonormal family.  (The probabilists' polynomials
He_n relate by H_n = He_n / sqrt(n!); the sqrt(m!) prefactor seen in the
unnormalized convention is exactly that rescaling.)

Randomness is counter-based: each (seed, path) pair keys an independent
Philox stream, so paths can be generated in any order, on any number of
workers, with identical results.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .indices import IndexSet, MultiIndex

MAX_HERMITE_DEGREE = 64

# splitmix64 constants, used to derive independent seed lanes
_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


def hermite(n: int, x):
    """Orthonormal Hermite polynomial H_n(x) by the stable recurrence

        H_{n+1}(x) = (x H_n(x) - sqrt(n) H_{n-1}(x)) / sqrt(n+1).

    Accepts scalars or arrays; degrees up to 64 stay well-conditioned.
    """
    if not 0 <= n <= MAX_HERMITE_DEGREE:
        raise ValueError(f"degree {n} outside 0..{MAX_HERMITE_DEGREE}")
    x = np.asarray(x, dtype=float)
    h_prev = np.ones_like(x)
    if n == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h = x.copy()
    for k in range(1, n):
        h, h_prev = (x * h - np.sqrt(k) * h_prev) / np.sqrt(k + 1.0), h
    return h if h.ndim else float(h)


def lane_seed(seed: int, lane: int) -> int:
    """Derive a 64-bit sub-seed for an independent sampling lane.

    splitmix64 finalizer over seed xor lane; lane 0 maps to the seed's own
    stream family, other lanes (baseline samplers, repetition counters) get
    decorrelated families.
    """
    z = (int(seed) ^ (int(lane) * _SPLITMIX_GAMMA)) & _MASK64
    z = (z + _SPLITMIX_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def path_generator(seed: int, path: int) -> np.random.Generator:
    """Philox generator keyed by (seed, path); identical inputs give
    identical streams on every platform."""
    key = np.array([int(seed) & _MASK64, int(path) & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_chi(seed: int, path: int, L: int) -> np.ndarray:
    """The L iid standard normals chi_1..chi_L for one path."""
    return path_generator(seed, path).standard_normal(L)


def sample_chi_batch(seed: int, n_paths: int, L: int, first_path: int = 0) -> np.ndarray:
    """(n_paths, L) matrix of draws; row i is sample_chi(seed, first_path + i, L)."""
    out = np.empty((n_paths, L))
    for i in range(n_paths):
        out[i] = sample_chi(seed, first_path + i, L)
    return out


@dataclass
class ChaosDraw:
    """One realization of the Gaussian vector and the induced xi values."""

    chi: np.ndarray
    xi: np.ndarray  # aligned with an IndexSet
    seed_path: tuple[int, int]


def eval_xi_batch(chi: np.ndarray, index_set: IndexSet) -> np.ndarray:
    """xi_m for every index in the set and every row of chi.

    chi has shape (n, L); the result has shape (n, len(index_set)) with the
    zero index mapping to exactly 1.0.
    """
    chi = np.atleast_2d(np.asarray(chi, dtype=float))
    n = chi.shape[0]
    out = np.empty((n, len(index_set)))
    # Hermite values are cached per (coordinate, degree) actually used
    cache: dict[tuple[int, int], np.ndarray] = {}
    for r, m in enumerate(index_set):
        if m.is_zero():
            out[:, r] = 1.0
            continue
        if m.order == 1:
            k = m.entries[0][0]
            out[:, r] = chi[:, k - 1]
            continue
        acc = np.ones(n)
        for k, mk in m.entries:
            key = (k, mk)
            if key not in cache:
                cache[key] = hermite(mk, chi[:, k - 1])
            acc = acc * cache[key]
        out[:, r] = acc
    return out


def eval_xi(chi: np.ndarray, m: MultiIndex) -> float:
    """xi_m for a single draw."""
    chi = np.asarray(chi, dtype=float)
    acc = 1.0
    for k, mk in m.entries:
        acc *= hermite(mk, chi[k - 1])
    return float(acc)


def make_draw(seed: int, path: int, index_set: IndexSet) -> ChaosDraw:
    chi = sample_chi(seed, path, index_set.L)
    xi = eval_xi_batch(chi[None, :], index_set)[0]
    return ChaosDraw(chi=chi, xi=xi, seed_path=(seed, path))

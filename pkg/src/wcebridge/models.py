"""The four SDE models and their coefficient-wise closures.

Each model supplies two vectorized maps consumed by the coefficient ODE
system:

  drift(values, zero_mask)      drift closure f_m applied row-wise
  diffusion(values, zero_mask)  diffusion closure sigma_m applied row-wise
                                (these feed the forcing of incremented rows,
                                hence "source" values)

``values`` is the vector of coefficients (one entry per multi-index) at one
time; ``zero_mask`` is 1.0 on the zero-index row and 0.0 elsewhere.  Linear
coefficients (OU drift, GBM drift and diffusion, logistic diffusion) make
the closure exact; the nonlinear drifts (logistic, protein) use the
coefficient-wise closure, which is the approximation the experiments adopt.

Constant contributions belong to the zero row only (a constant has no
component on higher chaos modes), which zero_mask enforces; with sigma = 0
every row of order >= 1 therefore stays identically zero.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

MODEL_NAMES = ("ou", "gbm", "logistic", "protein")


def _check_sigma(sigma: float) -> None:
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")


@dataclass(frozen=True)
class OrnsteinUhlenbeck:
    """dX = -a X dt + sigma dB."""

    x0: float
    a: float = 0.5
    sigma: float = 1.0
    name: str = field(default="ou", init=False)

    def __post_init__(self):
        _check_sigma(self.sigma)

    def drift(self, values, zero_mask):
        return -self.a * values

    def diffusion(self, values, zero_mask):
        # constant diffusion: the closure is sigma on the zero row, else 0
        return self.sigma * zero_mask


@dataclass(frozen=True)
class GeometricBrownianMotion:
    """dX = a X dt + sigma X dB."""

    x0: float
    a: float = 0.2
    sigma: float = 0.3
    name: str = field(default="gbm", init=False)

    def __post_init__(self):
        _check_sigma(self.sigma)

    def drift(self, values, zero_mask):
        return self.a * values

    def diffusion(self, values, zero_mask):
        return self.sigma * values


@dataclass(frozen=True)
class LogisticSde:
    """dX = a X (1 - X) dt + sigma X dB (multiplicative logistic)."""

    x0: float
    a: float = 0.2
    sigma: float = 0.7
    name: str = field(default="logistic", init=False)

    def __post_init__(self):
        _check_sigma(self.sigma)

    def drift(self, values, zero_mask):
        return self.a * values * (1.0 - values)

    def diffusion(self, values, zero_mask):
        return self.sigma * values


@dataclass(frozen=True)
class ProteinKinetics:
    """Protein-kinetic SDE, Ito form of the Stratonovich model

        dX = [1 - X + lam X (1 - X)] dt + sigma X (1 - X) o dB.

    The default drift applies the published Ito correction
    sigma X (1-X)(1-2X); ``ito_correction="half-sigma-squared"`` switches to
    the standard (sigma^2/2) X (1-X)(1-2X).  Either way the drift expands to
    the cubic 1 + c1 X + c2 X^2 + c3 X^3, whose constant term contributes to
    the zero row only.
    """

    x0: float
    lam: float = 0.2
    sigma: float = 0.8
    ito_correction: str = "paper"
    name: str = field(default="protein", init=False)

    def __post_init__(self):
        _check_sigma(self.sigma)
        if self.ito_correction not in ("paper", "half-sigma-squared"):
            raise ValueError(f"unknown ito_correction {self.ito_correction!r}")

    def _cubic(self) -> tuple[float, float, float]:
        s = self.sigma if self.ito_correction == "paper" else 0.5 * self.sigma**2
        return (self.lam + s - 1.0, -(self.lam + 3.0 * s), 2.0 * s)

    def drift(self, values, zero_mask):
        c1, c2, c3 = self._cubic()
        return zero_mask + values * (c1 + values * (c2 + values * c3))

    def diffusion(self, values, zero_mask):
        return self.sigma * values * (1.0 - values)


SdeModel = Union[OrnsteinUhlenbeck, GeometricBrownianMotion, LogisticSde, ProteinKinetics]


def make_model(name: str, x0: float, **params) -> SdeModel:
    """Model factory used by the experiment configuration."""
    name = name.lower()
    if name == "ou":
        return OrnsteinUhlenbeck(x0=x0, **params)
    if name == "gbm":
        return GeometricBrownianMotion(x0=x0, **params)
    if name == "logistic":
        return LogisticSde(x0=x0, **params)
    if name == "protein":
        return ProteinKinetics(x0=x0, **params)
    raise ValueError(f"unknown model {name!r}; expected one of {MODEL_NAMES}")

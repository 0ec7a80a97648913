"""Market parameters for a spectrally negative geometric Levy model.

The log-price is ``X_t = log(s0) + mu t + sigma B_t - sum_{k <= N_t} U_k`` with
``N_t`` Poisson of intensity ``lambda`` and downward jumps ``U_k``. The drift
``mu`` is never user supplied: it is always solved from ``Psi(1) = r`` so that
the discounted price is a martingale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np


class ExponentialJumps:
    """Jump sizes ``U ~ Exp(rate)`` (mean ``1/rate``)."""

    def __init__(self, rate: float):
        if not rate > 0:
            raise ValueError(f"jump rate must be > 0, got {rate!r}")
        self.rate = float(rate)

    def transform(self, z: float) -> float:
        """``E exp(-z U)``; finite only for ``z > -rate``."""
        if not z > -self.rate:
            raise ValueError(
                f"E exp(-zU) diverges for z={z!r} <= -rate={-self.rate!r}")
        return self.rate / (self.rate + z)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.exponential(1.0 / self.rate, size)

    @property
    def mean(self) -> float:
        return 1.0 / self.rate

    @property
    def second_moment(self) -> float:
        return 2.0 / self.rate**2

    def __repr__(self):
        return f"ExponentialJumps(rate={self.rate!r})"

    def __eq__(self, other):
        return isinstance(other, ExponentialJumps) and other.rate == self.rate

    def __hash__(self):
        return hash(("exp", self.rate))


def jump_transform(z: float, rho: float) -> float:
    """Laplace transform ``E exp(-z U)`` of an ``Exp(rho)`` jump."""
    return ExponentialJumps(rho).transform(z)


def martingale_drift(r: float, sigma: float, lam: float, rho: float) -> float:
    """Drift making ``exp(-rt) S_t`` a martingale: ``r - sigma^2/2 + lam (1 - eta(1))``."""
    if r < 0 or sigma < 0 or lam < 0:
        raise ValueError("r, sigma and lambda must be nonnegative")
    mu = r - 0.5 * sigma * sigma
    if lam > 0:
        mu += lam * (1.0 - jump_transform(1.0, rho))
    return mu


@dataclass(frozen=True)
class MarketParams:
    """All model inputs. ``mu`` is derived on construction.

    ``s_bar`` is the historical maximum of the asset before issue. It defaults
    to ``s0`` and must not be below it.
    """

    s0: float
    strike: float
    maturity: float
    rate: float
    sigma: float
    jump_intensity: float = 0.0
    jump_rate: float = 1.0
    s_bar: float | None = None
    mu: float = field(init=False)

    def __post_init__(self):
        if self.s_bar is None:
            object.__setattr__(self, "s_bar", self.s0)
        checks = [
            ("s0", self.s0 > 0, "must be > 0"),
            ("s_bar", self.s_bar >= self.s0, "must be >= s0"),
            ("strike", self.strike > 0, "must be > 0"),
            ("maturity", self.maturity > 0, "must be > 0"),
            ("rate", self.rate >= 0, "must be >= 0"),
            ("sigma", self.sigma >= 0, "must be >= 0"),
            ("lambda", self.jump_intensity >= 0, "must be >= 0"),
            ("rho", self.jump_rate > 0, "must be > 0"),
        ]
        for name, ok, msg in checks:
            if not ok:
                raise ValueError(f"{name} {msg}")
        values = (self.s0, self.s_bar, self.strike, self.maturity, self.rate,
                  self.sigma, self.jump_intensity, self.jump_rate)
        if not all(map(math.isfinite, values)):
            raise ValueError("market parameters must be finite")
        object.__setattr__(
            self, "mu",
            martingale_drift(self.rate, self.sigma, self.jump_intensity, self.jump_rate))

    @property
    def jumps(self) -> ExponentialJumps:
        return ExponentialJumps(self.jump_rate)

    def laplace_exponent(self, z: float) -> float:
        return laplace_exponent(z, self)


def laplace_exponent(z: float, params: MarketParams) -> float:
    """``Psi(z) = mu z + sigma^2 z^2 / 2 + lambda (eta(z) - 1)``."""
    jump = 0.0
    if params.jump_intensity > 0:
        jump = params.jump_intensity * (params.jumps.transform(z) - 1.0)
    elif not z > -params.jump_rate:
        # domain is checked even when jumps are switched off
        params.jumps.transform(z)
    return params.mu * z + 0.5 * params.sigma**2 * z * z + jump


@dataclass(frozen=True)
class PayoffSpec:
    kind: Literal["put", "call"]
    strike: float

    def __post_init__(self):
        if self.kind not in ("put", "call"):
            raise ValueError(f"payoff kind must be 'put' or 'call', got {self.kind!r}")
        if not self.strike >= 0:
            raise ValueError("strike must be >= 0")

    def __call__(self, s):
        return payoff(self, s)


def payoff(spec: PayoffSpec, s):
    """Intrinsic value; works on scalars and arrays."""
    if spec.kind == "put":
        out = np.maximum(spec.strike - np.asarray(s, dtype=float), 0.0)
    else:
        out = np.maximum(np.asarray(s, dtype=float) - spec.strike, 0.0)
    return float(out) if out.ndim == 0 else out


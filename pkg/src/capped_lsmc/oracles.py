"""Reference prices used to check the Monte Carlo engine.

The capped lattice price lives on the binomial filtration: the drawdown is
observed at tree nodes only, and the running maximum is tracked exactly as
``max(s_bar, s0 u^m)`` where ``m`` is the highest level visited. It is a
convergence target for the GBM case, not ground truth for the jump model.
"""

from __future__ import annotations

import math

from scipy.stats import norm

from . import kernels

# alive (time, level, max-level) states the capped DP may visit
MAX_LATTICE_STATES = 2 * 10**9


def bs_european_put(s0: float, strike: float, r: float, sigma: float, T: float) -> float:
    if sigma < 0 or T <= 0:
        raise ValueError("need sigma >= 0 and T > 0")
    if strike <= 0:
        return 0.0
    disc_k = strike * math.exp(-r * T)
    if sigma == 0:
        return max(disc_k - s0, 0.0)
    vol = sigma * math.sqrt(T)
    d1 = (math.log(s0 / strike) + (r + 0.5 * sigma * sigma) * T) / vol
    d2 = d1 - vol
    return disc_k * norm.cdf(-d2) - s0 * norm.cdf(-d1)


def lattice_factors(r: float, sigma: float, T: float, steps: int):
    """CRR ``(u, p, one-step discount)``; raises if ``p`` is not in (0, 1)."""
    if steps < 1:
        raise ValueError("lattice needs at least one step")
    dt = T / steps
    u = math.exp(sigma * math.sqrt(dt))
    d = 1.0 / u
    if u == d:
        raise ValueError("sigma = 0 gives a degenerate lattice")
    p = (math.exp(r * dt) - d) / (u - d)
    if not 0.0 < p < 1.0:
        raise ValueError(f"risk-neutral probability p={p!r} outside (0, 1); refine the lattice")
    return u, p, math.exp(-r * dt)


def crr_american_put(s0: float, strike: float, r: float, sigma: float, T: float,
                     steps: int) -> float:
    u, p, disc = lattice_factors(r, sigma, T, steps)
    return float(kernels.crr_put(float(s0), float(strike), u, p, disc, int(steps)))


def drawdown_band(u: float, level: float, steps: int) -> int:
    """Levels below the running maximum beyond which every node is capped."""
    if level >= 1.0:
        return 2 * steps
    b = math.ceil(math.log(1.0 / (1.0 - level)) / math.log(u)) + 1
    return min(b, 2 * steps)


def lattice_capped_put(s0: float, s_bar: float, strike: float, r: float, sigma: float,
                       T: float, steps: int, level: float) -> float:
    """Exact Bermudan put on the CRR tree, terminated at the first node where
    ``1 - S/S_bar >= level`` (payoff collected there).

    The DP runs over alive ``(level, max-level)`` states only, so its cost is
    about ``steps^2 * band / 2``. ``level >= 1`` never caps and delegates to
    :func:`crr_american_put`.
    """
    if not level > 0:
        raise ValueError("drawdown level must be > 0")
    if s_bar < s0:
        raise ValueError("s_bar must be >= s0")
    if level >= 1.0:
        return crr_american_put(s0, strike, r, sigma, T, steps)
    if 1.0 - s0 / s_bar >= level:
        return max(strike - s0, 0.0)
    u, p, disc = lattice_factors(r, sigma, T, steps)
    band = drawdown_band(u, level, steps)
    if (steps + 1) ** 2 * (band + 1) // 2 > MAX_LATTICE_STATES:
        raise MemoryError(f"capped lattice with {steps} steps and band {band} is too large")
    return float(kernels.capped_lattice_put(float(s0), float(s_bar), float(strike), u, p,
                                            disc, int(steps), float(level), int(band)))

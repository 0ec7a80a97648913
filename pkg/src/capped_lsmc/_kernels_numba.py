"""Loop kernels compiled with numba. See ``_kernels_numpy`` for the reference twins."""

import math

import numpy as np

from ._backend import njit

NEVER = np.iinfo(np.int64).max


@njit
def build_paths(s0, increments, s_bar):
    n, steps = increments.shape
    prices = np.empty((n, steps + 1))
    running_max = np.empty((n, steps + 1))
    for p in range(n):
        prices[p, 0] = s0
        top = max(s0, s_bar)
        running_max[p, 0] = top
        acc = 0.0
        for k in range(steps):
            acc += increments[p, k]
            s = s0 * math.exp(acc)
            prices[p, k + 1] = s
            if s > top:
                top = s
            running_max[p, k + 1] = top
    return prices, running_max


@njit
def drawdown_index(prices, running_max, level):
    n, cols = prices.shape
    kappa = np.full(n, NEVER, dtype=np.int64)
    for p in range(n):
        for k in range(cols):
            if 1.0 - prices[p, k] / running_max[p, k] >= level:
                kappa[p] = k
                break
    return kappa


@njit
def laguerre(x, n_basis):
    n = x.shape[0]
    out = np.empty((n, n_basis))
    for r in range(n):
        xr = x[r]
        w = math.exp(-0.5 * xr)
        prev = 1.0
        out[r, 0] = w
        if n_basis > 1:
            cur = 1.0 - xr
            out[r, 1] = w * cur
            for k in range(1, n_basis - 1):
                nxt = ((2 * k + 1 - xr) * cur - k * prev) / (k + 1)
                out[r, k + 1] = w * nxt
                prev = cur
                cur = nxt
    return out


@njit
def discounted_targets(value, ex_idx, j, rate, delta):
    n = value.shape[0]
    y = np.empty(n)
    for p in range(n):
        y[p] = value[p] * math.exp(-rate * delta * (ex_idx[p] - j))
    return y


@njit
def decide(phi, gain, alpha, kappa, j, value, ex_idx):
    n, m = phi.shape
    for p in range(n):
        if kappa[p] <= j:
            continue
        g = gain[p]
        if g <= 0.0:
            continue
        cont = 0.0
        for k in range(m):
            cont += phi[p, k] * alpha[k]
        if g >= cont:
            value[p] = g
            ex_idx[p] = j


@njit
def crr_put(s0, strike, u, p, disc, steps):
    v = np.empty(steps + 1)
    for k in range(steps + 1):
        v[k] = max(strike - s0 * u ** float(steps - 2 * k), 0.0)
    q = 1.0 - p
    for i in range(steps - 1, -1, -1):
        for k in range(i + 1):
            hold = disc * (p * v[k] + q * v[k + 1])
            ex = max(strike - s0 * u ** float(i - 2 * k), 0.0)
            v[k] = max(ex, hold)
    return v[0]


@njit
def capped_lattice_put(s0, s_bar, strike, u, p, disc, steps, level, band):
    q = 1.0 - p
    nxt = np.zeros((steps + 2, band + 2))
    cur = np.zeros((steps + 2, band + 2))
    cap_of_m = np.empty(steps + 2)
    for m in range(steps + 2):
        cap_of_m[m] = max(s_bar, s0 * u ** float(m))
    for k in range(steps, -1, -1):
        for m in range(k + 1):
            for dd in range(band + 1):
                i = m - dd
                if i < -k:
                    break
                if (k - i) % 2 != 0:
                    continue
                s = s0 * u ** float(i)
                g = max(strike - s, 0.0)
                if k == steps:
                    cur[m, dd] = g
                    continue
                iu = i + 1
                mu = max(m, iu)
                su = s0 * u ** float(iu)
                if 1.0 - su / cap_of_m[mu] >= level:
                    vu = max(strike - su, 0.0)
                else:
                    vu = nxt[mu, mu - iu]
                sd = s0 * u ** float(i - 1)
                if 1.0 - sd / cap_of_m[m] >= level:
                    vd = max(strike - sd, 0.0)
                else:
                    vd = nxt[m, dd + 1]
                cur[m, dd] = max(g, disc * (p * vu + q * vd))
        tmp = cur
        cur = nxt
        nxt = tmp
    return nxt[0, 0]

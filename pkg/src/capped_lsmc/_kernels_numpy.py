"""Pure-numpy kernels. Same signatures and semantics as ``_kernels_numba``."""

import numpy as np

NEVER = np.iinfo(np.int64).max


def build_paths(s0, increments, s_bar):
    n, steps = increments.shape
    prices = np.empty((n, steps + 1))
    prices[:, 0] = s0
    prices[:, 1:] = s0 * np.exp(np.cumsum(increments, axis=1))
    running_max = np.maximum(np.maximum.accumulate(prices, axis=1), s_bar)
    return prices, running_max


def drawdown_index(prices, running_max, level):
    hit = 1.0 - prices / running_max >= level
    any_hit = hit.any(axis=1)
    kappa = np.full(prices.shape[0], NEVER, dtype=np.int64)
    kappa[any_hit] = np.argmax(hit[any_hit], axis=1)
    return kappa


def laguerre(x, n_basis):
    out = np.empty((x.shape[0], n_basis))
    prev = np.ones_like(x)
    out[:, 0] = prev
    if n_basis > 1:
        cur = 1.0 - x
        out[:, 1] = cur
        for k in range(1, n_basis - 1):
            nxt = ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
            out[:, k + 1] = nxt
            prev, cur = cur, nxt
    out *= np.exp(-0.5 * x)[:, None]
    return out


def discounted_targets(value, ex_idx, j, rate, delta):
    return value * np.exp(-rate * delta * (ex_idx - j))


def decide(phi, gain, alpha, kappa, j, value, ex_idx):
    cont = phi @ alpha
    ex = (kappa > j) & (gain > 0.0) & (gain >= cont)
    value[ex] = gain[ex]
    ex_idx[ex] = j


def crr_put(s0, strike, u, p, disc, steps):
    k = np.arange(steps + 1)
    s = s0 * u ** (steps - 2 * k).astype(np.float64)
    v = np.maximum(strike - s, 0.0)
    for i in range(steps - 1, -1, -1):
        k = np.arange(i + 1)
        s = s0 * u ** (i - 2 * k).astype(np.float64)
        v = np.maximum(strike - s, disc * (p * v[:-1] + (1.0 - p) * v[1:]))
    return v[0]


def capped_lattice_put(s0, s_bar, strike, u, p, disc, steps, level, band):
    # value[m, dd]: alive state with max level m and level i = m - dd
    q = 1.0 - p
    nxt = np.zeros((steps + 2, band + 2))
    cur = np.zeros((steps + 2, band + 2))
    m_all = np.arange(steps + 1)
    cap_of_m = np.maximum(s_bar, s0 * u ** m_all.astype(np.float64))
    for k in range(steps, -1, -1):
        cur[:] = 0.0
        for m in range(0, k + 1):
            dd = np.arange(band + 1)
            i = m - dd
            ok = (i >= -k) & ((k - i) % 2 == 0)
            if not ok.any():
                continue
            dd = dd[ok]
            i = i[ok]
            s = s0 * u ** i.astype(np.float64)
            g = np.maximum(strike - s, 0.0)
            if k == steps:
                cur[m, dd] = g
                continue
            # up move
            iu = i + 1
            mu = np.maximum(m, iu)
            su = s0 * u ** iu.astype(np.float64)
            capped_u = 1.0 - su / cap_of_m[mu] >= level
            du = mu - iu
            vu = np.where(
                capped_u, np.maximum(strike - su, 0.0),
                nxt[mu, np.minimum(du, band + 1)])
            # down move
            idn = i - 1
            sd = s0 * u ** idn.astype(np.float64)
            capped_d = 1.0 - sd / cap_of_m[m] >= level
            ddn = dd + 1
            vd = np.where(
                capped_d, np.maximum(strike - sd, 0.0),
                nxt[m, np.minimum(ddn, band + 1)])
            cur[m, dd] = np.maximum(g, disc * (p * vu + q * vd))
        cur, nxt = nxt, cur
    return nxt[0, 0]

"""Exact simulation of the geometric Levy price on a uniform grid."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .market import MarketParams

# spawn_key tags; keeps path and cap streams disjoint even when seeds coincide
PATH_STREAM = 0
CAP_STREAM = 1


def stream(seed: int, tag: int, index: int) -> np.random.Generator:
    """Generator for one path (or one cap draw).

    The stream is child ``(tag, index)`` of ``SeedSequence(seed)``, so it only
    depends on those three integers and never on chunking or worker count.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(tag), int(index)))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class TimeGrid:
    maturity: float
    steps: int

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if not self.maturity > 0:
            raise ValueError("maturity must be > 0")

    @property
    def delta(self) -> float:
        return self.maturity / self.steps

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.maturity, self.steps + 1)


@dataclass(frozen=True, eq=False)
class PathSet:
    """``n_paths`` trajectories on ``grid``; arrays are read-only."""

    grid: TimeGrid
    prices: np.ndarray
    running_max: np.ndarray
    seed: int
    jump_counts: np.ndarray

    @property
    def n_paths(self) -> int:
        return self.prices.shape[0]

    def log_increments(self) -> np.ndarray:
        return np.diff(np.log(self.prices), axis=1)


def running_max_of(prices, s_bar: float) -> np.ndarray:
    """Prefix maximum of ``prices`` seeded with ``s_bar``."""
    prices = np.asarray(prices, dtype=float)
    if prices.size == 0:
        raise ValueError("running_max_of needs at least one price")
    return np.maximum(np.maximum.accumulate(prices), s_bar)


def _fill_increments(params, grid, seed, lo, hi, out, jumps_out):
    delta = grid.delta
    drift = params.mu * delta
    vol = params.sigma * math.sqrt(delta)
    lam_dt = params.jump_intensity * delta
    law = params.jumps
    steps = grid.steps
    for n in range(lo, hi):
        rng = stream(seed, PATH_STREAM, n)
        row = drift + vol * rng.standard_normal(steps)
        counts = rng.poisson(lam_dt, steps)
        total = int(counts.sum())
        if total:
            sizes = law.sample(rng, total)
            row -= np.bincount(np.repeat(np.arange(steps), counts), weights=sizes,
                               minlength=steps)
        out[n] = row
        jumps_out[n] = total


def simulate(params: MarketParams, grid: TimeGrid, n_paths: int, seed: int,
             workers: int = 1) -> PathSet:
    """Simulate ``n_paths`` price paths.

    Each step's log-increment is sampled exactly as
    ``mu*dt + sigma*sqrt(dt)*Z - (sum of Poisson(lambda*dt) Exp(rho) jumps)``.
    Output is bitwise identical for any ``workers``.
    """
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    if abs(params.maturity - grid.maturity) > 1e-12 * params.maturity:
        raise ValueError("grid maturity does not match params.maturity")
    try:
        incr = np.empty((n_paths, grid.steps))
    except MemoryError as exc:
        raise MemoryError(
            f"cannot allocate {n_paths} x {grid.steps + 1} path table") from exc
    jumps = np.zeros(n_paths, dtype=np.int64)
    if workers <= 1:
        _fill_increments(params, grid, seed, 0, n_paths, incr, jumps)
    else:
        bounds = np.linspace(0, n_paths, workers + 1).astype(int)
        with ThreadPoolExecutor(workers) as pool:
            futs = [pool.submit(_fill_increments, params, grid, seed, lo, hi, incr, jumps)
                    for lo, hi in zip(bounds[:-1], bounds[1:])]
            for f in futs:
                f.result()
    prices, running_max = kernels.build_paths(float(params.s0), incr, float(params.s_bar))
    for a in (prices, running_max, jumps):
        a.flags.writeable = False
    return PathSet(grid=grid, prices=prices, running_max=running_max,
                   seed=int(seed), jump_counts=jumps)


def write_paths_csv(paths: PathSet, fh) -> None:
    """Debug dump, one row per (path, step). Only meant for small runs."""
    if paths.n_paths > 100:
        raise ValueError("path dump is limited to n_paths <= 100")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["path", "step", "time", "price", "running_max"])
    times = paths.grid.times
    for n in range(paths.n_paths):
        for k in range(paths.grid.steps + 1):
            w.writerow([n, k, repr(float(times[k])), repr(float(paths.prices[n, k])),
                        repr(float(paths.running_max[n, k]))])

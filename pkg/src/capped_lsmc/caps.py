"""Time caps: per-path first grid index at which the option is terminated.

Convention: the option is alive at ``t_j`` iff ``j < kappa[n]``. Paths that are
never capped on ``[0, T]`` carry the sentinel ``NEVER`` (larger than any index).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import kernels
from .paths import CAP_STREAM, PathSet, TimeGrid, stream

NEVER = kernels.NEVER

CapKind = Literal["drawdown", "exponential", "erlang", "deterministic", "none"]


@dataclass(frozen=True)
class CapSpec:
    kind: CapKind = "none"
    level: float | None = None
    rate: float | None = None
    shape: int | None = None
    time: float | None = None
    sub_seed: int | None = None

    def __post_init__(self):
        k = self.kind
        if k == "drawdown":
            if self.level is None or not 0.0 < self.level <= 1.0:
                raise ValueError(f"cap_level must be in (0, 1], got {self.level!r}")
        elif k in ("exponential", "erlang"):
            if self.rate is None or not self.rate > 0:
                raise ValueError(f"cap_rate must be > 0, got {self.rate!r}")
            if k == "erlang" and (self.shape is None or int(self.shape) != self.shape
                                  or self.shape < 1):
                raise ValueError(f"cap_shape must be an integer >= 1, got {self.shape!r}")
        elif k == "deterministic":
            if self.time is None or not self.time >= 0:
                raise ValueError(f"cap_time must be >= 0, got {self.time!r}")
        elif k != "none":
            raise ValueError(f"unknown cap kind {k!r}")

    @classmethod
    def drawdown(cls, level):
        return cls("drawdown", level=level)

    @classmethod
    def exponential(cls, rate, sub_seed=None):
        return cls("exponential", rate=rate, sub_seed=sub_seed)

    @classmethod
    def erlang(cls, shape, rate, sub_seed=None):
        return cls("erlang", rate=rate, shape=shape, sub_seed=sub_seed)

    @classmethod
    def deterministic(cls, time):
        return cls("deterministic", time=time)

    @property
    def echo(self) -> tuple[str, str]:
        """``(cap_kind, cap_level)`` columns of the result CSV."""
        value = {"drawdown": self.level, "exponential": self.rate, "erlang": self.rate,
                 "deterministic": self.time}.get(self.kind)
        return self.kind, "" if value is None else repr(float(value))


@dataclass(frozen=True, eq=False)
class CapIndices:
    kappa: np.ndarray
    cap_times: np.ndarray | None = None

    @property
    def n_paths(self) -> int:
        return self.kappa.shape[0]

    def alive(self, j: int) -> np.ndarray:
        return self.kappa > j

    def __eq__(self, other):
        return isinstance(other, CapIndices) and np.array_equal(self.kappa, other.kappa)


def _frozen(kappa, cap_times=None):
    kappa.flags.writeable = False
    if cap_times is not None:
        cap_times.flags.writeable = False
    return CapIndices(kappa, cap_times)


def cap_indices_drawdown(paths: PathSet, level: float) -> CapIndices:
    """First grid index where ``1 - S/S_bar >= level``."""
    if not 0.0 < level <= 1.0:
        raise ValueError(f"cap_level must be in (0, 1], got {level!r}")
    kappa = kernels.drawdown_index(paths.prices, paths.running_max, float(level))
    return _frozen(kappa)


def _grid_index(theta: np.ndarray, grid: TimeGrid) -> np.ndarray:
    # first k with t_k >= theta; NEVER when theta > T
    times = grid.times
    k = np.searchsorted(times, theta, side="left").astype(np.int64)
    k[theta > grid.maturity] = NEVER
    return k


def cap_indices_independent(spec: CapSpec, grid: TimeGrid, n_paths: int,
                            sub_seed: int) -> CapIndices:
    """Caps independent of the price: ``theta ~ Exp(q)`` or ``Erlang(n, q)``."""
    if spec.kind not in ("exponential", "erlang"):
        raise ValueError(f"not an independent cap: {spec.kind!r}")
    if not (spec.rate or 0) > 0:
        raise ValueError("cap_rate must be > 0")
    shape = 1 if spec.kind == "exponential" else int(spec.shape or 0)
    if shape < 1:
        raise ValueError("cap_shape must be >= 1")
    theta = np.empty(n_paths)
    scale = 1.0 / spec.rate
    for n in range(n_paths):
        theta[n] = stream(sub_seed, CAP_STREAM, n).exponential(scale, shape).sum()
    return _frozen(_grid_index(theta, grid), theta)


def cap_indices_deterministic(t_star: float, grid: TimeGrid, n_paths: int) -> CapIndices:
    if not t_star >= 0:
        raise ValueError("cap_time must be >= 0")
    # tolerate rounding of t_star = k*delta computed by the caller
    k = math.ceil(t_star / grid.delta - 1e-9)
    kappa = np.full(n_paths, NEVER if t_star > grid.maturity else max(k, 0), dtype=np.int64)
    return _frozen(kappa, np.full(n_paths, float(t_star)))


def cap_indices(spec: CapSpec, paths: PathSet, sub_seed: int | None = None) -> CapIndices:
    """Dispatch on ``spec.kind``. ``none`` yields ``NEVER`` everywhere."""
    n = paths.n_paths
    if spec.kind == "drawdown":
        return cap_indices_drawdown(paths, spec.level)
    if spec.kind in ("exponential", "erlang"):
        seed = spec.sub_seed if spec.sub_seed is not None else sub_seed
        if seed is None:
            seed = paths.seed
        return cap_indices_independent(spec, paths.grid, n, seed)
    if spec.kind == "deterministic":
        return cap_indices_deterministic(spec.time, paths.grid, n)
    return _frozen(np.full(n, NEVER, dtype=np.int64))


def write_caps_csv(caps: CapIndices, grid: TimeGrid, fh) -> None:
    """Debug dump ``path,kappa,cap_time``; NEVER is an empty field.

    ``cap_time`` is the drawn cap for independent caps and the grid time of
    ``kappa`` otherwise.
    """
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["path", "kappa", "cap_time"])
    times = grid.times
    for n, k in enumerate(caps.kappa):
        never = k == NEVER
        if caps.cap_times is not None:
            t = repr(float(caps.cap_times[n]))
        else:
            t = "" if never else repr(float(times[k]))
        w.writerow([n, "" if never else int(k), t])

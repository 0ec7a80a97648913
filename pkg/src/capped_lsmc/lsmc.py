"""Least-squares Monte Carlo for time-capped Bermudan options.

Backward induction follows the standard Longstaff-Schwartz recursion with one
change: at dates where a path is already capped (``j >= kappa``) the
continuation estimate is multiplied by zero, so the path is forced to pay the
payoff at its cap index. Regression coefficients are still fitted on all paths
unless ``alive_only`` is set.

An alive path exercises at ``t_j`` when its payoff is positive and at least the
fitted continuation value. A zero payoff never triggers exercise: the true
continuation is nonnegative, so that would only be optimal on a tie, and the
regression can dip below zero far out of the money.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .caps import CapIndices, CapSpec, cap_indices
from .market import MarketParams, PayoffSpec, payoff
from .paths import PathSet, TimeGrid, simulate

RIDGE = 1e-10

RESULT_HEADER = ["price", "std_error", "n_paths", "n_steps", "n_basis", "seed",
                 "cap_kind", "cap_level"]


@dataclass(frozen=True)
class BasisSpec:
    """Weighted Laguerre basis ``exp(-x/2) L_k(x)``, ``k < n_basis``, on ``x = S/K``."""

    n_basis: int = 5
    family: str = "laguerre"

    def __post_init__(self):
        if self.n_basis < 1:
            raise ValueError("n_basis must be >= 1")
        if self.family != "laguerre":
            raise ValueError("only the weighted Laguerre family is supported")

    def __call__(self, x):
        return basis_eval(self, x)


def basis_eval(spec: BasisSpec, x) -> np.ndarray:
    """Basis matrix of shape ``(len(x), n_basis)``; a scalar gives a vector."""
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise ValueError("Laguerre basis needs finite x >= 0")
    phi = kernels.laguerre(np.ascontiguousarray(arr), spec.n_basis)
    return phi[0] if np.ndim(x) == 0 else phi


@dataclass(frozen=True, eq=False)
class RegressionStep:
    j: int
    coef: np.ndarray
    n_rows: int
    full_rank: bool

    @property
    def rank_flag(self) -> str:
        return "full" if self.full_rank else "deficient"


def _solve(phi: np.ndarray, y: np.ndarray, j: int) -> RegressionStep:
    n, m = phi.shape
    if n == 0 or not np.any(y):
        return RegressionStep(j, np.zeros(m), n, False)
    coef, _, rank, _ = np.linalg.lstsq(phi, y, rcond=None)
    if rank == m:
        return RegressionStep(j, coef, n, True)
    gram = phi.T @ phi
    gram[np.diag_indices(m)] += RIDGE
    try:
        coef = np.linalg.solve(gram, phi.T @ y)
    except np.linalg.LinAlgError:
        coef = np.zeros(m)
    if not np.all(np.isfinite(coef)):
        coef = np.zeros(m)
    return RegressionStep(j, coef, n, False)


def fit_continuation(x, y, spec: BasisSpec, j: int = 0) -> RegressionStep:
    """Least-squares fit of targets ``y`` on the basis evaluated at states ``x``.

    Uses an SVD least-squares solve; when the design is rank deficient the
    normal equations are solved with ``1e-10`` added to the diagonal and the
    step is flagged ``deficient``. Empty or all-zero targets give zero
    coefficients, also flagged ``deficient``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d arrays of equal length")
    if not np.all(np.isfinite(y)):
        raise ValueError("regression targets must be finite")
    phi = basis_eval(spec, x) if x.size else np.zeros((0, spec.n_basis))
    return _solve(phi, y, j)


@dataclass(frozen=True, eq=False)
class PricingResult:
    price: float
    std_error: float
    n_paths: int
    n_steps: int
    n_basis: int
    seed: int
    cap: CapSpec
    mean_exercise_time: float
    cashflows: np.ndarray = field(repr=False)
    exercise_index: np.ndarray = field(repr=False)
    steps: list = field(default_factory=list, repr=False)

    def csv_row(self) -> list[str]:
        kind, level = self.cap.echo
        return [repr(float(self.price)), repr(float(self.std_error)), str(self.n_paths),
                str(self.n_steps), str(self.n_basis), str(self.seed), kind, level]

    def write_csv(self, fh, header: bool = True) -> None:
        w = csv.writer(fh, lineterminator="\n")
        if header:
            w.writerow(RESULT_HEADER)
        w.writerow(self.csv_row())

    def write_coefficients(self, fh) -> None:
        """Per-date dump ``j,alpha_0..alpha_{M-1},rank_flag``."""
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["j"] + [f"alpha_{k}" for k in range(self.n_basis)] + ["rank_flag"])
        for st in sorted(self.steps, key=lambda s: s.j):
            w.writerow([st.j] + [repr(float(a)) for a in st.coef] + [st.rank_flag])


def backward_induct(paths: PathSet, caps: CapIndices, pay: PayoffSpec, basis: BasisSpec,
                    params: MarketParams, *, itm_only: bool = False,
                    alive_only: bool = False, european: bool = False,
                    cap: CapSpec | None = None) -> PricingResult:
    """Capped LSMC backward induction on a fixed set of paths.

    ``european`` switches off every early-exercise decision (cap forcing still
    applies) and drops the max with the immediate payoff.
    """
    n, cols = paths.prices.shape
    steps = cols - 1
    if caps.n_paths != n:
        raise ValueError(f"caps cover {caps.n_paths} paths, path set has {n}")
    if caps.kappa.ndim != 1:
        raise ValueError("kappa must be 1-d")

    prices = paths.prices
    kappa = np.ascontiguousarray(caps.kappa, dtype=np.int64)
    delta = paths.grid.delta
    r = params.rate
    strike = pay.strike
    ex_idx = np.minimum(kappa, steps)
    value = payoff(pay, prices[np.arange(n), ex_idx])
    fitted = []

    if not european:
        for j in range(steps - 1, 0, -1):
            s_j = np.ascontiguousarray(prices[:, j])
            gain = payoff(pay, s_j)
            phi = kernels.laguerre(s_j / strike, basis.n_basis)
            y = kernels.discounted_targets(value, ex_idx, j, r, delta)
            rows = None
            if alive_only:
                rows = kappa > j
            if itm_only:
                rows = gain > 0.0 if rows is None else rows & (gain > 0.0)
            if rows is None:
                step = _solve(phi, y, j)
            else:
                step = _solve(phi[rows], y[rows], j)
            fitted.append(step)
            kernels.decide(phi, gain, step.coef, kappa, j, value, ex_idx)

    cashflows = value * np.exp(-r * delta * ex_idx)
    mean = float(cashflows.mean())
    z0 = payoff(pay, params.s0)
    price_ = mean if european else max(z0, mean)
    se = float(cashflows.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    mean_ex = float(np.mean(ex_idx) * delta)
    for a in (cashflows, ex_idx):
        a.flags.writeable = False
    return PricingResult(
        price=price_, std_error=se, n_paths=n, n_steps=steps, n_basis=basis.n_basis,
        seed=paths.seed, cap=cap if cap is not None else CapSpec(),
        mean_exercise_time=mean_ex, cashflows=cashflows, exercise_index=ex_idx,
        steps=fitted[::-1])


def price(params: MarketParams, pay: PayoffSpec | str = "put", cap: CapSpec | None = None,
          *, n_paths: int = 5000, n_steps: int = 2000, n_basis: int = 5, seed: int = 0,
          itm_only: bool = False, alive_only: bool = False, european: bool = False,
          workers: int = 1) -> PricingResult:
    """Simulate, locate caps, run backward induction. Deterministic in ``seed``."""
    if isinstance(pay, str):
        pay = PayoffSpec(pay, params.strike)
    cap = cap or CapSpec()
    grid = TimeGrid(params.maturity, n_steps)
    paths = simulate(params, grid, n_paths, seed, workers=workers)
    caps = cap_indices(cap, paths)
    return backward_induct(paths, caps, pay, BasisSpec(n_basis), params,
                           itm_only=itm_only, alive_only=alive_only, european=european,
                           cap=cap)

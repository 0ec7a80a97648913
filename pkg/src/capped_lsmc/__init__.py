"""Least-squares Monte Carlo pricing of time-capped American options."""

from .caps import (NEVER, CapIndices, CapSpec, cap_indices, cap_indices_deterministic,
                   cap_indices_drawdown, cap_indices_independent)
from .kernels import BACKEND
from .lsmc import (BasisSpec, PricingResult, RegressionStep, backward_induct, basis_eval,
                   fit_continuation, price)
from .market import (ExponentialJumps, MarketParams, PayoffSpec, jump_transform,
                     laplace_exponent, martingale_drift, payoff)
from .oracles import bs_european_put, crr_american_put, lattice_capped_put
from .paths import PathSet, TimeGrid, running_max_of, simulate

__version__ = "0.1.0"

"""Hot numeric kernels, dispatched to numba or pure numpy.

Set ``CAPPED_LSMC_DISABLE_NUMBA=1`` before import to force the numpy path.
Both implementations are importable directly as ``kernels.numba_impl`` and
``kernels.numpy_impl`` for cross-checks and benchmarks.
"""

from . import _kernels_numpy as numpy_impl
from ._backend import BACKEND, HAVE_NUMBA, USE_NUMBA

if HAVE_NUMBA:
    from . import _kernels_numba as numba_impl
else:  # pragma: no cover
    numba_impl = None

_impl = numba_impl if USE_NUMBA else numpy_impl

NEVER = numpy_impl.NEVER

build_paths = _impl.build_paths
drawdown_index = _impl.drawdown_index
laguerre = _impl.laguerre
discounted_targets = _impl.discounted_targets
decide = _impl.decide
crr_put = _impl.crr_put
capped_lattice_put = _impl.capped_lattice_put

__all__ = [
    "BACKEND",
    "NEVER",
    "build_paths",
    "drawdown_index",
    "laguerre",
    "discounted_targets",
    "decide",
    "crr_put",
    "capped_lattice_put",
    "numpy_impl",
    "numba_impl",
]

"""Compare the numba and pure-numpy kernel backends.

Times each hot kernel on the same inputs with both implementations, then
times one full pricing per backend in a fresh interpreter (the backend is
chosen at import time by CAPPED_LSMC_DISABLE_NUMBA).

    python3 benchmarks/bench_backends.py [--paths 5000] [--steps 2000]
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from capped_lsmc import kernels
from capped_lsmc.oracles import lattice_factors

PRICE_SNIPPET = """
import time
from capped_lsmc import BACKEND, CapSpec, MarketParams, price
m = MarketParams(100, 110, 1.0, 0.1, 0.5, 0.0675, 0.5, 105)
price(m, "put", CapSpec.drawdown(0.3), n_paths=200, n_steps=20)
t0 = time.perf_counter()
r = price(m, "put", CapSpec.drawdown(0.3), n_paths={n}, n_steps={L}, seed=1)
print(BACKEND, (time.perf_counter() - t0) * 1e3, r.price)
"""


def best_ms(fn, repeat):
    fn()  # compile / warm caches
    return min(timeit.repeat(fn, number=1, repeat=repeat)) * 1e3


def kernel_cases(n, steps):
    rng = np.random.default_rng(0)
    inc = rng.normal(0.0, 0.01, (n, steps))
    prices, run_max = kernels.numpy_impl.build_paths(100.0, inc, 105.0)
    x = prices[:, steps // 2] / 110.0
    gain = np.maximum(110.0 - prices[:, steps // 2], 0.0)
    kappa = kernels.numpy_impl.drawdown_index(prices, run_max, 0.3)
    ex_idx = np.minimum(kappa, steps)
    value = rng.random(n)
    alpha = np.array([1.0, -0.5, 0.2, 0.1, -0.05])
    u, p, disc = lattice_factors(0.1, 0.4, 1.0, 2000)
    lat = min(400, steps)
    ul, pl, dl = lattice_factors(0.1, 0.4, 1.0, lat)

    def decide(impl):
        phi = impl.laguerre(x, 5)
        impl.decide(phi, gain, alpha, kappa, steps // 2, value.copy(), ex_idx.copy())

    return {
        "build_paths": lambda impl: impl.build_paths(100.0, inc, 105.0),
        "drawdown_index": lambda impl: impl.drawdown_index(prices, run_max, 0.3),
        "laguerre": lambda impl: impl.laguerre(x, 5),
        "discounted_targets": lambda impl: impl.discounted_targets(value, ex_idx, steps // 2,
                                                                   0.1, 1.0 / steps),
        "laguerre+decide": decide,
        "crr_put(2000)": lambda impl: impl.crr_put(100.0, 110.0, u, p, disc, 2000),
        f"capped_lattice({lat})": lambda impl: impl.capped_lattice_put(
            100.0, 105.0, 110.0, ul, pl, dl, lat, 0.2, 30),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--paths", type=int, default=5000)
    ap.add_argument("--steps", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--skip-price", action="store_true")
    args = ap.parse_args(argv)

    if kernels.numba_impl is None:
        sys.exit("numba is not installed; nothing to compare")

    print(f"kernels on {args.paths} x {args.steps} (best of {args.repeat}, ms)")
    print(f"{'kernel':<22}{'numpy':>10}{'numba':>10}{'speedup':>9}")
    for name, case in kernel_cases(args.paths, args.steps).items():
        a = best_ms(lambda: case(kernels.numpy_impl), args.repeat)
        b = best_ms(lambda: case(kernels.numba_impl), args.repeat)
        print(f"{name:<22}{a:>10.2f}{b:>10.2f}{a / b:>8.1f}x")

    if args.skip_price:
        return
    print("\nfull pricing, fresh interpreter per backend")
    code = PRICE_SNIPPET.format(n=args.paths, L=args.steps)
    for flag in ("0", "1"):
        env = dict(os.environ, CAPPED_LSMC_DISABLE_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                             text=True, check=True).stdout.split()
        print(f"{out[0]:<8}{float(out[1]):>10.1f} ms  price={float(out[2]):.6f}")


if __name__ == "__main__":
    main()

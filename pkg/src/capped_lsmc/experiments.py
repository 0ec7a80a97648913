"""Experiment drivers behind the CLI: single prices, sweeps, timing, oracles."""

from __future__ import annotations

import csv
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import lsmc, oracles
from .config import RunConfig

SWEEP_VARS = ("cap_level", "s0", "rate_sigma")
RUN_SEED_TAG = 2

SWEEP_HEADER = ["record", "point", "cap_level", "s0", "s_bar", "rate", "sigma", "run", "seed",
                "price", "std_error", "mean", "sd", "min", "q1", "median", "q3", "max"]
BENCH_HEADER = ["n_paths", "mean_ms", "sd_ms"]
ORACLE_HEADER = ["oracle", "value", "s0", "s_bar", "strike", "maturity", "rate", "sigma",
                 "steps", "cap_level", "note"]


def run_seed(master: int, run: int) -> int:
    """Seed of repetition ``run``: first word of SeedSequence(master, spawn_key=(2, run)).

    Runs share seeds across sweep points (common random numbers), so the
    differences between points are not blurred by independent noise.
    """
    ss = np.random.SeedSequence(int(master), spawn_key=(RUN_SEED_TAG, int(run)))
    return int(ss.generate_state(1, np.uint64)[0])


def price_config(cfg: RunConfig, seed: int | None = None, workers: int = 1):
    return lsmc.price(cfg.market(), cfg.payoff_spec(), cfg.cap(), n_paths=cfg.n_paths,
                      n_steps=cfg.n_steps, n_basis=cfg.n_basis,
                      seed=cfg.seed if seed is None else seed, itm_only=cfg.itm_only,
                      alive_only=cfg.alive_only, workers=workers)


def run_price(cfg: RunConfig, fh) -> lsmc.PricingResult:
    res = price_config(cfg)
    res.write_csv(fh)
    return res


@dataclass
class SweepResult:
    rows: list = field(default_factory=list)
    summaries: list = field(default_factory=list)


def sweep_points(var: str, values=None, rates=None, sigmas=None):
    """Expand a sweep into a list of attribute override dicts."""
    if var == "cap_level":
        return [{"cap_kind": "drawdown", "cap_level": float(v)} for v in values]
    if var == "s0":
        return [{"s0": float(v), "s_bar": float(v)} for v in values]
    if var == "rate_sigma":
        return [{"rate": float(r), "sigma": float(s)} for r in rates for s in sigmas]
    raise ValueError(f"unknown sweep variable {var!r}; choose from {SWEEP_VARS}")


def _fmt(v):
    return "" if v is None else repr(float(v))


def _summary(prices):
    a = np.asarray(prices)
    sd = float(a.std(ddof=1)) if a.size > 1 else 0.0
    q1, med, q3 = np.percentile(a, [25, 50, 75])
    return [float(a.mean()), sd, float(a.min()), float(q1), float(med), float(q3),
            float(a.max())]


def run_sweep(cfg: RunConfig, points: list[dict], fh, n_runs: int | None = None,
              workers: int = 1) -> SweepResult:
    """Price ``n_runs`` repetitions at every point and stream CSV rows.

    Rows are written in (point, run) order as soon as each point completes; a
    summary row per point follows its run rows. On the first failure the
    completed rows stay flushed and the exception propagates.
    """
    if not points:
        raise ValueError("sweep needs at least one point")
    n_runs = cfg.n_runs if n_runs is None else n_runs
    seeds = [run_seed(cfg.seed, k) for k in range(n_runs)]
    configs = [cfg.replace(**pt) for pt in points]
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    out = SweepResult()
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        for i, pc in enumerate(configs):
            level = pc.cap_level if pc.cap_kind == "drawdown" else None
            head = [str(i), _fmt(level), _fmt(pc.s0), _fmt(pc.s_bar), _fmt(pc.rate),
                    _fmt(pc.sigma)]
            if pool is None:
                results = [price_config(pc, s) for s in seeds]
            else:
                results = list(pool.map(lambda s, pc=pc: price_config(pc, s), seeds))
            prices = []
            for k, (s, res) in enumerate(zip(seeds, results)):
                row = ["run"] + head + [str(k), str(s), repr(res.price), repr(res.std_error)]
                w.writerow(row + [""] * 7)
                out.rows.append((pt_values(pc), k, res.price, res.std_error))
                prices.append(res.price)
            stats = _summary(prices)
            w.writerow(["summary"] + head + ["", "", "", ""] + [repr(v) for v in stats])
            out.summaries.append((pt_values(pc), *stats))
            fh.flush()
    finally:
        if pool is not None:
            pool.shutdown()
    return out


def pt_values(cfg: RunConfig) -> dict:
    return {"cap_level": cfg.cap_level, "s0": cfg.s0, "s_bar": cfg.s_bar, "rate": cfg.rate,
            "sigma": cfg.sigma}


def run_bench(cfg: RunConfig, ladder, fh, repeats: int = 5) -> list[tuple[int, float, float]]:
    """Wall-clock per pricing at each path count; one warm-up run first."""
    ladder = [int(n) for n in ladder]
    if not ladder:
        raise ValueError("bench ladder must be nonempty")
    price_config(cfg.replace(n_paths=min(ladder)))
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(BENCH_HEADER)
    rows = []
    for n in ladder:
        c = cfg.replace(n_paths=n)
        times = []
        for k in range(repeats):
            t0 = time.perf_counter()
            price_config(c, run_seed(cfg.seed, k))
            times.append((time.perf_counter() - t0) * 1e3)
        a = np.asarray(times)
        row = (n, float(a.mean()), float(a.std(ddof=1)) if a.size > 1 else 0.0)
        rows.append(row)
        w.writerow([n, f"{row[1]:.3f}", f"{row[2]:.3f}"])
    return rows


def run_oracle(kind: str, cfg: RunConfig, fh, steps: int = 2000) -> float:
    """Dispatch to one oracle and emit a single CSV line with its inputs."""
    level = None
    note = ""
    if kind == "bs":
        value = oracles.bs_european_put(cfg.s0, cfg.strike, cfg.rate, cfg.sigma, cfg.maturity)
        steps_col = ""
    elif kind == "crr":
        value = oracles.crr_american_put(cfg.s0, cfg.strike, cfg.rate, cfg.sigma,
                                         cfg.maturity, steps)
        steps_col = str(steps)
    elif kind == "lattice":
        level = cfg.cap_level if cfg.cap_level is not None else 1.0
        value = oracles.lattice_capped_put(cfg.s0, cfg.s_bar, cfg.strike, cfg.rate, cfg.sigma,
                                           cfg.maturity, steps, level)
        steps_col = str(steps)
        note = "lattice filtration; exact running max"
    else:
        raise ValueError(f"unknown oracle {kind!r}; choose bs, crr or lattice")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(ORACLE_HEADER)
    w.writerow([kind, repr(float(value)), _fmt(cfg.s0), _fmt(cfg.s_bar), _fmt(cfg.strike),
                _fmt(cfg.maturity), _fmt(cfg.rate), _fmt(cfg.sigma), steps_col, _fmt(level),
                note])
    return float(value)

"""Command line: ``capped-lsmc {price,sweep,bench,oracle}``.

Every config key is also a flag (``cap_level`` -> ``--cap-level``). A
``--config`` file is read first, flags override it. Exit codes: 0 success,
2 invalid configuration, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import contextlib
import sys

from . import experiments
from .config import KEYS, ConfigError, build, convert, load


def _flag(key: str) -> str:
    return "--" + key.replace("_", "-")


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value config file")
    for key in KEYS:
        if key in ("itm_only", "alive_only"):
            p.add_argument(_flag(key), dest=key, nargs="?", const="true", default=None,
                           metavar="BOOL")
        else:
            p.add_argument(_flag(key), dest=key, default=None, metavar="VALUE")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError("points", f"cannot parse list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="capped-lsmc",
        description="LSMC pricing of drawdown- and randomly-capped American options.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("price", help="single pricing run")
    _add_config_flags(p)
    p.add_argument("--coef-out", help="write per-date regression coefficients here")

    p = sub.add_parser("sweep", help="repeat pricings over a parameter sweep")
    _add_config_flags(p)
    p.add_argument("--var", required=True, choices=experiments.SWEEP_VARS)
    p.add_argument("--points", help="comma separated values (cap_level, s0)")
    p.add_argument("--rates", help="comma separated rates (rate_sigma)")
    p.add_argument("--sigmas", help="comma separated sigmas (rate_sigma)")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("bench", help="wall-clock per pricing along a path-count ladder")
    _add_config_flags(p)
    p.add_argument("--ladder", default="1000,2000")
    p.add_argument("--repeats", type=int, default=5)

    p = sub.add_parser("oracle", help="reference price (bs, crr, lattice)")
    _add_config_flags(p)
    p.add_argument("--kind", required=True, choices=("bs", "crr", "lattice"))
    p.add_argument("--lattice-steps", type=int, default=2000)
    return parser


def config_from_args(args):
    from .config import RunConfig
    base = load(args.config) if args.config else RunConfig()
    values = {}
    for key, attr in KEYS.items():
        raw = getattr(args, key)
        if raw is not None:
            values[attr] = convert(key, raw)
    return build(values, base)


@contextlib.contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.command == "sweep":
            if args.var == "rate_sigma":
                if not args.rates or not args.sigmas:
                    raise ConfigError("rates", "rate_sigma sweep needs --rates and --sigmas")
                points = experiments.sweep_points(args.var, rates=_floats(args.rates),
                                                  sigmas=_floats(args.sigmas))
            else:
                if not args.points:
                    raise ConfigError("points", "sweep needs --points")
                points = experiments.sweep_points(args.var, _floats(args.points))
            # validate every point before any pricing starts
            for pt in points:
                cfg.replace(**pt)
    except ConfigError as exc:
        print(f"capped-lsmc: invalid config: {exc}", file=sys.stderr)
        return 2

    try:
        with _output(cfg.out) as fh:
            if args.command == "price":
                res = experiments.run_price(cfg, fh)
                if args.coef_out:
                    with open(args.coef_out, "w", encoding="utf-8", newline="") as cf:
                        res.write_coefficients(cf)
            elif args.command == "sweep":
                experiments.run_sweep(cfg, points, fh, workers=args.workers)
            elif args.command == "bench":
                experiments.run_bench(cfg, [int(v) for v in _floats(args.ladder)], fh,
                                      repeats=args.repeats)
            else:
                experiments.run_oracle(args.kind, cfg, fh, steps=args.lattice_steps)
    except ConfigError as exc:
        print(f"capped-lsmc: invalid config: {exc}", file=sys.stderr)
        return 2
    except (ValueError, MemoryError, ArithmeticError, OSError) as exc:
        print(f"capped-lsmc: error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())

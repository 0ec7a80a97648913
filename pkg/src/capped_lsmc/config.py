"""Run configuration: flat ``key=value`` files plus command-line overrides."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from .caps import CapSpec
from .market import MarketParams, PayoffSpec

# file key -> attribute name, in emission order
KEYS = {
    "s0": "s0",
    "s_bar": "s_bar",
    "strike": "strike",
    "maturity": "maturity",
    "rate": "rate",
    "sigma": "sigma",
    "lambda": "lam",
    "rho": "rho",
    "payoff": "payoff",
    "cap_kind": "cap_kind",
    "cap_level": "cap_level",
    "cap_rate": "cap_rate",
    "cap_shape": "cap_shape",
    "cap_time": "cap_time",
    "n_paths": "n_paths",
    "n_steps": "n_steps",
    "n_basis": "n_basis",
    "seed": "seed",
    "n_runs": "n_runs",
    "itm_only": "itm_only",
    "alive_only": "alive_only",
    "out": "out",
}

_FLOATS = {"s0", "s_bar", "strike", "maturity", "rate", "sigma", "lambda", "rho",
           "cap_level", "cap_rate", "cap_time"}
_INTS = {"cap_shape", "n_paths", "n_steps", "n_basis", "seed", "n_runs"}
_BOOLS = {"itm_only", "alive_only"}
_OPTIONAL = {"s_bar", "cap_level", "cap_rate", "cap_shape", "cap_time", "out"}


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending key."""

    def __init__(self, field: str, message: str):
        super().__init__(message if message.startswith(field) else f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class RunConfig:
    s0: float = 100.0
    s_bar: float | None = 105.0
    strike: float = 110.0
    maturity: float = 1.0
    rate: float = 0.1
    sigma: float = 0.4
    lam: float = 0.0
    rho: float = 0.5
    payoff: str = "put"
    cap_kind: str = "none"
    cap_level: float | None = None
    cap_rate: float | None = None
    cap_shape: int | None = None
    cap_time: float | None = None
    n_paths: int = 5000
    n_steps: int = 2000
    n_basis: int = 5
    seed: int = 0
    n_runs: int = 200
    itm_only: bool = False
    alive_only: bool = False
    out: str | None = None

    def __post_init__(self):
        self.validate()

    def validate(self):
        for key in ("n_paths", "n_steps", "n_basis", "n_runs"):
            if getattr(self, key) < 1:
                raise ConfigError(key, "must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed", "must be in [0, 2^64)")
        try:
            self.market()
        except ValueError as exc:
            field = str(exc).split()[0]
            raise ConfigError(field, str(exc)) from None
        try:
            PayoffSpec(self.payoff, self.strike)
        except ValueError as exc:
            raise ConfigError("payoff", str(exc)) from None
        try:
            self.cap()
        except ValueError as exc:
            msg = str(exc)
            field = msg.split()[0] if msg.startswith("cap_") else "cap_kind"
            raise ConfigError(field, msg) from None

    def market(self) -> MarketParams:
        return MarketParams(s0=self.s0, s_bar=self.s_bar, strike=self.strike,
                            maturity=self.maturity, rate=self.rate, sigma=self.sigma,
                            jump_intensity=self.lam, jump_rate=self.rho)

    def payoff_spec(self) -> PayoffSpec:
        return PayoffSpec(self.payoff, self.strike)

    def cap(self) -> CapSpec:
        return CapSpec(self.cap_kind, level=self.cap_level, rate=self.cap_rate,
                       shape=self.cap_shape, time=self.cap_time)

    def replace(self, **changes) -> RunConfig:
        return dataclasses.replace(self, **changes)

    def emit(self) -> str:
        lines = []
        for key, attr in KEYS.items():
            lines.append(f"{key}={_format(getattr(self, attr))}")
        return "\n".join(lines) + "\n"


def _format(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def convert(key: str, raw: str):
    """Typed value for one ``key=value`` pair; raises ConfigError."""
    if key not in KEYS:
        raise ConfigError(key, "unknown key")
    raw = raw.strip()
    if raw == "" and key in _OPTIONAL:
        return None
    try:
        if key in _FLOATS:
            v = float(raw)
            if not math.isfinite(v):
                raise ValueError
            return v
        if key in _INTS:
            return int(raw)
        if key in _BOOLS:
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError
    except ValueError:
        raise ConfigError(key, f"cannot parse {raw!r}") from None
    return raw


def parse(text: str, base: RunConfig | None = None) -> RunConfig:
    """Parse ``key=value`` lines (``#`` comments, blank lines allowed)."""
    values = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}", f"expected key=value, got {line!r}")
        key, raw = line.split("=", 1)
        key = key.strip()
        values[KEYS.get(key, key)] = convert(key, raw)
    return build(values, base)


def build(values: dict, base: RunConfig | None = None) -> RunConfig:
    """Apply attribute-name overrides on top of ``base`` (defaults if None)."""
    base = base or RunConfig()
    current = {attr: getattr(base, attr) for attr in KEYS.values()}
    for attr in values:
        if attr not in current:
            raise ConfigError(attr, "unknown key")
    current.update(values)
    return RunConfig(**current)


def load(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())

"""Run configuration: flat ``key = value`` files, overridable from the command line."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from ..games import BayesGameSpec, CostFunction, GameSpecError, NPGameSpec

KINDS = (
    "exponent_sweep_bayes",
    "exponent_sweep_np",
    "best_response_scan",
    "np_equilibrium",
    "check",
    "chernoff",
    "stein",
)
EXPONENT_MODES = ("pointwise", "slope")
_COST_ALIASES = {
    "abs": "scaled_absolute",
    "absolute": "scaled_absolute",
    "scaled_absolute": "scaled_absolute",
    "quad": "scaled_quadratic",
    "quadratic": "scaled_quadratic",
    "scaled_quadratic": "scaled_quadratic",
    "table": "tabulated",
    "tabulated": "tabulated",
}


class ConfigError(ValueError):
    pass


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _parse_int_list(text: str) -> tuple[int, ...]:
    parts = [t for t in text.replace(";", ",").split(",") if t.strip()]
    try:
        return tuple(int(t) for t in parts)
    except ValueError as exc:
        raise ConfigError(f"not a list of integers: {text!r}") from exc


def _parse_float_list(text: str) -> tuple[float, ...]:
    parts = [t for t in text.replace(";", ",").split(",") if t.strip()]
    try:
        return tuple(float(t) for t in parts)
    except ValueError as exc:
        raise ConfigError(f"not a list of numbers: {text!r}") from exc


def _optional(parse):
    def inner(text: str):
        if text.strip().lower() in ("", "none", "default"):
            return None
        return parse(text)

    return inner


def _cost_kind(text: str) -> str:
    try:
        return _COST_ALIASES[text.strip().lower()]
    except KeyError:
        raise ConfigError(f"unknown cost kind {text!r}") from None


def _choice(options):
    def inner(text: str) -> str:
        value = text.strip()
        if value not in options:
            raise ConfigError(f"{value!r} is not one of {options}")
        return value

    return inner


@dataclass
class RunConfig:
    kind: str = "exponent_sweep_bayes"
    p1: float = 0.5
    q_lo: float = 0.7
    q_hi: float = 0.9
    grid_size: int = 100
    gamma: float = 1.0
    epsilon: float = 0.1
    cost: str = "scaled_absolute"
    cost_scale: float = 1.0
    qstar: float = 0.8
    cost_points: tuple[float, ...] = ()
    cost_values: tuple[float, ...] = ()
    # None: resolved per kind (on for best-response scans, off otherwise)
    include_qstar: bool | None = None
    n: int | None = None
    n_values: tuple[int, ...] = ()
    n_start: int | None = None
    n_stop: int | None = None
    n_step: int | None = None
    window: int = 20
    q1: float | None = None
    exponent_mode: str = "pointwise"
    slope_window: int = 3
    tol: float = 1e-9
    jobs: int = 1
    timing: bool = False
    out_csv: str | None = None
    out_json: str | None = None
    resolved: bool = field(default=False, repr=False)

    def resolve(self) -> RunConfig:
        """Validate and fill every defaulted or derived parameter."""
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        if self.exponent_mode not in EXPONENT_MODES:
            raise ConfigError(f"exponent_mode must be one of {EXPONENT_MODES}")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        if self.window < 1:
            raise ConfigError("window must be >= 1")
        if self.slope_window < 2:
            raise ConfigError("slope_window must be >= 2")
        if not self.tol > 0:
            raise ConfigError("tol must be positive")
        out = dataclasses.replace(self)
        if out.include_qstar is None:
            out.include_qstar = out.kind == "best_response_scan"
        if out.q1 is None:
            out.q1 = out.qstar
        out.n_values = out._resolve_n_values()
        if out.n is None and out.n_values:
            out.n = out.n_values[-1]
        out.resolved = True
        # surface spec-level errors (Q, p, cost) at configuration time
        if out.kind not in ("chernoff", "stein"):
            out.bayes_spec(out.n or 1)
            if out.kind in ("exponent_sweep_np", "np_equilibrium"):
                out.np_spec(out.n or 1)
        return out

    def _resolve_n_values(self) -> tuple[int, ...]:
        if self.n_values:
            values = tuple(self.n_values)
        elif self.n_start is not None or self.n_stop is not None:
            if None in (self.n_start, self.n_stop):
                raise ConfigError("n_start and n_stop must be given together")
            step = self.n_step or 1
            if step < 1:
                raise ConfigError("n_step must be >= 1")
            values = tuple(range(self.n_start, self.n_stop + 1, step))
        elif self.n is not None:
            values = (self.n,)
        else:
            values = ()
        if self.kind in ("exponent_sweep_bayes", "exponent_sweep_np", "best_response_scan", "np_equilibrium"):
            if not values:
                raise ConfigError("no sample sizes given (use n, n_values or n_start/n_stop/n_step)")
        if any(v < 1 for v in values):
            raise ConfigError("sample sizes must be >= 1")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ConfigError("n_values must be strictly increasing")
        return values

    def cost_function(self) -> CostFunction:
        try:
            if self.cost == "tabulated":
                return CostFunction.tabulated(self.cost_points, self.cost_values)
            return CostFunction(self.cost, scale=self.cost_scale, qstar=self.qstar)
        except GameSpecError as exc:
            raise ConfigError(str(exc)) from exc

    def bayes_spec(self, n: int) -> BayesGameSpec:
        try:
            return BayesGameSpec(
                p1=self.p1,
                q_lo=self.q_lo,
                q_hi=self.q_hi,
                n=n,
                cost=self.cost_function(),
                grid_size=self.grid_size,
                include_qstar=bool(self.include_qstar),
                gamma=self.gamma,
            )
        except GameSpecError as exc:
            raise ConfigError(str(exc)) from exc

    def np_spec(self, n: int) -> NPGameSpec:
        try:
            return NPGameSpec(
                p1=self.p1,
                q_lo=self.q_lo,
                q_hi=self.q_hi,
                n=n,
                cost=self.cost_function(),
                grid_size=self.grid_size,
                include_qstar=bool(self.include_qstar),
                epsilon=self.epsilon,
            )
        except GameSpecError as exc:
            raise ConfigError(str(exc)) from exc

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d.pop("resolved")
        for key, value in d.items():
            if isinstance(value, tuple):
                d[key] = list(value)
        return d


PARSERS = {
    "kind": _choice(KINDS),
    "p1": float,
    "q_lo": float,
    "q_hi": float,
    "grid_size": int,
    "gamma": float,
    "epsilon": float,
    "cost": _cost_kind,
    "cost_scale": float,
    "qstar": float,
    "cost_points": _parse_float_list,
    "cost_values": _parse_float_list,
    "include_qstar": _optional(_parse_bool),
    "n": _optional(int),
    "n_values": _parse_int_list,
    "n_start": _optional(int),
    "n_stop": _optional(int),
    "n_step": _optional(int),
    "window": int,
    "q1": _optional(float),
    "exponent_mode": _choice(EXPONENT_MODES),
    "slope_window": int,
    "tol": float,
    "jobs": int,
    "timing": _parse_bool,
    "out_csv": _optional(str),
    "out_json": _optional(str),
}


def parse_value(key: str, text: str):
    if key not in PARSERS:
        raise ConfigError(f"unknown configuration key {key!r}")
    try:
        return PARSERS[key](text.strip())
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {text!r}") from exc


def parse_config_text(text: str) -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        values[key] = parse_value(key, value)
    return values


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    """Read a config file (if any), apply overrides, and return the unresolved config."""
    values = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        values.update(parse_config_text(text))
    for key, value in (overrides or {}).items():
        if key not in PARSERS:
            raise ConfigError(f"unknown configuration key {key!r}")
        values[key] = value
    return RunConfig(**values)

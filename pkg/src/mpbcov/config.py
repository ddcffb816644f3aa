"""Experiment configuration: an INI file with a fixed schema (see docs/config.md)."""

from __future__ import annotations

import configparser
import dataclasses
import hashlib
import json
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

KINDS = ("vacancy", "clt", "bounds", "critical-radius", "path")
DEFAULT_SEED = 0xC0FFEE
SEED_MAX = 2**64 - 1


class ConfigError(ValueError):
    pass


# --- value parsing --------------------------------------------------------------


def _parse_float(text: str) -> float:
    t = text.strip().lower()
    if t in ("inf", "+inf", "infinity"):
        return math.inf
    try:
        v = float(t)
    except ValueError:
        raise ValueError(f"not a number: {text!r}") from None
    if math.isnan(v):
        raise ValueError("nan is not allowed")
    return v


def _parse_int(text: str) -> int:
    t = text.strip().lower()
    try:
        return int(t, 0)
    except ValueError:
        raise ValueError(f"not an integer: {text!r}") from None


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _split(text: str) -> list[str]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ValueError("empty list")
    return parts


_TERM = re.compile(r"^([+-]?\d*\.?\d*(?:e[+-]?\d+)?)\*?(loglog|log)?$")


def parse_level(text: str) -> tuple[float, float, float]:
    """Parse ``a*log + b*loglog + c`` into ``(a, b, c)``.

    Terms are joined by ``+``; a bare ``log`` means ``1*log``. Used for
    coverage levels ``lambda*pi*r^2`` and threshold offsets ``c(lambda)``.
    """
    coef = {"log": 0.0, "loglog": 0.0, "": 0.0}
    body = re.sub(r"(?<!e)-", "+-", text.replace(" ", "").lower())
    terms = [t for t in body.split("+") if t]
    if not terms:
        raise ValueError(f"empty level expression {text!r}")
    for term in terms:
        m = _TERM.match(term)
        if not m or (m.group(1) in ("", "+", "-") and not m.group(2)):
            raise ValueError(f"bad term {term!r} in level expression {text!r}")
        num = m.group(1)
        value = float(num + "1") if num in ("", "+", "-") else float(num)
        coef[m.group(2) or ""] += value
    return coef["log"], coef["loglog"], coef[""]


def level_value(expr: str, lam: float) -> float:
    a, b, c = parse_level(expr)
    return a * math.log(lam) + b * math.log(math.log(lam)) + c


# --- schema ---------------------------------------------------------------------


@dataclass(frozen=True)
class _Key:
    section: str
    name: str
    parse: Callable[[str], Any]
    check: Callable[[Any], str | None] = lambda v: None
    is_list: bool = False


def _positive(v):
    return None if v > 0 else "must be > 0"


def _nonneg(v):
    return None if v >= 0 else "must be >= 0"


def _choice(*options):
    return lambda v: None if v in options else f"must be one of {', '.join(options)}"


def _each(check):
    def run(values):
        for v in values:
            msg = check(v)
            if msg:
                return msg
        return None

    return run


def _level_ok(v):
    try:
        parse_level(v)
    except ValueError as exc:
        return str(exc)
    return None


_SCHEMA: dict[str, _Key] = {}


def _add(section, name, parse, check=lambda v: None, is_list=False, attr=None):
    _SCHEMA[attr or name] = _Key(section, name, parse, check, is_list)


_add("experiment", "kind", str, _choice(*KINDS))
_add("experiment", "seed", _parse_int, lambda v: None if 0 <= v <= SEED_MAX else "must fit in 64 bits unsigned")
_add("experiment", "replications", _parse_int, lambda v: None if v >= 1 else "M >= 1")
_add("experiment", "write_rows", _parse_bool)

_add("model", "dim", _parse_int, lambda v: None if 1 <= v <= 3 else "must be 1, 2 or 3")
_add("model", "shape", str, _choice("disc", "square"))
_add("model", "size", _parse_float, _positive)
_add("model", "rho", _parse_float, _positive)
_add("model", "k", _parse_int, _each(lambda v: None if v >= 1 else "k >= 1"), is_list=True)
_add("model", "lambdas", _parse_float, _each(_positive), is_list=True)
_add("model", "scale_rule", str, _choice("rho", "fixed"))
_add("model", "scale", _parse_float, _positive)
_add("model", "boundary_mode", str, _choice("dilated", "hard", "torus"))
_add("model", "resolution", _parse_int, lambda v: None if v >= 2 else "resolution >= 2")
_add("model", "exact_1d", _parse_bool)

_add("checks", "mean_nse", _parse_float, _positive)
_add("checks", "variance_check", str, _choice("limit", "exact", "none"))
_add("checks", "variance_k", _parse_int, _each(lambda v: None if v >= 1 else "k >= 1"), is_list=True)
_add("checks", "variance_rtol", _parse_float, _positive)
_add("checks", "variance_nse", _parse_float, _positive)
_add("checks", "trend", _parse_bool)
_add("checks", "ks_slack", _parse_float, _nonneg)
_add("checks", "skew_max", _parse_float, _positive)
_add("checks", "kurtosis_max", _parse_float, _positive)
_add("checks", "bound_nse", _parse_float, _nonneg)

_add("clt", "target", str, _choice("area", "path"))

_add("bounds", "mode", str, _choice("bounds", "threshold"))
_add("bounds", "levels", str, _each(_level_ok), is_list=True)
_add("bounds", "c_rule", str, _level_ok)
_add("bounds", "interval", str, _choice("plugin", "wilson"))

_add("critical", "n_values", _parse_float, _each(lambda v: None if v > math.e else "n must exceed e"), is_list=True)
_add("critical", "tol", _parse_float, _positive)
_add("critical", "ratio_slack", _parse_float, _nonneg)

_add("path", "lambda", _parse_float, _positive, attr="path_lambda")
_add("path", "radius", _parse_float, _positive)
_add("path", "speed", _parse_float, _positive)
_add("path", "horizon", _parse_float, _positive)
_add("path", "mu0", _parse_float, _positive)
_add("path", "mu1", _parse_float, _positive)
_add("path", "parts", str, _each(_choice("a", "b", "c", "d", "e")), is_list=True)
_add("path", "deltas", _parse_float, _each(_positive), is_list=True)
_add("path", "a0", _parse_float, _each(_nonneg), is_list=True)
_add("path", "horizons", _parse_float, _each(_positive), is_list=True)
_add("path", "scaling_rtol", _parse_float, _positive)
_add("path", "long_rtol", _parse_float, _positive)


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment settings; every field has a documented default."""

    kind: str
    seed: int | None = None
    replications: int = 1000
    write_rows: bool = True

    dim: int = 2
    shape: str = "disc"
    size: float = 1.0
    rho: float = 1.0
    k: tuple[int, ...] = (1,)
    lambdas: tuple[float, ...] = (1000.0,)
    scale_rule: str = "rho"
    scale: float = 1.0
    boundary_mode: str = ""
    resolution: int = 2048
    exact_1d: bool = True

    mean_nse: float = 3.0
    variance_check: str = "limit"
    variance_k: tuple[int, ...] = ()
    variance_rtol: float = 0.10
    variance_nse: float = 4.0
    trend: bool = False
    ks_slack: float = 0.03
    skew_max: float = 0.2
    kurtosis_max: float = 0.5
    bound_nse: float = 3.0

    target: str = "area"

    mode: str = "bounds"
    levels: tuple[str, ...] = ("log", "log+2loglog", "log+6")
    c_rule: str = "3loglog"
    interval: str = "plugin"

    n_values: tuple[float, ...] = (1e3, 1e4, 1e5)
    tol: float = 1e-6
    ratio_slack: float = 0.05

    path_lambda: float = 50.0
    radius: float = 0.1
    speed: float = 1.0
    horizon: float = 1.0
    mu0: float = 1.0
    mu1: float = 1.0
    parts: tuple[str, ...] = ("a",)
    deltas: tuple[float, ...] = (0.1, 0.05, 0.02)
    a0: tuple[float, ...] = (0.0, 1.0, math.inf)
    horizons: tuple[float, ...] = (50.0, 100.0, 200.0)
    scaling_rtol: float = 0.15
    long_rtol: float = 0.10


    def __post_init__(self):
        if not self.boundary_mode:
            mode = "hard" if self.kind in ("bounds", "critical-radius") else "dilated"
            object.__setattr__(self, "boundary_mode", mode)
        if not self.variance_k:
            object.__setattr__(self, "variance_k", self.k)
        if self.kind in ("bounds", "critical-radius") and self.dim != 2:
            raise ConfigError("dim: bounds and critical-radius experiments are planar (dim = 2)")
        if self.kind == "critical-radius" and any(n < 16 for n in self.n_values):
            raise ConfigError("n_values: need n >= 16 so that log log n > 1")

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return dataclasses.replace(self, seed=seed)

    def effective(self) -> dict[str, dict[str, str]]:
        """Section -> key -> canonical text, including defaults."""
        out: dict[str, dict[str, str]] = {}
        for attr, key in _SCHEMA.items():
            value = getattr(self, attr)
            if attr == "seed" and value is None:
                continue
            out.setdefault(key.section, {})[key.name] = _format(value)
        return out

    def to_ini(self) -> str:
        lines = []
        for section, items in self.effective().items():
            lines.append(f"[{section}]")
            lines.extend(f"{k} = {v}" for k, v in items.items())
            lines.append("")
        return "\n".join(lines)

    def config_hash(self) -> str:
        """sha256 of the canonical effective config, seed excluded."""
        eff = self.effective()
        eff.get("experiment", {}).pop("seed", None)
        blob = json.dumps(eff, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "inf" if math.isinf(value) else repr(value)
    if isinstance(value, tuple):
        return ", ".join(_format(v) for v in value)
    return str(value)


def parse_config(text: str, source: str = "<string>") -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None, default_section="\x00none")
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    by_location = {(k.section, k.name): attr for attr, k in _SCHEMA.items()}
    sections = {k.section for k in _SCHEMA.values()}
    values: dict[str, Any] = {}
    for section in parser.sections():
        if section not in sections:
            raise ConfigError(f"{source}: unknown section [{section}]")
        for name, raw in parser.items(section):
            attr = by_location.get((section, name))
            if attr is None:
                raise ConfigError(f"{source}: unknown key '{name}' in [{section}]")
            key = _SCHEMA[attr]
            try:
                value = tuple(key.parse(p) for p in _split(raw)) if key.is_list else key.parse(raw)
            except ValueError as exc:
                raise ConfigError(f"{source}: key '{name}' in [{section}]: {exc}") from None
            msg = key.check(value)
            if msg:
                raise ConfigError(f"{source}: key '{name}' in [{section}]: {msg}")
            values[attr] = value
    if "kind" not in values:
        raise ConfigError(f"{source}: missing required key 'kind' in [experiment]")
    try:
        return ExperimentConfig(**values)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_config(path: str | Path) -> ExperimentConfig:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {p}") from None
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read config file {p}: {exc}") from None
    return parse_config(text, str(p))


def resolve_seed(cli_seed: int | None, env: dict[str, str], config: ExperimentConfig) -> int:
    """CLI flag > MPB_SEED > config file > 0xC0FFEE."""
    if cli_seed is not None:
        seed = cli_seed
    elif env.get("MPB_SEED", "").strip():
        try:
            seed = _parse_int(env["MPB_SEED"])
        except ValueError:
            raise ConfigError(f"MPB_SEED: not an integer: {env['MPB_SEED']!r}") from None
    elif config.seed is not None:
        seed = config.seed
    else:
        seed = DEFAULT_SEED
    if not 0 <= seed <= SEED_MAX:
        raise ConfigError("seed must fit in 64 bits unsigned")
    return seed

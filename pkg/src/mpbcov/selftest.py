"""Quick structural checks run by ``mpbcov selftest``."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from . import analytic
from .analytic import PBParams
from .config import ConfigError, parse_config
from .geometry import Region, ShapeSpec
from .simulator import (
    PathSpec,
    critical_radius_bracket,
    field_from_points,
    is_fully_k_covered,
    path_vacancy,
    realize_field,
    vacancy_grid,
)


def _expected_vacancy():
    return math.isclose(analytic.vacancy_fraction(1.0, 1), math.exp(-1), rel_tol=1e-15)


def _empty_field_vacancy():
    f = field_from_points(np.empty((0, 2)), ShapeSpec.disc(0.1), Region.unit_cube(2))
    return vacancy_grid(f, 1, 64).value == 1.0


def _k_above_count():
    f = field_from_points([[0.5, 0.5]], ShapeSpec.disc(2.0), Region.unit_cube(2))
    return vacancy_grid(f, 2, 64).value == 1.0


def _no_sensors_not_covered():
    f = field_from_points(np.empty((0, 2)), ShapeSpec.disc(0.1), Region.unit_cube(2))
    return not is_fully_k_covered(f, 1)


def _one_disc_not_covered():
    f = field_from_points([[0.5, 0.5]], ShapeSpec.disc(0.2), Region.unit_cube(2))
    return not is_fully_k_covered(f, 1)


def _brackets_nest():
    pts = np.random.default_rng(7).random((50, 2))
    a = critical_radius_bracket(pts, 1, 1e-4)
    b = critical_radius_bracket(pts, 1, 5e-5)
    return a[0] <= b[0] <= b[1] <= a[1]


def _path_empty():
    f = field_from_points(np.empty((0, 2)), ShapeSpec.disc(0.1), Region.box((-1, 2), (-1, 1)))
    return path_vacancy(f, "always-on", PathSpec(1.0, 1.0), 1).value == 1.0


def _path_k2_single():
    f = field_from_points([[0.5, 0.0]], ShapeSpec.disc(0.1), Region.box((-1, 2), (-1, 1)))
    return path_vacancy(f, "always-on", PathSpec(1.0, 1.0), 2).value == 1.0


def _rho_zero():
    return analytic.vacancy_limit(0.0, math.pi, 1, 2.5) == 2.5


def _zero_intensity():
    f = realize_field(PBParams(0.0, ShapeSpec.disc(0.1)), "dilated", 1, 0)
    return len(f.centers) == 0


def _same_stream():
    p = PBParams(100.0, ShapeSpec.disc(0.05))
    a = realize_field(p, "dilated", 5, 3).centers
    b = realize_field(p, "dilated", 5, 3).centers
    return np.array_equal(a, b)


def _config_defaults():
    c = parse_config("[experiment]\nkind = vacancy\n[model]\nlambdas = 100\nrho = 1\nk = 1\n")
    return c.resolution == 2048 and c.replications == 1000


def _config_rejects_k0():
    try:
        parse_config("[experiment]\nkind = vacancy\n[model]\nk = 0\n")
    except ConfigError as exc:
        return "k >= 1" in str(exc)
    return False


def _config_inf():
    c = parse_config("[experiment]\nkind = path\n[path]\na0 = 0, inf\n")
    return c.a0 == (0.0, math.inf)


CHECKS: dict[str, Callable[[], bool]] = {
    "expected vacancy at lambda*beta=1 is 1/e": _expected_vacancy,
    "no sensors: vacancy equals the region volume": _empty_field_vacancy,
    "k above the sensor count: vacancy equals the region volume": _k_above_count,
    "no sensors: not covered": _no_sensors_not_covered,
    "one interior disc: not covered": _one_disc_not_covered,
    "halving the tolerance nests the r* bracket": _brackets_nest,
    "path with no sensors: V_T = T": _path_empty,
    "path with one sensor and k=2: V_T = T": _path_k2_single,
    "rho = 0: limiting vacancy equals the volume": _rho_zero,
    "zero intensity: no sensors": _zero_intensity,
    "same (seed, index): identical fields": _same_stream,
    "config defaults: resolution 2048, M 1000": _config_defaults,
    "config rejects k = 0": _config_rejects_k0,
    "config parses a0 = inf": _config_inf,
}


def run_selftest() -> list[tuple[str, bool, str]]:
    out = []
    for name, fn in CHECKS.items():
        try:
            out.append((name, bool(fn()), ""))
        except Exception as exc:  # a crash counts as a failed check
            out.append((name, False, f"{type(exc).__name__}: {exc}"))
    return out

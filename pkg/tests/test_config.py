from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpbcov.config import (
    DEFAULT_SEED,
    ConfigError,
    ExperimentConfig,
    level_value,
    load_config,
    parse_config,
    parse_level,
    resolve_seed,
)

MINIMAL = """
[experiment]
kind = vacancy
seed = 7
[model]
lambdas = 100, 300, 1000
rho = 1
k = 1
"""


def test_minimal_vacancy_defaults():
    c = parse_config(MINIMAL)
    assert c.resolution == 2048 and c.replications == 1000
    assert c.lambdas == (100.0, 300.0, 1000.0) and c.k == (1,) and c.seed == 7
    assert c.boundary_mode == "dilated" and c.variance_k == (1,)


def test_boundary_default_depends_on_kind():
    assert parse_config("[experiment]\nkind = bounds\n").boundary_mode == "hard"
    assert parse_config("[experiment]\nkind = critical-radius\n").boundary_mode == "hard"
    assert parse_config("[experiment]\nkind = clt\n").boundary_mode == "dilated"


def test_k_zero_rejected():
    with pytest.raises(ConfigError, match="k >= 1"):
        parse_config(MINIMAL.replace("k = 1", "k = 0"))


def test_inf_token():
    c = parse_config("[experiment]\nkind = path\n[path]\na0 = 0, 1, inf\n")
    assert c.a0 == (0.0, 1.0, math.inf)


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("[experiment]\nkind = vacancy\nreplicatons = 5\n", "replicatons"),
        ("[experiment]\nkind = vacancy\n[extras]\nx = 1\n", "extras"),
        ("[experiment]\nkind = nope\n", "kind"),
        ("[experiment]\nreplications = 5\n", "kind"),
        ("[experiment]\nkind = vacancy\n[model]\nrho = abc\n", "rho"),
        ("[experiment]\nkind = bounds\n[bounds]\nlevels = log+x\n", "levels"),
        ("[experiment]\nkind = bounds\n[model]\ndim = 3\n", "dim"),
    ],
)
def test_errors_name_the_key(text, fragment):
    with pytest.raises(ConfigError, match=fragment):
        parse_config(text)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "absent.ini")


def test_round_trip_and_hash():
    c = parse_config(MINIMAL)
    again = parse_config(c.to_ini())
    assert again == c and again.config_hash() == c.config_hash()


def test_hash_ignores_seed_only():
    c = parse_config(MINIMAL)
    assert c.with_seed(99).config_hash() == c.config_hash()
    assert parse_config(MINIMAL.replace("rho = 1", "rho = 2")).config_hash() != c.config_hash()


def test_seed_precedence():
    c = parse_config(MINIMAL)
    assert resolve_seed(3, {"MPB_SEED": "5"}, c) == 3
    assert resolve_seed(None, {"MPB_SEED": "5"}, c) == 5
    assert resolve_seed(None, {}, c) == 7
    assert resolve_seed(None, {}, ExperimentConfig(kind="vacancy")) == DEFAULT_SEED == 0xC0FFEE
    with pytest.raises(ConfigError):
        resolve_seed(None, {"MPB_SEED": "x"}, c)


@pytest.mark.parametrize(
    "expr,lam,want",
    [
        ("log", 100.0, math.log(100)),
        ("log+2loglog", 100.0, math.log(100) + 2 * math.log(math.log(100))),
        ("log+6", 200.0, math.log(200) + 6),
        ("3loglog", 1000.0, 3 * math.log(math.log(1000))),
        ("0.5", 10.0, 0.5),
        ("log-1e-3", 10.0, math.log(10) - 1e-3),
        ("2.5e1-loglog", 100.0, 25 - math.log(math.log(100))),
    ],
)
def test_levels(expr, lam, want):
    assert level_value(expr, lam) == pytest.approx(want)


def test_bad_level():
    with pytest.raises(ValueError):
        parse_level("log*2")


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.integers(1, 5), min_size=1, max_size=3),
    st.lists(st.floats(1, 1e5, allow_nan=False), min_size=1, max_size=3),
    st.integers(2, 5000),
)
def test_round_trip_property(ks, lams, m):
    c = ExperimentConfig(kind="vacancy", k=tuple(ks), lambdas=tuple(lams), replications=m)
    assert parse_config(c.to_ini()) == c

from __future__ import annotations

import dataclasses
import math

import numpy as np
import pytest

from mpbcov import analytic
from mpbcov.config import ExperimentConfig
from mpbcov.experiments import (
    ks_threshold,
    map_replications,
    normality,
    run_bounds_check,
    run_clt_check,
    run_critical_radius_scaling,
    run_experiment,
    run_path_suite,
    run_vacancy_sweep,
    strictly_decreasing,
    summarize,
)
from mpbcov.geometry import ShapeSpec
from mpbcov.simulator import PathRegime, PathSpec, simulate_path_vacancy, stream


def _square(i):
    return i * i


class TestStatistics:
    def test_summarize_normal(self):
        x = np.random.default_rng(0).normal(2.0, 3.0, size=200_000)
        s = summarize(x)
        assert s["variance"] == pytest.approx(x.var(ddof=1))
        assert s["se"] == pytest.approx(math.sqrt(s["variance"] / len(x)))
        assert s["variance_se"] == pytest.approx(math.sqrt(2 / len(x)) * 9, rel=0.02)

    def test_summarize_needs_two(self):
        with pytest.raises(ValueError):
            summarize([1.0])

    def test_normality_on_gaussian(self):
        nm = normality(np.random.default_rng(1).standard_normal(5000))
        assert nm["ks"] < ks_threshold(5000, 0.0)
        assert abs(nm["skewness"]) < 0.1 and abs(nm["excess_kurtosis"]) < 0.2

    def test_ks_threshold(self):
        assert ks_threshold(2000, 0.03) == pytest.approx(1.63 / math.sqrt(2000) + 0.03)

    def test_strictly_decreasing(self):
        assert strictly_decreasing([3, 2, 1]) and not strictly_decreasing([3, 3, 1])

    def test_map_replications_order(self):
        assert map_replications(_square, 37, workers=3) == [i * i for i in range(37)]
        assert map_replications(_square, 5) == [0, 1, 4, 9, 16]


def _area(**kw):
    base = dict(kind="vacancy", replications=200, lambdas=(100.0,), resolution=256, k=(1, 2))
    base.update(kw)
    return ExperimentConfig(**base)


class TestVacancySweep:
    def test_small_run_passes(self):
        rep = run_vacancy_sweep(_area(variance_rtol=0.5), 7)
        assert rep.passed, [c.line() for c in rep.criteria if not c.passed]
        assert len(rep.rows) == 200 * 2
        assert rep.points[0]["by_k"]["1"]["analytic_mean"] == pytest.approx(math.exp(-math.pi))

    def test_lambda_ladder_trend(self):
        cfg = _area(lambdas=(100.0, 300.0, 1000.0), k=(1,), resolution=512, trend=True, variance_check="none")
        rep = run_vacancy_sweep(cfg, 3)
        trend = [c for c in rep.criteria if "decreases" in c.name]
        assert len(trend) == 1 and trend[0].passed

    def test_replications_guard(self):
        with pytest.raises(ValueError):
            run_vacancy_sweep(_area(replications=1), 1)

    def test_exact_variance_in_one_dimension(self):
        cfg = _area(dim=1, size=0.2, scale_rule="fixed", scale=1.0, lambdas=(3.0,), k=(1, 2, 3), replications=20_000,
                    variance_check="exact", write_rows=False)
        rep = run_vacancy_sweep(cfg, 11)
        assert rep.passed, [c.line() for c in rep.criteria if not c.passed]
        assert rep.rows == []
        k3 = rep.points[0]["by_k"]["3"]["analytic_mean"]
        assert k3 == pytest.approx(sum(analytic.expected_chi_m(1.2, m) for m in range(3)))

    def test_batched_and_per_replication_paths_agree_in_law(self):
        cfg = _area(dim=1, size=0.2, scale_rule="fixed", scale=1.0, lambdas=(3.0,), k=(1,), replications=4000,
                    variance_check="none")
        a = run_vacancy_sweep(cfg, 2).points[0]["by_k"]["1"]
        b = run_vacancy_sweep(dataclasses.replace(cfg, resolution=4096, exact_1d=False), 2).points[0]["by_k"]["1"]
        assert abs(a["mean"] - b["mean"]) < 4 * math.hypot(a["se"], b["se"]) + 2 / 4096

    def test_halving_resolution(self):
        cfg = _area(k=(1,), variance_check="none", replications=50)
        fine = run_vacancy_sweep(cfg, 5).points[0]
        coarse = run_vacancy_sweep(dataclasses.replace(cfg, resolution=128), 5).points[0]
        gap = abs(fine["by_k"]["1"]["mean"] - coarse["by_k"]["1"]["mean"])
        assert gap < fine["mean_error_bound"] + coarse["mean_error_bound"]

    def test_reproducible(self):
        a = run_vacancy_sweep(_area(replications=20), 99)
        b = run_vacancy_sweep(_area(replications=20), 99)
        assert a.to_dict() == b.to_dict() and a.rows == b.rows

    def test_workers_do_not_change_results(self):
        a = run_vacancy_sweep(_area(replications=30), 4, workers=1)
        b = run_vacancy_sweep(_area(replications=30), 4, workers=2)
        assert a.rows == b.rows and a.to_dict() == b.to_dict()


class TestClt:
    def test_zero_intensity_is_an_error(self):
        with pytest.raises(ValueError):
            run_clt_check(ExperimentConfig(kind="clt", lambdas=(0.0,), replications=10), 1)

    def test_small_run_reports_shape_statistics(self):
        rep = run_clt_check(ExperimentConfig(kind="clt", lambdas=(300.0,), replications=300, resolution=256), 3)
        names = [c.name for c in rep.criteria]
        assert any(n.startswith("KS distance") for n in names)
        assert any("skewness" in n for n in names) and any("kurtosis" in n for n in names)
        assert "ks_sample_standardised" in rep.points[0]["by_k"]["1"]


class TestBounds:
    def test_trivial_radii_are_bracketed(self):
        cfg = ExperimentConfig(kind="bounds", lambdas=(100.0,), levels=("0.5", "20"), replications=200, boundary_mode="dilated",
                               interval="wilson")
        rep = run_bounds_check(cfg, 1)
        assert rep.passed, [c.line() for c in rep.criteria]
        tiny, huge = rep.points
        assert tiny["p_vacant"] == 1.0 and huge["p_vacant"] == 0.0

    def test_plugin_interval_is_degenerate_at_zero(self):
        cfg = ExperimentConfig(kind="bounds", lambdas=(100.0,), levels=("20",), replications=50, boundary_mode="dilated")
        rep = run_bounds_check(cfg, 1)
        assert rep.points[0]["p_vacant"] == 0.0 and not rep.passed

    def test_threshold_mode_trend(self):
        cfg = ExperimentConfig(kind="bounds", mode="threshold", lambdas=(100.0, 1000.0), c_rule="3loglog", replications=100)
        rep = run_bounds_check(cfg, 2)
        assert len(rep.criteria) == 1 and "decreases" in rep.criteria[0].name

    def test_torus_rejected(self):
        with pytest.raises(ValueError):
            run_bounds_check(ExperimentConfig(kind="bounds", boundary_mode="torus", replications=2), 1)


class TestCriticalRadius:
    def test_small_ladder(self):
        cfg = ExperimentConfig(kind="critical-radius", n_values=(100.0, 1000.0), replications=20, k=(1, 2))
        rep = run_critical_radius_scaling(cfg, 3)
        assert len(rep.points) == 4 and len(rep.rows) == 80
        assert all(0 < p["mean_ratio"] < 5 for p in rep.points)

    def test_halved_tolerance_barely_moves_ratios(self):
        cfg = ExperimentConfig(kind="critical-radius", n_values=(200.0,), replications=10, k=(2,), tol=1e-6)
        a = run_critical_radius_scaling(cfg, 8).points[0]["mean_ratio"]
        b = run_critical_radius_scaling(dataclasses.replace(cfg, tol=5e-7), 8).points[0]["mean_ratio"]
        assert abs(a - b) / a < 1e-4


class TestPathSuite:
    def test_negative_a0_rejected(self):
        with pytest.raises(ValueError):
            run_path_suite(ExperimentConfig(kind="path", a0=(-1.0,), replications=10), 1)

    def test_mean_part(self):
        rep = run_path_suite(ExperimentConfig(kind="path", replications=2000, k=(1, 2)), 5)
        assert rep.passed, [c.line() for c in rep.criteria]
        assert {r[0] for r in rep.rows} == {"a"}

    def test_scaling_part_structure(self):
        cfg = ExperimentConfig(kind="path", parts=("b",), deltas=(0.2, 0.1), a0=(0.0, math.inf), replications=50, radius=1.0)
        rep = run_path_suite(cfg, 5)
        assert len(rep.points) == 4
        assert any("ordering" in c.name for c in rep.criteria)

    def test_long_horizon_structure(self):
        cfg = ExperimentConfig(kind="path", parts=("c", "d", "e"), horizons=(5.0, 10.0), replications=50)
        rep = run_path_suite(cfg, 5)
        assert [p["horizon"] for p in rep.points] == [5.0, 10.0]
        assert "mean_formula" in rep.points[0]["candidates"]

    def test_full_on_independent_of_a0(self):
        shape = ShapeSpec.disc(1.0, scale=0.1)
        path = PathSpec(1.0, 1.0)
        out = {}
        for a0 in (0.0, 1.0, math.inf):
            regime = PathRegime.for_a0(a0, 1.0, 0.1)
            v = [simulate_path_vacancy(100.0, shape, path, regime, (1,), stream(4, i))[0] for i in range(300)]
            out[a0] = np.var(v, ddof=1) / 0.1
        assert out[0.0] == out[1.0] == out[math.inf]


def test_dispatch():
    rep = run_experiment(ExperimentConfig(kind="path", replications=20), 1)
    assert rep.kind == "path"

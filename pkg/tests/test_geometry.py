from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpbcov.geometry import (
    GeometryError,
    Region,
    ShapeSpec,
    complement_intersection_mean,
    covers,
    crossing_points,
    crossings,
    interior_depth,
    overlap_at,
    pair_intersection_estimate,
    pair_intersection_mean,
    register_shape,
    sample_ppp,
)
from mpbcov.simulator import field_from_points

LENS_R1_D1 = 2 * math.pi / 3 - math.sqrt(3) / 2


class TestRegion:
    def test_unit_cube(self):
        r = Region.unit_cube(3)
        assert r.dims == 3 and r.volume == 1.0 and r.is_bounded

    def test_dilate(self):
        r = Region.unit_cube(2).dilate(0.1)
        assert r.lower == (-0.1, -0.1) and r.upper == (1.1, 1.1)
        assert r.volume == pytest.approx(1.44)

    @pytest.mark.parametrize("lo,hi", [((0.0,), (0.0,)), ((1.0, 0.0), (0.0, 1.0)), ((0,) * 4, (1,) * 4)])
    def test_degenerate_rejected(self, lo, hi):
        with pytest.raises(GeometryError):
            Region(lo, hi)

    def test_unbounded_cannot_be_sampled(self):
        with pytest.raises(GeometryError):
            sample_ppp(1.0, Region.unbounded(2), np.random.default_rng(0))


class TestShape:
    def test_disc_beta_tau(self):
        s = ShapeSpec.disc(2.0)
        assert s.beta == pytest.approx(4 * math.pi) and s.tau == 2.0

    def test_square_beta_tau(self):
        s = ShapeSpec.square(1.0, dim=3)
        assert s.beta == 1.0 and s.tau == pytest.approx(math.sqrt(3) / 2)

    def test_ball_volume_3d(self):
        assert ShapeSpec.disc(1.0, dim=3).beta == pytest.approx(4 * math.pi / 3)

    def test_scaling(self):
        s = ShapeSpec.disc(1.0, scale=0.1)
        assert s.scaled_beta == pytest.approx(math.pi * 0.01)
        assert s.scaled_tau == pytest.approx(0.1)

    @pytest.mark.parametrize("bad", [0.0, -1.0])
    def test_bad_size(self, bad):
        with pytest.raises(GeometryError):
            ShapeSpec.disc(bad)

    def test_generic_needs_sampler(self):
        with pytest.raises(GeometryError):
            ShapeSpec.generic("nope-not-registered", 1.0, 1.0)

    def test_tau_must_enclose_shape(self):
        with pytest.raises(GeometryError):
            ShapeSpec("disc", 1.0, 2, 1.0, tau=0.5)


class TestCovers:
    def test_center(self):
        assert covers((0.3, 0.3), (0.3, 0.3), ShapeSpec.disc(0.1))

    def test_closed_boundary(self):
        assert covers((0.1, 0.0), (0.0, 0.0), ShapeSpec.disc(0.1))

    def test_just_outside(self):
        assert not covers((0.1000001, 0.0), (0.0, 0.0), ShapeSpec.disc(0.1))


class TestSampling:
    def test_zero_intensity(self):
        s = sample_ppp(0.0, Region.unit_cube(2), np.random.default_rng(1))
        assert len(s) == 0

    def test_nonfinite_intensity(self):
        with pytest.raises(GeometryError):
            sample_ppp(math.inf, Region.unit_cube(2), np.random.default_rng(1))

    def test_hard_mean_count(self):
        rng = np.random.default_rng(2024)
        counts = [len(sample_ppp(100.0, Region.unit_cube(2), rng)) for _ in range(10_000)]
        assert abs(np.mean(counts) - 100) < 0.3
        s = sample_ppp(100.0, Region.unit_cube(2), rng)
        assert np.all((s.points >= 0) & (s.points <= 1))

    def test_dilated_region_and_count(self):
        rng = np.random.default_rng(7)
        counts = []
        for _ in range(4000):
            s = sample_ppp(50.0, Region.unit_cube(2), rng, "dilated", margin=0.1)
            counts.append(len(s))
        assert s.region.lower == (-0.1, -0.1) and s.region.upper == (1.1, 1.1)
        assert np.all((s.points >= -0.1) & (s.points <= 1.1))
        assert abs(np.mean(counts) - 72.0) < 3 * math.sqrt(72.0 / 4000)

    def test_seeded_determinism(self):
        a = sample_ppp(30.0, Region.unit_cube(2), np.random.default_rng(5)).points
        b = sample_ppp(30.0, Region.unit_cube(2), np.random.default_rng(5)).points
        assert np.array_equal(a, b)


class TestOverlap:
    def test_disc_full(self):
        assert pair_intersection_mean(ShapeSpec.disc(1.0), [0, 0]) == pytest.approx(math.pi)

    def test_disc_tangent(self):
        assert pair_intersection_mean(ShapeSpec.disc(1.0), [2, 0]) == pytest.approx(0.0, abs=1e-15)

    def test_disc_lens(self):
        assert pair_intersection_mean(ShapeSpec.disc(1.0), [0, 1]) == pytest.approx(LENS_R1_D1, rel=1e-12)
        assert LENS_R1_D1 == pytest.approx(1.22837, abs=1e-5)

    def test_lens_against_hit_sampling(self):
        est = pair_intersection_estimate(ShapeSpec.disc(1.0), [1.0, 0.0], samples=1_000_000, rng=np.random.default_rng(3))
        assert abs(est.value - LENS_R1_D1) < 3 * est.stderr

    def test_complement(self):
        s = ShapeSpec.disc(1.0)
        assert complement_intersection_mean(s, [0, 0]) == pytest.approx(0.0)
        assert complement_intersection_mean(s, [3, 0]) == pytest.approx(math.pi)
        assert complement_intersection_mean(s, [1, 0]) == pytest.approx(1.91322, abs=1e-5)

    def test_random_separations_match_hit_sampling(self):
        rng = np.random.default_rng(11)
        shape = ShapeSpec.disc(1.0)
        for _ in range(20):
            y = rng.uniform(-1.4, 1.4, size=2)
            est = pair_intersection_estimate(shape, y, samples=1_000_000, rng=rng)
            assert abs(est.value - pair_intersection_mean(shape, y)) < 3 * est.stderr + 1e-12

    @pytest.mark.parametrize("dim", [1, 3])
    def test_other_dimensions_against_hit_sampling(self, dim):
        shape = ShapeSpec.disc(1.0, dim=dim)
        y = np.zeros(dim)
        y[0] = 0.7
        est = pair_intersection_estimate(shape, y, samples=1_000_000, rng=np.random.default_rng(dim))
        assert abs(est.value - pair_intersection_mean(shape, y)) < 3 * est.stderr

    def test_square_rectangle_overlap(self):
        s = ShapeSpec.square(1.0)
        assert pair_intersection_mean(s, [0.25, 0.5]) == pytest.approx(0.75 * 0.5)

    def test_generic_shape_via_oracle(self):
        register_shape("unit-disc-oracle", lambda off: np.einsum("ij,ij->i", off, off) <= 1.0)
        g = ShapeSpec.generic("unit-disc-oracle", tau=1.0, beta=math.pi)
        assert pair_intersection_mean(g, [1.0, 0.0]) == pytest.approx(LENS_R1_D1, abs=0.02)
        assert pair_intersection_mean(g, [2.5, 0.0]) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(GeometryError):
            pair_intersection_mean(ShapeSpec.disc(1.0), [1.0, 0.0, 0.0])

    @settings(max_examples=60, deadline=None)
    @given(
        kind=st.sampled_from(["disc", "square"]),
        dim=st.integers(1, 3),
        a=st.floats(0, 3),
        b=st.floats(0, 3),
    )
    def test_monotone_in_distance(self, kind, dim, a, b):
        shape = ShapeSpec(kind, 1.0, dim)
        near, far = sorted((a, b))
        y_near = np.zeros((1, dim))
        y_far = np.zeros((1, dim))
        y_near[0, 0], y_far[0, 0] = near, far
        assert overlap_at(shape, y_far)[0] <= overlap_at(shape, y_near)[0] + 1e-15
        assert 0 <= overlap_at(shape, y_near)[0] <= shape.beta + 1e-12


class TestCrossings:
    def test_empty_and_single_interior(self):
        r = Region.unit_cube(2)
        assert crossings(field_from_points(np.empty((0, 2)), ShapeSpec.disc(0.1), r)) == []
        assert crossings(field_from_points([[0.5, 0.5]], ShapeSpec.disc(0.1), r)) == []

    def test_two_unit_circles(self):
        dd, db = crossing_points(np.array([[0.0, 0.0], [1.0, 0.0]]), 1.0, Region.unbounded(2))
        assert len(db) == 0
        got = sorted(map(tuple, dd), key=lambda p: p[1])
        h = math.sqrt(3) / 2
        assert got[0] == pytest.approx((0.5, -h)) and got[1] == pytest.approx((0.5, h))

    def test_disc_on_edge(self):
        f = field_from_points([[0.0, 0.5]], ShapeSpec.disc(0.2), Region.unit_cube(2))
        pts = sorted(c.point for c in crossings(f))
        assert [c.kind for c in crossings(f)] == ["disc-boundary"] * 2
        assert pts[0] == pytest.approx((0.0, 0.3)) and pts[1] == pytest.approx((0.0, 0.7))

    def test_tangent_counted_once(self):
        dd, _ = crossing_points(np.array([[0.25, 0.5], [0.75, 0.5]]), 0.25, Region.unit_cube(2))
        assert len(dd) == 1

    def test_counts_bounded_on_random_fields(self):
        rng = np.random.default_rng(8)
        r = Region.unit_cube(2)
        for n in (5, 20, 60):
            centers = rng.random((n, 2))
            dd, db = crossing_points(centers, 0.15, r)
            touching = np.sum(np.minimum.reduce([centers[:, 0], 1 - centers[:, 0], centers[:, 1], 1 - centers[:, 1]]) <= 0.15)
            assert len(dd) <= n * (n - 1)
            assert len(db) <= 8 * touching

    def test_interior_depth_is_strict(self):
        centers = np.array([[0.0, 0.0]])
        assert interior_depth([[0.1, 0.0]], centers, 0.1)[0] == 0
        assert interior_depth([[0.1 - 1e-9, 0.0]], centers, 0.1)[0] == 1
        assert interior_depth([[0.1 - 1e-13, 0.0]], centers, 0.1)[0] == 0

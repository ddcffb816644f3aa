"""Realise PB / MPB fields and measure their vacancy, coverage and critical radius.

Random streams
--------------
Every replication draws from its own generator,
``PCG64(SeedSequence(entropy=seed, spawn_key=(*stream_key, index)))``.
``SeedSequence`` hashes the entropy and spawn key into the PCG64 state, so
streams for different indices are independent and a replication's output
does not depend on which worker ran it or in which order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.spatial import Delaunay, QhullError, cKDTree
from scipy.stats import binom

from . import _kernels
from .analytic import PBParams
from .dynamics import OnOffParams, OnOffTrajectory, sample_on_intervals
from .geometry import (
    GeometryError,
    PointSample,
    Region,
    ShapeSpec,
    as_points,
    circle_pair_points,
    interior_depth,
    region_corners,
    sample_ppp,
)

MAX_GRID_CELLS = 2**32
COVER_TOL = 1e-12


def stream(seed: int, *key: int) -> np.random.Generator:
    """Generator for ``(seed, *key)``; see the module docstring."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class SensorField:
    sample: PointSample
    shape: ShapeSpec
    k: int
    region: Region

    @property
    def centers(self) -> np.ndarray:
        return self.sample.points

    def measuring_centers(self) -> np.ndarray:
        """Centres to rasterise; torus fields get periodic ghost copies."""
        pts = self.sample.points
        if self.sample.boundary_mode != "torus" or len(pts) == 0:
            return pts
        reach = self.shape.scaled_tau
        lo = np.asarray(self.region.lower)
        side = np.asarray(self.region.sides)
        out = [pts]
        d = pts.shape[1]
        for shift in np.array(np.meshgrid(*[[-1, 0, 1]] * d)).reshape(d, -1).T:
            if not shift.any():
                continue
            moved = pts + shift * side
            near = np.all((moved >= lo - reach) & (moved <= lo + side + reach), axis=1)
            out.append(moved[near])
        return np.concatenate(out)


def realize_field(
    params: PBParams,
    boundary_mode: str,
    seed: int,
    replication_index: int,
    stream_key: Sequence[int] = (),
) -> SensorField:
    rng = stream(seed, *stream_key, replication_index)
    return realize_field_rng(params, boundary_mode, rng)


def realize_field_rng(params: PBParams, boundary_mode: str, rng: np.random.Generator) -> SensorField:
    sample = sample_ppp(params.lam, params.region, rng, boundary_mode, margin=params.shape.scaled_tau)
    return SensorField(sample, params.shape, params.k, params.region)


def field_from_points(points, shape: ShapeSpec, region: Region, k: int = 1, boundary_mode: str = "hard") -> SensorField:
    pts = as_points(points, region.dims)
    return SensorField(PointSample(pts, math.nan, region, boundary_mode, region), shape, k, region)


# --- area vacancy --------------------------------------------------------------


class VacancyMeasurement(NamedTuple):
    value: float
    method: str
    error_bound: float


class GridDepth(NamedTuple):
    """Cell counts per coverage depth (last slot: depth >= cap) on a uniform grid."""

    histogram: np.ndarray
    boundary_cells: int
    total_cells: int
    cell_volume: float

    def vacancy(self, k: int) -> float:
        if k >= len(self.histogram):
            raise ValueError(f"histogram only resolves depths below {len(self.histogram) - 1}")
        return float(self.histogram[:k].sum()) * self.cell_volume

    @property
    def error_bound(self) -> float:
        return self.boundary_cells * self.cell_volume


def _grid_axes(region: Region, resolution: int):
    lo = np.asarray(region.lower)
    step = np.asarray(region.sides) / resolution
    return lo, step


def _generic_depth(field: SensorField, resolution: int) -> tuple[np.ndarray, int]:
    region = field.region
    shape = field.shape
    d = region.dims
    lo, step = _grid_axes(region, resolution)
    depth = np.zeros((resolution,) * d, dtype=np.int32)
    ambiguous = np.zeros((resolution,) * d, dtype=bool)
    reach = shape.scaled_tau
    for c in field.measuring_centers():
        a = np.maximum(np.floor((c - reach - lo) / step).astype(int), 0)
        b = np.minimum(np.floor((c + reach - lo) / step).astype(int), resolution - 1)
        if np.any(a > b):
            continue
        idx = [np.arange(a[i], b[i] + 1) for i in range(d)]
        mesh = np.meshgrid(*idx, indexing="ij")
        cell_lo = np.stack([lo[i] + mesh[i] * step[i] for i in range(d)], axis=-1)
        mids = cell_lo + step / 2
        sl = tuple(slice(a[i], b[i] + 1) for i in range(d))
        flat_mid = mids.reshape(-1, d) - c
        inside = shape.contains(flat_mid).reshape(mesh[0].shape)
        depth[sl] += inside
        near_off = np.clip(c, cell_lo, cell_lo + step) - c
        far_off = np.maximum(np.abs(cell_lo - c), np.abs(cell_lo + step - c))
        if shape.kind == "disc":
            r = shape.scaled_size
            nearest = np.linalg.norm(near_off, axis=-1)
            farthest = np.linalg.norm(far_off, axis=-1)
            amb = (nearest <= r) & (farthest > r)
        elif shape.kind == "square":
            h = shape.scaled_size / 2
            meets = np.all(np.abs(near_off) <= h, axis=-1)
            inside_all = np.all(far_off <= h, axis=-1)
            amb = meets & ~inside_all
        else:
            # corner vote; adequate for shapes without features finer than a cell
            votes = [inside]
            for corner in np.array(np.meshgrid(*[[0, 1]] * d)).reshape(d, -1).T:
                pts = (cell_lo + corner * step).reshape(-1, d) - c
                votes.append(shape.contains(pts).reshape(mesh[0].shape))
            stack = np.stack(votes)
            amb = stack.any(axis=0) & ~stack.all(axis=0)
        ambiguous[sl] |= amb
    return depth, int(ambiguous.sum())


def grid_depth(field: SensorField, resolution: int, cap: int | None = None) -> GridDepth:
    """Midpoint-rule depth histogram of ``field`` on a ``resolution^d`` grid.

    ``boundary_cells`` counts cells met by some shape boundary; only those
    cells can be misclassified by their midpoint, so
    ``boundary_cells * cell_volume`` bounds the error of every vacancy read
    off the histogram.
    """
    region = field.region
    d = region.dims
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    if resolution**d > MAX_GRID_CELLS:
        raise ValueError(f"resolution^{d} = {resolution**d} exceeds the 2^32 cell guard")
    cap = max(field.k, 1) if cap is None else cap
    lo, step = _grid_axes(region, resolution)
    total = resolution**d
    cell_volume = region.volume / total
    centers = field.measuring_centers()
    if len(centers) == 0:
        hist = np.zeros(cap + 1, dtype=np.int64)
        hist[0] = total
        return GridDepth(hist, 0, total, cell_volume)
    if d == 2 and field.shape.kind in ("disc", "square"):
        kind = _kernels.DISC if field.shape.kind == "disc" else _kernels.SQUARE
        depth, boundary = _kernels.rasterize_2d(
            np.ascontiguousarray(centers, dtype=np.float64),
            kind,
            field.shape.scaled_size,
            lo[0],
            lo[1],
            step[0],
            step[1],
            resolution,
            resolution,
        )
        hist = _kernels.depth_histogram(depth, cap)
    else:
        depth, boundary = _generic_depth(field, resolution)
        hist = np.bincount(np.minimum(depth.ravel(), cap), minlength=cap + 1).astype(np.int64)
    return GridDepth(hist, int(boundary), total, cell_volume)


def vacancy_grid(field: SensorField, k: int, resolution: int) -> VacancyMeasurement:
    gd = grid_depth(field, resolution, cap=k)
    return VacancyMeasurement(gd.vacancy(k), f"grid({resolution})", gd.error_bound)


def interval_vacancy_1d(centers: np.ndarray, half_width: float, lo: float, hi: float, k: int) -> float:
    """Exact length of ``{x in [lo, hi]: fewer than k intervals cover x}``."""
    c = np.asarray(centers, dtype=float).reshape(-1)
    a = np.clip(c - half_width, lo, hi)
    b = np.clip(c + half_width, lo, hi)
    keep = b > a
    edges, depth = depth_pieces(a[keep] - lo, b[keep] - lo, hi - lo)
    return float(np.diff(edges)[depth < k].sum())


def interval_vacancy_batch(
    counts: np.ndarray, positions: np.ndarray, half_width: float, lo: float, hi: float, ks: Sequence[int]
) -> np.ndarray:
    """Exact 1-D k-vacancy for many replications at once.

    ``counts[r]`` points of ``positions`` (concatenated in replication order)
    belong to replication ``r``. Returns an array of shape (len(ks), reps).
    """
    reps = len(counts)
    owner = np.repeat(np.arange(reps), counts)
    a = np.clip(positions - half_width, lo, hi)
    b = np.clip(positions + half_width, lo, hi)
    # each replication gets sentinels at lo and hi with zero weight; since a
    # replication's +1/-1 events cancel, a global cumsum restarts at 0 per rep
    t = np.concatenate([a, b, np.full(reps, lo), np.full(reps, hi)])
    delta = np.concatenate([np.ones_like(a), -np.ones_like(b), np.zeros(reps), np.zeros(reps)])
    rep = np.concatenate([owner, owner, np.arange(reps), np.arange(reps)])
    # sentinel at lo first, sentinel at hi last, starts before ends on ties
    rank = np.concatenate([np.ones_like(a), np.full_like(b, 2.0), np.zeros(reps), np.full(reps, 3.0)])
    order = np.lexsort((rank, t, rep))
    t, delta, rep = t[order], delta[order], rep[order]
    level = np.cumsum(delta)
    gap = np.diff(t)
    same = rep[1:] == rep[:-1]
    out = np.empty((len(ks), reps))
    for i, k in enumerate(ks):
        w = np.where(same & (level[:-1] < k), gap, 0.0)
        out[i] = np.bincount(rep[:-1], weights=w, minlength=reps)
    return out


# --- exact complete coverage ---------------------------------------------------


def _planar_disc_field(field: SensorField) -> None:
    if field.shape.dim != 2 or field.shape.kind != "disc":
        raise GeometryError("exact coverage test needs discs in the plane")
    if field.sample.boundary_mode == "torus":
        raise GeometryError("exact coverage test does not support torus fields")


def is_fully_k_covered(field: SensorField, k: int | None = None) -> bool:
    """True iff every point of the region lies inside at least ``k`` discs.

    Uses the crossing characterisation: corners, disc/edge crossings and
    disc/disc crossings must all be strict interior points of >= k discs.
    """
    _planar_disc_field(field)
    k = field.k if k is None else k
    return disc_cover_test(field.centers, field.shape.scaled_size, k, field.region)


def disc_cover_test(centers: np.ndarray, radius: float, k: int, region: Region, tol: float = COVER_TOL) -> bool:
    pts = np.ascontiguousarray(np.asarray(centers, dtype=np.float64).reshape(-1, 2))
    (x0, y0), (x1, y1) = region.lower, region.upper
    return bool(_kernels.fully_k_covered(pts, float(radius), int(k), x0, y0, x1, y1, tol))


def disc_cover_test_reference(
    centers: np.ndarray, radius: float, k: int, region: Region, tol: float = COVER_TOL
) -> bool:
    """Same decision as :func:`disc_cover_test` built from KD-tree queries."""
    from .geometry import crossing_points

    centers = np.asarray(centers, dtype=float).reshape(-1, 2)
    if len(centers) == 0:
        return False
    dd, db = crossing_points(centers, radius, region)
    cand = np.concatenate([region_corners(region), dd, db])
    return bool(np.all(interior_depth(cand, centers, radius, tol) >= k))


def _covering_radius_exact(points: np.ndarray, region: Region) -> float:
    """max over the box of the distance to the nearest point (k = 1)."""
    corners = region_corners(region)
    cand = [corners]
    (x0, y0), (x1, y1) = region.lower, region.upper
    n = len(points)
    edges = None
    if n >= 3:
        try:
            tri = Delaunay(points)
        except QhullError:
            tri = None
        if tri is not None:
            s = tri.simplices
            a, b, c = points[s[:, 0]], points[s[:, 1]], points[s[:, 2]]
            # circumcentres of Delaunay triangles are the Voronoi vertices
            d = 2 * (a[:, 0] * (b[:, 1] - c[:, 1]) + b[:, 0] * (c[:, 1] - a[:, 1]) + c[:, 0] * (a[:, 1] - b[:, 1]))
            ok = np.abs(d) > 0
            a2, b2, c2 = (a**2).sum(1), (b**2).sum(1), (c**2).sum(1)
            ux = (a2 * (b[:, 1] - c[:, 1]) + b2 * (c[:, 1] - a[:, 1]) + c2 * (a[:, 1] - b[:, 1]))[ok] / d[ok]
            uy = (a2 * (c[:, 0] - b[:, 0]) + b2 * (a[:, 0] - c[:, 0]) + c2 * (b[:, 0] - a[:, 0]))[ok] / d[ok]
            cc = np.stack([ux, uy], axis=1)
            cand.append(cc[region.contains(cc)])
            # a boundary Voronoi point z has d_1(z) <= r*, so its generators lie
            # within the probe-grid upper bound of the boundary
            reach = _kth_distance_bracket(points, 1, region, 64)[1]
            gap = np.minimum.reduce([points[:, 0] - x0, x1 - points[:, 0], points[:, 1] - y0, y1 - points[:, 1]])
            near = gap <= reach
            e = np.concatenate([s[:, [0, 1]], s[:, [1, 2]], s[:, [0, 2]]])
            e = e[near[e[:, 0]] | near[e[:, 1]]]
            edges = np.unique(np.sort(e, axis=1), axis=0)
    if edges is None:
        ii, jj = np.triu_indices(n, 1)
        edges = np.stack([ii, jj], axis=1)
    if len(edges):
        p, q = points[edges[:, 0]], points[edges[:, 1]]
        mid = (p + q) / 2
        nrm = q - p
        # bisector {x : (x - mid) . nrm = 0} against the four boundary lines
        for axis, vals, other_lo, other_hi in ((0, (x0, x1), y0, y1), (1, (y0, y1), x0, x1)):
            o = 1 - axis
            for v in vals:
                den = nrm[:, o]
                good = den != 0
                along = mid[good, o] - (v - mid[good, axis]) * nrm[good, axis] / den[good]
                keep = (along >= other_lo) & (along <= other_hi)
                pts = np.empty((int(keep.sum()), 2))
                pts[:, axis] = v
                pts[:, o] = along[keep]
                cand.append(pts)
    cand = np.concatenate(cand)
    dist, _ = cKDTree(points).query(cand, k=1)
    return float(dist.max())


def _kth_distance_bracket(points: np.ndarray, k: int, region: Region, probes: int) -> tuple[float, float]:
    """Bracket of max_x d_k(x) from a probe grid (d_k is 1-Lipschitz)."""
    lo, step = _grid_axes(region, probes)
    axes = [lo[i] + (np.arange(probes) + 0.5) * step[i] for i in range(2)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 2)
    cand = np.concatenate([grid, region_corners(region)])
    dist, _ = cKDTree(points).query(cand, k=[k])
    lower = float(dist.max())
    return lower, lower + 0.5 * float(np.hypot(*step)) + 1e-9


def critical_radius_bracket(
    points, k: int = 1, tol: float = 1e-6, region: Region | None = None, probes: int = 64
) -> tuple[float, float]:
    """Bisection bracket ``(lo, hi)`` for r*: ``hi`` covers, ``lo`` does not."""
    region = Region.unit_cube(2) if region is None else region
    pts = as_points(points, 2)
    if len(pts) == 0:
        raise ValueError("r* is undefined for an empty point set")
    if len(pts) < k:
        raise ValueError(f"{len(pts)} points cannot k-cover anything for k={k}")
    if not tol > 0:
        raise ValueError("tol must be positive")
    lo, hi = _kth_distance_bracket(pts, k, region, probes)
    lo = max(lo - 1e-9, 0.0)
    if not disc_cover_test(pts, hi, k, region):
        raise RuntimeError("upper bracket failed to cover; geometry tolerance too tight")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if disc_cover_test(pts, mid, k, region):
            hi = mid
        else:
            lo = mid
    return lo, hi


def critical_radius_star(
    points, k: int = 1, tol: float = 1e-6, region: Region | None = None, method: str = "auto"
) -> float:
    """Smallest disc radius at which ``points`` completely k-cover the region.

    ``method="bisection"`` bisects with the exact crossing test;
    ``method="voronoi"`` (k=1 only) takes the exact covering radius from the
    Delaunay triangulation. ``"auto"`` uses voronoi for k=1.
    """
    region = Region.unit_cube(2) if region is None else region
    pts = as_points(points, 2)
    if len(pts) == 0:
        raise ValueError("r* is undefined for an empty point set")
    if method == "auto":
        method = "voronoi" if k == 1 else "bisection"
    if method == "voronoi":
        if k != 1:
            raise ValueError("the Voronoi route computes r* for k = 1 only")
        return _covering_radius_exact(pts, region)
    if method != "bisection":
        raise ValueError(f"unknown method {method!r}")
    lo, hi = critical_radius_bracket(pts, k, tol, region)
    return 0.5 * (lo + hi)


# --- path coverage ------------------------------------------------------------


@dataclass(frozen=True)
class PathSpec:
    """Target moving from ``start`` along +axis-1 at ``speed`` for ``horizon`` time."""

    speed: float
    horizon: float
    start: tuple[float, ...] = (0.0, 0.0)

    def __post_init__(self):
        if not self.speed > 0:
            raise ValueError("speed must be positive")
        if not (self.horizon >= 0 and math.isfinite(self.horizon)):
            raise ValueError("horizon must be finite and >= 0")
        object.__setattr__(self, "start", tuple(float(v) for v in self.start))

    @property
    def length(self) -> float:
        return self.speed * self.horizon

    @property
    def dims(self) -> int:
        return len(self.start)

    def tube(self, reach: float) -> Region:
        lo = list(self.start)
        hi = list(self.start)
        lo[0] -= reach
        hi[0] += self.length + reach
        for i in range(1, self.dims):
            lo[i] -= reach
            hi[i] += reach
        return Region(tuple(lo), tuple(hi))


class DepthPiece(NamedTuple):
    lo: float
    hi: float
    depth: int


@dataclass(frozen=True)
class FastSwitching:
    """Limit of infinitely fast on/off switching: each covering sensor is on
    independently with probability ``p1`` at every instant."""

    p1: float


def cover_windows(points: np.ndarray, shape: ShapeSpec, path: PathSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Times in ``[0, T]`` during which each sensor's shape contains the target.

    Returns ``(index, t_in, t_out)`` for sensors with a non-empty window.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, path.dims)
    rel = pts - np.asarray(path.start)
    along = rel[:, 0]
    perp = rel[:, 1:]
    if shape.kind == "disc":
        r = shape.scaled_size
        p2 = np.einsum("ij,ij->i", perp, perp)
        hit = p2 <= r * r
        half = np.sqrt(np.maximum(r * r - p2, 0.0))
    elif shape.kind == "square":
        h = shape.scaled_size / 2
        hit = np.all(np.abs(perp) <= h, axis=1)
        half = np.full(len(pts), h)
    else:
        raise GeometryError("path coverage needs disc or square shapes")
    c, T = path.speed, path.horizon
    t_in = np.clip((along - half) / c, 0.0, T)
    t_out = np.clip((along + half) / c, 0.0, T)
    keep = hit & (t_out > t_in)
    idx = np.flatnonzero(keep)
    return idx, t_in[keep], t_out[keep]


def depth_pieces(lo: np.ndarray, hi: np.ndarray, T: float) -> tuple[np.ndarray, np.ndarray]:
    """Piecewise-constant depth of a union of ``[lo_i, hi_i)`` over ``[0, T)``.

    Returns ``(edges, depth)`` with ``len(edges) == len(depth) + 1``,
    ``edges[0] == 0`` and ``edges[-1] == T``. Starts sort before ends at
    equal times so the depth never dips at a shared endpoint.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    t = np.concatenate([lo, hi])
    delta = np.concatenate([np.ones(len(lo), dtype=np.int64), -np.ones(len(hi), dtype=np.int64)])
    order = np.lexsort((-delta, t))
    t = t[order]
    level = np.cumsum(delta[order])
    edges = np.concatenate([[0.0], t, [T]])
    depth = np.concatenate([[0], level])
    return edges, depth


def _merge_pieces(edges: np.ndarray, depth: np.ndarray) -> list[DepthPiece]:
    out: list[DepthPiece] = []
    for a, b, dpt in zip(edges[:-1].tolist(), edges[1:].tolist(), depth.tolist()):
        if b <= a:
            continue
        if out and out[-1].depth == dpt and out[-1].hi == a:
            out[-1] = DepthPiece(out[-1].lo, b, dpt)
        else:
            out.append(DepthPiece(a, b, dpt))
    return out


def _clip_trajectory(traj: OnOffTrajectory, a: float, b: float) -> list[tuple[float, float]]:
    out = []
    for lo, hi in traj.on_intervals:
        lo, hi = max(lo, a), min(hi, b)
        if hi > lo:
            out.append((lo, hi))
    return out


def _active_intervals(field: SensorField, trajectories, path: PathSpec):
    idx, t_in, t_out = cover_windows(field.centers, field.shape, path)
    if isinstance(trajectories, (str, FastSwitching)):
        if isinstance(trajectories, str) and trajectories != "always-on":
            raise ValueError(f"unknown trajectory mode {trajectories!r}")
        return t_in, t_out
    if len(trajectories) != len(field.centers):
        raise ValueError("need one trajectory per sensor")
    los, his = [], []
    for i, a, b in zip(idx.tolist(), t_in.tolist(), t_out.tolist()):
        for lo, hi in _clip_trajectory(trajectories[i], a, b):
            los.append(lo)
            his.append(hi)
    return np.asarray(los, dtype=float), np.asarray(his, dtype=float)


def path_cover_intervals(field: SensorField, trajectories, path: PathSpec) -> list[DepthPiece]:
    """Depth profile of active sensors seen by the moving target.

    ``trajectories`` is ``"always-on"`` or one :class:`OnOffTrajectory` per
    sensor. Pieces partition ``[0, T)`` with shared endpoints.
    """
    lo, hi = _active_intervals(field, trajectories, path)
    return _merge_pieces(*depth_pieces(lo, hi, path.horizon))


def path_vacancy(field: SensorField, trajectories, path: PathSpec, k: int = 1) -> VacancyMeasurement:
    """Time in ``[0, T]`` during which fewer than ``k`` active sensors cover the target.

    With :class:`FastSwitching` the value is the conditional mean given the
    sensor positions, ``integral of P(Bin(depth, p1) < k) dt``.
    """
    if k < 1:
        raise ValueError("k >= 1 required")
    lo, hi = _active_intervals(field, trajectories, path)
    edges, depth = depth_pieces(lo, hi, path.horizon)
    return VacancyMeasurement(_vacant_time(edges, depth, k, trajectories), "exact-1d", 0.0)


def _vacant_time(edges, depth, k, mode) -> float:
    lengths = np.diff(edges)
    if isinstance(mode, FastSwitching):
        return float(np.dot(lengths, binom.cdf(k - 1, depth, mode.p1)))
    return float(lengths[depth < k].sum())


@dataclass(frozen=True)
class PathRegime:
    """How sensors switch during a path replication.

    kind: ``always-on``, ``markov`` (needs ``onoff``), ``frozen`` (each
    sensor on for the whole horizon with probability ``p1``) or ``fast``
    (:class:`FastSwitching` with ``p1``).
    """

    kind: str
    onoff: OnOffParams | None = None
    p1: float = 1.0

    def __post_init__(self):
        if self.kind not in ("always-on", "markov", "frozen", "fast"):
            raise ValueError(f"unknown path regime {self.kind!r}")
        if self.kind == "markov" and self.onoff is None:
            raise ValueError("markov regime needs OnOffParams")
        if self.kind == "markov":
            object.__setattr__(self, "p1", self.onoff.p1)

    @classmethod
    def for_a0(cls, a0: float, p1: float, delta: float) -> "PathRegime":
        """Switching rate gamma = a0 / delta with stationary on-probability p1."""
        if p1 == 1:
            return cls("always-on")
        if a0 == 0:
            return cls("frozen", p1=p1)
        if math.isinf(a0):
            return cls("fast", p1=p1)
        return cls("markov", OnOffParams.from_p1_gamma(p1, a0 / delta))


def realize_path_field(lam: float, shape: ShapeSpec, path: PathSpec, rng: np.random.Generator) -> SensorField:
    """Poisson sensors on the box around the path that any shape could reach from."""
    tube = path.tube(shape.scaled_tau)
    sample = sample_ppp(lam, tube, rng, "hard")
    return SensorField(sample, shape, 1, tube)


def simulate_path_vacancy(
    lam: float, shape: ShapeSpec, path: PathSpec, regime: PathRegime, ks: Sequence[int], rng: np.random.Generator
) -> list[float]:
    """One replication of V_{k,T} for each k in ``ks``."""
    field = realize_path_field(lam, shape, path, rng)
    _, t_in, t_out = cover_windows(field.centers, shape, path)
    if regime.kind == "markov":
        iv = sample_on_intervals(regime.onoff, t_in, t_out, rng)
        lo, hi = iv.lo, iv.hi
    elif regime.kind == "frozen":
        on = rng.random(len(t_in)) < regime.p1
        lo, hi = t_in[on], t_out[on]
    else:
        lo, hi = t_in, t_out
    edges, depth = depth_pieces(lo, hi, path.horizon)
    mode = FastSwitching(regime.p1) if regime.kind == "fast" else None
    return [_vacant_time(edges, depth, k, mode) for k in ks]

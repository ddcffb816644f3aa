"""Regions, sensing shapes, Poisson sampling and disc-arrangement crossings."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.spatial import cKDTree

BOUNDARY_MODES = ("dilated", "hard", "torus")
SHAPE_KINDS = ("disc", "square", "generic")

# Membership oracles for generic shapes, keyed by sampler id. Each takes an
# (n, d) array of points in unscaled shape coordinates and returns a bool mask.
_GENERIC_SHAPES: dict[str, Callable[[np.ndarray], np.ndarray]] = {}


class GeometryError(ValueError):
    pass


def unit_ball_volume(d: int) -> float:
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def sphere_area(d: int, radius: float) -> float:
    """Surface measure of the radius-``radius`` sphere in R^d (2 points for d=1)."""
    return d * unit_ball_volume(d) * radius ** (d - 1)


@dataclass(frozen=True)
class Region:
    """Axis-aligned box ``prod [lower_i, upper_i]``; infinite bounds allowed."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lower)
        hi = tuple(float(v) for v in self.upper)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if len(lo) != len(hi) or len(lo) not in (1, 2, 3):
            raise GeometryError(f"region must have matching bounds in 1-3 dims, got {lo}, {hi}")
        if any(math.isnan(a) or math.isnan(b) or not a < b for a, b in zip(lo, hi)):
            raise GeometryError(f"degenerate region {lo} x {hi}")

    @classmethod
    def unit_cube(cls, dims: int = 2) -> "Region":
        return cls((0.0,) * dims, (1.0,) * dims)

    @classmethod
    def box(cls, *intervals: tuple[float, float]) -> "Region":
        return cls(tuple(a for a, _ in intervals), tuple(b for _, b in intervals))

    @classmethod
    def unbounded(cls, dims: int = 2) -> "Region":
        return cls((-math.inf,) * dims, (math.inf,) * dims)

    @property
    def dims(self) -> int:
        return len(self.lower)

    @property
    def kind(self) -> str:
        if self.lower == (0.0,) * self.dims and self.upper == (1.0,) * self.dims:
            return "unit-cube"
        return "box"

    @property
    def sides(self) -> tuple[float, ...]:
        return tuple(b - a for a, b in zip(self.lower, self.upper))

    @property
    def volume(self) -> float:
        return math.prod(self.sides)

    @property
    def is_bounded(self) -> bool:
        return all(math.isfinite(v) for v in self.lower + self.upper)

    def dilate(self, margin: float) -> "Region":
        if margin < 0:
            raise GeometryError("dilation margin must be non-negative")
        return Region(tuple(a - margin for a in self.lower), tuple(b + margin for b in self.upper))

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        lo = np.asarray(self.lower)
        hi = np.asarray(self.upper)
        return np.all((pts >= lo) & (pts <= hi), axis=1)


@dataclass(frozen=True)
class ShapeSpec:
    """A deterministic sensing shape ``scale * C`` with C inside ``B(0, tau)``.

    ``size`` is the disc radius or the square side of the unscaled shape.
    ``tau`` and ``beta`` always refer to the unscaled shape; the scaled
    quantities are ``scaled_tau`` and ``scaled_beta``.
    """

    kind: str
    size: float = 1.0
    dim: int = 2
    scale: float = 1.0
    tau: float = field(default=math.nan)
    beta: float = field(default=math.nan)
    sampler: str | None = None

    def __post_init__(self):
        if self.kind not in SHAPE_KINDS:
            raise GeometryError(f"unknown shape kind {self.kind!r}")
        if self.dim not in (1, 2, 3):
            raise GeometryError("shape dimension must be 1, 2 or 3")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise GeometryError("shape scale must be positive and finite")
        if self.kind == "generic":
            if self.sampler is None or self.sampler not in _GENERIC_SHAPES:
                raise GeometryError(f"generic shape needs a registered sampler, got {self.sampler!r}")
            if not (self.tau > 0 and self.beta > 0):
                raise GeometryError("generic shapes need user-supplied tau > 0 and beta > 0")
            return
        if not self.size > 0:
            raise GeometryError(f"{self.kind} size must be positive, got {self.size}")
        if self.kind == "disc":
            natural_tau = self.size
            natural_beta = unit_ball_volume(self.dim) * self.size**self.dim
        else:
            natural_tau = self.size * math.sqrt(self.dim) / 2
            natural_beta = self.size**self.dim
        if math.isnan(self.tau):
            object.__setattr__(self, "tau", natural_tau)
        elif self.tau < natural_tau * (1 - 1e-12):
            raise GeometryError(f"tau={self.tau} is smaller than the shape circumradius {natural_tau}")
        object.__setattr__(self, "beta", natural_beta)

    @classmethod
    def disc(cls, radius: float, dim: int = 2, scale: float = 1.0) -> "ShapeSpec":
        return cls("disc", radius, dim, scale)

    @classmethod
    def square(cls, side: float, dim: int = 2, scale: float = 1.0) -> "ShapeSpec":
        return cls("square", side, dim, scale)

    @classmethod
    def generic(cls, sampler: str, tau: float, beta: float, dim: int = 2, scale: float = 1.0) -> "ShapeSpec":
        return cls("generic", 0.0, dim, scale, tau, beta, sampler)

    def with_scale(self, scale: float) -> "ShapeSpec":
        return replace(self, scale=float(scale))

    @property
    def scaled_tau(self) -> float:
        return self.tau * self.scale

    @property
    def scaled_beta(self) -> float:
        return self.beta * self.scale**self.dim

    @property
    def scaled_size(self) -> float:
        return self.size * self.scale

    def contains(self, offsets: np.ndarray) -> np.ndarray:
        """Closed-set membership of ``offsets`` (relative to the centre) in ``scale * C``."""
        off = np.atleast_2d(np.asarray(offsets, dtype=float))
        if self.kind == "disc":
            return np.einsum("ij,ij->i", off, off) <= self.scaled_size**2
        if self.kind == "square":
            return np.all(np.abs(off) <= self.scaled_size / 2, axis=1)
        return np.asarray(_GENERIC_SHAPES[self.sampler](off / self.scale), dtype=bool)


def register_shape(name: str, contains: Callable[[np.ndarray], np.ndarray]) -> None:
    """Register a membership oracle usable as ``ShapeSpec.generic(name, ...)``."""
    _GENERIC_SHAPES[name] = contains


@dataclass(frozen=True)
class PointSample:
    points: np.ndarray
    intensity: float
    region: Region
    boundary_mode: str
    window: Region | None = None

    def __len__(self) -> int:
        return len(self.points)


def sample_ppp(
    intensity: float,
    region: Region,
    rng: np.random.Generator,
    boundary_mode: str = "hard",
    margin: float = 0.0,
) -> PointSample:
    """Homogeneous Poisson process on ``region``.

    In ``dilated`` mode the points are drawn on the box enlarged by
    ``margin`` (normally ``tau * delta``) so every shape able to reach the
    region is present.
    """
    if not math.isfinite(intensity) or intensity < 0:
        raise GeometryError(f"intensity must be finite and non-negative, got {intensity}")
    if boundary_mode not in BOUNDARY_MODES:
        raise GeometryError(f"unknown boundary mode {boundary_mode!r}")
    if not region.is_bounded:
        raise GeometryError("cannot sample a Poisson process on an unbounded region")
    sampled = region.dilate(margin) if boundary_mode == "dilated" else region
    n = int(rng.poisson(intensity * sampled.volume)) if intensity > 0 else 0
    lo = np.asarray(sampled.lower)
    hi = np.asarray(sampled.upper)
    pts = lo + (hi - lo) * rng.random((n, region.dims))
    return PointSample(pts, float(intensity), sampled, boundary_mode, region)


def _disc_overlap(dist: np.ndarray, radius: float, dim: int) -> np.ndarray:
    t = np.minimum(np.abs(np.asarray(dist, dtype=float)), 2 * radius)
    if dim == 1:
        return 2 * radius - t
    if dim == 2:
        return 2 * radius**2 * np.arccos(t / (2 * radius)) - 0.5 * t * np.sqrt(4 * radius**2 - t**2)
    return math.pi * (4 * radius + t) * (2 * radius - t) ** 2 / 12


def overlap_at_distance(shape: ShapeSpec, dist) -> np.ndarray:
    """Vectorised ``E||(y + C) ∩ C||`` for a disc at separations ``||y|| = dist``."""
    if shape.kind != "disc":
        raise GeometryError("radial overlap is only defined for discs")
    return _disc_overlap(dist, shape.scaled_size, shape.dim)


def overlap_at(shape: ShapeSpec, y: np.ndarray) -> np.ndarray:
    """Vectorised overlap for an (n, d) array of separations (disc or square)."""
    y = np.atleast_2d(np.asarray(y, dtype=float))
    if shape.kind == "disc":
        return _disc_overlap(np.linalg.norm(y, axis=1), shape.scaled_size, shape.dim)
    if shape.kind == "square":
        return np.prod(np.clip(shape.scaled_size - np.abs(y), 0.0, None), axis=1)
    raise GeometryError("vectorised overlap needs a disc or square; use pair_intersection_estimate")


class MCEstimate(NamedTuple):
    value: float
    stderr: float
    samples: int


def pair_intersection_estimate(
    shape: ShapeSpec, y, samples: int = 200_000, rng: np.random.Generator | None = None
) -> MCEstimate:
    """Hit-or-miss estimate of ``||(y + C) ∩ C||`` using the membership oracle."""
    rng = np.random.default_rng(0) if rng is None else rng
    y = np.asarray(y, dtype=float).reshape(shape.dim)
    half = shape.scaled_tau
    u = rng.uniform(-half, half, size=(samples, shape.dim))
    hits = shape.contains(u) & shape.contains(u - y)
    p = hits.mean()
    box = (2 * half) ** shape.dim
    return MCEstimate(float(box * p), float(box * math.sqrt(p * (1 - p) / samples)), samples)


def pair_intersection_mean(shape: ShapeSpec, y) -> float:
    """``E||(y + C) ∩ C||`` for the scaled shape ``C``."""
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.shape[0] != shape.dim:
        raise GeometryError(f"separation has {y.shape[0]} coordinates, shape lives in R^{shape.dim}")
    if shape.kind == "generic":
        if float(np.linalg.norm(y)) >= 2 * shape.scaled_tau:
            return 0.0
        return pair_intersection_estimate(shape, y).value
    return float(overlap_at(shape, y[None, :])[0])


def complement_intersection_mean(shape: ShapeSpec, y) -> float:
    return max(shape.scaled_beta - pair_intersection_mean(shape, y), 0.0)


def covers(x, center, shape: ShapeSpec) -> bool:
    off = np.asarray(x, dtype=float) - np.asarray(center, dtype=float)
    return bool(shape.contains(off[None, :])[0])


class Crossing(NamedTuple):
    point: tuple[float, float]
    kind: str


def circle_pair_points(
    a: np.ndarray, b: np.ndarray, radius: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Intersection points of equal circles centred at rows of ``a`` and ``b``.

    Returns ``(p, q, valid)``; coincident centres and pairs farther than
    ``2 * radius`` apart are invalid. Tangent pairs give ``p == q``.
    """
    d = b - a
    dist = np.hypot(d[:, 0], d[:, 1])
    valid = (dist > 0) & (dist <= 2 * radius)
    safe = np.where(valid, dist, 1.0)
    h = np.sqrt(np.clip(radius**2 - (safe / 2) ** 2, 0.0, None))
    mid = (a + b) / 2
    perp = np.stack([-d[:, 1], d[:, 0]], axis=1) / safe[:, None]
    return mid + h[:, None] * perp, mid - h[:, None] * perp, valid


def _edge_crossings(centers: np.ndarray, radius: float, region: Region) -> np.ndarray:
    found = []
    (x0, y0), (x1, y1) = region.lower, region.upper
    for axis, lo_b, hi_b, edges in ((0, y0, y1, (x0, x1)), (1, x0, x1, (y0, y1))):
        for e in edges:
            if not math.isfinite(e):
                continue
            off = e - centers[:, axis]
            hit = np.abs(off) <= radius
            h = np.sqrt(radius**2 - off[hit] ** 2)
            other = centers[hit, 1 - axis]
            for along in (other - h, other + h):
                keep = (along >= lo_b) & (along <= hi_b)
                pts = np.empty((int(keep.sum()), 2))
                pts[:, axis] = e
                pts[:, 1 - axis] = along[keep]
                found.append(pts)
    return np.concatenate(found) if found else np.empty((0, 2))


def crossing_points(centers: np.ndarray, radius: float, region: Region) -> tuple[np.ndarray, np.ndarray]:
    """Circle-circle and circle-boundary crossings inside the closed region.

    Returns ``(disc_disc, disc_boundary)`` as (m, 2) arrays.
    """
    centers = np.asarray(centers, dtype=float).reshape(-1, 2)
    if len(centers) < 2:
        dd = np.empty((0, 2))
    else:
        pairs = cKDTree(centers).query_pairs(2 * radius, output_type="ndarray")
        p, q, valid = circle_pair_points(centers[pairs[:, 0]], centers[pairs[:, 1]], radius)
        p, q = p[valid], q[valid]
        tangent = np.all(p == q, axis=1)
        dd = np.concatenate([p, q[~tangent]])
        dd = dd[region.contains(dd)] if len(dd) else dd
    return dd, _edge_crossings(centers, radius, region)


def crossings(field) -> list[Crossing]:
    """All disc-disc and disc-boundary crossing points of a 2-D disc field."""
    shape: ShapeSpec = field.shape
    if shape.dim != 2 or shape.kind != "disc":
        raise GeometryError("crossings are defined for discs in the plane")
    dd, db = crossing_points(field.sample.points, shape.scaled_size, field.region)
    out = [Crossing((float(x), float(y)), "disc-disc") for x, y in dd]
    out += [Crossing((float(x), float(y)), "disc-boundary") for x, y in db]
    return out


def interior_depth(points: np.ndarray, centers: np.ndarray, radius: float, tol: float = 1e-12) -> np.ndarray:
    """Number of discs holding each point strictly inside (``dist < radius - tol``)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if len(points) == 0 or len(centers) == 0:
        return np.zeros(len(points), dtype=np.int64)
    inner = np.nextafter(radius - tol, 0.0)
    tree = cKDTree(np.asarray(centers, dtype=float))
    return np.asarray(tree.query_ball_point(points, inner, return_length=True), dtype=np.int64)


def region_corners(region: Region) -> np.ndarray:
    (x0, y0), (x1, y1) = region.lower, region.upper
    return np.array([[x0, y0], [x1, y0], [x0, y1], [x1, y1]], dtype=float)


def as_points(points: Sequence[Sequence[float]] | np.ndarray, dims: int) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.size == 0:
        return np.empty((0, dims))
    arr = arr.reshape(-1, dims)
    if not np.all(np.isfinite(arr)):
        raise GeometryError("point coordinates must be finite")
    return arr

"""Compiled inner loops for the planar simulator.

Kept free of Python objects so numba can compile them in nopython mode.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

DISC = 0
SQUARE = 1


@njit(cache=True)
def _clip(v, lo, hi):
    if v < lo:
        return lo
    if v > hi:
        return hi
    return v


@njit(cache=True)
def _mark(diff, j, ia, ib, nx):
    # ib inclusive; caller guarantees ia <= ib after clipping
    ia = _clip(ia, 0, nx - 1)
    ib = _clip(ib, 0, nx - 1)
    if ia <= ib:
        diff[j, ia] += 1
        diff[j, ib + 1] -= 1


@njit(cache=True)
def rasterize_2d(centers, kind, size, x0, y0, dx, dy, nx, ny):
    """Midpoint depth grid and boundary-cell count for discs or squares.

    ``size`` is the scaled radius (disc) or side (square). Returns the
    (ny, nx) depth array and the number of cells met by some shape boundary.
    """
    depth_diff = np.zeros((ny, nx + 1), dtype=np.int32)
    mark_diff = np.zeros((ny, nx + 1), dtype=np.int32)
    half = size if kind == DISC else size / 2
    for p in range(centers.shape[0]):
        cx = centers[p, 0]
        cy = centers[p, 1]
        # rows whose cell centres lie in the shape's vertical extent
        j_lo = max(int(math.ceil((cy - half - y0) / dy - 0.5)), 0)
        j_hi = min(int(math.floor((cy + half - y0) / dy - 0.5)), ny - 1)
        for j in range(j_lo, j_hi + 1):
            yc = y0 + (j + 0.5) * dy
            if kind == DISC:
                h2 = half * half - (yc - cy) * (yc - cy)
                if h2 < 0.0:
                    continue
                h = math.sqrt(h2)
            else:
                h = half
            ia = int(math.ceil((cx - h - x0) / dx - 0.5))
            ib = int(math.floor((cx + h - x0) / dx - 0.5))
            if ia < 0:
                ia = 0
            if ib > nx - 1:
                ib = nx - 1
            if ia <= ib:
                depth_diff[j, ia] += 1
                depth_diff[j, ib + 1] -= 1
        # bands (cells' full y-extent) touching the shape
        b_lo = max(int(math.floor((cy - half - y0) / dy)), 0)
        b_hi = min(int(math.floor((cy + half - y0) / dy)), ny - 1)
        for j in range(b_lo, b_hi + 1):
            yb0 = y0 + j * dy
            yb1 = yb0 + dy
            if kind == DISC:
                if yb0 <= cy <= yb1:
                    dn = 0.0
                else:
                    dn = min(abs(yb0 - cy), abs(yb1 - cy))
                if dn > half:
                    continue
                df = max(abs(yb0 - cy), abs(yb1 - cy))
                a_max = math.sqrt(half * half - dn * dn)
                a_min = math.sqrt(half * half - df * df) if df < half else -1.0
                if a_min < 0.0:
                    _mark(mark_diff, j, int(math.floor((cx - a_max - x0) / dx)),
                          int(math.floor((cx + a_max - x0) / dx)), nx)
                else:
                    _mark(mark_diff, j, int(math.floor((cx - a_max - x0) / dx)),
                          int(math.floor((cx - a_min - x0) / dx)), nx)
                    _mark(mark_diff, j, int(math.floor((cx + a_min - x0) / dx)),
                          int(math.floor((cx + a_max - x0) / dx)), nx)
            else:
                if yb1 < cy - half or yb0 > cy + half:
                    continue
                if yb0 <= cy - half <= yb1 or yb0 <= cy + half <= yb1:
                    _mark(mark_diff, j, int(math.floor((cx - half - x0) / dx)),
                          int(math.floor((cx + half - x0) / dx)), nx)
                else:
                    for ex in (cx - half, cx + half):
                        i = int(math.floor((ex - x0) / dx))
                        _mark(mark_diff, j, i, i, nx)
                        # an edge sitting exactly on a cell wall touches both cells
                        if x0 + i * dx == ex:
                            _mark(mark_diff, j, i - 1, i - 1, nx)
    depth = np.empty((ny, nx), dtype=np.int32)
    boundary = 0
    for j in range(ny):
        acc = 0
        macc = 0
        for i in range(nx):
            acc += depth_diff[j, i]
            macc += mark_diff[j, i]
            depth[j, i] = acc
            if macc > 0:
                boundary += 1
    return depth, boundary


@njit(cache=True)
def depth_histogram(depth, cap):
    """Counts of cells with depth 0, 1, ..., cap - 1 and >= cap (last slot)."""
    hist = np.zeros(cap + 1, dtype=np.int64)
    ny, nx = depth.shape
    for j in range(ny):
        for i in range(nx):
            v = depth[j, i]
            hist[v if v < cap else cap] += 1
    return hist


@njit(cache=True)
def _build_cells(pts, gx0, gy0, h, nx, ny):
    n = pts.shape[0]
    cell_of = np.empty(n, dtype=np.int64)
    counts = np.zeros(nx * ny + 1, dtype=np.int64)
    for p in range(n):
        ci = _clip(int((pts[p, 0] - gx0) / h), 0, nx - 1)
        cj = _clip(int((pts[p, 1] - gy0) / h), 0, ny - 1)
        c = ci * ny + cj
        cell_of[p] = c
        counts[c + 1] += 1
    start = np.cumsum(counts)
    fill = start[:-1].copy()
    order = np.empty(n, dtype=np.int64)
    for p in range(n):
        c = cell_of[p]
        order[fill[c]] = p
        fill[c] += 1
    return order, start


@njit(cache=True)
def _covered(px, py, pts, inner2, k, order, start, gx0, gy0, h, nx, ny, reach):
    if k <= 0:
        return True
    ci = _clip(int((px - gx0) / h), 0, nx - 1)
    cj = _clip(int((py - gy0) / h), 0, ny - 1)
    count = 0
    for a in range(max(ci - reach, 0), min(ci + reach, nx - 1) + 1):
        for b in range(max(cj - reach, 0), min(cj + reach, ny - 1) + 1):
            c = a * ny + b
            for t in range(start[c], start[c + 1]):
                q = order[t]
                ddx = pts[q, 0] - px
                ddy = pts[q, 1] - py
                if ddx * ddx + ddy * ddy < inner2:
                    count += 1
                    if count >= k:
                        return True
    return False


@njit(cache=True)
def fully_k_covered(pts, radius, k, bx0, by0, bx1, by1, tol):
    """Exact complete k-coverage test for equal discs on a box.

    Every corner of the box, every disc/edge crossing and every disc/disc
    crossing inside the box must lie strictly inside at least ``k`` discs.
    The minimum of the depth function is attained next to one of these
    points, so the test is exact up to measure-zero configurations.
    """
    n = pts.shape[0]
    if n == 0 or radius <= 0.0:
        return False
    inner = radius - tol
    if inner <= 0.0:
        return False
    inner2 = inner * inner
    gx0 = min(bx0, pts[:, 0].min())
    gy0 = min(by0, pts[:, 1].min())
    gx1 = max(bx1, pts[:, 0].max())
    gy1 = max(by1, pts[:, 1].max())
    # cell side >= radius, and at most ~4n cells so sparse fields stay cheap
    h = max(radius, max(gx1 - gx0, gy1 - gy0) / (math.sqrt(4.0 * n) + 1.0))
    nx = int((gx1 - gx0) / h) + 1
    ny = int((gy1 - gy0) / h) + 1
    order, start = _build_cells(pts, gx0, gy0, h, nx, ny)
    reach = int(math.ceil(radius / h))
    reach2 = int(math.ceil(2.0 * radius / h))

    for cx, cy in ((bx0, by0), (bx1, by0), (bx0, by1), (bx1, by1)):
        if not _covered(cx, cy, pts, inner2, k, order, start, gx0, gy0, h, nx, ny, reach):
            return False

    r2 = radius * radius
    for p in range(n):
        px = pts[p, 0]
        py = pts[p, 1]
        for ex in (bx0, bx1):
            off = ex - px
            if off * off <= r2:
                hh = math.sqrt(r2 - off * off)
                for yy in (py - hh, py + hh):
                    if by0 <= yy <= by1:
                        if not _covered(ex, yy, pts, inner2, k, order, start, gx0, gy0, h, nx, ny, reach):
                            return False
        for ey in (by0, by1):
            off = ey - py
            if off * off <= r2:
                hh = math.sqrt(r2 - off * off)
                for xx in (px - hh, px + hh):
                    if bx0 <= xx <= bx1:
                        if not _covered(xx, ey, pts, inner2, k, order, start, gx0, gy0, h, nx, ny, reach):
                            return False

    four_r2 = 4.0 * r2
    for p in range(n):
        px = pts[p, 0]
        py = pts[p, 1]
        ci = _clip(int((px - gx0) / h), 0, nx - 1)
        cj = _clip(int((py - gy0) / h), 0, ny - 1)
        for a in range(max(ci - reach2, 0), min(ci + reach2, nx - 1) + 1):
            for b in range(max(cj - reach2, 0), min(cj + reach2, ny - 1) + 1):
                c = a * ny + b
                for t in range(start[c], start[c + 1]):
                    q = order[t]
                    if q <= p:
                        continue
                    ddx = pts[q, 0] - px
                    ddy = pts[q, 1] - py
                    d2 = ddx * ddx + ddy * ddy
                    if d2 == 0.0 or d2 > four_r2:
                        continue
                    d = math.sqrt(d2)
                    hh = math.sqrt(max(r2 - 0.25 * d2, 0.0))
                    mx = px + 0.5 * ddx
                    my = py + 0.5 * ddy
                    ux = -ddy / d * hh
                    uy = ddx / d * hh
                    for sgn in (1.0, -1.0):
                        xx = mx + sgn * ux
                        yy = my + sgn * uy
                        if bx0 <= xx <= bx1 and by0 <= yy <= by1:
                            if not _covered(xx, yy, pts, inner2, k, order, start, gx0, gy0, h, nx, ny, reach):
                                return False
    return True

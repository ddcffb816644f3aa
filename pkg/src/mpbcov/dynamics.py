"""Stationary two-state on/off chains attached to sensors."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


@dataclass(frozen=True)
class OnOffParams:
    """Rates of the on/off chain: ``mu0`` is off->on, ``mu1`` is on->off (1/time)."""

    mu0: float
    mu1: float

    def __post_init__(self):
        for name in ("mu0", "mu1"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be positive and finite, got {v}")

    @classmethod
    def from_p1_gamma(cls, p1: float, gamma: float) -> "OnOffParams":
        if not 0 < p1 < 1:
            raise ValueError("p1 must lie strictly between 0 and 1 for a switching chain")
        return cls(p1 * gamma, (1 - p1) * gamma)

    @property
    def gamma(self) -> float:
        return self.mu0 + self.mu1

    @property
    def p1(self) -> float:
        return self.mu0 / self.gamma

    @property
    def p0(self) -> float:
        return self.mu1 / self.gamma


@dataclass(frozen=True)
class OnOffTrajectory:
    """On-intervals ``[a, b)`` of one sensor over the horizon ``[start, end]``."""

    start: float
    end: float
    on_intervals: tuple[tuple[float, float], ...]

    def __post_init__(self):
        prev = self.start
        for a, b in self.on_intervals:
            if not (prev <= a < b <= self.end):
                raise ValueError(f"malformed on-interval list {self.on_intervals}")
            prev = b

    @property
    def horizon(self) -> float:
        return self.end - self.start

    def on_time(self) -> float:
        return math.fsum(b - a for a, b in self.on_intervals)

    @classmethod
    def constant(cls, on: bool, start: float, end: float) -> "OnOffTrajectory":
        return cls(start, end, ((start, end),) if on and end > start else ())


def state_at(traj: OnOffTrajectory, t: float) -> int:
    if not traj.start <= t <= traj.end:
        raise ValueError(f"t={t} outside the horizon [{traj.start}, {traj.end}]")
    starts = [a for a, _ in traj.on_intervals]
    i = bisect.bisect_right(starts, t) - 1
    if i >= 0 and t < traj.on_intervals[i][1]:
        return 1
    # the right end of the horizon belongs to the last interval if it runs there
    if traj.on_intervals and t == traj.end and traj.on_intervals[-1][1] == traj.end:
        return 1
    return 0


class OnIntervals(NamedTuple):
    owner: np.ndarray
    lo: np.ndarray
    hi: np.ndarray


def sample_on_intervals(
    params: OnOffParams, starts: np.ndarray, ends: np.ndarray, rng: np.random.Generator
) -> OnIntervals:
    """Stationary chains on ``[starts[i], ends[i]]`` for many sensors at once.

    Each chain starts in state 1 with probability p1 and alternates
    exponential holding times (rate mu1 while on, mu0 while off). Returns
    the on-intervals as flat arrays tagged with the owning sensor index,
    sorted by owner then time.
    """
    starts = np.asarray(starts, dtype=float)
    ends = np.asarray(ends, dtype=float)
    n = len(starts)
    t = starts.copy()
    state = rng.random(n) < params.p1
    active = np.flatnonzero(t < ends)
    owners, los, his = [], [], []
    rates = np.array([params.mu0, params.mu1])
    while active.size:
        st = state[active]
        hold = rng.exponential(1.0, size=active.size) / rates[st.astype(np.intp)]
        seg_end = np.minimum(t[active] + hold, ends[active])
        on = st & (seg_end > t[active])
        owners.append(active[on])
        los.append(t[active][on])
        his.append(seg_end[on])
        t[active] = t[active] + hold
        state[active] = ~st
        active = active[t[active] < ends[active]]
    if not owners:
        empty = np.empty(0)
        return OnIntervals(np.empty(0, dtype=np.intp), empty, empty.copy())
    owner = np.concatenate(owners)
    lo = np.concatenate(los)
    hi = np.concatenate(his)
    order = np.lexsort((lo, owner))
    return OnIntervals(owner[order], lo[order], hi[order])


def sample_trajectory(
    params: OnOffParams, horizon: float, rng: np.random.Generator, start: float = 0.0
) -> OnOffTrajectory:
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    end = start + horizon
    iv = sample_on_intervals(params, np.array([start]), np.array([end]), rng)
    return OnOffTrajectory(start, end, tuple(zip(iv.lo.tolist(), iv.hi.tolist())))

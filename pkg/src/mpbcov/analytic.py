"""Closed forms and quadratures for PB / MPB coverage moments and thresholds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .geometry import Region, ShapeSpec, overlap_at, sphere_area
from .quadrature import QuadratureConfig, QuadResult, adaptive_simpson, integrate_box

INF = math.inf
DEFAULT_QUAD = QuadratureConfig()


@dataclass(frozen=True)
class PBParams:
    """Intensity, shape (with its scale) and region of a Poisson-Boolean field."""

    lam: float
    shape: ShapeSpec
    region: Region = field(default_factory=Region.unit_cube)
    k: int = 1
    rho: float = math.nan

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam >= 0):
            raise ValueError(f"intensity must be finite and >= 0, got {self.lam}")
        if self.k < 1:
            raise ValueError("k >= 1 required")
        if self.shape.dim != self.region.dims:
            raise ValueError("shape and region dimensions differ")
        if math.isnan(self.rho):
            object.__setattr__(self, "rho", self.lam * self.shape.scale**self.shape.dim)
        elif not (math.isfinite(self.rho) and self.rho >= 0):
            raise ValueError("rho must be finite and >= 0")

    @property
    def mean_cover(self) -> float:
        """lambda * delta^d * beta: mean number of shapes covering a point."""
        return self.lam * self.shape.scaled_beta


def _log_pow(base: float, exponent: int) -> float:
    if exponent == 0:
        return 0.0
    if base == 0.0:
        return -INF
    return exponent * math.log(base)


def expected_chi_m(lambda_beta: float, m: int) -> float:
    """Poisson probability that a point is covered by exactly ``m`` shapes."""
    if lambda_beta < 0 or m < 0:
        raise ValueError("lambda_beta and m must be non-negative")
    if not math.isfinite(lambda_beta):
        return 0.0
    return math.exp(-lambda_beta + _log_pow(lambda_beta, m) - math.lgamma(m + 1))


def vacancy_fraction(lambda_beta: float, k: int) -> float:
    """Probability that a point is covered by fewer than ``k`` shapes."""
    if k < 1:
        raise ValueError("k >= 1 required")
    return math.fsum(expected_chi_m(lambda_beta, m) for m in range(k))


def expected_vacancy_k(params: PBParams) -> float:
    return params.region.volume * vacancy_fraction(params.mean_cover, params.k)


def vacancy_limit(rho: float, beta: float, k: int, volume: float = 1.0) -> float:
    """Almost-sure limit of the k-vacancy when delta^d * lambda -> rho."""
    return volume * vacancy_fraction(rho * beta, k)


def _pair_terms(m: int, n: int, a1: float, a2: float) -> list[float]:
    """Log-space terms of sum_l a1^l/l! * a2^(m+n-2l)/((m-l)!(n-l)!)."""
    out = []
    for l in range(min(m, n) + 1):
        log_t = _log_pow(a1, l) - math.lgamma(l + 1) + _log_pow(a2, m + n - 2 * l)
        log_t -= math.lgamma(m - l + 1) + math.lgamma(n - l + 1)
        out.append(log_t)
    return out


def pair_probability_from_overlap(lam: float, beta: float, b1: float, m: int, n: int) -> float:
    """P(x1 covered by exactly m, x2 by exactly n) given E||B1|| = b1."""
    if m < 0 or n < 0:
        raise ValueError("m, n >= 0 required")
    b2 = max(beta - b1, 0.0)
    base = -2 * lam * beta + lam * b1
    return math.fsum(math.exp(base + t) for t in _pair_terms(m, n, lam * b1, lam * b2))


def pair_cover_probability(params: PBParams, m: int, n: int, y) -> float:
    b1 = float(overlap_at(params.shape, np.asarray(y, dtype=float).reshape(1, -1))[0])
    return pair_probability_from_overlap(params.lam, params.shape.scaled_beta, b1, m, n)


def covariance_from_overlap(lam: float, beta: float, b1: float, k: int) -> float:
    """Cov(V_k(x1), V_k(x2)) as a function of the pair overlap ``b1``."""
    if b1 <= 0.0 or lam == 0.0:
        return 0.0
    lb = lam * beta
    if k == 1:
        # e^{-2lb} (e^{lam b1} - 1) without cancellation
        return math.exp(-2 * lb) * math.expm1(lam * b1)
    terms = []
    for m in range(k):
        for n in range(k):
            terms.append(pair_probability_from_overlap(lam, beta, b1, m, n))
            terms.append(-expected_chi_m(lb, m) * expected_chi_m(lb, n))
    return math.fsum(terms)


def covariance_vk_points(params: PBParams, y) -> float:
    y = np.asarray(y, dtype=float).reshape(1, -1)
    if params.shape.kind == "disc" and float(np.linalg.norm(y)) >= 2 * params.shape.scaled_tau:
        return 0.0
    b1 = float(overlap_at(params.shape, y)[0])
    return covariance_from_overlap(params.lam, params.shape.scaled_beta, b1, params.k)


def _box_overlap_sphere_mean(sides: tuple[float, ...], t: float) -> float:
    """Integral of prod(L_i - t|u_i|) over the sphere of radius t (t <= min L_i)."""
    d = len(sides)
    if d == 1:
        return 2 * (sides[0] - t)
    if d == 2:
        a, b = sides
        return t * (2 * math.pi * a * b - 4 * t * (a + b) + 2 * t * t)
    a, b, c = sides
    return t * t * (
        4 * math.pi * a * b * c
        - 2 * math.pi * t * (a * b + a * c + b * c)
        + (8.0 / 3.0) * t * t * (a + b + c)
        - t**3
    )


class VarianceResult(NamedTuple):
    value: float
    error: float


def _covariance_integral(
    shape: ShapeSpec,
    cov_of_overlap,
    weight_box: tuple[float, ...] | None,
    quad: QuadratureConfig,
) -> QuadResult:
    """Integral over y of cov(E||B1(y)||) * w(y).

    ``weight_box`` gives w(y) = prod(L_i - |y_i|)_+ (region overlap); None
    means w = 1.
    """
    d = shape.dim
    reach = 2 * shape.scaled_tau
    if shape.kind == "disc" and (weight_box is None or reach <= min(weight_box)):

        def radial(t: float) -> float:
            b1 = float(overlap_at(shape, np.array([[t] + [0.0] * (d - 1)]))[0])
            w = sphere_area(d, t) if weight_box is None else _box_overlap_sphere_mean(weight_box, t)
            return cov_of_overlap(b1) * w

        return adaptive_simpson(radial, 0.0, reach, quad)

    if shape.kind not in ("disc", "square"):
        raise ValueError("variance quadrature needs a disc or square shape")
    # orthant integral times 2^d (cov and weight are even in each coordinate)
    if shape.kind == "square":
        upper = tuple([shape.scaled_size] * d)
    else:
        upper = tuple([reach] * d)
    if weight_box is not None:
        upper = tuple(min(u, L) for u, L in zip(upper, weight_box))

    def integrand(*ys: float) -> float:
        y = np.array([ys])
        b1 = float(overlap_at(shape, y)[0])
        w = 1.0 if weight_box is None else math.prod(max(L - v, 0.0) for L, v in zip(weight_box, ys))
        return cov_of_overlap(b1) * w

    res = integrate_box(integrand, upper, quad)
    return QuadResult(res.value * 2**d, res.error * 2**d, res.evaluations)


def variance_vk(params: PBParams, quad: QuadratureConfig = DEFAULT_QUAD) -> VarianceResult:
    """Var(V_k) = integral of Cov(V_k(x1), V_k(x2)) over R x R."""
    if params.lam == 0.0:
        return VarianceResult(0.0, 0.0)
    lam, beta, k = params.lam, params.shape.scaled_beta, params.k
    res = _covariance_integral(
        params.shape, lambda b1: covariance_from_overlap(lam, beta, b1, k), params.region.sides, quad
    )
    return VarianceResult(max(res.value, 0.0), res.error)


def sigma2_limit(
    rho: float, shape: ShapeSpec, k: int, volume: float = 1.0, quad: QuadratureConfig = DEFAULT_QUAD
) -> float:
    """Limit of lambda * Var(V_k) when delta^d * lambda -> rho.

    The B2 exponent is m + n - 2l, the form that follows from the pair
    covariance; the ``- 2l`` is what makes this equal to the limit of
    ``lambda * variance_vk``.
    """
    return sigma2_limit_result(rho, shape, k, volume, quad).value


def sigma2_limit_result(
    rho: float, shape: ShapeSpec, k: int, volume: float = 1.0, quad: QuadratureConfig = DEFAULT_QUAD
) -> VarianceResult:
    if rho < 0:
        raise ValueError("rho must be >= 0")
    if k < 1:
        raise ValueError("k >= 1 required")
    if rho == 0.0:
        return VarianceResult(0.0, 0.0)
    unit = shape.with_scale(1.0)
    beta = unit.beta
    # cov_of_overlap already carries e^{-2 rho beta}; sigma^2 = rho |R| * integral
    res = _covariance_integral(unit, lambda b1: covariance_from_overlap(rho, beta, b1, k), None, quad)
    return VarianceResult(max(rho * volume * res.value, 0.0), rho * volume * res.error)


# --- coverage probability bounds and thresholds -----------------------------


class CoverageBounds(NamedTuple):
    lower: float
    upper: float
    theta: float

    @property
    def upper_clamped(self) -> float:
        return min(1.0, self.upper)


def coverage_bounds(lam: float, r: float, k: int) -> CoverageBounds:
    """Bounds on P(V_k > 0) for discs of radius ``r`` on the unit square."""
    if k < 1:
        raise ValueError("k >= 1 required")
    if lam <= 0 or r <= 0:
        raise ValueError("lambda and r must be positive")
    a = lam * math.pi * r * r
    if math.pi * r * r > 1:
        raise ValueError(f"pi r^2 = {math.pi * r * r:.4g} exceeds the unit-square area")
    log_theta = math.log(4) + math.lgamma(k + 2) + a - math.log(lam) - k * math.log(a)
    theta = math.exp(log_theta) if log_theta < 700 else INF
    lower = 1.0 / (1.0 + theta)
    partial = math.fsum(math.exp(i * math.log(a) - math.lgamma(i + 1)) for i in range(k))
    upper = 2 * math.exp(-a) * (1 + lam * lam * math.pi * r * r * (1 + 2 / (lam * math.pi * r)) * partial)
    return CoverageBounds(lower, upper, theta)


def critical_radius_sq(n: float, k: int, c_n: float = 0.0) -> float:
    """(log n + k log log n + c_n) / (pi n)."""
    if not n > math.e:
        raise ValueError("n > e required so that log log n is defined")
    if k < 0:
        raise ValueError("k >= 0 required")
    return (math.log(n) + k * math.log(math.log(n)) + c_n) / (math.pi * n)


def supercritical_radius_sq(n: float, k: int, eps: float) -> float:
    return (1 + eps) * critical_radius_sq(n, k)


def subcritical_radius_sq(n: float, k: int, eps: float) -> float:
    return (1 - eps) * critical_radius_sq(n, k)


def critical_ratio(n: float, r: float, k: int) -> float:
    """pi n r^2 / (log n + k log log n); tends to 1 for r = r*_n."""
    return math.pi * n * r * r / (math.log(n) + k * math.log(math.log(n)))


# --- on/off chain and path coverage ------------------------------------------


def stationary_on(mu0: float, mu1: float) -> float:
    """p1 = mu0 / (mu0 + mu1) with mu0 the off->on rate."""
    return mu0 / (mu0 + mu1)


def onoff_transition(j: int, jj: int, t: float, mu0: float, mu1: float) -> float:
    """p_t(j, jj) of the stationary two-state chain."""
    if j not in (0, 1) or jj not in (0, 1):
        raise ValueError("states are 0 (off) and 1 (on)")
    if t < 0 or mu0 < 0 or mu1 < 0 or mu0 + mu1 == 0:
        raise ValueError("t >= 0 and non-negative rates with positive sum required")
    gamma = mu0 + mu1
    p = (mu1 / gamma) if j == 0 else (mu0 / gamma)
    if math.isinf(gamma):
        stay = 1.0 if t == 0 else p
    else:
        stay = (1 - p) * math.exp(-gamma * t) + p
    return stay if j == jj else 1 - stay


def expected_vt(T: float, lam: float, p1: float, beta_delta: float) -> float:
    if T < 0:
        raise ValueError("T >= 0 required")
    return T * math.exp(-lam * p1 * beta_delta)


def expected_vt_k(T: float, lam: float, p1: float, beta_delta: float, k: int) -> float:
    """k-fold extension: on-sensors over a point form a Poisson(lam p1 beta) count."""
    return T * vacancy_fraction(lam * p1 * beta_delta, k)


def _path_overlap(shape: ShapeSpec, dist: float) -> float:
    y = np.zeros((1, shape.dim))
    y[0, 0] = dist
    return float(overlap_at(shape, y)[0])


def _p1_gamma(mu0: float, mu1: float) -> tuple[float, float]:
    if mu0 < 0 or mu1 < 0 or not mu0 + mu1 > 0:
        raise ValueError("rates must be non-negative with positive sum")
    gamma = mu0 + mu1
    if math.isinf(gamma):
        raise ValueError("give p1 and gamma=inf through path_variance instead")
    return mu0 / gamma, gamma


def path_variance(
    T: float,
    lam: float,
    shape: ShapeSpec,
    c: float,
    p1: float,
    gamma: float,
    quad: QuadratureConfig = DEFAULT_QUAD,
) -> VarianceResult:
    """Var(V_T) for switching rate ``gamma`` in [0, inf]; gamma=0 freezes states."""
    if c <= 0:
        raise ValueError("speed must be positive")
    if T < 0:
        raise ValueError("T >= 0 required")
    if lam == 0 or T == 0 or p1 == 0:
        return VarianceResult(0.0, 0.0)
    p0 = 1 - p1
    beta = shape.scaled_beta
    reach = min(T, 2 * shape.scaled_tau / c)

    def stay_off(s: float) -> float:
        if gamma == 0:
            return 1.0
        if math.isinf(gamma):
            return p0  # the s = 0 value differs on a null set only
        return p1 * math.exp(-gamma * s) + p0

    def integrand(s: float) -> float:
        b1 = _path_overlap(shape, c * s)
        if b1 <= 0:
            return 0.0
        return (T - s) * math.expm1(-lam * b1 * (1 - p0 * stay_off(s) - 2 * p1))

    res = adaptive_simpson(integrand, 0.0, reach, quad)
    factor = 2 * math.exp(-2 * p1 * lam * beta)
    return VarianceResult(max(factor * res.value, 0.0), factor * res.error)


def variance_vt(
    T: float, lam: float, shape: ShapeSpec, c: float, mu0: float, mu1: float, quad: QuadratureConfig = DEFAULT_QUAD
) -> float:
    p1, gamma = _p1_gamma(mu0, mu1)
    return path_variance(T, lam, shape, c, p1, gamma, quad).value


def _scaled_path_integral(rho: float, shape: ShapeSpec, c: float, p1: float, decay: float, quad) -> float:
    unit = shape.with_scale(1.0)
    p0 = 1 - p1

    def factor(s: float) -> float:
        if decay == 0 or p0 == 0:
            return p1 + p0
        if math.isinf(decay):
            return p1  # the s = 0 value differs on a null set only
        return p1 + p0 * math.exp(-decay * s)

    def integrand(s: float) -> float:
        b1 = _path_overlap(unit, c * s)
        if b1 <= 0:
            return 0.0
        return math.expm1(p1 * rho * b1 * factor(s))

    res = adaptive_simpson(integrand, 0.0, 2 * unit.tau / c, quad)
    return 2 * math.exp(-2 * p1 * rho * unit.beta) * res.value


def sigma1_sq(
    a0: float, T: float, rho: float, shape: ShapeSpec, c: float, p1: float, quad: QuadratureConfig = DEFAULT_QUAD
) -> float:
    """Limit of Var(V_T)/delta when delta^d lambda -> rho and delta gamma -> a0.

    ``a0`` may be ``math.inf`` (switching much faster than traversal).
    """
    if not a0 >= 0:
        raise ValueError("a0 must be >= 0 or inf")
    if rho < 0 or not 0 <= p1 <= 1 or c <= 0:
        raise ValueError("invalid rho, p1 or speed")
    if rho == 0 or p1 == 0:
        return 0.0
    return T * _scaled_path_integral(rho, shape, c, p1, a0, quad)


def sigma2_sq(lam: float, shape: ShapeSpec, c: float, mu0: float, mu1: float, quad: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Limit of Var(V_T)/T as T -> inf for the unscaled model."""
    p1, gamma = _p1_gamma(mu0, mu1)
    if lam == 0:
        return 0.0
    return _scaled_path_integral(lam, shape, c, p1, gamma, quad)


def vt_long_run_candidates(lam: float, p1: float, beta: float, c: float) -> dict[str, float]:
    """Both printed forms of the long-horizon limit of V_T / T."""
    base = math.exp(-p1 * lam * beta)
    return {"mean_formula": base, "with_inverse_speed": base / c}

"""Adaptive Simpson quadrature with an error estimate."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple


class QuadratureError(ArithmeticError):
    """Raised when the requested tolerance is not met at ``max_depth``.

    ``partial`` carries the estimate obtained so far.
    """

    def __init__(self, message: str, partial: "QuadResult"):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_depth: int = 40

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")

    def halved(self) -> "QuadratureConfig":
        return QuadratureConfig(self.abs_tol / 2, self.rel_tol / 2, self.max_depth)


class QuadResult(NamedTuple):
    value: float
    error: float
    evaluations: int


def adaptive_simpson(
    f: Callable[[float], float], a: float, b: float, config: QuadratureConfig = QuadratureConfig()
) -> QuadResult:
    """Integrate ``f`` over ``[a, b]``.

    The target accuracy is ``max(abs_tol, rel_tol * |I|)`` where ``|I|`` is a
    coarse estimate of the integral of ``|f|``. The error estimate is the
    sum of the Richardson corrections ``|S2 - S1| / 15`` over accepted panels.
    """
    if a == b:
        return QuadResult(0.0, 0.0, 0)
    if b < a:
        res = adaptive_simpson(f, b, a, config)
        return QuadResult(-res.value, res.error, res.evaluations)

    fa, fm, fb = f(a), f((a + b) / 2), f(b)
    whole = (b - a) * (fa + 4 * fm + fb) / 6
    # coarse scale from a 9-point pass so rel_tol means something for
    # integrands that vanish at the nodes of the first panel
    probe = [abs(f(a + (b - a) * i / 8)) for i in range(9)]
    scale = (b - a) * sum(probe) / 9
    tol = max(config.abs_tol, config.rel_tol * scale)
    evals = 12

    pieces: list[float] = []
    errors: list[float] = []
    failed = False
    # explicit stack: (a, b, fa, fm, fb, whole, tol, depth)
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, s, eps, depth = stack.pop()
        mid = (lo + hi) / 2
        lm = (lo + mid) / 2
        rm = (mid + hi) / 2
        flm = f(lm)
        frm = f(rm)
        evals += 2
        left = (mid - lo) * (flo + 4 * flm + fmid) / 6
        right = (hi - mid) * (fmid + 4 * frm + fhi) / 6
        delta = left + right - s
        if abs(delta) <= 15 * eps or depth >= config.max_depth:
            if abs(delta) > 15 * eps:
                failed = True
            pieces.append(left + right + delta / 15)
            errors.append(abs(delta) / 15)
            continue
        stack.append((mid, hi, fmid, frm, fhi, right, eps / 2, depth + 1))
        stack.append((lo, mid, flo, flm, fmid, left, eps / 2, depth + 1))
    result = QuadResult(math.fsum(pieces), math.fsum(errors), evals)
    if failed:
        raise QuadratureError(
            f"adaptive Simpson did not reach tolerance {tol:.3g} at depth {config.max_depth}", result
        )
    return result


def integrate_box(
    f: Callable[..., float],
    upper: tuple[float, ...],
    config: QuadratureConfig = QuadratureConfig(),
) -> QuadResult:
    """Tensor-product adaptive Simpson over ``prod [0, upper_i]``.

    Inner integrals are solved with the same tolerances; the reported error
    adds the outer estimate and the largest inner estimate times the outer
    length.
    """
    if len(upper) == 1:
        return adaptive_simpson(lambda x: f(x), 0.0, upper[0], config)

    worst = [0.0]
    count = [0]

    def outer(x: float) -> float:
        res = integrate_box(lambda *rest: f(x, *rest), upper[1:], config)
        worst[0] = max(worst[0], res.error)
        count[0] += res.evaluations
        return res.value

    res = adaptive_simpson(outer, 0.0, upper[0], config)
    return QuadResult(res.value, res.error + worst[0] * upper[0], res.evaluations + count[0])

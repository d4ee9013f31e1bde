"""Time spent by trajectories of the standard gradient near its zero.

The field ``v(x, y) = (-x, y)`` on R^(p+q) has trajectories
``(x0 e^-t, y0 e^t)``, so ``|z(t)|^2 = a e^-2t + b e^2t`` with ``a = |x0|^2`` and
``b = |y0|^2``; all crossing times solve quadratics in ``u = e^2t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from ..errors import ValidationError


def annulus_time_bound(R: float, r: float) -> float:
    q = (R / r) ** 2
    return math.log(q + math.sqrt(q * q - 1))


def _roots_sq(a: float, b: float, c: float) -> list[float]:
    """Times t with ``a e^-2t + b e^2t = c``, ascending."""
    if b == 0:
        return [0.5 * math.log(a / c)] if a > 0 else []
    if a == 0:
        return [0.5 * math.log(c / b)]
    disc = c * c - 4 * a * b
    if disc < 0:
        return []
    s = math.sqrt(disc)
    # stable pair of roots of b u^2 - c u + a = 0
    u1 = (c + s) / (2 * b)
    u2 = a / (b * u1)
    return sorted(0.5 * math.log(u) for u in (u1, u2) if u > 0)


def _intervals_norm_between(a, b, r, R):
    """Time set where ``r^2 <= |z|^2 <= R^2`` as a list of intervals."""
    outer = _roots_sq(a, b, R * R)
    if len(outer) < 2:
        if b == 0 or a == 0:
            # monotone |z|: one crossing of each sphere
            t_R = outer[0]
            t_r = _roots_sq(a, b, r * r)[0]
            return [tuple(sorted((t_R, t_r)))]
        return []
    inner = _roots_sq(a, b, r * r)
    if len(inner) < 2:
        return [(outer[0], outer[1])]
    return [(outer[0], inner[0]), (inner[1], outer[1])]


@dataclass(frozen=True)
class TimeReport:
    time: float
    length: float | None
    bound: float
    ok: bool

    @property
    def margin(self) -> float:
        return self.bound - self.time


def _split(start, p):
    z = np.asarray(start, dtype=float)
    if not 0 <= p <= z.size:
        raise ValidationError("stable dimension out of range")
    return float(z[:p] @ z[:p]), float(z[p:] @ z[p:])


def standard_gradient_times(R: float, r: float, start, p: int) -> TimeReport:
    """Time and length the trajectory through ``start`` spends in the closed
    annulus ``r <= |z| <= R``; the first p coordinates are the stable ones."""
    if not R > r > 0:
        raise ValidationError("need R > r > 0")
    a, b = _split(start, p)
    if a + b == 0:
        raise ValidationError("start must be nonzero")
    ivs = _intervals_norm_between(a, b, r, R)
    time = sum(t1 - t0 for t0, t1 in ivs)

    def speed(t):
        return math.sqrt(a * math.exp(-2 * t) + b * math.exp(2 * t))

    length = sum(quad(speed, t0, t1, epsabs=1e-12, epsrel=1e-12)[0] for t0, t1 in ivs)
    bound = annulus_time_bound(R, r)
    return TimeReport(time, length, bound, time <= bound + 1e-12)


def quadratic_slice_time(r: float, start, p: int) -> TimeReport:
    """Time spent where ``|Q| <= r^2`` and ``|z| >= r``, ``Q = -|x|^2 + |y|^2``."""
    if not r > 0:
        raise ValidationError("need r > 0")
    a, b = _split(start, p)
    if a == 0 or b == 0:
        raise ValidationError("start must have nonzero stable and unstable parts")
    # Q(t) = -a e^-2t + b e^2t is increasing; solve Q = +-r^2 for u = e^2t
    def q_root(c):
        u = (c + math.sqrt(c * c + 4 * a * b)) / (2 * b)
        return 0.5 * math.log(u)

    t0, t1 = q_root(-r * r), q_root(r * r)
    inner = _roots_sq(a, b, r * r)
    time = t1 - t0
    if len(inner) == 2:
        lo, hi = max(t0, inner[0]), min(t1, inner[1])
        if hi > lo:
            time -= hi - lo
    return TimeReport(time, None, 2.0, time <= 2.0 + 1e-12)


def random_sphere_point(rng: np.random.Generator, n: int, radius: float) -> np.ndarray:
    v = rng.normal(size=n)
    return radius * v / np.linalg.norm(v)

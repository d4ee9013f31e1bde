"""Vectorized Dormand-Prince 5(4) integration of the gradient flow.

Many trajectories are advanced together, each with its own step size.  A
trajectory stops when it crosses its target level of F (located to the event
tolerance by a secant search on the step length followed by a Newton
correction along the flow), when it enters the critical radius of a lifted
critical point, or when it exhausts its step budget.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import MaxStepsExceeded
from .config import Tolerances

REACHED, CAPTURED, EXHAUSTED = 0, 1, 2

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = _B - np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


@dataclass
class FlowResult:
    status: np.ndarray
    x: np.ndarray
    y: np.ndarray
    capture: np.ndarray
    shift_x: np.ndarray
    shift_y: np.ndarray
    time: np.ndarray
    paths: list | None = None


def _rk(f, x, y, h, kx1, ky1):
    kx = [kx1]
    ky = [ky1]
    for i in range(1, 7):
        xi = x + h * sum(a * k for a, k in zip(_A[i], kx))
        yi = y + h * sum(a * k for a, k in zip(_A[i], ky))
        vx, vy = f(xi, yi)
        kx.append(vx)
        ky.append(vy)
    xn = x + h * sum(b * k for b, k in zip(_B, kx) if b)
    yn = y + h * sum(b * k for b, k in zip(_B, ky) if b)
    ex = h * sum(e * k for e, k in zip(_E, kx) if e)
    ey = h * sum(e * k for e, k in zip(_E, ky) if e)
    return xn, yn, ex, ey, kx[6], ky[6]


def _rk_sol(f, x, y, h, kx1, ky1):
    return _rk(f, x, y, h, kx1, ky1)[:2]


def integrate_flow(field, x0, y0, direction: int, target=None, crit=(), exclude=None,
                   tol: Tolerances | None = None, record: bool = False, raise_on_exhaust: bool = False,
                   max_time: float | None = None) -> FlowResult:
    """Integrate ``direction * field`` from the given points.

    ``target`` is a level (scalar or per-trajectory array) or None.  ``crit``
    is a sequence of base positions ``(cx, cy)``; a trajectory is captured by
    the lift ``(cx + sx, cy + sy)`` once within ``tol.critical_radius`` of it.
    ``exclude[i] = (j, sx, sy)`` removes one lift (the start) from capture for
    trajectory i.
    """
    tol = tol or Tolerances()
    F = field.map.F
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")

    def f(x, y):
        vx, vy = field(x, y)
        return direction * vx, direction * vy

    x = np.array(x0, dtype=float).ravel()
    y = np.array(y0, dtype=float).ravel()
    n = x.size
    L = None if target is None else np.broadcast_to(np.asarray(target, dtype=float), (n,)).copy()
    cx = np.array([c[0] for c in crit], dtype=float)
    cy = np.array([c[1] for c in crit], dtype=float)
    ex_j = np.full(n, -1)
    ex_sx = np.zeros(n, dtype=int)
    ex_sy = np.zeros(n, dtype=int)
    if exclude is not None:
        for i, e in enumerate(exclude):
            if e is not None:
                ex_j[i], ex_sx[i], ex_sy[i] = e
    status = np.full(n, -1)
    capture = np.full(n, -1)
    shx = np.zeros(n, dtype=int)
    shy = np.zeros(n, dtype=int)
    t = np.zeros(n)
    steps = np.zeros(n, dtype=int)
    h = np.full(n, 1e-3)
    kx, ky = f(x, y)
    paths = [[(float(a), float(b))] for a, b in zip(x, y)] if record else None
    r0 = tol.critical_radius

    if L is not None:
        done = direction * (F(x, y) - L) >= 0
        status[done] = REACHED

    while True:
        idx = np.nonzero(status < 0)[0]
        if idx.size == 0:
            break
        steps[idx] += 1
        over = idx[steps[idx] > tol.max_steps]
        if over.size:
            status[over] = EXHAUSTED
            if raise_on_exhaust:
                raise MaxStepsExceeded(f"{over.size} trajectories exceeded {tol.max_steps} steps")
            idx = np.nonzero(status < 0)[0]
            if idx.size == 0:
                break
        xi, yi, hi = x[idx], y[idx], h[idx]
        xn, yn, ex, ey, kxn, kyn = _rk(f, xi, yi, hi, kx[idx], ky[idx])
        sc_x = tol.atol + tol.rtol * np.maximum(np.abs(xi), np.abs(xn))
        sc_y = tol.atol + tol.rtol * np.maximum(np.abs(yi), np.abs(yn))
        err = np.maximum(np.abs(ex) / sc_x, np.abs(ey) / sc_y)
        err = np.where(np.isfinite(err), err, 1e10)
        acc = err <= 1.0
        fac = np.clip(0.9 * np.maximum(err, 1e-12) ** -0.2, 0.2, 5.0)
        fac = np.where(acc, fac, np.minimum(fac, 1.0))
        h_new = hi * fac
        if max_time is not None:
            h_new = np.minimum(h_new, np.maximum(max_time - t[idx], 1e-12))
        h[idx] = h_new
        a_idx = idx[acc]
        if a_idx.size == 0:
            continue
        xa, ya = xn[acc], yn[acc]
        ha = hi[acc]
        crossed = np.zeros(a_idx.size, dtype=bool)
        if L is not None:
            crossed = direction * (F(xa, ya) - L[a_idx]) >= 0
        if crossed.any():
            c_idx = a_idx[crossed]
            xs, ys, s = _locate(f, field, x[c_idx], y[c_idx], ha[crossed], kx[c_idx], ky[c_idx],
                                L[c_idx], tol)
            x[c_idx], y[c_idx] = xs, ys
            t[c_idx] += s
            status[c_idx] = REACHED
            if record:
                for i, a, b in zip(c_idx, xs, ys):
                    paths[i].append((float(a), float(b)))
        m_idx = a_idx[~crossed]
        if m_idx.size:
            x[m_idx] = xa[~crossed]
            y[m_idx] = ya[~crossed]
            kx[m_idx] = kxn[acc][~crossed]
            ky[m_idx] = kyn[acc][~crossed]
            t[m_idx] += ha[~crossed]
            if record:
                for i in m_idx:
                    paths[i].append((float(x[i]), float(y[i])))
            if max_time is not None:
                stop = m_idx[t[m_idx] >= max_time - 1e-12]
                status[stop] = REACHED
            for j in range(cx.size):
                dx = x[m_idx] - cx[j]
                dy = y[m_idx] - cy[j]
                sx = np.round(dx).astype(int)
                sy = np.round(dy).astype(int)
                near = np.hypot(dx - sx, dy - sy) < r0
                near &= ~((ex_j[m_idx] == j) & (ex_sx[m_idx] == sx) & (ex_sy[m_idx] == sy))
                near &= status[m_idx] < 0
                hit = m_idx[near]
                status[hit] = CAPTURED
                capture[hit] = j
                shx[hit] = sx[near]
                shy[hit] = sy[near]
    return FlowResult(status, x, y, capture, shx, shy, t, paths)


def _locate(f, field, x, y, h, kx, ky, L, tol):
    """Step length s in (0, h] at which the RK step meets the level, by Illinois secant."""
    F = field.map.F
    lo = np.zeros_like(h)
    hi = h.copy()
    g_lo = F(x, y) - L
    xh, yh = _rk_sol(f, x, y, hi, kx, ky)
    g_hi = F(xh, yh) - L
    side = np.zeros(h.size, dtype=int)
    s = hi.copy()
    for _ in range(60):
        denom = g_hi - g_lo
        s = np.where(denom != 0, lo - g_lo * (hi - lo) / np.where(denom != 0, denom, 1.0), 0.5 * (lo + hi))
        s = np.clip(s, lo, hi)
        xs, ys = _rk_sol(f, x, y, s, kx, ky)
        g = F(xs, ys) - L
        if np.all(np.abs(g) < 0.1 * tol.event):
            break
        same = np.sign(g) == np.sign(g_lo)
        # Illinois update keeps the bracket and halves the stale endpoint's value
        lo = np.where(same, s, lo)
        g_lo_new = np.where(same, g, g_lo)
        hi = np.where(same, hi, s)
        g_hi_new = np.where(same, g_hi, g)
        g_hi_new = np.where(same & (side == 1), 0.5 * g_hi_new, g_hi_new)
        g_lo_new = np.where(~same & (side == -1), 0.5 * g_lo_new, g_lo_new)
        side = np.where(same, 1, -1)
        g_lo, g_hi = g_lo_new, g_hi_new
    # Newton correction along the field
    for _ in range(3):
        vx, vy = field(xs, ys)
        gx, gy = field.map.grad(xs, ys)
        dfv = gx * vx + gy * vy
        r = (F(xs, ys) - L) / np.where(dfv != 0, dfv, 1.0)
        xs = xs - r * vx
        ys = ys - r * vy
    return xs, ys, s


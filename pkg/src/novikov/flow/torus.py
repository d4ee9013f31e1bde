"""Circle-valued Morse maps on the flat torus and their critical points.

A map is given by its lift ``F(x, y) = winding * x + sum of Fourier modes`` on
the plane; ``F mod 1`` is the circle-valued map.  The flow field is the
Euclidean gradient of F, optionally plus compactly supported bumps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateCritical, ValidationError
from .config import Tolerances

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class FourierMode:
    mx: int
    my: int
    ac: float = 0.0
    as_: float = 0.0


@dataclass(frozen=True)
class TorusMorseMap:
    winding: int
    fourier: tuple = ()

    def __post_init__(self):
        if isinstance(self.winding, bool) or not isinstance(self.winding, int):
            raise ValidationError("winding must be an integer")
        modes = tuple(m if isinstance(m, FourierMode) else FourierMode(*m) for m in self.fourier)
        for m in modes:
            if not all(isinstance(v, int) and not isinstance(v, bool) for v in (m.mx, m.my)):
                raise ValidationError("Fourier modes must have integer wave numbers")
        object.__setattr__(self, "fourier", modes)

    def _arrays(self):
        mx = np.array([m.mx for m in self.fourier], dtype=float)
        my = np.array([m.my for m in self.fourier], dtype=float)
        ac = np.array([m.ac for m in self.fourier], dtype=float)
        as_ = np.array([m.as_ for m in self.fourier], dtype=float)
        return mx, my, ac, as_

    def F(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = self.winding * x
        for m in self.fourier:
            th = TWO_PI * (m.mx * x + m.my * y)
            out = out + m.ac * np.cos(th) + m.as_ * np.sin(th)
        return out

    def grad(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        gx = np.full(np.broadcast(x, y).shape, float(self.winding))
        gy = np.zeros_like(gx)
        for m in self.fourier:
            th = TWO_PI * (m.mx * x + m.my * y)
            d = TWO_PI * (-m.ac * np.sin(th) + m.as_ * np.cos(th))
            gx = gx + m.mx * d
            gy = gy + m.my * d
        return gx, gy

    def hess(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        shape = np.broadcast(x, y).shape
        hxx = np.zeros(shape)
        hxy = np.zeros(shape)
        hyy = np.zeros(shape)
        for m in self.fourier:
            th = TWO_PI * (m.mx * x + m.my * y)
            d2 = -TWO_PI ** 2 * (m.ac * np.cos(th) + m.as_ * np.sin(th))
            hxx = hxx + m.mx * m.mx * d2
            hxy = hxy + m.mx * m.my * d2
            hyy = hyy + m.my * m.my * d2
        return hxx, hxy, hyy

    def to_dict(self) -> dict:
        return {"winding": self.winding,
                "fourier": [{"mx": m.mx, "my": m.my, "ac": m.ac, "as": m.as_} for m in self.fourier]}

    @classmethod
    def from_dict(cls, d: dict) -> "TorusMorseMap":
        modes = []
        for item in d.get("fourier", []):
            modes.append(FourierMode(item["mx"], item["my"], float(item.get("ac", 0.0)),
                                     float(item.get("as", 0.0))))
        return cls(d["winding"], tuple(modes))


@dataclass(frozen=True)
class Bump:
    """``amp * direction * exp(1 - 1/(1 - r^2))`` with r the scaled distance to center."""

    center: tuple
    radius: float
    direction: tuple
    amp: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValidationError("bump radius must be positive")
        d = np.asarray(self.direction, dtype=float)
        n = float(np.hypot(*d))
        if n == 0:
            raise ValidationError("bump direction must be nonzero")
        object.__setattr__(self, "direction", (float(d[0] / n), float(d[1] / n)))
        object.__setattr__(self, "center", (float(self.center[0]) % 1.0, float(self.center[1]) % 1.0))

    def profile(self, x, y):
        dx = x - self.center[0]
        dy = y - self.center[1]
        dx = dx - np.round(dx)
        dy = dy - np.round(dy)
        r2 = (dx * dx + dy * dy) / self.radius ** 2
        inside = r2 < 1.0
        safe = np.where(inside, r2, 0.0)
        return np.where(inside, np.exp(1.0 - 1.0 / (1.0 - safe)), 0.0)

    def to_dict(self) -> dict:
        return {"center": list(self.center), "radius": self.radius,
                "direction": list(self.direction), "amp": self.amp}

    @classmethod
    def from_dict(cls, d: dict) -> "Bump":
        return cls(tuple(d["center"]), float(d["radius"]), tuple(d["direction"]), float(d["amp"]))


@dataclass(frozen=True)
class VectorField:
    """Gradient of the map plus bumps; evaluated on arrays of lifted points."""

    map: TorusMorseMap
    bumps: tuple = field(default=())

    def __call__(self, x, y):
        vx, vy = self.map.grad(x, y)
        for b in self.bumps:
            p = b.amp * b.profile(x, y)
            vx = vx + p * b.direction[0]
            vy = vy + p * b.direction[1]
        return vx, vy


@dataclass(frozen=True)
class CriticalPointNum:
    name: str
    x: float
    y: float
    index: int
    eigenvalues: tuple
    e_minus: tuple | None
    e_plus: tuple | None
    value: float


def _canon(v) -> tuple:
    """Unit vector with positive first nonzero component."""
    v = np.asarray(v, dtype=float)
    v = v / np.hypot(*v)
    if v[0] < 0 or (v[0] == 0 and v[1] < 0):
        v = -v
    return (float(v[0]), float(v[1]))


def find_critical_points(m: TorusMorseMap, tol: Tolerances | None = None) -> list[CriticalPointNum]:
    """Newton's method from a square seed grid, deduplicated modulo Z^2."""
    tol = tol or Tolerances()
    n = tol.seed_grid
    g = (np.arange(n) + 0.5) / n
    X, Y = np.meshgrid(g, g, indexing="ij")
    x = X.ravel().copy()
    y = Y.ravel().copy()
    for _ in range(60):
        gx, gy = m.grad(x, y)
        hxx, hxy, hyy = m.hess(x, y)
        det = hxx * hyy - hxy * hxy
        ok = np.abs(det) > 1e-300
        det = np.where(ok, det, 1.0)
        dx = np.where(ok, (hyy * gx - hxy * gy) / det, 0.0)
        dy = np.where(ok, (-hxy * gx + hxx * gy) / det, 0.0)
        step = np.hypot(dx, dy)
        scale = np.where(step > 0.05, 0.05 / np.maximum(step, 1e-300), 1.0)
        x = x - scale * dx
        y = y - scale * dy
    gx, gy = m.grad(x, y)
    conv = np.hypot(gx, gy) < tol.newton
    pts = []
    for px, py in zip(np.mod(x[conv], 1.0), np.mod(y[conv], 1.0)):
        dup = False
        for qx, qy in pts:
            ddx = px - qx - round(px - qx)
            ddy = py - qy - round(py - qy)
            if np.hypot(ddx, ddy) < tol.dedupe:
                dup = True
                break
        if not dup:
            pts.append((float(px), float(py)))
    out = []
    for px, py in pts:
        hxx, hxy, hyy = (float(a) for a in m.hess(px, py))
        w, V = np.linalg.eigh(np.array([[hxx, hxy], [hxy, hyy]]))
        if np.min(np.abs(w)) < tol.eigen_floor:
            raise DegenerateCritical(f"degenerate critical point near ({px:.6f}, {py:.6f}): eigenvalues {w}")
        index = int(np.sum(w < 0))
        e_minus = _canon(V[:, 0]) if index == 1 else None
        e_plus = _canon(V[:, 1]) if index == 1 else None
        out.append((index, px, py, tuple(float(a) for a in w), e_minus, e_plus, float(m.F(px, py))))
    out.sort(key=lambda r: (-r[0], r[2], r[1]))
    counters: dict = {}
    res = []
    for index, px, py, w, em, ep, val in out:
        j = counters.get(index, 0)
        counters[index] = j + 1
        res.append(CriticalPointNum(f"x{index}_{j}", px, py, index, w, em, ep, val))
    return res

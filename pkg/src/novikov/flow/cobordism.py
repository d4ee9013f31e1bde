"""The fundamental cobordism of a circle-valued map on the torus.

Conventions (winding 1).  The cover is the plane; the deck element theta acts
by ``(x, y) -> (x - 1, y)`` and lowers F by one, h acts by ``(x, y) -> (x, y + 1)``.
The cut level c0 sits in the widest gap of critical values mod 1 and
``W = F^-1([c0 - 1, c0])`` with upper boundary V1 (level c0) and lower boundary
V0 (level c0 - 1).  Every critical point has a base lift in W with y in [0, 1).
The fiber is parametrized by y.

Counts between base lifts use the group element ``g = h^b theta^j``: a flow
line from p to ``q g`` with q sitting j copies below.  The j = 0 terms are
flow lines inside W.

Signs.  A descending branch of an index-1 point leaving along ``+e_minus``
counts +1 and along ``-e_minus`` counts -1 (index 1 -> 0).  For index 2 -> 1 the
ascending branch of q leaving along d counts ``-sign det(d, e_minus(q))``.
Here ``e_minus``/``e_plus`` are unit eigenvectors with positive first nonzero
component.  The descending disc D(p, v) is the set of points flowing forward
*into* p, tangent to the negative eigenspace.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import NonTransversal, ValidationError
from .config import Tolerances
from .integrate import CAPTURED, EXHAUSTED, REACHED, integrate_flow
from .torus import Bump, CriticalPointNum, TorusMorseMap, VectorField, find_critical_points


@dataclass
class Branch:
    crit: int
    sign: int
    direction: int
    weight: int
    crossings: list = field(default_factory=list)
    end: tuple = ("open",)


@dataclass(frozen=True)
class SphereInLevel:
    level: float
    points: tuple
    source: str
    side: str


class Cobordism:
    """Critical data, cut level and cached branch traces for one flow field."""

    def __init__(self, m: TorusMorseMap, bumps=(), tol: Tolerances | None = None,
                 c0: float | None = None, crit: list | None = None):
        if m.winding != 1:
            raise ValidationError("cobordism constructions require winding 1")
        self.map = m
        self.tol = tol or Tolerances()
        self.bumps = tuple(b if isinstance(b, Bump) else Bump.from_dict(b) for b in bumps)
        self.field = VectorField(m, self.bumps)
        self.crit: list[CriticalPointNum] = crit if crit is not None else find_critical_points(m, self.tol)
        self.c0 = cut_level([c.value for c in self.crit]) if c0 is None else float(c0)
        self.lifts = []
        for c in self.crit:
            j = int(np.floor(self.c0 - c.value))
            self.lifts.append((c.x + j, c.y))
        self.names = [c.name for c in self.crit]
        self._check_fiber()
        self._branch_cache: dict = {}

    # ------------------------------------------------------------ basics
    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ValidationError(f"unknown critical point {name!r}") from None

    def level_of(self, i: int) -> float:
        return float(self.map.F(*self.lifts[i]))

    def fiber_x(self, level: float, y) -> np.ndarray:
        """x-coordinates of the fiber ``F = level`` over the given y's."""
        y = np.asarray(y, dtype=float)
        x = np.full(y.shape, float(level))
        for _ in range(100):
            gx, _ = self.map.grad(x, y)
            dx = (self.map.F(x, y) - level) / gx
            x = x - dx
            if np.all(np.abs(dx) < 1e-15 * (1 + np.abs(x))):
                break
        return x

    def _check_fiber(self):
        m = self.map
        amp = sum(abs(f.ac) + abs(f.as_) for f in m.fourier)
        ys = np.linspace(0.0, 1.0, 257)[:-1]
        xs = np.linspace(self.c0 - amp - 1.0, self.c0 + amp + 1.0, int(512 * (2 * amp + 2)) + 1)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        s = m.F(X, Y) > self.c0
        changes = np.sum(s[1:] != s[:-1], axis=0)
        if np.any(changes != 1):
            raise ValidationError(f"the fiber at level {self.c0:.6f} is not a graph over y")
        y = np.linspace(0.0, 1.0, 2 * self.tol.fiber_samples, endpoint=False)
        x = self.fiber_x(self.c0, y)
        gx, gy = m.grad(x, y)
        vx, vy = self.field(x, y)
        if np.any(gx <= 0) or np.any(gx * vx + gy * vy <= 0):
            raise ValidationError("the flow is not transverse to the cut fiber")

    # ------------------------------------------------------------ transport
    def transport(self, y, from_level: float, to_level: float, exclude=None):
        """Flow fiber points from one level to another (down if to < from)."""
        y = np.asarray(y, dtype=float)
        x = self.fiber_x(from_level, y)
        direction = -1 if to_level < from_level else 1
        return integrate_flow(self.field, x, y, direction, target=to_level, crit=self.lifts,
                              exclude=exclude, tol=self.tol)

    def branches(self, direction: int, copies: int) -> list[Branch]:
        """Trace both branches of every index-1 point through ``copies`` fibers.

        direction -1 follows descending branches (from ``+-e_minus``), +1 the
        ascending ones (from ``+-e_plus``).
        """
        key = (direction, copies)
        if key in self._branch_cache:
            return self._branch_cache[key]
        out = []
        for i, c in enumerate(self.crit):
            if c.index != 1:
                continue
            e = np.array(c.e_minus if direction < 0 else c.e_plus)
            em = np.array(c.e_minus)
            for s in (1, -1):
                d = s * e
                if direction < 0:
                    w = s
                else:
                    w = -int(np.sign(d[0] * em[1] - d[1] * em[0]))
                out.append(Branch(i, s, direction, w))
        if out:
            eps = self.tol.shoot_eps
            x = np.array([self.lifts[b.crit][0] + eps * b.sign * self._edir(b)[0] for b in out])
            y = np.array([self.lifts[b.crit][1] + eps * b.sign * self._edir(b)[1] for b in out])
            active = list(range(len(out)))
            exclude = [(b.crit, 0, 0) for b in out]
            if direction < 0:
                levels = [self.c0 - 1 - i for i in range(copies + 1)]
            else:
                levels = [self.c0 + i for i in range(copies + 1)]
            for lev in levels:
                if not active:
                    break
                r = integrate_flow(self.field, x[active], y[active], direction, target=lev, crit=self.lifts,
                                   exclude=[exclude[i] for i in active], tol=self.tol)
                still = []
                for pos, i in enumerate(active):
                    b = out[i]
                    x[i], y[i] = r.x[pos], r.y[pos]
                    if r.status[pos] == REACHED:
                        b.crossings.append((lev, float(r.x[pos]), float(r.y[pos])))
                        still.append(i)
                    elif r.status[pos] == CAPTURED:
                        b.end = ("captured", int(r.capture[pos]), int(r.shift_x[pos]), int(r.shift_y[pos]))
                    else:
                        b.end = ("exhausted",)
                active = still
        self._branch_cache[key] = out
        return out

    def _edir(self, b: Branch):
        c = self.crit[b.crit]
        return c.e_minus if b.direction < 0 else c.e_plus


def cut_level(values) -> float:
    """Midpoint of the widest gap between critical values mod 1."""
    if not values:
        return 0.5
    v = sorted(x % 1.0 for x in values)
    gaps = [(v[(i + 1) % len(v)] - v[i]) % 1.0 or 1.0 for i in range(len(v))]
    i = int(np.argmax(gaps))
    return float((v[i] + gaps[i] / 2) % 1.0)


def build_cobordism(m: TorusMorseMap, bumps=(), tol: Tolerances | None = None, c0=None) -> Cobordism:
    return Cobordism(m, bumps, tol, c0)


# ---------------------------------------------------------------- spheres

def _sphere(cob: Cobordism, name: str, level: float, direction: int) -> SphereInLevel:
    i = cob.index_of(name)
    c = cob.crit[i]
    if c.index != 1:
        raise ValidationError("spheres are finite point sets only for index-1 points on a surface")
    lp = cob.level_of(i)
    if direction < 0 and not level < lp or direction > 0 and not level > lp:
        raise ValidationError("level is on the wrong side of the critical value")
    e = np.array(c.e_minus if direction < 0 else c.e_plus)
    em = np.array(c.e_minus)
    eps = cob.tol.shoot_eps
    pts = []
    x0 = [cob.lifts[i][0] + s * eps * e[0] for s in (1, -1)]
    y0 = [cob.lifts[i][1] + s * eps * e[1] for s in (1, -1)]
    r = integrate_flow(cob.field, x0, y0, direction, target=level, crit=cob.lifts,
                       exclude=[(i, 0, 0)] * 2, tol=cob.tol)
    for k, s in enumerate((1, -1)):
        if r.status[k] != REACHED:
            continue
        if direction < 0:
            sign = s
        else:
            d = s * e
            sign = int(np.sign(d[0] * em[1] - d[1] * em[0]))
        pts.append((float(r.y[k]), sign))
    return SphereInLevel(level, tuple(pts), name, "descending" if direction < 0 else "ascending")


def descending_sphere(cob: Cobordism, name: str, level: float) -> SphereInLevel:
    """Points of the descending disc on the level below, with orientation signs."""
    return _sphere(cob, name, level, -1)


def ascending_sphere(cob: Cobordism, name: str, level: float) -> SphereInLevel:
    """Points of the ascending disc on the level above, signed by ``sign det(d, e_minus)``."""
    return _sphere(cob, name, level, +1)


# ---------------------------------------------------------------- counting

def equivariant_counts(cob: Cobordism, p: str, q: str, copies: int) -> dict:
    """``{(j, b): count}`` of flow lines from p to ``q h^b theta^j`` for j <= copies."""
    ip, iq = cob.index_of(p), cob.index_of(q)
    sp, sq = cob.crit[ip].index, cob.crit[iq].index
    if sp != sq + 1:
        raise ValidationError(f"index mismatch: ind {p} must equal ind {q} + 1")
    out: dict = {}
    if sp == 1:
        for b in cob.branches(-1, copies):
            if b.crit != ip:
                continue
            _check_end(cob, b)
            if b.end[0] == "captured" and b.end[1] == iq:
                j, bb = -b.end[2], b.end[3]
                out[(j, bb)] = out.get((j, bb), 0) + b.weight
    else:
        for b in cob.branches(+1, copies):
            if b.crit != iq:
                continue
            _check_end(cob, b)
            if b.end[0] == "captured" and b.end[1] == ip:
                j, bb = b.end[2], -b.end[3]
                out[(j, bb)] = out.get((j, bb), 0) + b.weight
    return {k: v for k, v in sorted(out.items()) if v and k[0] <= copies}


def _check_end(cob: Cobordism, b: Branch):
    if b.end[0] == "exhausted":
        raise NonTransversal(f"branch of {cob.names[b.crit]} stalled (step budget exhausted)")
    if b.end[0] == "captured":
        target = cob.crit[b.end[1]]
        if target.index == cob.crit[b.crit].index:
            raise NonTransversal(f"flow line between {cob.names[b.crit]} and {target.name}")


def count_intersections(cob: Cobordism, p: str, q: str, k: int) -> int:
    """n_k(p, q) with p in W and q in the next copy (k >= -1; k = -1 is the direct term)."""
    if k < -1:
        raise ValidationError("k must be at least -1")
    counts = equivariant_counts(cob, p, q, k + 1)
    return sum(v for (j, _), v in counts.items() if j == k + 1)


def count_table(cob: Cobordism, p: str, q: str, kmax: int) -> list[int]:
    """``[n_-1, n_0, ..., n_kmax]`` from one trace."""
    counts = equivariant_counts(cob, p, q, kmax + 1)
    out = [0] * (kmax + 2)
    for (j, _), v in counts.items():
        if j <= kmax + 1:
            out[j] += v
    return out


def adjacent_pairs(cob: Cobordism) -> list[tuple[str, str]]:
    out = []
    for s in (2, 1):
        for a in cob.crit:
            if a.index != s:
                continue
            for b in cob.crit:
                if b.index == s - 1:
                    out.append((a.name, b.name))
    return out


def check_transversality(cob: Cobordism, kmax: int = 6) -> bool:
    """No flow line joins two index-1 points (any lifts) within ``kmax`` copies."""
    try:
        down = cob.branches(-1, kmax)
        up = cob.branches(+1, kmax)
        for b in down + up:
            _check_end(cob, b)
    except NonTransversal:
        return False
    tol = cob.tol.transversality
    ups = [(b, cr) for b in up for cr in b.crossings]
    for b in down:
        for i, cd in enumerate(b.crossings):
            for b2, cu in ups:
                copies_used = i + 1 + b2.crossings.index(cu)
                if copies_used > kmax:
                    continue
                dy = (cd[2] - cu[2]) - round(cd[2] - cu[2])
                if abs(dy) < tol:
                    return False
    return True


def geometric_incidence(cob: Cobordism, p: str, q: str, kmax: int, group=None):
    """Equivariant incidence from flow lines, in the W / W t lift convention,
    known up to theta^kmax."""
    from ..twisted import NovikovElt, ZH
    from .condition_c import TORUS_GROUP
    G = group or TORUS_GROUP
    counts = equivariant_counts(cob, p, q, kmax + 1)
    levels = [dict() for _ in range(kmax + 2)]
    for (j, b), v in counts.items():
        if j <= kmax + 1:
            levels[j][(b,)] = levels[j].get((b,), 0) + v
    return NovikovElt.make(G, -1, [ZH(1, d) for d in levels], kmax)


def equivariant_counts_lifted(cob: Cobordism, p: str, q: str, g1: tuple, g2: tuple, copies: int) -> dict:
    """Counts ``{(j, b): n}`` of flow lines from ``p g1`` to ``q g2 h^b theta^j``,
    traced from the shifted lift itself.  ``g = (b, k)`` means ``h^b theta^k``,
    which translates the plane by ``(-k, b)``."""
    ip, iq = cob.index_of(p), cob.index_of(q)
    sp, sq = cob.crit[ip].index, cob.crit[iq].index
    if sp != sq + 1:
        raise ValidationError(f"index mismatch: ind {p} must equal ind {q} + 1")
    (b1, k1), (b2, k2) = g1, g2
    src = ip if sp == 1 else iq
    gb, gk = (b1, k1) if sp == 1 else (b2, k2)
    c = cob.crit[src]
    e = np.array(c.e_minus if sp == 1 else c.e_plus)
    em = np.array(c.e_minus)
    eps = cob.tol.shoot_eps
    bx, by = cob.lifts[src][0] - gk, cob.lifts[src][1] + gb
    direction = -1 if sp == 1 else 1
    signs = (1, -1)
    x = [bx + s * eps * e[0] for s in signs]
    y = [by + s * eps * e[1] for s in signs]
    if direction < 0:
        target = cob.level_of(src) - gk - copies - abs(k1 - k2) - 2
    else:
        target = cob.level_of(src) - gk + copies + abs(k1 - k2) + 2
    r = integrate_flow(cob.field, x, y, direction, target=target, crit=cob.lifts,
                       exclude=[(src, -gk, gb)] * 2, tol=cob.tol)
    out: dict = {}
    for i, s in enumerate(signs):
        if r.status[i] == EXHAUSTED:
            raise NonTransversal("branch stalled")
        if r.status[i] != CAPTURED:
            continue
        hit = int(r.capture[i])
        if cob.crit[hit].index == c.index:
            raise NonTransversal("flow line between index-1 points")
        sx, sy = int(r.shift_x[i]), int(r.shift_y[i])
        if sp == 1:
            if hit != iq:
                continue
            w = s
            j, b = -sx - k2, sy - b2
        else:
            if hit != ip:
                continue
            d = s * e
            w = -int(np.sign(d[0] * em[1] - d[1] * em[0]))
            j, b = k1 + sx, b1 - sy
        out[(j, b)] = out.get((j, b), 0) + w
    return {k: v for k, v in sorted(out.items()) if v and k[0] <= copies}


def branch_paths(cob: Cobordism, copies: int = 1) -> list[list[tuple]]:
    """Recorded polylines of all index-1 branches, descending and ascending,
    through ``copies`` fibers beyond W; used for pictures only."""
    paths = []
    eps = cob.tol.shoot_eps
    for direction, target in ((-1, cob.c0 - 1 - copies), (1, cob.c0 + copies)):
        starts = []
        for i, c in enumerate(cob.crit):
            if c.index != 1:
                continue
            e = np.array(c.e_minus if direction < 0 else c.e_plus)
            for s in (1, -1):
                starts.append((i, cob.lifts[i][0] + eps * s * e[0], cob.lifts[i][1] + eps * s * e[1]))
        if not starts:
            continue
        r = integrate_flow(cob.field, [s[1] for s in starts], [s[2] for s in starts], direction,
                           target=target, crit=cob.lifts, exclude=[(s[0], 0, 0) for s in starts],
                           tol=cob.tol, record=True)
        paths.extend(r.paths)
    return paths

"""Recounting flow lines after a compactly supported perturbation of the field."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import BumpTouchesCriticalSet, NonTransversal
from .cobordism import Cobordism, adjacent_pairs, count_table
from .torus import Bump, VectorField


@dataclass(frozen=True)
class PerturbationReport:
    kmax: int
    base: dict
    perturbed: dict
    differences: list
    outside_hypothesis: bool
    min_dF_v: float
    errors: list = field(default_factory=list)

    @property
    def identical(self) -> bool:
        return not self.differences and not self.errors


def _periodic_dist(ax, ay, bx, by):
    dx = ax - bx - np.round(ax - bx)
    dy = ay - by - np.round(ay - by)
    return np.hypot(dx, dy)


def check_bumps(cob: Cobordism, bumps) -> tuple[bool, float]:
    """Reject bumps near critical points; return (outside_hypothesis, min dF(w))."""
    clear = cob.tol.bump_clearance
    outside = False
    worst = np.inf
    for b in bumps:
        for c in cob.crit:
            if _periodic_dist(b.center[0], b.center[1], c.x, c.y) < b.radius + clear:
                raise BumpTouchesCriticalSet(f"bump at {b.center} reaches within {clear} of {c.name}")
        if abs(b.amp) > cob.tol.bump_max_amp:
            outside = True
        # dF(w) on the support
        r = b.radius * np.sqrt(np.linspace(0, 1, 64, endpoint=False))
        a = np.linspace(0, 2 * np.pi, 64, endpoint=False)
        R, A = np.meshgrid(r, a)
        x = b.center[0] + R * np.cos(A)
        y = b.center[1] + R * np.sin(A)
        gx, gy = cob.map.grad(x, y)
        vx, vy = VectorField(cob.map, cob.bumps + tuple(bumps))(x, y)
        worst = min(worst, float(np.min(gx * vx + gy * vy)))
    if worst <= 0:
        outside = True
    return outside, (worst if np.isfinite(worst) else float("nan"))


def random_admissible_bumps(cob: Cobordism, rng: np.random.Generator, count: int,
                            max_amp: float | None = None) -> list[Bump]:
    """Bumps with random center, radius in [0.05, 0.15], direction and amplitude."""
    max_amp = cob.tol.bump_max_amp if max_amp is None else max_amp
    out = []
    while len(out) < count:
        cx, cy = rng.random(2)
        radius = float(rng.uniform(0.05, 0.15))
        if any(_periodic_dist(cx, cy, c.x, c.y) < radius + cob.tol.bump_clearance for c in cob.crit):
            continue
        ang = rng.uniform(0, 2 * np.pi)
        amp = float(rng.uniform(0.1, 1.0)) * max_amp
        out.append(Bump((float(cx), float(cy)), radius, (float(np.cos(ang)), float(np.sin(ang))), amp))
    return out


def perturb_and_recount(cob: Cobordism, bumps, kmax: int = 6) -> PerturbationReport:
    """Compare n_k for -1 <= k <= kmax before and after adding the bumps."""
    bumps = tuple(b if isinstance(b, Bump) else Bump.from_dict(b) for b in bumps)
    outside, min_dfv = check_bumps(cob, bumps)
    pairs = adjacent_pairs(cob)
    base = {pq: count_table(cob, *pq, kmax) for pq in pairs}
    errors = []
    new = {}
    try:
        pert = Cobordism(cob.map, cob.bumps + bumps, cob.tol, cob.c0, cob.crit)
        new = {pq: count_table(pert, *pq, kmax) for pq in pairs}
    except (NonTransversal, ValueError) as e:
        errors.append(str(e))
    diffs = []
    for pq in pairs:
        if pq not in new:
            continue
        for k, (a, b) in enumerate(zip(base[pq], new[pq])):
            if a != b:
                diffs.append((pq[0], pq[1], k - 1, a, b))
    return PerturbationReport(kmax, base, new, diffs, outside, min_dfv, errors)

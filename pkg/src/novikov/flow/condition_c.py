"""Condition (C) on the circle fiber and the return endomorphism.

The fiber carries an auxiliary height with one minimum at ``y_min`` and one
maximum at ``y_max``.  The delta-thickened pieces of its handle filtration are
the arcs ``|y - y_min| <= delta`` (the min-arc) and ``|y - y_max| <= delta``
(the max-arc), taken mod 1 and identical on V0 and V1, which is the cyclic
matching across the cut.

(B1): descending from V1 minus the max-arc lands in the min-arc of V0 or is
captured by an index-0 point, and the descending branches of index-1 points
meet V0 inside the min-arc.  (B0) is the dual statement for the ascending
flow from V0 minus the min-arc, the max-arc of V1 and the ascending branches.

Only the degree-0 inclusions are non-vacuous on a circle; the
delta-separation property of the thickenings is not checked.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..chains import CyclicMorseData, augment
from ..errors import ConditionCNotVerified, NonTransversal, ValidationError
from ..semilinear import SemilinearEndo
from ..twisted import TwistedGroup, ZH
from .cobordism import Cobordism, _check_end, equivariant_counts
from .integrate import CAPTURED, REACHED

TORUS_GROUP = TwistedGroup(1, ((1,),))


def _arc_dist(y, c):
    d = np.asarray(y) - c
    return np.abs(d - np.round(d))


def _arc_lift(y, c) -> int:
    return int(np.round(y - c))


@dataclass(frozen=True)
class ConditionCWitness:
    delta: float
    y_min: float
    y_max: float
    passed_B1: bool
    passed_B0: bool
    margin_B1: float
    margin_B0: float
    worst_sample: tuple | None
    samples: int

    @property
    def passed(self) -> bool:
        return self.passed_B1 and self.passed_B0

    def to_dict(self) -> dict:
        return {"delta": self.delta, "y_min": self.y_min, "y_max": self.y_max,
                "passed_B1": self.passed_B1, "passed_B0": self.passed_B0,
                "margin_B1": self.margin_B1, "margin_B0": self.margin_B0,
                "worst_sample": list(self.worst_sample) if self.worst_sample else None,
                "samples": self.samples}


def default_fiber_data(cob: Cobordism) -> tuple[float, float]:
    """``(y_min, y_max)``: y of an index-0 (index-2) point, otherwise where the
    transported fiber concentrates after one copy."""
    mins = [c.y for c in cob.crit if c.index == 0]
    maxs = [c.y for c in cob.crit if c.index == 2]
    ys = np.linspace(0.0, 1.0, 256, endpoint=False)

    def concentration(direction):
        if direction < 0:
            r = cob.transport(ys, cob.c0, cob.c0 - 1)
        else:
            r = cob.transport(ys, cob.c0 - 1, cob.c0)
        ok = r.status == REACHED
        if not ok.any():
            return 0.0
        ang = 2 * np.pi * r.y[ok]
        return float((np.arctan2(np.sin(ang).mean(), np.cos(ang).mean()) / (2 * np.pi)) % 1.0)

    y_min = mins[0] if mins else concentration(-1)
    y_max = maxs[0] if maxs else concentration(+1)
    return float(y_min), float(y_max)


def _sample_complement(center: float, delta: float, n: int) -> np.ndarray:
    """n points of the circle outside the closed delta-arc around center."""
    return center + delta + (1 - 2 * delta) * (np.arange(n) + 0.5) / n


def check_condition_C(cob: Cobordism, delta: float, y_min: float, y_max: float) -> ConditionCWitness:
    """Sample both inclusions; failure is reported through the witness."""
    if not delta > 0:
        raise ValidationError("delta must be positive")
    if 2 * delta >= _arc_dist(y_min, y_max):
        raise ValidationError("the min-arc and the max-arc overlap")
    n = cob.tol.fiber_samples
    worst = None
    results = {}
    for label, direction in (("B1", -1), ("B0", +1)):
        src_c, dst_c = (y_max, y_min) if direction < 0 else (y_min, y_max)
        ys = _sample_complement(src_c, delta, n)
        if direction < 0:
            r = cob.transport(ys, cob.c0, cob.c0 - 1)
        else:
            r = cob.transport(ys, cob.c0 - 1, cob.c0)
        ok = True
        margin = np.inf
        good_index = 0 if direction < 0 else 2
        for k in range(n):
            if r.status[k] == CAPTURED:
                if cob.crit[r.capture[k]].index == good_index:
                    continue
                ok = False
                worst = worst or (label, float(ys[k]), "captured by " + cob.names[r.capture[k]])
            elif r.status[k] != REACHED:
                ok = False
                worst = worst or (label, float(ys[k]), "step budget exhausted")
            else:
                mg = delta - float(_arc_dist(r.y[k], dst_c))
                if mg < margin:
                    margin = mg
                    if mg < 0:
                        worst = (label, float(ys[k]), float(r.y[k]), mg)
        # branches of index-1 points meeting the target fiber
        for b in cob.branches(direction, 0):
            try:
                _check_end(cob, b)
            except NonTransversal:
                ok = False
                worst = worst or (label, "branch", cob.names[b.crit], "non-transversal")
                continue
            if not b.crossings:
                continue
            lev, _, yb = b.crossings[0]
            mg = delta - float(_arc_dist(yb, dst_c))
            margin = min(margin, mg)
            if mg < 0:
                ok = False
                worst = worst or (label, "branch", cob.names[b.crit], yb, mg)
        if margin < 0:
            ok = False
        results[label] = (ok, float(margin) if np.isfinite(margin) else float(delta))
    return ConditionCWitness(delta, y_min, y_max, results["B1"][0], results["B0"][0],
                             results["B1"][1], results["B0"][1], worst, n)


# ---------------------------------------------------------------- return data

def _uniform_lift(cob, r, k, center):
    """How sample k ended: ('pass', arc lift) or ('cap', crit, x shift, y shift)."""
    if r.status[k] == CAPTURED:
        return ("cap", int(r.capture[k]), int(r.shift_x[k]), int(r.shift_y[k]))
    if r.status[k] == REACHED:
        return ("pass", _arc_lift(r.y[k], center))
    return ("stalled",)


def _arc_behaviour(cob, center, delta, from_level, to_level, what, merge_captures=False):
    """Transport the whole arc; all samples must end the same way.

    With ``merge_captures`` any mix of captures counts as one outcome
    ``("cap",)``: a relative 1-cycle swallowed by critical points of index <= 1
    is zero in the filtered homology of the target fiber.
    """
    n = max(cob.tol.fiber_samples // 8, 16)
    ys = center + delta * (2 * (np.arange(n) + 0.5) / n - 1)
    r = cob.transport(ys, from_level, to_level)
    outcomes = {_uniform_lift(cob, r, k, center) for k in range(n)}
    if merge_captures and all(o[0] == "cap" for o in outcomes):
        if any(cob.crit[o[1]].index > 1 for o in outcomes):
            raise ConditionCNotVerified(f"{what}: captured by a point of index 2")
        outcomes = {("cap",)}
    if len(outcomes) != 1:
        raise ConditionCNotVerified(f"{what}: the arc splits into {sorted(outcomes)}", witness=sorted(outcomes))
    out = outcomes.pop()
    if out[0] == "stalled":
        raise ConditionCNotVerified(f"{what}: transport stalled")
    return out


@dataclass(frozen=True)
class ReturnData:
    """Fiber-homology data of both gradings plus the direct counts inside W."""

    witness: ConditionCWitness
    data: CyclicMorseData

    def integer(self) -> CyclicMorseData:
        return augment(self.data)


def compute_return_endomorphism(cob: Cobordism, delta: float = 0.1, y_min: float | None = None,
                                y_max: float | None = None) -> ReturnData:
    """Route B: h, X and lambda from transports of fiber arcs and sphere points.

    The equivariant data is over Z[h^{+-1}]; the Z((t)) data is its
    augmentation (``ReturnData.integer``).
    """
    if y_min is None or y_max is None:
        a, b = default_fiber_data(cob)
        y_min = a if y_min is None else y_min
        y_max = b if y_max is None else y_max
    w = check_condition_C(cob, delta, y_min, y_max)
    if not w.passed:
        raise ConditionCNotVerified(f"condition (C) fails at delta={delta}", witness=w)
    G = TORUS_GROUP
    zero = ZH(1)
    c0 = cob.c0

    def mono(b, c=1):
        return ZH.mono((b,), c)

    # degree 0: the min-arc class
    out = _arc_behaviour(cob, y_min, delta, c0, c0 - 1, "min-arc descent across W")
    h0 = mono(out[1]) if out[0] == "pass" else zero
    if out[0] == "cap" and cob.crit[out[1]].index != 0:
        raise ConditionCNotVerified("min-arc captured by a point of positive index")
    # degree 1: the max-arc class
    out = _arc_behaviour(cob, y_max, delta, c0, c0 - 1, "max-arc descent across W", merge_captures=True)
    h1 = mono(out[1]) if out[0] == "pass" else zero
    # pairing of minima (lifted one copy down) with the min-arc of V0
    out = _arc_behaviour(cob, y_min, delta, c0 - 1, c0 - 2, "min-arc descent across the next copy")
    lam: dict = {}
    if out[0] == "cap":
        name = cob.names[out[1]]
        if cob.crit[out[1]].index != 0 or out[2] != -1:
            raise ConditionCNotVerified("min-arc captured outside the expected copy")
        lam[name] = (mono(out[3]),)
    # classes of maxima: the max-arc of V0 ascending into W
    out = _arc_behaviour(cob, y_max, delta, c0 - 1, c0, "max-arc ascent across W")
    X: dict = {}
    if out[0] == "cap":
        name = cob.names[out[1]]
        if cob.crit[out[1]].index != 2 or out[2] != 0:
            raise ConditionCNotVerified("max-arc captured outside W")
        X[name] = (mono(-out[3], -1),)
    # descending spheres of index-1 points on V0, ascending ones of their lifts one copy down on V0
    for b in cob.branches(-1, 0):
        _check_end(cob, b)
        name = cob.names[b.crit]
        X.setdefault(name, (zero,))
        if b.crossings:
            yb = b.crossings[0][2]
            X[name] = (X[name][0] + mono(_arc_lift(yb, y_min), b.sign),)
    for b in cob.branches(+1, 0):
        _check_end(cob, b)
        name = cob.names[b.crit]
        lam.setdefault(name, (zero,))
        if b.crossings:
            # the same branch one copy down meets V0 at the same y
            yb = b.crossings[0][2]
            em = cob.crit[b.crit].e_minus
            d = np.array(cob.crit[b.crit].e_plus) * b.sign
            c = int(np.sign(d[0] * em[1] - d[1] * em[0]))
            lam[name] = (lam[name][0] + mono(-_arc_lift(yb, y_max), c),)
    indices: dict = {}
    for c in cob.crit:
        indices.setdefault(c.index, [])
        indices[c.index].append(c.name)
    for s in (0, 1, 2):
        indices.setdefault(s, [])
    indices = {s: tuple(v) for s, v in sorted(indices.items())}
    direct = {}
    for s in (2, 1):
        for p in indices[s]:
            for q in indices[s - 1]:
                d0 = {k: v for k, v in equivariant_counts(cob, p, q, 0).items() if k[0] == 0}
                if d0:
                    direct[(p, q)] = ZH(1, {(b,): v for (_, b), v in d0.items()})
    h_hat = {0: SemilinearEndo(G, ((h0,),)), 1: SemilinearEndo(G, ((h1,),))}
    for p in indices[1]:
        X.setdefault(p, (zero,))
        lam.setdefault(p, (zero,))
    for p in indices[2]:
        X.setdefault(p, (zero,))
    for p in indices[0]:
        lam.setdefault(p, (zero,))
    data = CyclicMorseData(indices, h={}, X={}, lam={}, direct={}, group=G, h_hat=h_hat,
                           X_hat=X, lam_hat=lam, direct_hat=direct, geometric=True)
    integer = augment(data)
    data = CyclicMorseData(indices, integer.h, integer.X, integer.lam, integer.direct, G, h_hat,
                           X, lam, direct, geometric=True)
    return ReturnData(w, data)

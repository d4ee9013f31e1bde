"""The acceptance battery: ten end-to-end checks with pass/fail verdicts.

Each ``criterion_*`` function returns a :class:`Verdict`.  ``run_all`` runs
them in order; ``fault=True`` corrupts one coefficient in the first two-route
comparison so that the battery demonstrably fails.
"""

from __future__ import annotations

import json
import math
import random
import time
from dataclasses import dataclass

import numpy as np

from .chains import (
    CyclicMorseData, assemble_novikov_complex, assemble_twisted_complex, base_change, check_d2,
    equivariant_incidence, incidence_rational, incidence_series,
)
from .laurent import (
    LaurentSeries, cramer_series, expand_rational, iterate_pairing, poly_eval, reconstruct_rational,
)
from .semilinear import SemilinearEndo, apply_iterated, apply_power, direct_series, summed_series
from .serialize import series_to_json
from .twisted import (
    GroupElt, NovikovElt, TwistedGroup, ZH, check_exponential_growth, expand_typeL,
    growth_constants_for_typeL, int_det,
)


@dataclass(frozen=True)
class Verdict:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d}. {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _timed(number, name, fn, limit=None):
    t = time.perf_counter()
    ok, detail = fn()
    dt = time.perf_counter() - t
    if limit is not None and dt >= limit:
        ok = False
        detail += f"; runtime {dt:.1f}s exceeds {limit}s"
    return Verdict(number, name, ok, detail, dt)


# ---------------------------------------------------------------- 1

def criterion_1(seed: int = 0, count: int = 1000, fault: bool = False) -> Verdict:
    def run():
        rng = random.Random(seed)
        for it in range(count):
            n = rng.randint(1, 5)
            A = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)]
            p = [rng.randint(-3, 3) for _ in range(n)]
            lam = [rng.randint(-3, 3) for _ in range(n)]
            r = cramer_series(A, p, lam)
            got = expand_rational(r, 50).coefficients(0, 50)
            if fault and it == 0:
                got[7] += 1
            want = iterate_pairing(A, p, lam, 50)
            if got != want:
                return False, f"instance {it}: series differ from direct iteration"
            if r.den_Q[0] != 1:
                return False, f"instance {it}: Q(0) != 1"
            # Q against det(I - A t0) at n + 1 integer points (Bareiss)
            for t0 in range(n + 1):
                M = [[(1 if i == j else 0) - A[i][j] * t0 for j in range(n)] for i in range(n)]
                if poly_eval(r.den_Q, t0) != int_det(M):
                    return False, f"instance {it}: denominator is not det(1 - A t)"
        return True, f"{count} instances, k <= 50"
    return _timed(1, "Cramer agreement", run, limit=30)


# ---------------------------------------------------------------- shared torus pipeline

_TORUS_CACHE: dict = {}


def torus_pipeline(tol=None):
    """Cobordism and route-B return data of the built-in four-point map."""
    key = json.dumps(tol.to_dict(), sort_keys=True) if tol else None
    if key not in _TORUS_CACHE:
        from .flow.cobordism import Cobordism
        from .flow.condition_c import compute_return_endomorphism
        from .flow.scenarios import TORUS_4PT
        cob = Cobordism(TORUS_4PT, tol=tol)
        rd = compute_return_endomorphism(cob, delta=0.1)
        _TORUS_CACHE[key] = (cob, rd)
    return _TORUS_CACHE[key]


def sample_problems() -> list[CyclicMorseData]:
    fib = CyclicMorseData({0: ("y",), 1: ("x",)}, {0: ((1, 1), (1, 0))}, {"x": (1, 0)}, {"y": (1, 0)})
    geo = CyclicMorseData({0: ("y",), 1: ("x",)}, {0: ((2,),)}, {"x": (1,)}, {"y": (1,)})
    nil = CyclicMorseData({0: ("y",), 1: ("x",)}, {0: ((0,),)}, {"x": (3,)}, {"y": (2,)}, {("x", "y"): 1})
    return [fib, geo, nil]


# ---------------------------------------------------------------- 2

def criterion_2() -> Verdict:
    def run():
        _, rd = torus_pipeline()
        datasets = [rd.data] + sample_problems()
        checked = 0
        for d in datasets:
            for x, y in d.pairs():
                r = incidence_rational(d, x, y)
                ok = (r.in_L_tilde() and all(isinstance(c, int) for c in r.num_P + r.den_Q)
                      and r.den_Q[0] == 1 and r.raw_den is not None and r.raw_den[0] == 1)
                if not ok:
                    return False, f"{x}->{y}: {r} is not in L~"
                checked += 1
        return True, f"{checked} incidence closed forms have integer P, Q with Q(0) = 1"
    return _timed(2, "Rationality form", run)


# ---------------------------------------------------------------- 3 and 4

FINITE_ORDER_PHI = {
    1: [((1,),), ((-1,),)],
    2: [((1, 0), (0, 1)), ((0, 1), (1, 0)), ((-1, 0), (0, -1)), ((0, -1), (1, 0)),
        ((0, -1), (1, -1)), ((-1, 0), (0, 1))],
}


def _random_zh(rng, m, p_zero):
    if rng.random() < p_zero:
        return ZH(m)
    terms = {}
    for _ in range(rng.randint(1, 2)):
        terms[tuple(rng.randint(-1, 1) for _ in range(m))] = rng.choice([-2, -1, 1, 2])
    return ZH(m, terms)


def random_twisted_instances(seed: int = 0, count: int = 300):
    """(xi, lambda, x) with m <= 2, rank <= 4 and finite-order monodromy."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        m = rng.randint(0, 2)
        r = rng.randint(1, 4)
        G = TwistedGroup(m, rng.choice(FINITE_ORDER_PHI[m]) if m else ())
        xi = SemilinearEndo(G, tuple(tuple(_random_zh(rng, m, 0.5) for _ in range(r)) for _ in range(r)))
        lam = tuple(_random_zh(rng, m, 0.2) for _ in range(r))
        x = tuple(_random_zh(rng, m, 0.2) for _ in range(r))
        out.append((xi, lam, x))
    return out


def criterion_3(seed: int = 0, count: int = 300) -> Verdict:
    def run():
        for it, (xi, lam, x) in enumerate(random_twisted_instances(seed, count)):
            T, closed = summed_series(xi, lam, x, 30)
            if closed != direct_series(xi, lam, x, 30):
                return False, f"instance {it}: closed form and iteration differ above level -30"
            for n in range(13):
                if apply_power(xi, x, n) != apply_iterated(xi, x, n):
                    return False, f"instance {it}: apply_power differs at n = {n}"
        return True, f"{count} instances to level -30, powers n <= 12"
    return _timed(3, "Equivariant two-route", run, limit=60)


def criterion_4(seed: int = 0, count: int = 300) -> Verdict:
    def run():
        for it, (xi, lam, x) in enumerate(random_twisted_instances(seed, count)):
            T, _ = summed_series(xi, lam, x, 0)
            cert = growth_constants_for_typeL(T)
            if not check_exponential_growth(expand_typeL(T, 40), *cert):
                return False, f"instance {it}: growth bound (A, B) = {cert} violated"
        return True, f"{count} certificates hold to level -40"
    return _timed(4, "Exponential growth", run)


# ---------------------------------------------------------------- 5

def criterion_5() -> Verdict:
    def run():
        _, rd = torus_pipeline()
        a = check_d2(assemble_novikov_complex(rd.data, 30))
        b = check_d2(assemble_twisted_complex(rd.data, 30))
        if not a:
            return False, f"Z((t)) complex: d1 d2 != 0 at {a.witness}"
        if not b:
            return False, f"twisted complex: d1 d2 != 0 at {b.witness}"
        return True, "d1 d2 = 0 to order 30 over Z((t)) and over the twisted ring"
    return _timed(5, "d^2 = 0", run)


# ---------------------------------------------------------------- 6

def criterion_6() -> Verdict:
    from .flow.cobordism import adjacent_pairs, count_table

    def run():
        cob, rd = torus_pipeline()
        geo = {pq: count_table(cob, *pq, 16) for pq in adjacent_pairs(cob)}
        for (p, q), table in geo.items():
            alg = incidence_series(rd.data, p, q, 6)
            for k in range(1, 7):
                if table[k + 1] != alg.coefficient(k):
                    return False, f"{p}->{q}: n_{k} geometric {table[k + 1]} vs algebraic {alg.coefficient(k)}"
            s = LaurentSeries.make(1, table[2:15], 13)
            r = reconstruct_rational(s)
            pred = expand_rational(r, 16)
            for k in (14, 15, 16):
                if pred.coefficient(k) != table[k + 1]:
                    return False, f"{p}->{q}: predicted n_{k} = {pred.coefficient(k)}, geometric {table[k + 1]}"
        return True, f"{len(geo)} pairs agree for 1 <= k <= 6; n_14..n_16 predicted exactly"
    return _timed(6, "Geometric-algebraic equality", run, limit=300)


# ---------------------------------------------------------------- 7

def criterion_7(seed: int = 0, count: int = 20) -> Verdict:
    from .flow.perturb import perturb_and_recount, random_admissible_bumps

    def run():
        cob, _ = torus_pipeline()
        bumps = random_admissible_bumps(cob, np.random.default_rng(seed), count)
        for i, b in enumerate(bumps):
            rep = perturb_and_recount(cob, [b], 6)
            if rep.outside_hypothesis:
                return False, f"bump {i} is not admissible"
            if not rep.identical:
                return False, f"bump {i} changed counts: {rep.differences or rep.errors}"
        return True, f"{count} admissible bumps leave n_k (k <= 6) unchanged"
    return _timed(7, "Perturbation stability", run)


# ---------------------------------------------------------------- 8

def _numeric_annulus_time(start, p, R, r):
    """Independent oracle: integrate the linear flow both ways with events on
    the two spheres and add up the time spent between them."""
    from scipy.integrate import solve_ivp
    z0 = np.asarray(start, dtype=float)
    sgn = np.concatenate([-np.ones(p), np.ones(z0.size - p)])

    def sphere(rad):
        def ev(t, z):
            return z @ z - rad * rad
        return ev

    def escape(t, z):
        return z @ z - 4 * R * R
    escape.terminal = True

    crossings = []
    for direction in (1.0, -1.0):
        sol = solve_ivp(lambda t, z: direction * sgn * z, (0, 80), z0, events=[sphere(R), sphere(r), escape],
                        rtol=1e-12, atol=1e-14)
        crossings += [direction * t for t in np.concatenate(sol.t_events[:2])]
        if not sol.t_events[2].size:
            crossings.append(direction * sol.t[-1])
    ts = sorted(set(round(t, 13) for t in crossings) | {0.0})
    total = 0.0
    for t0, t1 in zip(ts[:-1], ts[1:]):
        tm = 0.5 * (t0 + t1)
        zm = np.concatenate([z0[:p] * math.exp(-tm), z0[p:] * math.exp(tm)])
        if r * r <= zm @ zm <= R * R:
            total += t1 - t0
    return total


def criterion_8(seed: int = 0, count: int = 100) -> Verdict:
    from .flow.standard import (
        annulus_time_bound, quadratic_slice_time, random_sphere_point, standard_gradient_times,
    )

    def run():
        rng = np.random.default_rng(seed)
        bound = annulus_time_bound(2.0, 1.0)
        if abs(bound - math.log(4 + math.sqrt(15))) > 1e-15:
            return False, "the R/r = 2 bound does not evaluate to ln(4 + sqrt 15)"
        worst_a = worst_q = 0.0
        for i in range(count):
            n = int(rng.integers(2, 6))
            p = int(rng.integers(1, n))
            R = 2.0
            rep = standard_gradient_times(R, 1.0, random_sphere_point(rng, n, R), p)
            if rep.time > rep.bound + 1e-6:
                return False, f"annulus trajectory {i}: time {rep.time} exceeds {rep.bound}"
            if rep.length > 2 * R + 1e-6:
                return False, f"annulus trajectory {i}: length {rep.length} exceeds 2R"
            worst_a = max(worst_a, rep.time / rep.bound)
        for i in range(count):
            n = int(rng.integers(2, 6))
            p = int(rng.integers(1, n))
            rep = quadratic_slice_time(1.0, rng.normal(size=n) * 2, p)
            if rep.time > 2.0 + 1e-6:
                return False, f"slice trajectory {i}: time {rep.time} exceeds 2"
            worst_q = max(worst_q, rep.time / 2.0)
        # the closed-form annulus time against numerical integration
        for i in range(count):
            n = int(rng.integers(2, 6))
            p = int(rng.integers(1, n))
            s = random_sphere_point(rng, n, 2.0)
            a = standard_gradient_times(2.0, 1.0, s, p).time
            b = _numeric_annulus_time(s, p, 2.0, 1.0)
            if abs(a - b) > 1e-6:
                return False, f"closed-form time {a} disagrees with integration {b}"
        return True, (f"{count}+{count} trajectories; worst time/bound {worst_a:.4f} and {worst_q:.4f}; "
                      "closed-form times match integration within 1e-6")
    return _timed(8, "Standard-gradient bounds", run)


# ---------------------------------------------------------------- 9

def criterion_9(seed: int = 0, count: int = 8) -> Verdict:
    from .flow.cobordism import adjacent_pairs, equivariant_counts_lifted
    from .flow.condition_c import TORUS_GROUP as G

    def to_elt(counts, offset, trunc):
        lv = [dict() for _ in range(trunc - offset + 1)]
        for (j, b), v in counts.items():
            if offset <= j <= trunc:
                lv[j - offset][(b,)] = v
        return NovikovElt.make(G, offset, [ZH(1, d) for d in lv], trunc)

    def run():
        cob, rd = torus_pipeline()
        rng = random.Random(seed)
        done = 0
        for p, q in adjacent_pairs(cob):
            n = to_elt(equivariant_counts_lifted(cob, p, q, (0, 0), (0, 0), 8), 0, 8)
            for _ in range(count):
                g1 = (rng.randint(-2, 2), rng.randint(-2, 2))
                g2 = (rng.randint(-2, 2), rng.randint(-2, 2))
                bc = base_change(G, n, GroupElt((g1[0],), g1[1]), GroupElt((g2[0],), g2[1]))
                again = to_elt(equivariant_counts_lifted(cob, p, q, g1, g2, bc.trunc), -8, bc.trunc)
                if again != bc:
                    return False, f"{p}->{q}, g1={g1}, g2={g2}: recount differs from base change"
                done += 1
        # the same identity on the algebraic twisted data
        for p, q in rd.data.pairs():
            _, n = equivariant_incidence(rd.data, p, q, 10)
            g1 = GroupElt((rng.randint(-2, 2),), rng.randint(-2, 2))
            g2 = GroupElt((rng.randint(-2, 2),), rng.randint(-2, 2))
            back = base_change(G, base_change(G, n, g1, g2), GroupElt((-g1.h[0],), -g1.k),
                               GroupElt((-g2.h[0],), -g2.k))
            if back != n:
                return False, f"{p}->{q}: base change is not undone by the inverse shift"
        return True, f"{done} random lift shifts recomputed from flow lines"
    return _timed(9, "Base change", run)


# ---------------------------------------------------------------- 10

def _as_trivial_twisted(d: CyclicMorseData) -> CyclicMorseData:
    G = TwistedGroup.trivial()
    const = lambda a: ZH.const(0, a)  # noqa: E731
    h_hat = {s: SemilinearEndo(G, tuple(tuple(const(a) for a in r) for r in M)) for s, M in d.h.items()}
    X_hat = {p: tuple(const(a) for a in v) for p, v in d.X.items()}
    lam_hat = {p: tuple(const(a) for a in v) for p, v in d.lam.items()}
    direct_hat = {k: const(v) for k, v in d.direct.items()}
    return CyclicMorseData(d.indices, d.h, d.X, d.lam, d.direct, G, h_hat, X_hat, lam_hat, direct_hat)


def criterion_10(seed: int = 0, count: int = 50, order: int = 30) -> Verdict:
    def dump(s):
        return json.dumps(series_to_json(s), sort_keys=True)

    def run():
        _, rd = torus_pipeline()
        datasets = [rd.integer()] + sample_problems()
        rng = random.Random(seed)
        for _ in range(count):
            n = rng.randint(1, 4)
            H = tuple(tuple(rng.randint(-2, 2) for _ in range(n)) for _ in range(n))
            datasets.append(CyclicMorseData({0: ("y",), 1: ("x",)}, {0: H},
                                            {"x": tuple(rng.randint(-2, 2) for _ in range(n))},
                                            {"y": tuple(rng.randint(-2, 2) for _ in range(n))},
                                            {("x", "y"): rng.randint(-1, 1)}))
        compared = 0
        for d in datasets:
            tw = _as_trivial_twisted(d)
            for x, y in d.pairs():
                a = dump(incidence_series(d, x, y, order))
                b = dump(equivariant_incidence(tw, x, y, order)[1].augmentation())
                if a != b:
                    return False, f"{x}->{y}: twisted pipeline output differs"
                compared += 1
            A = assemble_novikov_complex(d, order)
            B = assemble_twisted_complex(tw, order)
            for s in A.d:
                for ra, rb in zip(A.d[s], B.d[s]):
                    if [dump(e) for e in ra] != [dump(e.augmentation()) for e in rb]:
                        return False, "assembled complexes differ"
        return True, f"{compared} incidences and {len(datasets)} complexes identical byte-for-byte"
    return _timed(10, "m = 0 degeneration", run)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def run_all(seed: int = 0, fault: bool = False, echo=None) -> list[Verdict]:
    out = []
    for fn in CRITERIA:
        v = fn(seed=seed, fault=fault) if fn is criterion_1 else (
            fn(seed=seed) if "seed" in fn.__code__.co_varnames else fn())
        if echo:
            echo(v.line())
        out.append(v)
    return out

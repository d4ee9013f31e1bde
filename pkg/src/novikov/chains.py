"""Morse and Novikov chain complexes.

Boundary matrices follow ``d(p) = sum_q q * n(p, q)``: the matrix ``d[s]`` of
``C_s -> C_{s-1}`` has rows indexed by index-(s-1) points and columns by
index-s points, so ``d[s][row(q)][col(p)] = n(p, q)``.  Composition is the
ordinary matrix product ``d[s] @ d[s+1]`` with the left factor's entry on
the left, which is the correct order for right modules over a
non-commutative ring.

Cyclic (circle-valued) data uses lifts ``x_bar`` in the fundamental
cobordism W and ``y_bar`` in the next copy ``W t``.  With that convention the
incidence coefficient is

    n(x, y) = direct * t^-1 + sum_{k >= 0} lam_y(h^k X_x) t^k,

where ``direct`` counts flow lines that stay inside W.  The complex itself
uses a single lift per critical point (all in W), which multiplies every
entry by t.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import ValidationError
from .laurent import (
    DEFAULT_ORDER, LaurentSeries, RationalFn, cramer_series, iterate_pairing, poly_add,
    poly_exact_div, poly_mul, poly_shift, poly_sub,
)
from .semilinear import SemilinearEndo, pair, apply, summed_series
from .twisted import (
    GroupElt, NovikovElt, TwistedGroup, TypeLElement, ZH, expand_typeL, g_identity, g_inv,
    g_theta, left_mul_group, right_mul_group,
)


# ---------------------------------------------------------------- Smith normal form

def smith_diagonal(M: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero invariant factors d_1 | d_2 | ... of an integer matrix."""
    a = [list(r) for r in M]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    diag = []
    t = 0
    while t < min(rows, cols):
        # pivot: smallest nonzero absolute value in the remaining block
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        a[t], a[i] = a[i], a[t]
        for r in a:
            r[t], r[j] = r[j], r[t]
        while True:
            p = a[t][t]
            done = True
            for i in range(t + 1, rows):
                q = a[i][t] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                if a[i][t]:
                    done = False
            for j in range(t + 1, cols):
                q = a[t][j] // p
                if q:
                    for r in a:
                        r[j] -= q * r[t]
                if a[t][j]:
                    done = False
            if done:
                # divisibility: fold a non-divisible entry into the pivot row
                bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                            if a[i][j] % p), None)
                if bad is None:
                    break
                a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
                continue
            # move the smallest remaining entry of row/col t into the pivot
            cand = [(abs(a[i][t]), i, t) for i in range(t, rows) if a[i][t]]
            cand += [(abs(a[t][j]), t, j) for j in range(t, cols) if a[t][j]]
            _, i, j = min(cand)
            a[t], a[i] = a[i], a[t]
            for r in a:
                r[t], r[j] = r[j], r[t]
        diag.append(abs(a[t][t]))
        t += 1
    return diag


# ---------------------------------------------------------------- complexes

@dataclass(frozen=True)
class ChainComplexZ:
    bases: dict
    d: dict

    def rank(self, s: int) -> int:
        return len(self.bases.get(s, ()))


@dataclass(frozen=True)
class ChainComplexNov:
    """Complex over truncated Z((t)) (``group is None``) or Lambda_xi."""

    bases: dict
    d: dict
    group: TwistedGroup | None = None
    order: int = DEFAULT_ORDER

    def rank(self, s: int) -> int:
        return len(self.bases.get(s, ()))


@dataclass(frozen=True)
class D2Result:
    ok: bool
    witness: tuple | None = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class MorseData:
    """Morse data over Z: ``counts[(p, q)]`` is the signed number of flow lines."""

    indices: dict
    counts: dict = field(default_factory=dict)
    orientation: str = "descending discs oriented by chosen eigenvectors"

    def index_of(self, p: str) -> int:
        for s, pts in self.indices.items():
            if p in pts:
                return s
        raise ValidationError(f"unknown critical point {p!r}")


def build_morse_complex(d: MorseData) -> ChainComplexZ:
    for (p, q) in d.counts:
        if d.index_of(p) != d.index_of(q) + 1:
            raise ValidationError(f"count between non-adjacent indices: {p} -> {q}")
    bases = {s: tuple(pts) for s, pts in d.indices.items()}
    mats = {}
    for s in sorted(bases):
        if s - 1 in bases:
            mats[s] = [[d.counts.get((p, q), 0) for p in bases[s]] for q in bases[s - 1]]
    return ChainComplexZ(bases, mats)


def _mat_product_entries(left, right, zero, mul, add):
    rows = len(left)
    inner = len(right)
    cols = len(right[0]) if inner else 0
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = zero
            for l in range(inner):
                acc = add(acc, mul(left[i][l], right[l][j]))
            row.append(acc)
        out.append(row)
    return out


def check_d2(c, order: int | None = None) -> D2Result:
    """Verify ``d[s] d[s+1] = 0``; Novikov complexes are checked up to the
    common truncation (or ``order`` if smaller).  The witness is
    ``(s, row_point, col_point, offending_value)``."""
    for s in sorted(c.d):
        if s + 1 not in c.d:
            continue
        L, R = c.d[s], c.d[s + 1]
        if isinstance(c, ChainComplexZ):
            prod = _mat_product_entries(L, R, 0, lambda a, b: a * b, lambda a, b: a + b)
            for i, row in enumerate(prod):
                for j, v in enumerate(row):
                    if v:
                        return D2Result(False, (s, c.bases[s - 1][i], c.bases[s + 1][j], v))
            continue
        if c.group is None:
            zero = LaurentSeries.zero(c.order)
        else:
            zero = NovikovElt.zero(c.group, c.order)
        prod = _mat_product_entries(L, R, zero, lambda a, b: a * b, lambda a, b: a + b)
        for i, row in enumerate(prod):
            for j, v in enumerate(row):
                top = v.trunc_order if c.group is None else v.trunc
                if order is not None:
                    top = min(top, order)
                nonzero = _first_nonzero(v, top)
                if nonzero is not None:
                    return D2Result(False, (s, c.bases[s - 1][i], c.bases[s + 1][j], nonzero))
    return D2Result(True)


def _first_nonzero(v, top):
    if isinstance(v, LaurentSeries):
        for k in range(v.valuation_bound, top + 1):
            if v.coefficient(k):
                return (k, v.coefficient(k))
        return None
    for k in range(v.valuation_bound, top + 1):
        a = v.coefficient(k)
        if not a.is_zero():
            return (k, a)
    return None


def homology_Z(c: ChainComplexZ) -> dict:
    """Per-degree ``(betti, torsion)`` from Smith normal forms."""
    chk = check_d2(c)
    if not chk:
        raise ValidationError(f"d^2 != 0 at {chk.witness}")
    diags = {s: smith_diagonal(m) for s, m in c.d.items()}
    out = {}
    for s in sorted(c.bases):
        n = c.rank(s)
        r_out = len(diags.get(s, []))
        inc = diags.get(s + 1, [])
        out[s] = (n - r_out - len(inc), [x for x in inc if x > 1])
    return out


# ---------------------------------------------------------------- cyclic data

@dataclass(frozen=True, eq=False)
class CyclicMorseData:
    """Return-endomorphism data of a circle-valued Morse system.

    ``h[s]`` is the return endomorphism on the fiber's degree-s chain group,
    ``X[x]`` the class of the descending disc of an index-(s+1) point x,
    ``lam[y]`` the pairing covector of an index-s point y, and
    ``direct[(x, y)]`` the count of flow lines from x_bar to y_bar t^-1 that
    never leave W.  The ``*_hat`` fields carry the equivariant versions over
    ZH with ``direct_hat`` the coefficient of theta^-1.
    """

    indices: dict
    h: dict
    X: dict
    lam: dict
    direct: dict = field(default_factory=dict)
    group: TwistedGroup | None = None
    h_hat: dict = field(default_factory=dict)
    X_hat: dict = field(default_factory=dict)
    lam_hat: dict = field(default_factory=dict)
    direct_hat: dict = field(default_factory=dict)
    lift_convention: str = "x_bar in W, y_bar in W t"
    geometric: bool = False

    def index_of(self, p: str) -> int:
        for s, pts in self.indices.items():
            if p in pts:
                return s
        raise ValidationError(f"unknown critical point {p!r}")

    def _triple(self, x: str, y: str):
        s = self.index_of(y)
        if self.index_of(x) != s + 1:
            raise ValidationError(f"index mismatch: ind {x} must equal ind {y} + 1")
        H = self.h.get(s, ())
        r = len(H)
        X = self.X.get(x, (0,) * r)
        lam = self.lam.get(y, (0,) * r)
        if len(X) != r or len(lam) != r:
            raise ValidationError(f"dimension mismatch for pair ({x}, {y})")
        return s, H, X, lam

    def pairs(self):
        """Adjacent-index pairs (x, y) in a fixed order."""
        out = []
        for s in sorted(self.indices):
            if s - 1 in self.indices:
                for x in self.indices[s]:
                    for y in self.indices[s - 1]:
                        out.append((x, y))
        return out


def incidence_series(d: CyclicMorseData, x: str, y: str, N: int = DEFAULT_ORDER) -> LaurentSeries:
    """``n_k = lam_y(h^k X_x)`` for 0 <= k <= N plus the direct t^-1 term."""
    _, H, X, lam = d._triple(x, y)
    coeffs = [d.direct.get((x, y), 0)] + iterate_pairing(H, X, lam, N)
    return LaurentSeries.make(-1, coeffs, N)


def incidence_rational(d: CyclicMorseData, x: str, y: str) -> RationalFn:
    """Closed form ``t^-m P/Q``; the raw ``det(1 - h t)`` is kept in ``raw_den``."""
    _, H, X, lam = d._triple(x, y)
    r = cramer_series(H, X, lam)
    c = d.direct.get((x, y), 0)
    if c:
        P = poly_add(poly_mul((c,), r.den_Q), poly_shift(r.num_P, 1))
        r = RationalFn(1, P, r.den_Q, raw_den=r.den_Q)
    return r.normalized()


def _direct_typeL(G: TwistedGroup, T: TypeLElement, c: ZH) -> TypeLElement:
    """Type (L) form of ``c theta^-1 + T`` for T with trivial g1, g2."""
    n = T.rank
    zero = ZH(G.m)
    Y = (ZH.const(G.m, 1),) + (zero,) * n
    A = [[zero] + [y.conj(G, 1) for y in T.Y]]
    for i in range(n):
        A.append([zero] + list(T.A[i]))
    X = (c.conj(G, 1),) + tuple(T.X)
    return TypeLElement(G, g_theta(G, -1), Y, tuple(tuple(r) for r in A), X, g_identity(G))


def equivariant_incidence(d: CyclicMorseData, x: str, y: str, N: int = DEFAULT_ORDER):
    """``(TypeLElement, NovikovElt)`` for the equivariant incidence of (x, y)."""
    if d.group is None:
        raise ValidationError("no twisted data present")
    G = d.group
    s = d.index_of(y)
    if d.index_of(x) != s + 1:
        raise ValidationError(f"index mismatch: ind {x} must equal ind {y} + 1")
    xi = d.h_hat.get(s) or SemilinearEndo(G, ())
    r = xi.rank
    X = d.X_hat.get(x, (ZH(G.m),) * r)
    lam = d.lam_hat.get(y, (ZH(G.m),) * r)
    T, _ = summed_series(xi, lam, X, 0)
    c = d.direct_hat.get((x, y))
    if c is not None and not c.is_zero():
        T = _direct_typeL(G, T, c)
    return T, expand_typeL(T, N)


def equivariant_direct_series(d: CyclicMorseData, x: str, y: str, N: int = DEFAULT_ORDER) -> NovikovElt:
    """The same incidence by iterating the semilinear map level by level."""
    G = d.group
    s = d.index_of(y)
    xi = d.h_hat.get(s) or SemilinearEndo(G, ())
    r = xi.rank
    v = d.X_hat.get(x, (ZH(G.m),) * r)
    lam = d.lam_hat.get(y, (ZH(G.m),) * r)
    levels = [d.direct_hat.get((x, y), ZH(G.m))]
    for k in range(N + 1):
        levels.append(pair(lam, v) if r else ZH(G.m))
        if k < N:
            v = apply(xi, v)
    return NovikovElt.make(G, -1, levels, N)


def base_change(G: TwistedGroup, n: NovikovElt, g1: GroupElt, g2: GroupElt) -> NovikovElt:
    """``n(x g1, y g2) = g2^-1 n(x, y) g1``."""
    return right_mul_group(G, left_mul_group(G, g_inv(G, g2), n), g1)


def assemble_novikov_complex(d: CyclicMorseData, N: int = DEFAULT_ORDER) -> ChainComplexNov:
    """Complex over truncated Z((t)) with all lifts in W (entries ``t * n``)."""
    bases = {s: tuple(pts) for s, pts in d.indices.items()}
    mats = {}
    for s in sorted(bases):
        if s - 1 in bases:
            mats[s] = [[incidence_series(d, p, q, N - 1).shift(1) for p in bases[s]] for q in bases[s - 1]]
    return ChainComplexNov(bases, mats, None, N)


def assemble_twisted_complex(d: CyclicMorseData, N: int = DEFAULT_ORDER) -> ChainComplexNov:
    """Equivariant complex over Lambda_xi, all lifts in W (entries ``theta * n_hat``)."""
    G = d.group
    bases = {s: tuple(pts) for s, pts in d.indices.items()}
    th = g_theta(G, 1)
    mats = {}
    for s in sorted(bases):
        if s - 1 in bases:
            mats[s] = [[left_mul_group(G, th, equivariant_incidence(d, p, q, N - 1)[1])
                        for p in bases[s]] for q in bases[s - 1]]
    return ChainComplexNov(bases, mats, G, N)


def augment(d: CyclicMorseData) -> CyclicMorseData:
    """Integer data obtained from the equivariant data under H -> 1, theta -> t."""
    h = {s: tuple(tuple(a.augmentation() for a in row) for row in xi.xi_hat) for s, xi in d.h_hat.items()}
    X = {p: tuple(a.augmentation() for a in v) for p, v in d.X_hat.items()}
    lam = {p: tuple(a.augmentation() for a in v) for p, v in d.lam_hat.items()}
    direct = {k: v.augmentation() for k, v in d.direct_hat.items() if v.augmentation()}
    return CyclicMorseData(d.indices, h, X, lam, direct, geometric=d.geometric)


# ---------------------------------------------------------------- ranks over Q(t)

def _bareiss_rank_poly(M: list[list[tuple]]) -> int:
    """Rank over Q(t) of a matrix of integer polynomials (fraction-free)."""
    a = [list(r) for r in M]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    rank = 0
    prev = (1,)
    for c in range(cols):
        piv = next((i for i in range(rank, rows) if a[i][c]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        p = a[rank][c]
        for i in range(rank + 1, rows):
            for j in range(c + 1, cols):
                num = poly_sub(poly_mul(a[i][j], p), poly_mul(a[i][c], a[rank][j]))
                a[i][j] = poly_exact_div(num, prev) if num else ()
            a[i][c] = ()
        prev = p
        rank += 1
    return rank


def rank_over_Qt(M: Sequence[Sequence[RationalFn]]) -> int:
    """Rank of a matrix of rational functions over Q(t) (hence over Q((t)))."""
    rows = []
    for row in M:
        mshift = max((r.shift_m for r in row), default=0)
        dens = [r.den_Q for r in row]
        out = []
        for j, r in enumerate(row):
            p = poly_shift(r.num_P, mshift - r.shift_m)
            for l, q in enumerate(dens):
                if l != j:
                    p = poly_mul(p, q)
            out.append(p)
        rows.append(out)
    return _bareiss_rank_poly(rows)


def novikov_betti_numbers(d: CyclicMorseData) -> dict:
    """Dimensions of homology over Q((t)) from the closed-form boundary maps."""
    bases = {s: tuple(pts) for s, pts in d.indices.items()}
    ranks = {}
    for s in bases:
        if s - 1 in bases and bases[s] and bases[s - 1]:
            M = [[incidence_rational(d, p, q) for p in bases[s]] for q in bases[s - 1]]
            ranks[s] = rank_over_Qt(M)
        else:
            ranks[s] = 0
    return {s: len(bases[s]) - ranks.get(s, 0) - ranks.get(s + 1, 0) for s in sorted(bases)}

"""Twisted group rings for mapping-torus groups G = Z^m x|_Phi Z.

Elements of G are written ``h * theta**k`` with ``h`` in H = Z^m and
``xi(h theta^k) = -k``.  Conjugation by the deck element is frozen as
``theta h theta^-1 = Phi(h)``, so

    (a theta^i) (b theta^j) = a Phi^i(b) theta^(i+j).

A :class:`NovikovElt` is a truncated sum ``sum_k a_k theta^k`` with
coefficients in ZH; powers above ``trunc`` (xi-levels below ``-trunc``) are
unknown.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import TruncationError, ValidationError
from .exactexp import exp_bounds, leq_c_exp
from .laurent import DEFAULT_ORDER, LaurentSeries


# ---------------------------------------------------------------- integer matrices

def int_det(M: Sequence[Sequence[int]]) -> int:
    """Determinant by fraction-free Bareiss elimination."""
    n = len(M)
    if n == 0:
        return 1
    a = [list(r) for r in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _int_inverse_unimodular(M: Sequence[Sequence[int]]) -> tuple:
    n = len(M)
    d = int_det(M)
    if d not in (1, -1):
        raise ValidationError("monodromy must lie in GL(m, Z)")
    inv = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(M) if k != i]
            inv[j][i] = (-1) ** (i + j) * int_det(minor) * d
    return tuple(tuple(r) for r in inv)


def _matmul(A, B):
    n, k, m = len(A), len(B), len(B[0]) if B else 0
    return tuple(tuple(sum(A[i][l] * B[l][j] for l in range(k)) for j in range(m)) for i in range(n))


# ---------------------------------------------------------------- group

@dataclass(frozen=True)
class TwistedGroup:
    """The group Z^m x|_Phi Z with monodromy ``Phi`` in GL(m, Z)."""

    m: int
    phi: tuple
    _powers: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        phi = tuple(tuple(int(c) for c in row) for row in self.phi)
        object.__setattr__(self, "phi", phi)
        if len(phi) != self.m or any(len(r) != self.m for r in phi):
            raise ValidationError("monodromy must be an m x m matrix")
        ident = tuple(tuple(int(i == j) for j in range(self.m)) for i in range(self.m))
        self._powers[0] = ident
        self._powers[1] = phi
        self._powers[-1] = _int_inverse_unimodular(phi) if self.m else ()

    @classmethod
    def trivial(cls) -> "TwistedGroup":
        return cls(0, ())

    @classmethod
    def identity(cls, m: int) -> "TwistedGroup":
        return cls(m, tuple(tuple(int(i == j) for j in range(m)) for i in range(m)))

    def phi_power(self, k: int) -> tuple:
        P = self._powers.get(k)
        if P is None:
            step = 1 if k > 0 else -1
            prev = self.phi_power(k - step)
            P = _matmul(self._powers[step], prev)
            self._powers[k] = P
        return P

    def act(self, h: tuple, k: int = 1) -> tuple:
        """Phi**k applied to an exponent vector."""
        if k == 0 or self.m == 0:
            return h
        P = self.phi_power(k)
        return tuple(sum(P[i][j] * h[j] for j in range(self.m)) for i in range(self.m))

    @property
    def zero_h(self) -> tuple:
        return (0,) * self.m


@dataclass(frozen=True)
class GroupElt:
    """The element ``h * theta**k`` of G; its xi-level is ``-k``."""

    h: tuple
    k: int

    def level(self) -> int:
        return -self.k


def g_identity(G: TwistedGroup) -> GroupElt:
    return GroupElt(G.zero_h, 0)


def g_theta(G: TwistedGroup, k: int = 1) -> GroupElt:
    return GroupElt(G.zero_h, k)


def g_mul(G: TwistedGroup, a: GroupElt, b: GroupElt) -> GroupElt:
    hb = G.act(b.h, a.k)
    return GroupElt(tuple(x + y for x, y in zip(a.h, hb)), a.k + b.k)


def g_inv(G: TwistedGroup, a: GroupElt) -> GroupElt:
    hb = G.act(a.h, -a.k)
    return GroupElt(tuple(-x for x in hb), -a.k)


# ---------------------------------------------------------------- ZH

class ZH:
    """Sparse element of the integral group ring of H = Z^m.

    ``terms`` maps exponent tuples to nonzero ints.  Treat instances as
    immutable.
    """

    __slots__ = ("m", "terms")

    def __init__(self, m: int, terms: Mapping[tuple, int] | None = None):
        self.m = m
        self.terms = {h: c for h, c in (terms or {}).items() if c} if terms else {}

    @classmethod
    def const(cls, m: int, c: int) -> "ZH":
        return cls(m, {(0,) * m: c})

    @classmethod
    def mono(cls, h: Iterable[int], c: int = 1) -> "ZH":
        h = tuple(h)
        return cls(len(h), {h: c})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self.terms == ({(0,) * self.m: other} if other else {})
        return isinstance(other, ZH) and self.m == other.m and self.terms == other.terms

    def __hash__(self):
        return hash((self.m, frozenset(self.terms.items())))

    def __add__(self, other: "ZH") -> "ZH":
        out = dict(self.terms)
        for h, c in other.terms.items():
            v = out.get(h, 0) + c
            if v:
                out[h] = v
            else:
                out.pop(h, None)
        return _zh_raw(self.m, out)

    def __neg__(self) -> "ZH":
        return _zh_raw(self.m, {h: -c for h, c in self.terms.items()})

    def __sub__(self, other: "ZH") -> "ZH":
        return self + (-other)

    def __mul__(self, other) -> "ZH":
        if isinstance(other, int):
            return ZH(self.m, {h: c * other for h, c in self.terms.items()})
        return _zh_raw(self.m, _mul_terms(self.terms, other.terms))

    __rmul__ = __mul__

    def l1_norm(self) -> int:
        return sum(abs(c) for c in self.terms.values())

    def augmentation(self) -> int:
        """Image under H -> 1."""
        return sum(self.terms.values())

    def conj(self, G: TwistedGroup, k: int = 1) -> "ZH":
        """``theta**k lam theta**-k``: exponents mapped by Phi**k."""
        if k == 0 or self.m == 0:
            return self
        return _zh_raw(self.m, {G.act(h, k): c for h, c in self.terms.items()})

    def shift(self, g: tuple) -> "ZH":
        """Multiply by the monomial g."""
        return _zh_raw(self.m, {tuple(a + b for a, b in zip(h, g)): c for h, c in self.terms.items()})

    def sorted_terms(self) -> list:
        return sorted(self.terms.items())

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for h, c in self.sorted_terms():
            mono = "*".join(f"h{i + 1}^{e}" for i, e in enumerate(h) if e)
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


def _zh_raw(m: int, terms: dict) -> ZH:
    z = ZH.__new__(ZH)
    z.m = m
    z.terms = terms
    return z


def _addmul_into(out: dict, a: dict, b: dict) -> None:
    """out += a * b on raw term dicts (zero entries may remain)."""
    if len(a) < len(b):
        a, b = b, a
    get = out.get
    for hb, cb in b.items():
        m = len(hb)
        if m == 0:
            for ha, ca in a.items():
                out[ha] = get(ha, 0) + ca * cb
        elif m == 1:
            b0 = hb[0]
            for ha, ca in a.items():
                h = (ha[0] + b0,)
                out[h] = get(h, 0) + ca * cb
        elif m == 2:
            b0, b1 = hb
            for ha, ca in a.items():
                h = (ha[0] + b0, ha[1] + b1)
                out[h] = get(h, 0) + ca * cb
        else:
            for ha, ca in a.items():
                h = tuple(x + y for x, y in zip(ha, hb))
                out[h] = get(h, 0) + ca * cb


def _mul_terms(a: dict, b: dict) -> dict:
    out: dict = {}
    _addmul_into(out, a, b)
    return {h: c for h, c in out.items() if c}


def _clean(d: dict) -> dict:
    return {h: c for h, c in d.items() if c}


def conj_by_theta(G: TwistedGroup, lam: ZH, direction: str = "fwd") -> ZH:
    """Phi (fwd) or Phi^-1 (inv) applied to every exponent."""
    if direction not in ("fwd", "inv"):
        raise ValidationError("direction must be 'fwd' or 'inv'")
    return lam.conj(G, 1 if direction == "fwd" else -1)


def l1_norm(lam: ZH) -> int:
    return lam.l1_norm()


# ---------------------------------------------------------------- Novikov ring

@dataclass(frozen=True, eq=False)
class NovikovElt:
    """Truncated ``sum_k levels[i] theta**(offset + i)`` known for powers <= trunc.

    ``levels`` always runs up to ``trunc`` and starts with a nonzero entry;
    the zero element has no levels and ``offset == trunc``.
    """

    group: TwistedGroup
    offset: int
    levels: tuple
    trunc: int

    @classmethod
    def make(cls, G: TwistedGroup, offset: int, levels: Iterable[ZH], trunc: int) -> "NovikovElt":
        lv = list(levels)[:max(trunc - offset + 1, 0)]
        start = 0
        while start < len(lv) and lv[start].is_zero():
            start += 1
        lv = lv[start:]
        if not lv:
            return cls(G, trunc, (), trunc)
        offset += start
        lv += [ZH(G.m)] * (trunc - offset + 1 - len(lv))
        return cls(G, offset, tuple(lv), trunc)

    @classmethod
    def zero(cls, G: TwistedGroup, trunc: int = DEFAULT_ORDER) -> "NovikovElt":
        return cls(G, trunc, (), trunc)

    @classmethod
    def from_group_elt(cls, G: TwistedGroup, g: GroupElt, trunc: int = DEFAULT_ORDER, coeff: int = 1):
        return cls.make(G, g.k, [ZH(G.m, {g.h: coeff})], trunc)

    @classmethod
    def from_coeff(cls, G: TwistedGroup, c: ZH, k: int = 0, trunc: int = DEFAULT_ORDER):
        return cls.make(G, k, [c], trunc)

    def is_zero(self) -> bool:
        return not self.levels

    @property
    def valuation_bound(self) -> int:
        return self.offset if self.levels else self.trunc + 1

    def coefficient(self, k: int) -> ZH:
        """Coefficient of theta**k (xi-level -k)."""
        if k > self.trunc:
            raise TruncationError(f"theta^{k} is beyond truncation {self.trunc}")
        if not self.levels or k < self.offset:
            return ZH(self.group.m)
        return self.levels[k - self.offset]

    def truncate(self, trunc: int) -> "NovikovElt":
        if trunc > self.trunc:
            raise TruncationError("cannot raise truncation")
        return NovikovElt.make(self.group, self.offset, self.levels, trunc) if self.levels \
            else NovikovElt.zero(self.group, trunc)

    def __eq__(self, other) -> bool:
        return (isinstance(other, NovikovElt) and self.group == other.group
                and self.offset == other.offset and self.trunc == other.trunc
                and self.levels == other.levels)

    def __add__(self, other: "NovikovElt") -> "NovikovElt":
        return novikov_arith(self, other, "add")

    def __sub__(self, other: "NovikovElt") -> "NovikovElt":
        return novikov_arith(self, other, "sub")

    def __neg__(self) -> "NovikovElt":
        return NovikovElt(self.group, self.offset, tuple(-a for a in self.levels), self.trunc)

    def __mul__(self, other: "NovikovElt") -> "NovikovElt":
        return novikov_arith(self, other, "mul")

    def augmentation(self) -> LaurentSeries:
        """Image in Z((t)) under H -> 1, theta -> t."""
        return LaurentSeries.make(self.offset, (a.augmentation() for a in self.levels), self.trunc)

    def __repr__(self) -> str:
        parts = [f"({a!r})*theta^{self.offset + i}" for i, a in enumerate(self.levels) if not a.is_zero()]
        return (" + ".join(parts) or "0") + f" + O(theta^{self.trunc + 1})"


def novikov_arith(a: NovikovElt, b: NovikovElt, op: str) -> NovikovElt:
    """Add, subtract or multiply with the twisted commutation rule."""
    if a.group != b.group:
        raise ValidationError("Novikov elements over different groups")
    G = a.group
    if op in ("add", "sub"):
        top = min(a.trunc, b.trunc)
        lo = min(a.valuation_bound, b.valuation_bound)
        out = []
        for k in range(lo, top + 1):
            x, y = a.coefficient(k), b.coefficient(k)
            out.append(x + y if op == "add" else x - y)
        return NovikovElt.make(G, lo, out, top)
    if op != "mul":
        raise ValidationError(f"unknown Novikov operation {op!r}")
    va, vb = a.valuation_bound, b.valuation_bound
    top = min(a.trunc + vb, b.trunc + va)
    if not a.levels or not b.levels:
        return NovikovElt.zero(G, top)
    lo = va + vb
    n = top - lo + 1
    out = [dict() for _ in range(max(n, 0))]
    for i, ai in enumerate(a.levels[:n]):
        if ai.is_zero():
            continue
        power = a.offset + i
        for j, bj in enumerate(b.levels[:n - i]):
            if bj.is_zero():
                continue
            _addmul_into(out[i + j], ai.terms, bj.conj(G, power).terms)
    return NovikovElt.make(G, lo, (_zh_raw(G.m, _clean(d)) for d in out), top)


def left_mul_group(G: TwistedGroup, g: GroupElt, lam: NovikovElt) -> NovikovElt:
    """``g * lam`` for g = h theta^k: coefficients conjugated by Phi^k then shifted by h."""
    levels = [a.conj(G, g.k).shift(g.h) for a in lam.levels]
    if not lam.levels:
        return NovikovElt.zero(G, lam.trunc + g.k)
    return NovikovElt(G, lam.offset + g.k, tuple(levels), lam.trunc + g.k)


def right_mul_group(G: TwistedGroup, lam: NovikovElt, g: GroupElt) -> NovikovElt:
    """``lam * g``: the coefficient at theta^j picks up Phi^j(h)."""
    if not lam.levels:
        return NovikovElt.zero(G, lam.trunc + g.k)
    levels = [a.shift(G.act(g.h, lam.offset + i)) for i, a in enumerate(lam.levels)]
    return NovikovElt(G, lam.offset + g.k, tuple(levels), lam.trunc + g.k)


def truncate_at_level(lam: NovikovElt, c: int) -> dict:
    """The finite part ``lam_[c]`` of terms with xi-level >= c, as a dict
    ``{GroupElt: int}`` describing an element of ZG."""
    if c < -lam.trunc:
        raise TruncationError(f"level {c} is below the known truncation {-lam.trunc}")
    out = {}
    for i, a in enumerate(lam.levels):
        k = lam.offset + i
        if -k < c:
            break
        for h, coeff in a.terms.items():
            out[GroupElt(h, k)] = coeff
    return out


def level_norms(lam: NovikovElt) -> list[tuple[int, int]]:
    """Pairs (c, |lam_[c]|) for every integer level from the top down to -trunc."""
    out = []
    total = 0
    for i, a in enumerate(lam.levels):
        total += a.l1_norm()
        out.append((-(lam.offset + i), total))
    return out


def check_exponential_growth(lam: NovikovElt, A, B) -> bool:
    """True iff ``|lam_[c]| <= A exp(-B c)`` for every c down to -trunc.

    The truncation norm is a step function of c that only changes at
    integers, so integer levels suffice.
    """
    A, B = Fraction(A), Fraction(B)
    if A <= 0 or B <= 0:
        raise ValidationError("A and B must be positive")
    for c, norm in level_norms(lam):
        if norm and not leq_c_exp(norm, A, B, -c):
            return False
    return True


# ---------------------------------------------------------------- type (L)

@dataclass(frozen=True, eq=False)
class TypeLElement:
    """Closed form ``g1 * sum_s Y A^s X * g2``.

    ``A`` stores the ZH coefficients of the entries, entry (i, j) being
    ``A[i][j] * theta``; ``Y`` is a row and ``X`` a column over ZH.
    """

    group: TwistedGroup
    g1: GroupElt
    Y: tuple
    A: tuple
    X: tuple
    g2: GroupElt

    def __post_init__(self):
        n = len(self.A)
        if len(self.Y) != n or len(self.X) != n or any(len(r) != n for r in self.A):
            raise ValidationError("type (L) dimensions are inconsistent")
        m = self.group.m
        for z in list(self.Y) + list(self.X) + [a for r in self.A for a in r]:
            if not isinstance(z, ZH) or z.m != m:
                raise ValidationError("type (L) entries must be ZH elements of the group's rank")

    @property
    def rank(self) -> int:
        return len(self.A)


def expand_typeL(T: TypeLElement, N: int = DEFAULT_ORDER) -> NovikovElt:
    """Expansion of a type (L) element, known down to xi-level -N.

    Evaluates the row vector ``Y A^s`` by repeated twisted multiplication and
    pairs it with X at each level s.
    """
    G = T.group
    n = T.rank
    sigma = T.g1.k + T.g2.k
    s_max = N - sigma
    levels = []
    row = list(T.Y)
    for s in range(0, s_max + 1):
        term: dict = {}
        for j in range(n):
            if row[j].terms and T.X[j].terms:
                _addmul_into(term, row[j].terms, T.X[j].conj(G, s).terms)
        levels.append(_zh_raw(G.m, _clean(term)))
        if s == s_max:
            break
        # (r theta^s)(a theta) = r Phi^s(a) theta^(s+1)
        twA = [[a.conj(G, s).terms for a in r] for r in T.A]
        new_row = []
        for j in range(n):
            acc: dict = {}
            for i in range(n):
                if row[i].terms and twA[i][j]:
                    _addmul_into(acc, row[i].terms, twA[i][j])
            new_row.append(_zh_raw(G.m, _clean(acc)))
        row = new_row
    if s_max < 0:
        core = NovikovElt.zero(G, s_max)
    else:
        core = NovikovElt.make(G, 0, levels, s_max)
    return right_mul_group(G, left_mul_group(G, T.g1, core), T.g2)


class GrowthCertificate(tuple):
    """``(A, B)`` with B a rational upper bound of ln N; ``N`` kept as attribute."""

    def __new__(cls, A: int, B: Fraction, N: int):
        obj = super().__new__(cls, (A, B))
        obj.N = N
        return obj

    @property
    def A(self) -> int:
        return self[0]

    @property
    def B(self) -> Fraction:
        return self[1]


def log_upper_bound(N: int, bits: int = 48) -> Fraction:
    """Rational B with ``N <= exp(B) <= N (1 + 2**-(bits-8))`` roughly."""
    import math
    scale = 1 << bits
    B = Fraction(math.ceil(math.log(N) * scale) + 1, scale)
    while exp_bounds(B, bits + 16)[0] < N:
        B += Fraction(1, scale)
    return B


def growth_constants_for_typeL(T: TypeLElement) -> GrowthCertificate:
    """Certificate (A, B) with ``|a_[c]| <= A exp(-B c)`` for the expansion.

    Uses ``||sum_{s<=K} A^s|| <= N^(K+1)`` for a natural N > max(2, ||A|| n)
    with ``||A|| = max |a_ij|`` and n the matrix size.
    """
    n = T.rank
    normA = max((a.l1_norm() for r in T.A for a in r), default=0)
    N = max(2, normA * n) + 1
    ynorm = sum(y.l1_norm() for y in T.Y)
    xnorm = sum(x.l1_norm() for x in T.X)
    sigma = T.g1.k + T.g2.k
    A = ynorm * xnorm * N ** max(0, 1 - sigma)
    if sigma < 0:
        A *= 2  # absorbs exp((B - ln N) * c) for the few levels c > 0
    return GrowthCertificate(max(A, 1), log_upper_bound(N), N)

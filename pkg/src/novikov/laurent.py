"""Exact arithmetic in Z((t)) and its rational subring.

A :class:`LaurentSeries` is a truncated Laurent series whose coefficients
above ``trunc_order`` are *unknown*, not zero.  A :class:`RationalFn` is an
element ``t**-m * P(t) / Q(t)`` with integer polynomials and ``Q(0) = 1``.

Integer polynomials are plain tuples of ints, lowest degree first, with no
trailing zeros; the zero polynomial is ``()``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .errors import InsufficientDataError, TruncationError, ValidationError
from .exactexp import leq_c_exp

DEFAULT_ORDER = 64

Poly = tuple  # tuple[int, ...]


# ---------------------------------------------------------------- polynomials

def poly_trim(p: Iterable) -> tuple:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def poly_add(a: Sequence, b: Sequence) -> tuple:
    n = max(len(a), len(b))
    return poly_trim((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))


def poly_neg(a: Sequence) -> tuple:
    return tuple(-c for c in a)


def poly_sub(a: Sequence, b: Sequence) -> tuple:
    return poly_add(a, poly_neg(b))


def poly_mul(a: Sequence, b: Sequence) -> tuple:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return poly_trim(out)


def poly_shift(a: Sequence, k: int) -> tuple:
    """Multiply by t**k, k >= 0."""
    return poly_trim((0,) * k + tuple(a)) if a else ()


def poly_eval(a: Sequence, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def _qpoly_divmod(a: list, b: list) -> tuple[list, list]:
    """Division with remainder over Q; inputs are Fraction lists, trimmed."""
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    while len(a) >= len(b) and a:
        c = a[-1] / lead
        shift = len(a) - len(b)
        q[shift] = c
        for i, bi in enumerate(b):
            a[shift + i] -= c * bi
        while a and a[-1] == 0:
            a.pop()
    return q, a


def poly_gcd_q(a: Sequence, b: Sequence) -> tuple:
    """Primitive integer gcd over Q[t], normalised to positive constant term
    when that is nonzero (else positive leading coefficient)."""
    x = [Fraction(c) for c in poly_trim(a)]
    y = [Fraction(c) for c in poly_trim(b)]
    while y:
        _, r = _qpoly_divmod(x, y)
        x, y = y, r
    if not x:
        return ()
    return _primitive(x)


def _primitive(coeffs: Sequence[Fraction]) -> tuple:
    den = 1
    for c in coeffs:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    g = 0
    for c in ints:
        g = gcd(g, c)
    ints = [c // g for c in ints]
    pivot = ints[0] if ints[0] != 0 else ints[-1]
    if pivot < 0:
        ints = [-c for c in ints]
    return poly_trim(ints)


def poly_exact_div(a: Sequence, b: Sequence) -> tuple:
    """Exact quotient a / b in Z[t]; raises if b does not divide a."""
    q, r = _qpoly_divmod([Fraction(c) for c in a], [Fraction(c) for c in b])
    if r or any(c.denominator != 1 for c in q):
        raise ArithmeticError("inexact polynomial division")
    return poly_trim(int(c) for c in q)


# ---------------------------------------------------------------- series

@dataclass(frozen=True)
class LaurentSeries:
    """Truncated element of Z((t)).

    ``coeffs[i]`` is the coefficient of ``t**(min_exp + i)``.  Stored
    coefficients always run up to ``trunc_order`` (trailing known zeros are
    kept) and the first one is nonzero; the zero series has ``coeffs == ()``
    and ``min_exp == trunc_order``.
    """

    min_exp: int
    coeffs: tuple
    trunc_order: int

    @classmethod
    def make(cls, min_exp: int, coeffs: Iterable[int], trunc_order: int) -> "LaurentSeries":
        cs = [int(c) for c in coeffs]
        keep = trunc_order - min_exp + 1
        if keep < len(cs):
            cs = cs[:max(keep, 0)]
        start = 0
        while start < len(cs) and cs[start] == 0:
            start += 1
        cs = cs[start:]
        if not cs:
            return cls(trunc_order, (), trunc_order)
        min_exp += start
        cs += [0] * (trunc_order - min_exp + 1 - len(cs))
        return cls(min_exp, tuple(cs), trunc_order)

    @classmethod
    def zero(cls, trunc_order: int = DEFAULT_ORDER) -> "LaurentSeries":
        return cls(trunc_order, (), trunc_order)

    @classmethod
    def from_poly(cls, p: Sequence[int], trunc_order: int = DEFAULT_ORDER, shift: int = 0):
        return cls.make(shift, p, trunc_order)

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def valuation_bound(self) -> int:
        """Exponent of the first nonzero term, or ``trunc+1`` for zero."""
        return self.min_exp if self.coeffs else self.trunc_order + 1

    def coefficient(self, k: int) -> int:
        if k > self.trunc_order:
            raise TruncationError(f"t^{k} is beyond truncation order {self.trunc_order}")
        if not self.coeffs or k < self.min_exp:
            return 0
        return self.coeffs[k - self.min_exp]

    def coefficients(self, lo: int, hi: int) -> list[int]:
        return [self.coefficient(k) for k in range(lo, hi + 1)]

    def truncate(self, order: int) -> "LaurentSeries":
        if order > self.trunc_order:
            raise TruncationError(f"cannot raise truncation {self.trunc_order} to {order}")
        if not self.coeffs:
            return LaurentSeries.zero(order)
        return LaurentSeries.make(self.min_exp, self.coeffs, order)

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by t**k."""
        if not self.coeffs:
            return LaurentSeries.zero(self.trunc_order + k)
        return LaurentSeries(self.min_exp + k, self.coeffs, self.trunc_order + k)

    def __neg__(self) -> "LaurentSeries":
        return LaurentSeries(self.min_exp, tuple(-c for c in self.coeffs), self.trunc_order)

    def __add__(self, other: "LaurentSeries") -> "LaurentSeries":
        return series_arith(self, other, "add")

    def __sub__(self, other: "LaurentSeries") -> "LaurentSeries":
        return series_arith(self, other, "sub")

    def __mul__(self, other) -> "LaurentSeries":
        if isinstance(other, int):
            return LaurentSeries.make(self.min_exp, (c * other for c in self.coeffs), self.trunc_order)
        return series_arith(self, other, "mul")

    __rmul__ = __mul__

    def __str__(self) -> str:
        terms = [f"{c}*t^{self.min_exp + i}" for i, c in enumerate(self.coeffs) if c]
        return (" + ".join(terms) or "0") + f" + O(t^{self.trunc_order + 1})"


def series_arith(a: LaurentSeries, b: LaurentSeries, op: str) -> LaurentSeries:
    """Add, subtract or multiply two truncated series."""
    if op in ("add", "sub"):
        top = min(a.trunc_order, b.trunc_order)
        lo = min(a.valuation_bound, b.valuation_bound)
        sign = 1 if op == "add" else -1
        cs = [a.coefficient(k) + sign * b.coefficient(k) for k in range(lo, top + 1)]
        return LaurentSeries.make(lo, cs, top)
    if op != "mul":
        raise ValidationError(f"unknown series operation {op!r}")
    va, vb = a.valuation_bound, b.valuation_bound
    top = min(a.trunc_order + vb, b.trunc_order + va)
    if not a.coeffs or not b.coeffs:
        return LaurentSeries.zero(top)
    lo = va + vb
    n = top - lo + 1
    out = [0] * max(n, 0)
    for i, ai in enumerate(a.coeffs[:n]):
        if ai:
            for j, bj in enumerate(b.coeffs[:n - i]):
                out[i + j] += ai * bj
    return LaurentSeries.make(lo, out, top)


# ---------------------------------------------------------------- rationals

@dataclass(frozen=True)
class RationalFn:
    """``t**-shift_m * num_P / den_Q`` with integer polynomials, ``den_Q(0) == 1``.

    Instances built by :func:`cramer_series` keep the raw determinant as the
    denominator; :meth:`normalized` cancels the gcd over Q[t] and stores the
    original denominator in ``raw_den``.
    """

    shift_m: int
    num_P: tuple
    den_Q: tuple
    raw_den: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "num_P", poly_trim(self.num_P))
        object.__setattr__(self, "den_Q", poly_trim(self.den_Q))
        if self.raw_den is not None:
            object.__setattr__(self, "raw_den", poly_trim(self.raw_den))
        if self.shift_m < 0:
            raise ValidationError("shift_m must be nonnegative")
        for c in self.num_P + self.den_Q:
            if not isinstance(c, int):
                raise ValidationError("rational function coefficients must be integers")
        if not self.den_Q or self.den_Q[0] != 1:
            raise ValidationError("denominator must satisfy Q(0) = 1")

    @classmethod
    def zero(cls) -> "RationalFn":
        return cls(0, (), (1,))

    def is_zero(self) -> bool:
        return not self.num_P

    def normalized(self) -> "RationalFn":
        """Cancel common factors over Q[t] and spare powers of t."""
        raw = self.raw_den if self.raw_den is not None else self.den_Q
        P, Q, m = self.num_P, self.den_Q, self.shift_m
        if not P:
            return RationalFn(0, (), (1,), raw_den=raw)
        g = poly_gcd_q(P, Q)
        if len(g) > 1:
            # g(0) != 0 because Q(0) = 1; make g(0) = 1 so Q stays normalised
            if g[0] < 0:
                g = poly_neg(g)
            P = poly_exact_div(P, g)
            Q = poly_exact_div(Q, g)
            if Q[0] != 1:  # g(0) = -1 case
                P, Q = poly_neg(P), poly_neg(Q)
        while m > 0 and P and P[0] == 0:
            P = P[1:]
            m -= 1
        return RationalFn(m, P, Q, raw_den=raw)

    def same_function(self, other: "RationalFn") -> bool:
        """Equality as elements of Q(t)."""
        lhs = poly_mul(poly_shift(self.num_P, other.shift_m), other.den_Q)
        rhs = poly_mul(poly_shift(other.num_P, self.shift_m), self.den_Q)
        return lhs == rhs

    def in_L_tilde(self) -> bool:
        """Structural membership: integer P, Q with Q(0) = 1, m >= 0."""
        return (self.shift_m >= 0 and bool(self.den_Q) and self.den_Q[0] == 1
                and all(isinstance(c, int) for c in self.num_P + self.den_Q))

    def expand(self, order: int) -> LaurentSeries:
        return expand_rational(self, order)

    def __str__(self) -> str:
        shift = f"t^-{self.shift_m} * " if self.shift_m else ""
        return f"{shift}({_pstr(self.num_P)}) / ({_pstr(self.den_Q)})"


def _pstr(p: Sequence[int]) -> str:
    if not p:
        return "0"
    parts = []
    for i, c in enumerate(p):
        if c:
            parts.append(f"{c}" if i == 0 else f"{c}*t^{i}")
    return " + ".join(parts)


def expand_rational(r: RationalFn, order: int) -> LaurentSeries:
    """Coefficients of ``t**-m P/Q`` up to ``t**order`` by long division."""
    if order < -r.shift_m:
        raise ValidationError("order must be at least -shift_m")
    n = order + r.shift_m + 1
    P, Q = r.num_P, r.den_Q
    out = [0] * n
    for k in range(n):
        acc = P[k] if k < len(P) else 0
        for i in range(1, min(k, len(Q) - 1) + 1):
            acc -= Q[i] * out[k - i]
        out[k] = acc
    return LaurentSeries.make(-r.shift_m, out, order)


def berlekamp_massey(seq: Sequence[int]) -> tuple[list[Fraction], int]:
    """Shortest connection polynomial C (C[0] = 1) and its length L over Q."""
    C = [Fraction(1)]
    B = [Fraction(1)]
    L = 0
    shift = 1
    b = Fraction(1)
    for n, s_n in enumerate(seq):
        d = Fraction(s_n)
        for i in range(1, L + 1):
            if i < len(C):
                d += C[i] * seq[n - i]
        if d == 0:
            shift += 1
            continue
        coef = d / b
        newC = C + [Fraction(0)] * max(0, len(B) + shift - len(C))
        for i, bi in enumerate(B):
            newC[i + shift] -= coef * bi
        if 2 * L <= n:
            B, C = C, newC
            L = n + 1 - L
            b = d
            shift = 1
        else:
            C = newC
            shift += 1
    while len(C) > 1 and C[-1] == 0:
        C.pop()
    return C, L


def reconstruct_rational(s: LaurentSeries) -> RationalFn:
    """Recover a verified closed form from known coefficients.

    Raises :class:`InsufficientDataError` unless a recurrence of length L
    with ``2L + 1 <= number of known coefficients`` reproduces every known
    coefficient and clears to integers with ``Q(0) = 1``.
    """
    if not s.coeffs:
        return RationalFn.zero()
    seq = list(s.coeffs)
    n = len(seq)
    if n < 3:
        raise InsufficientDataError(f"only {n} known coefficients")
    C, L = berlekamp_massey(seq)
    if 2 * L + 1 > n:
        raise InsufficientDataError(f"recurrence length {L} needs {2 * L + 1} coefficients, have {n}")
    if any(c.denominator != 1 for c in C):
        raise InsufficientDataError("minimal recurrence is not integral")
    Q = poly_trim(int(c) for c in C)
    P = []
    for j in range(L):
        P.append(sum(int(C[i]) * seq[j - i] for i in range(min(j, len(C) - 1) + 1)))
    P = poly_trim(P)
    if s.min_exp < 0:
        r = RationalFn(-s.min_exp, P, Q)
    else:
        r = RationalFn(0, poly_shift(P, s.min_exp), Q)
    r = r.normalized()
    if expand_rational(r, s.trunc_order) != s:
        raise InsufficientDataError("re-expansion does not reproduce the data")
    return RationalFn(r.shift_m, r.num_P, r.den_Q)


# ---------------------------------------------------------------- Cramer

def _check_square(A: Sequence[Sequence[int]]) -> int:
    n = len(A)
    for row in A:
        if len(row) != n:
            raise ValidationError("matrix must be square")
    return n


def faddeev_leverrier(A: Sequence[Sequence[int]]) -> tuple[list[int], list[list[list[int]]]]:
    """Characteristic polynomial coefficients c[0..n] (c[n] = 1) of A and the
    matrices M_1..M_n with adj(lambda I - A) = sum_k M_k lambda**(n-k)."""
    n = _check_square(A)
    c = [0] * (n + 1)
    c[n] = 1
    M = [[0] * n for _ in range(n)]
    Ms = []
    for k in range(1, n + 1):
        AM = [[sum(A[i][l] * M[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        M = [[AM[i][j] + (c[n - k + 1] if i == j else 0) for j in range(n)] for i in range(n)]
        Ms.append(M)
        tr = sum(sum(A[i][l] * M[l][i] for l in range(n)) for i in range(n))
        if tr % k:
            raise ArithmeticError("non-integral Faddeev-LeVerrier step")
        c[n - k] = -tr // k
    return c, Ms


def det_one_minus_At(A: Sequence[Sequence[int]]) -> tuple:
    """det(1 - A t) as an integer polynomial."""
    n = _check_square(A)
    c, _ = faddeev_leverrier(A)
    return poly_trim(c[n - j] for j in range(n + 1))


def cramer_series(A: Sequence[Sequence[int]], p: Sequence[int], lam: Sequence[int]) -> RationalFn:
    """Closed form of ``sum_k lam(A**k p) t**k`` as ``P / det(1 - A t)``.

    P is ``lam . adj(1 - A t) . p``; the result is left unreduced so that the
    denominator is exactly the determinant.
    """
    n = _check_square(A)
    if len(p) != n or len(lam) != n:
        raise ValidationError("dimension mismatch in cramer_series")
    if n == 0:
        return RationalFn(0, (), (1,), raw_den=(1,))
    c, Ms = faddeev_leverrier(A)
    Q = poly_trim(c[n - j] for j in range(n + 1))
    P = []
    for M in Ms:
        Mp = [sum(M[i][j] * p[j] for j in range(n)) for i in range(n)]
        P.append(sum(lam[i] * Mp[i] for i in range(n)))
    return RationalFn(0, poly_trim(P), Q, raw_den=Q)


def iterate_pairing(A: Sequence[Sequence[int]], p: Sequence[int], lam: Sequence[int], N: int) -> list[int]:
    """``lam(A**k p)`` for k = 0..N by repeated matrix-vector products."""
    n = len(A)
    v = list(p)
    out = []
    for _ in range(N + 1):
        out.append(sum(lam[i] * v[i] for i in range(n)))
        v = [sum(A[i][j] * v[j] for j in range(n)) for i in range(n)]
    return out


def coefficient_growth_check(s: LaurentSeries, C, D) -> bool:
    """True iff every known coefficient obeys ``|n_k| <= C exp(k D)``."""
    C, D = Fraction(C), Fraction(D)
    if C <= 0 or D <= 0:
        raise ValidationError("C and D must be positive")
    for i, c in enumerate(s.coeffs):
        if c and not leq_c_exp(abs(c), C, D, s.min_exp + i):
            return False
    return True

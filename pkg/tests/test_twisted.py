import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import FINITE_GROUPS, GROUPS, random_zh
from novikov.errors import TruncationError, ValidationError
from novikov.laurent import LaurentSeries
from novikov.twisted import (
    GroupElt, NovikovElt, TwistedGroup, TypeLElement, ZH, check_exponential_growth, conj_by_theta,
    expand_typeL, g_identity, g_inv, g_mul, growth_constants_for_typeL, int_det, l1_norm,
    left_mul_group, log_upper_bound, right_mul_group, truncate_at_level,
)

G1 = TwistedGroup.identity(1)
GNEG = TwistedGroup(1, ((-1,),))
GSWAP = TwistedGroup(2, ((0, 1), (1, 0)))


def h1(c=1, e=1):
    return ZH.mono((e,), c)


def elt(G, offset, levels, trunc):
    return NovikovElt.make(G, offset, levels, trunc)


# ---------------------------------------------------------------- an independent group-ring oracle

def as_dict(a: NovikovElt) -> dict:
    return {(h, a.offset + i): c for i, z in enumerate(a.levels) for h, c in z.terms.items()}


def oracle_mul(G: TwistedGroup, a: dict, b: dict, top: int) -> dict:
    """Product in ZG by the semidirect law (x, i)(y, j) = (x + Phi^i y, i + j)."""
    P = np.array(G.phi, dtype=object).reshape(G.m, G.m) if G.m else None
    out: dict = {}
    for (x, i), c in a.items():
        Pi = np.identity(G.m, dtype=object) if G.m else None
        if G.m:
            base = P if i >= 0 else np.array(_inv(G.phi), dtype=object)
            for _ in range(abs(i)):
                Pi = base.dot(Pi)
        for (y, j), d in b.items():
            if i + j > top:
                continue
            z = tuple(int(v) for v in (np.array(x, dtype=object) + Pi.dot(np.array(y, dtype=object)))) if G.m else ()
            out[(z, i + j)] = out.get((z, i + j), 0) + c * d
    return {k: v for k, v in out.items() if v}


def _inv(M):
    import sympy as sp
    return [[int(v) for v in row] for row in sp.Matrix(M).inv().tolist()]


@st.composite
def novikov(draw, G):
    rng = random.Random(draw(st.integers(0, 10 ** 9)))
    off = rng.randint(-2, 2)
    n = rng.randint(0, 4)
    return elt(G, off, [random_zh(rng, G.m) for _ in range(n)], off + n + rng.randint(0, 3))


# ---------------------------------------------------------------- ZH and conjugation

def test_conj_identity_monodromy():
    a = ZH(1, {(3,): 2, (-1,): 1})
    assert conj_by_theta(G1, a) == a


def test_conj_swap():
    assert conj_by_theta(GSWAP, ZH.mono((1, 0))) == ZH.mono((0, 1))


def test_conj_inversion():
    a = ZH(1, {(1,): 2, (0,): 3})
    assert conj_by_theta(GNEG, a) == ZH(1, {(-1,): 2, (0,): 3})


@given(st.integers(0, 10 ** 9), st.sampled_from(GROUPS))
def test_conj_is_ring_automorphism(seed, G):
    rng = random.Random(seed)
    a, b = random_zh(rng, G.m), random_zh(rng, G.m)
    assert conj_by_theta(G, a * b) == conj_by_theta(G, a) * conj_by_theta(G, b)
    assert conj_by_theta(G, conj_by_theta(G, a, "inv"), "fwd") == a
    assert conj_by_theta(G, conj_by_theta(G, a, "fwd"), "inv") == a


def test_l1_norm_examples():
    assert l1_norm(ZH(2)) == 0
    assert l1_norm(ZH(2, {(1, 0): 2, (0, 1): -3})) == 5
    x = ZH(1, {(1,): 1, (0,): 1})
    assert l1_norm(x * x) == 4


@given(st.integers(0, 10 ** 9), st.sampled_from(GROUPS))
def test_l1_submultiplicative(seed, G):
    rng = random.Random(seed)
    a, b = random_zh(rng, G.m, 4), random_zh(rng, G.m, 4)
    assert l1_norm(a * b) <= l1_norm(a) * l1_norm(b)


def test_group_law():
    G = GNEG
    a, b = GroupElt((2,), 1), GroupElt((5,), -3)
    assert g_mul(G, a, b) == GroupElt((-3,), -2)
    assert g_mul(G, a, g_inv(G, a)) == g_identity(G)


def test_monodromy_must_be_invertible():
    with pytest.raises(ValidationError):
        TwistedGroup(1, ((2,),))
    assert int_det([[2, 1], [1, 1]]) == 1


# ---------------------------------------------------------------- Novikov ring

def test_add_one_theta():
    s = elt(G1, 0, [ZH.const(1, 1)], 5) + elt(G1, 1, [ZH.const(1, 1)], 5)
    assert s == elt(G1, 0, [ZH.const(1, 1), ZH.const(1, 1)], 5)


def test_semidirect_commutation():
    theta = elt(GNEG, 1, [ZH.const(1, 1)], 5)
    h = elt(GNEG, 0, [h1()], 5)
    assert theta * h == elt(GNEG, 1, [h1(e=-1)], 5)
    assert h * theta == elt(GNEG, 1, [h1()], 5)


def test_telescoping():
    one = ZH.const(1, 1)
    a = elt(G1, 0, [one, -one], 20)
    geo = elt(G1, 0, [one] * 21, 20)
    assert a * geo == elt(G1, 0, [one], 20)


def test_group_mismatch():
    with pytest.raises(ValidationError):
        NovikovElt.zero(G1) + NovikovElt.zero(GNEG)


@given(st.data(), st.sampled_from(GROUPS))
def test_mul_against_oracle(data, G):
    a, b = data.draw(novikov(G)), data.draw(novikov(G))
    p = a * b
    want = oracle_mul(G, as_dict(a), as_dict(b), p.trunc)
    assert as_dict(p) == want


@given(st.data(), st.sampled_from(GROUPS))
def test_novikov_ring_axioms(data, G):
    a, b, c = (data.draw(novikov(G)) for _ in range(3))
    lhs, rhs = (a * b) * c, a * (b * c)
    top = min(lhs.trunc, rhs.trunc)
    assert lhs.truncate(top) == rhs.truncate(top)
    lhs, rhs = a * (b + c), a * b + a * c
    top = min(lhs.trunc, rhs.trunc)
    assert lhs.truncate(top) == rhs.truncate(top)


@given(st.data())
def test_m0_matches_laurent(data):
    G = TwistedGroup.trivial()
    a, b = data.draw(novikov(G)), data.draw(novikov(G))
    la, lb = a.augmentation(), b.augmentation()
    assert (a * b).augmentation() == la * lb
    assert (a + b).augmentation() == la + lb
    assert isinstance(la, LaurentSeries)


def test_group_multiplication_on_both_sides():
    G = GNEG
    a = elt(G, 0, [h1(), ZH.const(1, 2)], 4)
    g = GroupElt((1,), 1)
    ge = NovikovElt.from_group_elt(G, g, 10)
    assert left_mul_group(G, g, a) == (ge * a)
    assert right_mul_group(G, a, g) == (a * ge).truncate(5)


# ---------------------------------------------------------------- truncation and growth

def test_truncate_at_level():
    one = ZH.const(1, 1)
    lam = elt(G1, 0, [one, one, one], 5)
    assert truncate_at_level(lam, -1) == {GroupElt((0,), 0): 1, GroupElt((0,), 1): 1}
    assert truncate_at_level(elt(G1, 3, [one], 5), 0) == {}
    geo = elt(G1, 0, [ZH.const(1, 2 ** k) for k in range(10)], 9)
    assert truncate_at_level(geo, -2) == {GroupElt((0,), k): 2 ** k for k in range(3)}
    with pytest.raises(TruncationError):
        truncate_at_level(geo, -10)


def test_growth_geometric():
    # |lambda_[-k]| = k + 1 <= 4 exp(0.7 k) at every level; oracle scan in floats
    lam = elt(G1, 0, [ZH.const(1, 1)] * 41, 40)
    assert all(k + 1 <= 4 * math.exp(0.7 * k) for k in range(41))
    assert check_exponential_growth(lam, 4, Fraction(7, 10))


def test_growth_zero():
    assert check_exponential_growth(NovikovElt.zero(G1, 10), 1, 1)


def test_growth_factorial_fails():
    lam = elt(G1, 0, [ZH.const(1, math.factorial(k)) for k in range(20)], 19)
    assert not check_exponential_growth(lam, 2, 1)


def typeL(G, Y, A, X, g1=None, g2=None):
    e = g_identity(G)
    return TypeLElement(G, g1 or e, tuple(Y), tuple(tuple(r) for r in A), tuple(X), g2 or e)


def test_typeL_zero_matrix():
    one = ZH.const(1, 1)
    T = typeL(G1, [one], [[ZH(1)]], [one])
    assert expand_typeL(T, 10) == elt(G1, 0, [one], 10)


def test_typeL_identity_monodromy():
    T = typeL(G1, [ZH.const(1, 1)], [[h1()]], [ZH.const(1, 1)])
    assert expand_typeL(T, 8) == elt(G1, 0, [h1(e=k) for k in range(9)], 8)


def test_typeL_inversion_monodromy():
    one = ZH.const(1, 1)
    T = typeL(GNEG, [one], [[one]], [one])
    # oracle: step-by-step multiplication in the Novikov ring
    theta = elt(GNEG, 1, [one], 12)
    acc, p = elt(GNEG, 0, [one], 12), elt(GNEG, 0, [one], 12)
    for _ in range(12):
        p = p * theta
        acc = acc + p
    assert expand_typeL(T, 12) == acc.truncate(12) == elt(GNEG, 0, [one] * 13, 12)


def test_typeL_dimension_check():
    with pytest.raises(ValidationError):
        typeL(G1, [ZH.const(1, 1)], [[ZH(1), ZH(1)]], [ZH.const(1, 1)])


def test_growth_certificate_examples():
    one0 = ZH.const(0, 1)
    G0 = TwistedGroup.trivial()
    T = typeL(G0, [one0], [[ZH.const(0, 2)]], [one0])
    cert = growth_constants_for_typeL(T)
    assert cert.N == 3 and cert.A == 3
    assert check_exponential_growth(expand_typeL(T, 30), *cert)
    T = typeL(G0, [one0], [[ZH(0)]], [one0])
    assert growth_constants_for_typeL(T).N == 3
    T = typeL(G0, [one0, ZH(0)], [[one0, one0], [one0, ZH(0)]], [one0, ZH(0)])
    cert = growth_constants_for_typeL(T)
    assert cert.N == 3
    assert check_exponential_growth(expand_typeL(T, 40), *cert)


def test_log_upper_bound():
    for N in (2, 3, 5, 17, 1000):
        B = log_upper_bound(N)
        assert math.log(N) <= B < math.log(N) + 1e-12


@given(st.integers(0, 10 ** 9), st.sampled_from(FINITE_GROUPS), st.integers(1, 3))
def test_typeL_has_exponential_growth(seed, G, n):
    rng = random.Random(seed)
    A = [[random_zh(rng, G.m) for _ in range(n)] for _ in range(n)]
    Y = [random_zh(rng, G.m) for _ in range(n)]
    X = [random_zh(rng, G.m) for _ in range(n)]
    g1 = GroupElt(tuple(rng.randint(-1, 1) for _ in range(G.m)), rng.randint(-1, 1))
    g2 = GroupElt(tuple(rng.randint(-1, 1) for _ in range(G.m)), rng.randint(-1, 1))
    T = typeL(G, Y, A, X, g1, g2)
    assert check_exponential_growth(expand_typeL(T, 40), *growth_constants_for_typeL(T))

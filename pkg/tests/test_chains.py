import random

import pytest
import sympy
from hypothesis import given, strategies as st
from sympy.matrices.normalforms import smith_normal_form

from conftest import random_zh
from novikov.chains import (
    CyclicMorseData, MorseData, assemble_novikov_complex, assemble_twisted_complex, augment,
    base_change, build_morse_complex, check_d2, equivariant_direct_series, equivariant_incidence, homology_Z,
    incidence_rational, incidence_series, novikov_betti_numbers, rank_over_Qt, smith_diagonal,
)
from novikov.errors import ValidationError
from novikov.laurent import LaurentSeries, RationalFn, expand_rational
from novikov.semilinear import SemilinearEndo
from novikov.twisted import GroupElt, NovikovElt, TwistedGroup, ZH, g_inv, g_theta

SPHERE = MorseData({0: ("s",), 2: ("n",)})
TORUS = MorseData({0: ("c",), 1: ("b1", "b2"), 2: ("a",)})
CANCEL = MorseData({0: ("p",), 1: ("q",)}, {("q", "p"): 1})


# ---------------------------------------------------------------- integer complexes

def test_homology_sphere():
    assert homology_Z(build_morse_complex(SPHERE)) == {0: (1, []), 2: (1, [])}


def test_homology_torus():
    assert homology_Z(build_morse_complex(TORUS)) == {0: (1, []), 1: (2, []), 2: (1, [])}


def test_homology_cancelling_pair():
    assert homology_Z(build_morse_complex(CANCEL)) == {0: (0, []), 1: (0, [])}


def test_homology_projective_plane_torsion():
    rp2 = MorseData({0: ("p",), 1: ("q",), 2: ("r",)}, {("r", "q"): 2, ("q", "p"): 0})
    assert homology_Z(build_morse_complex(rp2)) == {0: (1, []), 1: (0, [2]), 2: (0, [])}


def test_matrix_orientation():
    d = MorseData({0: ("p1", "p2"), 1: ("q",)}, {("q", "p1"): 1, ("q", "p2"): -1})
    assert build_morse_complex(d).d[1] == [[1], [-1]]


def test_non_adjacent_count_rejected():
    with pytest.raises(ValidationError):
        build_morse_complex(MorseData({0: ("p",), 2: ("r",)}, {("r", "p"): 1}))


def test_d2_witness():
    bad = MorseData({0: ("p",), 1: ("q",), 2: ("r",)}, {("r", "q"): 1, ("q", "p"): 1})
    c = build_morse_complex(bad)
    res = check_d2(c)
    assert not res and res.witness == (1, "p", "r", 1)
    with pytest.raises(ValidationError):
        homology_Z(c)


def test_empty_complex():
    c = build_morse_complex(MorseData({}))
    assert check_d2(c) and homology_Z(c) == {}


@given(st.integers(0, 10 ** 9), st.integers(1, 5), st.integers(1, 5))
def test_smith_against_sympy(seed, r, c):
    rng = random.Random(seed)
    M = [[rng.randint(-6, 6) for _ in range(c)] for _ in range(r)]
    ours = smith_diagonal(M)
    ref = smith_normal_form(sympy.Matrix(M), domain=sympy.ZZ)
    theirs = [abs(int(ref[i, i])) for i in range(min(r, c)) if ref[i, i] != 0]
    assert ours == theirs


# ---------------------------------------------------------------- cyclic data

def cyclic(h, X, lam, direct=None):
    return CyclicMorseData({0: ("y",), 1: ("x",)}, {0: h}, {"x": X}, {"y": lam}, direct or {})


def test_incidence_zero_return_map():
    d = cyclic(((0,),), (1,), (1,))
    assert incidence_series(d, "x", "y", 5) == LaurentSeries.make(0, [1], 5)
    assert incidence_rational(d, "x", "y") == RationalFn(0, (1,), (1,))


def test_incidence_geometric_powers():
    d = cyclic(((2,),), (1,), (3,), {("x", "y"): -1})
    s = incidence_series(d, "x", "y", 6)
    assert s.coefficients(-1, 6) == [-1] + [3 * 2 ** k for k in range(7)]
    r = incidence_rational(d, "x", "y")
    assert r.same_function(RationalFn(1, (-1, 5), (1, -2)))
    assert expand_rational(r, 6) == s


def test_incidence_index_and_dimension_checks():
    d = cyclic(((2,),), (1, 0), (3,))
    with pytest.raises(ValidationError):
        incidence_series(d, "x", "y", 3)
    with pytest.raises(ValidationError):
        incidence_series(cyclic(((1,),), (1,), (1,)), "y", "x", 3)
    with pytest.raises(ValidationError):
        incidence_series(cyclic(((1,),), (1,), (1,)), "x", "z", 3)


def test_rational_keeps_raw_denominator():
    # X lies in the kernel of h - 1 so the closed form cancels to a polynomial
    d = cyclic(((1, 0), (0, 2)), (1, 0), (1, 1))
    r = incidence_rational(d, "x", "y")
    assert r.den_Q == (1, -1) and r.raw_den == (1, -3, 2)


def test_rank_over_Qt_against_sympy():
    rng = random.Random(7)
    t = sympy.symbols("t")
    for _ in range(30):
        rows, cols = rng.randint(1, 3), rng.randint(1, 3)
        M = []
        for _ in range(rows):
            row = []
            for _ in range(cols):
                P = tuple(rng.randint(-2, 2) for _ in range(rng.randint(0, 2)))
                Q = (1,) + tuple(rng.randint(-2, 2) for _ in range(rng.randint(0, 2)))
                row.append(RationalFn(rng.randint(0, 1), P, Q))
            M.append(row)
        # make dependent rows sometimes
        if rows > 1 and rng.random() < 0.5:
            M[-1] = list(M[0])
        S = sympy.Matrix([[sum(c * t ** i for i, c in enumerate(r.num_P)) * t ** -r.shift_m
                           / sum(c * t ** i for i, c in enumerate(r.den_Q)) for r in row] for row in M])
        assert rank_over_Qt(M) == S.rank(simplify=True)


def test_novikov_betti_of_fibration_is_zero():
    d = CyclicMorseData({}, {}, {}, {})
    assert novikov_betti_numbers(d) == {}
    d = cyclic(((0,),), (1,), (1,))
    assert novikov_betti_numbers(d) == {0: 0, 1: 0}
    d = cyclic(((0,),), (0,), (0,))
    assert novikov_betti_numbers(d) == {0: 1, 1: 1}


def test_assembled_complex_shifts_by_t():
    d = cyclic(((2,),), (1,), (1,), {("x", "y"): 4})
    c = assemble_novikov_complex(d, 8)
    assert c.d[1][0][0] == incidence_series(d, "x", "y", 7).shift(1)
    assert c.d[1][0][0].coefficient(0) == 4


# ---------------------------------------------------------------- equivariant data

GNEG = TwistedGroup(1, ((-1,),))
one = ZH.const(1, 1)


def twisted_cyclic(G, xi, X, lam, direct=None):
    return CyclicMorseData({0: ("y",), 1: ("x",)}, {}, {}, {}, {}, G,
                           {0: SemilinearEndo(G, xi)}, {"x": X}, {"y": lam},
                           {("x", "y"): direct} if direct is not None else {})


def test_equivariant_requires_group():
    with pytest.raises(ValidationError):
        equivariant_incidence(cyclic(((1,),), (1,), (1,)), "x", "y")


def test_equivariant_rank_one_orientation_reversing():
    h = ZH.mono((1,))
    d = twisted_cyclic(GNEG, ((h,),), (one,), (one - h,), ZH.const(1, 2))
    _, n = equivariant_incidence(d, "x", "y", 12)
    assert n == equivariant_direct_series(d, "x", "y", 12)
    # the augmentation kills every level but the direct one
    assert n.augmentation() == LaurentSeries.make(-1, [2], 12)
    assert incidence_series(augment(d), "x", "y", 12) == n.augmentation()


@given(st.integers(0, 10 ** 9), st.sampled_from([TwistedGroup.trivial(), TwistedGroup.identity(1), GNEG,
                                                  TwistedGroup(2, ((0, 1), (1, 0)))]))
def test_equivariant_closed_form_matches_iteration(seed, G):
    rng = random.Random(seed)
    r = rng.randint(1, 2)
    xi = tuple(tuple(random_zh(rng, G.m) for _ in range(r)) for _ in range(r))
    X = tuple(random_zh(rng, G.m) for _ in range(r))
    lam = tuple(random_zh(rng, G.m) for _ in range(r))
    d = twisted_cyclic(G, xi, X, lam, random_zh(rng, G.m))
    _, n = equivariant_incidence(d, "x", "y", 10)
    assert n == equivariant_direct_series(d, "x", "y", 10)
    assert n.augmentation() == incidence_series(augment(d), "x", "y", 10)


def test_m0_equivariant_reduces_to_integer():
    G = TwistedGroup.trivial()
    c = lambda v: ZH.const(0, v)  # noqa: E731
    d = twisted_cyclic(G, ((c(1), c(1)), (c(1), c(0))), (c(1), c(0)), (c(1), c(0)), c(3))
    _, n = equivariant_incidence(d, "x", "y", 15)
    a = augment(d)
    assert n.augmentation() == incidence_series(a, "x", "y", 15)
    assert a.h[0] == ((1, 1), (1, 0)) and a.direct == {("x", "y"): 3}


def test_base_change_identity_and_theta():
    G = TwistedGroup.identity(1)
    n = NovikovElt.make(G, 0, [ZH.mono((1,)), ZH.const(1, 2)], 6)
    e = GroupElt((0,), 0)
    assert base_change(G, n, e, e) == n
    # n(x, y theta) = theta^-1 n(x, y) lowers every power of theta by one
    shifted = base_change(G, n, e, g_theta(G, 1))
    assert shifted.coefficient(-1) == ZH.mono((1,)) and shifted.coefficient(0) == ZH.const(1, 2)
    assert shifted.trunc == n.trunc - 1


@given(st.integers(0, 10 ** 9))
def test_base_change_involution(seed):
    rng = random.Random(seed)
    G = GNEG
    n = NovikovElt.make(G, rng.randint(-2, 2), [random_zh(rng, 1) for _ in range(4)], 8)
    g1 = GroupElt((rng.randint(-3, 3),), rng.randint(-2, 2))
    g2 = GroupElt((rng.randint(-3, 3),), rng.randint(-2, 2))
    there = base_change(G, n, g1, g2)
    back = base_change(G, there, g_inv(G, g1), g_inv(G, g2))
    assert back.truncate(n.trunc) == n.truncate(back.trunc)


def test_torus_complexes_square_to_zero(torus):
    cob, ret = torus
    d = ret.data
    assert check_d2(assemble_novikov_complex(d, 12))
    assert check_d2(assemble_twisted_complex(d, 12))
    assert novikov_betti_numbers(d) == {0: 0, 1: 0, 2: 0}


def test_twisted_d2_witness():
    G = TwistedGroup.identity(1)
    xi = SemilinearEndo(G, ((one,),))
    d = CyclicMorseData({0: ("p",), 1: ("q",), 2: ("r",)}, {}, {}, {}, {}, G,
                        {0: xi, 1: xi}, {"q": (one,), "r": (one,)}, {"p": (one,), "q": (one,)})
    res = check_d2(assemble_twisted_complex(d, 6))
    assert not res and res.witness[:3] == (1, "p", "r")

import math

import numpy as np
import pytest

from novikov.chains import incidence_rational, incidence_series
from novikov.errors import BumpTouchesCriticalSet, DegenerateCritical, ValidationError
from novikov.flow.cobordism import (
    Cobordism, adjacent_pairs, branch_paths, check_transversality, count_table, descending_sphere,
    equivariant_counts,
)
from novikov.flow.condition_c import check_condition_C, compute_return_endomorphism, default_fiber_data
from novikov.flow.config import Tolerances
from novikov.flow.integrate import REACHED, integrate_flow
from novikov.flow.perturb import perturb_and_recount
from novikov.flow.report import csv_text, svg_text
from novikov.flow.scenarios import (
    FIBRATION_ALIGNED, FIBRATION_PLAIN, SYMMETRIC_SADDLES, TORUS_4PT, parse_scenario,
)
from novikov.flow.standard import annulus_time_bound, quadratic_slice_time, standard_gradient_times
from novikov.flow.torus import Bump, FourierMode, TorusMorseMap, find_critical_points
from novikov.laurent import RationalFn
from novikov.twisted import ZH

# frozen from the reference run at default tolerances
TORUS_TABLES = {
    ("x2_0", "x1_0"): [0] * 10,
    ("x2_0", "x1_1"): [1, -1] + [0] * 8,
    ("x1_0", "x0_0"): [1, -1] + [0] * 8,
    ("x1_1", "x0_0"): [0] * 10,
}
TORUS_EQUIVARIANT = {
    ("x2_0", "x1_0"): {(0, -1): 1, (0, 0): -1},
    ("x2_0", "x1_1"): {(0, -1): 1, (1, -1): -1},
    ("x1_0", "x0_0"): {(0, 0): 1, (1, 0): -1},
    ("x1_1", "x0_0"): {(0, 0): -1, (0, 1): 1},
}


def reflect(m: TorusMorseMap) -> TorusMorseMap:
    """G(x, y) = -F(-x, y), which has winding 1 again."""
    return TorusMorseMap(m.winding, tuple(FourierMode(-f.mx, f.my, -f.ac, -f.as_) for f in m.fourier))


# ---------------------------------------------------------------- critical points

def test_fibration_has_no_critical_points():
    assert find_critical_points(FIBRATION_ALIGNED) == []


@pytest.mark.parametrize("c", [1 / math.pi, 0.3])
def test_single_diagonal_mode_has_no_critical_points(c):
    # F_x = 1 - 2 pi c sin and F_y = -2 pi c sin never vanish together
    assert find_critical_points(TorusMorseMap(1, (FourierMode(1, 1, c, 0.0),))) == []


def test_torus_critical_points(torus):
    cob, _ = torus
    assert [(c.name, c.index) for c in cob.crit] == [("x2_0", 2), ("x1_0", 1), ("x1_1", 1), ("x0_0", 0)]
    assert sum((-1) ** c.index for c in cob.crit) == 0
    pos = {c.name: (round(c.x, 6), round(c.y, 6)) for c in cob.crit}
    assert pos["x2_0"] == pytest.approx((0.153767, 0.005716), abs=2e-6)
    assert pos["x0_0"] == pytest.approx((0.346233, 0.494284), abs=2e-6)
    for c in cob.crit:
        assert np.hypot(*cob.map.grad(c.x, c.y)) < 1e-10
    assert cob.c0 == pytest.approx(0.75)


def test_eigen_floor_flags_degenerate_points():
    # every Hessian eigenvalue of the torus map is below 7 in absolute value
    with pytest.raises(DegenerateCritical):
        find_critical_points(TORUS_4PT, Tolerances(eigen_floor=7.0))


def test_winding_other_than_one_rejected():
    with pytest.raises(ValidationError):
        Cobordism(TorusMorseMap(2, ()))


# ---------------------------------------------------------------- integration

def test_flow_reaches_level_and_reverses():
    m = TORUS_4PT
    cob = Cobordism(m)
    y = np.array([0.3, 0.7])
    x = cob.fiber_x(cob.c0, y)
    down = integrate_flow(cob.field, x, y, -1, target=cob.c0 - 0.4, crit=cob.lifts, record=True)
    assert np.all(down.status == REACHED)
    assert np.allclose(m.F(down.x, down.y), cob.c0 - 0.4, atol=1e-9)
    for path in down.paths:
        vals = m.F(*np.array(path).T)
        assert np.all(np.diff(vals) < 1e-12)
    up = integrate_flow(cob.field, down.x, down.y, +1, target=cob.c0, crit=cob.lifts)
    assert np.allclose(up.x, x, atol=1e-7) and np.allclose(up.y, y, atol=1e-7)


def test_bad_direction():
    cob = Cobordism(FIBRATION_ALIGNED)
    with pytest.raises(ValueError):
        integrate_flow(cob.field, [0.0], [0.0], 0, target=0.0)


# ---------------------------------------------------------------- spheres and counts

def test_descending_sphere_has_two_opposite_points(torus):
    cob, _ = torus
    for name in ("x1_0", "x1_1"):
        lv = cob.level_of(cob.index_of(name))
        sph = descending_sphere(cob, name, lv - 0.02)
        assert sorted(s for _, s in sph.points) == [-1, 1]
    with pytest.raises(ValidationError):
        descending_sphere(cob, "x2_0", 0.0)


def test_torus_count_tables(torus):
    cob, _ = torus
    assert adjacent_pairs(cob) == list(TORUS_TABLES)
    for (p, q), table in TORUS_TABLES.items():
        assert count_table(cob, p, q, 8) == table


def test_torus_equivariant_counts(torus):
    cob, _ = torus
    for (p, q), counts in TORUS_EQUIVARIANT.items():
        assert equivariant_counts(cob, p, q, 3) == counts


def test_counts_stable_under_refined_tolerances(torus):
    cob, _ = torus
    fine = Cobordism(TORUS_4PT, tol=Tolerances().refined())
    for (p, q), table in TORUS_TABLES.items():
        assert count_table(fine, p, q, 6) == table[:8]


def test_transversality(torus):
    cob, _ = torus
    assert check_transversality(cob)
    assert not check_transversality(Cobordism(SYMMETRIC_SADDLES))


def test_reflection_reverses_indices_and_counts(torus):
    cob, _ = torus
    ref = Cobordism(reflect(TORUS_4PT))
    assert sorted(c.index for c in ref.crit) == [0, 1, 1, 2]
    match = {}
    for c in cob.crit:
        partner = min(ref.crit, key=lambda r: math.hypot((r.x + c.x + 0.5) % 1 - 0.5, (r.y - c.y + 0.5) % 1 - 0.5))
        assert partner.index == 2 - c.index
        match[c.name] = partner.name
    for (p, q) in adjacent_pairs(cob):
        a = count_table(cob, p, q, 4)
        b = count_table(ref, match[q], match[p], 4)
        assert [abs(v) for v in a] == [abs(v) for v in b]


# ---------------------------------------------------------------- route B and condition (C)

def test_aligned_fibration_return_map_is_identity():
    cob = Cobordism(FIBRATION_ALIGNED)
    rd = compute_return_endomorphism(cob, 0.1)
    assert rd.witness.passed
    assert {s: xi.xi_hat for s, xi in rd.data.h_hat.items()} == {0: ((ZH.mono((0,)),),), 1: ((ZH.mono((0,)),),)}
    assert rd.integer().h == {0: ((1,),), 1: ((1,),)}


def test_plain_fibration_fails_condition_c():
    cob = Cobordism(FIBRATION_PLAIN)
    w = check_condition_C(cob, 0.1, 0.25, 0.75)
    assert not w.passed


def test_condition_c_parameter_validation():
    cob = Cobordism(FIBRATION_ALIGNED)
    with pytest.raises(ValidationError):
        check_condition_C(cob, 0.0, 0.25, 0.75)
    with pytest.raises(ValidationError):
        check_condition_C(cob, 0.3, 0.25, 0.75)


def test_torus_route_b_data(torus):
    cob, rd = torus
    d = rd.integer()
    assert d.h == {0: ((0,),), 1: ((0,),)}
    assert d.X == {"x2_0": (-1,), "x1_0": (-1,), "x1_1": (0,)}
    assert d.lam == {"x0_0": (1,), "x1_0": (0,), "x1_1": (1,)}
    assert d.direct == {("x2_0", "x1_1"): 1, ("x1_0", "x0_0"): 1}
    h = ZH.mono((1,))
    one = ZH.mono((0,))
    hinv = ZH.mono((-1,))
    assert rd.data.direct_hat[("x2_0", "x1_0")] == hinv - one
    assert rd.data.direct_hat[("x1_1", "x0_0")] == h - one
    assert rd.data.lam_hat["x1_1"] == (hinv,)
    target = RationalFn(1, (1, -1), (1,))
    assert incidence_rational(d, "x1_0", "x0_0").same_function(target)
    assert incidence_rational(d, "x2_0", "x1_1").same_function(target)


def test_route_a_equals_route_b(torus):
    cob, rd = torus
    for (p, q), table in TORUS_TABLES.items():
        s = incidence_series(rd.integer(), p, q, 8)
        assert s.coefficients(-1, 8) == table


def test_default_fiber_data(torus):
    cob, _ = torus
    y_min, y_max = default_fiber_data(cob)
    assert y_min == pytest.approx(0.494284, abs=1e-5) and y_max == pytest.approx(0.005716, abs=1e-5)


# ---------------------------------------------------------------- perturbations

def test_zero_amplitude_bump_changes_nothing(torus):
    cob, _ = torus
    rep = perturb_and_recount(cob, [Bump((0.6, 0.25), 0.1, (1.0, 0.0), 0.0)], 3)
    assert rep.identical and not rep.outside_hypothesis


def test_large_bump_flagged(torus):
    cob, _ = torus
    rep = perturb_and_recount(cob, [Bump((0.6, 0.25), 0.1, (0.0, 1.0), 0.01)], 2)
    assert rep.outside_hypothesis


def test_bump_on_critical_point_rejected(torus):
    cob, _ = torus
    c = cob.crit[0]
    with pytest.raises(BumpTouchesCriticalSet):
        perturb_and_recount(cob, [Bump((c.x, c.y), 0.1, (1.0, 0.0), 1e-4)], 2)


def test_bump_validation():
    with pytest.raises(ValidationError):
        Bump((0, 0), 0.0, (1, 0), 1e-4)
    with pytest.raises(ValidationError):
        Bump((0, 0), 0.1, (0, 0), 1e-4)


# ---------------------------------------------------------------- standard gradient

def test_stable_axis_time_is_log_ratio():
    rep = standard_gradient_times(2.0, 1.0, [2.0, 0.0], 1)
    assert rep.time == pytest.approx(math.log(2.0), abs=1e-12)
    assert rep.length == pytest.approx(1.0, abs=1e-9)


def test_annulus_bound_value():
    assert annulus_time_bound(2.0, 1.0) == pytest.approx(math.log(4 + math.sqrt(15)), abs=1e-12)


def test_bounds_hold_on_random_starts():
    rng = np.random.default_rng(3)
    for _ in range(50):
        n = int(rng.integers(2, 5))
        p = int(rng.integers(1, n))
        z = rng.normal(size=n)
        z *= 2.0 / np.linalg.norm(z)
        assert standard_gradient_times(2.0, 1.0, z, p).ok
        assert quadratic_slice_time(1.0, z, p).ok


def test_standard_validation():
    with pytest.raises(ValidationError):
        standard_gradient_times(1.0, 2.0, [1.0, 1.0], 1)
    with pytest.raises(ValidationError):
        quadratic_slice_time(1.0, [1.0, 0.0], 1)


# ---------------------------------------------------------------- reports and scenarios

def test_report_is_deterministic(torus):
    cob, _ = torus
    cfg = {"seed": 0, "order": 6}
    a = csv_text(["x", "y"], [(0.1, 1), (1 / 3, 2)], cfg)
    assert a == csv_text(["x", "y"], [(0.1, 1), (1 / 3, 2)], cfg)
    assert a.splitlines()[0] == '# config: {"order":6,"seed":0}'
    assert "0.33333333333333331" in a
    svg = svg_text(cob.crit, branch_paths(cob), cfg)
    assert svg == svg_text(cob.crit, branch_paths(cob), cfg)
    assert "<metadata>" in svg and svg.count("<circle") == 4


def test_parse_scenario():
    sc = parse_scenario({"winding": 1, "fourier": [{"mx": 0, "my": 1, "ac": 0.1}], "tolerances": {"rtol": 1e-9}},
                        {"atol": 1e-9})
    assert sc.map == FIBRATION_ALIGNED and sc.tol.rtol == 1e-9 and sc.tol.atol == 1e-9
    assert parse_scenario(sc.to_dict()).to_dict() == sc.to_dict()


@pytest.mark.parametrize("obj", [
    [], {"fourier": []}, {"winding": 1, "bogus": 1}, {"winding": 1, "delta": 0},
    {"winding": 1, "perturbations": -1}, {"winding": 1, "tolerances": {"rtol": -1}},
    {"winding": 1, "tolerances": {"nope": 1}},
])
def test_parse_scenario_rejects(obj):
    with pytest.raises(ValidationError):
        parse_scenario(obj)

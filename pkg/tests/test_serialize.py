import json
import random
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from conftest import GROUPS, random_zh
from novikov.chains import incidence_series
from novikov.errors import ValidationError
from novikov.laurent import LaurentSeries, RationalFn
from novikov.serialize import (
    group_from_json, group_to_json, load_json_text, load_problem, novikov_from_json, novikov_to_json,
    parse_problem, rational_from_json, rational_to_json, series_from_json, series_to_json,
)
from novikov.twisted import NovikovElt, TwistedGroup, ZH

DATA = Path(__file__).resolve().parents[1] / "demos" / "data"


@given(st.integers(-5, 5), st.lists(st.integers(-10 ** 30, 10 ** 30), max_size=8), st.integers(0, 12))
def test_series_round_trip(lo, coeffs, extra):
    s = LaurentSeries.make(lo, coeffs, lo + extra)
    enc = json.loads(json.dumps(series_to_json(s)))
    assert series_from_json(enc) == s


def test_big_integers_written_as_strings():
    s = LaurentSeries.make(0, [10 ** 40], 3)
    assert series_to_json(s)["coeffs"][0] == str(10 ** 40)


def test_rational_round_trip_with_raw_denominator():
    r = RationalFn(1, (1, -1), (1, -1), raw_den=(1, -3, 2))
    back = rational_from_json(json.loads(json.dumps(rational_to_json(r))))
    assert back == r and back.raw_den == (1, -3, 2)
    assert "raw_Q" not in rational_to_json(RationalFn(0, (1,), (1, 2)))


@given(st.integers(0, 10 ** 9), st.sampled_from(GROUPS))
def test_novikov_round_trip(seed, G):
    rng = random.Random(seed)
    n = NovikovElt.make(G, rng.randint(-3, 3), [random_zh(rng, G.m) for _ in range(4)], 5)
    enc = json.loads(json.dumps(novikov_to_json(n)))
    assert novikov_from_json(enc, group_from_json(group_to_json(G))) == n


def test_group_without_phi_is_identity():
    assert group_from_json({"m": 2}) == TwistedGroup.identity(2)


def test_group_rejects_non_unimodular():
    with pytest.raises(ValidationError):
        group_from_json({"m": 1, "Phi": [[2]]})


def test_decode_error_has_position():
    with pytest.raises(ValidationError, match=r"f\.json:2:5"):
        load_json_text('{\n    oops}', "f.json")


@pytest.mark.parametrize("obj, fragment", [
    ([], "JSON object"),
    ({"bogus": 1}, "unknown problem keys"),
    ({"indices": {"0": ["a", "a"]}}, "listed twice"),
    ({"indices": {"0": "a"}}, "list of strings"),
    ({"indices": {"0": ["y"], "1": ["x"]}, "h": [[1]], "X": {"x": [1.5]}}, "integer"),
    ({"indices": {"0": ["y"], "1": ["x"]}, "h": [[1]], "X": {"z": [1]}}, "unknown critical point"),
    ({"indices": {"0": ["y"], "1": ["x"]}, "h": [[1]], "X": {"x": [1, 2]}}, "dimension mismatch"),
    ({"indices": {"0": ["y"], "1": ["x"]}, "h": [1]}, "list of rows"),
])
def test_problem_validation(obj, fragment):
    with pytest.raises(ValidationError, match=fragment):
        parse_problem(obj)


def test_empty_problem():
    d = parse_problem({})
    assert d.pairs() == []


def test_fibonacci_file():
    d = load_problem(str(DATA / "fibonacci.json"))
    s = incidence_series(d, "x", "y", 10)
    assert s.coefficients(0, 10) == [1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89]


def test_hatted_only_problem_gets_integer_data_by_augmentation():
    d = load_problem(str(DATA / "twisted.json"))
    assert d.h[0] == ((1,),) and d.lam == {"y": (0,)} and d.direct == {("x", "y"): 2}
    assert incidence_series(d, "x", "y", 6) == LaurentSeries.make(-1, [2], 6)


def test_integer_problem_with_group_embeds_constants():
    obj = json.loads((DATA / "fibonacci.json").read_text())
    obj["group"] = {"m": 1}
    d = parse_problem(obj)
    from novikov.chains import equivariant_incidence
    _, n = equivariant_incidence(d, "x", "y", 10)
    assert n.augmentation() == incidence_series(d, "x", "y", 10)


def test_coefficients_are_decimal_strings_and_both_forms_read():
    G = TwistedGroup.identity(1)
    n = NovikovElt.make(G, 0, [random_zh(random.Random(1), 1)], 2)
    enc = novikov_to_json(n)
    assert all(isinstance(t["c"], str) for lv in enc["levels"] for t in lv)
    assert rational_to_json(RationalFn(0, (10 ** 30,), (1, -1)))["P"] == [str(10 ** 30)]
    assert series_from_json({"min_exp": 0, "coeffs": [3, "4"], "trunc": 2}).coefficients(0, 1) == [3, 4]
    plain = {"levels": [[{"h": [1], "c": 2}]], "trunc": 3}
    assert novikov_from_json(plain, G) == NovikovElt.make(G, 0, [ZH.mono((1,), 2)], 3)


def test_bad_decimal_string_rejected():
    with pytest.raises(ValidationError):
        series_from_json({"min_exp": 0, "coeffs": ["1.5"], "trunc": 2})

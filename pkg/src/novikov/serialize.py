"""JSON encodings of the algebraic objects and the problem-file reader.

Coefficients are written as decimal strings so that no JSON consumer rounds
big integers; readers accept plain integers as well.  Exponents, degrees and
truncation orders stay plain integers.
"""

from __future__ import annotations

import json
from typing import Any

from .chains import CyclicMorseData, augment
from .errors import ValidationError
from .laurent import LaurentSeries, RationalFn
from .semilinear import SemilinearEndo
from .twisted import NovikovElt, TwistedGroup, ZH


def series_to_json(s: LaurentSeries) -> dict:
    return {"min_exp": s.min_exp, "coeffs": [str(c) for c in s.coeffs], "trunc": s.trunc_order}


def series_from_json(d: dict) -> LaurentSeries:
    return LaurentSeries.make(_int(d["min_exp"], "min_exp"), [_bigint(c, "coefficient") for c in d["coeffs"]],
                              _int(d["trunc"], "trunc"))


def rational_to_json(r: RationalFn) -> dict:
    out = {"m": r.shift_m, "P": [str(c) for c in r.num_P], "Q": [str(c) for c in r.den_Q]}
    if r.raw_den is not None and r.raw_den != r.den_Q:
        out["raw_Q"] = [str(c) for c in r.raw_den]
    return out


def rational_from_json(d: dict) -> RationalFn:
    def poly(key):
        return tuple(_bigint(c, key) for c in d[key])
    raw = poly("raw_Q") if "raw_Q" in d else None
    return RationalFn(_int(d["m"], "m"), poly("P"), poly("Q"), raw_den=raw)


def group_to_json(G: TwistedGroup) -> dict:
    return {"m": G.m, "Phi": [list(r) for r in G.phi]}


def group_from_json(d: dict) -> TwistedGroup:
    m = _int(d.get("m"), "group.m")
    phi = d.get("Phi")
    if phi is None:
        return TwistedGroup.identity(m)
    return TwistedGroup(m, tuple(tuple(_int(x, "group.Phi") for x in r) for r in phi))


def zh_to_json(a: ZH) -> list:
    return [{"h": list(h), "c": str(c)} for h, c in a.sorted_terms()]


def zh_from_json(d: Any, m: int) -> ZH:
    """A ZH element: an integer (constant) or a list of ``{"h": [...], "c": coefficient}``."""
    if isinstance(d, (int, str)) and not isinstance(d, bool):
        return ZH.const(m, _bigint(d, "ZH constant"))
    if not isinstance(d, list):
        raise ValidationError(f"expected a ZH element, got {d!r}")
    terms: dict = {}
    for item in d:
        h = tuple(_int(x, "ZH exponent") for x in item["h"])
        if len(h) != m:
            raise ValidationError(f"ZH exponent {list(h)} has the wrong length for m={m}")
        terms[h] = terms.get(h, 0) + _bigint(item["c"], "ZH coefficient")
    return ZH(m, terms)


def novikov_to_json(a: NovikovElt) -> dict:
    return {"offset": a.offset, "levels": [zh_to_json(z) for z in a.levels], "trunc": a.trunc}


def novikov_from_json(d: dict, G: TwistedGroup) -> NovikovElt:
    """``levels[i]`` is the coefficient of theta^(offset + i); offset defaults to 0."""
    return NovikovElt.make(G, _int(d.get("offset", 0), "offset"), [zh_from_json(z, G.m) for z in d["levels"]],
                           _int(d["trunc"], "trunc"))


# ---------------------------------------------------------------- problem files

def _int(x, what: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ValidationError(f"{what} must be an integer, got {x!r}")
    return x


def _bigint(x, what: str) -> int:
    """An integer given as a JSON number or a decimal string."""
    if isinstance(x, str):
        try:
            return int(x, 10)
        except ValueError:
            raise ValidationError(f"{what} must be a decimal integer, got {x!r}") from None
    return _int(x, what)


def load_json_text(text: str, source: str = "<input>") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(f"{source}:{e.lineno}:{e.colno}: {e.msg}") from None


def _matrix(M, what: str) -> tuple:
    if not isinstance(M, list) or any(not isinstance(r, list) for r in M):
        raise ValidationError(f"{what} must be a list of rows")
    return tuple(tuple(_int(x, what) for x in r) for r in M)


def _per_index(value, indices, what: str) -> dict:
    """A matrix for every index-s fiber group: one shared matrix or a dict keyed by s."""
    if value is None:
        return {}
    if isinstance(value, dict):
        return {int(k): v for k, v in value.items()}
    return {s: value for s in indices if s - 1 in indices or s + 1 in indices}


def parse_problem(obj: Any) -> CyclicMorseData:
    """Build :class:`CyclicMorseData` from a decoded problem file."""
    if not isinstance(obj, dict):
        raise ValidationError("problem file must hold a JSON object")
    unknown = set(obj) - {"indices", "h", "X", "lambda", "direct", "group",
                          "h_hat", "X_hat", "lambda_hat", "direct_hat", "comment"}
    if unknown:
        raise ValidationError(f"unknown problem keys: {sorted(unknown)}")
    raw_idx = obj.get("indices", {})
    if not isinstance(raw_idx, dict):
        raise ValidationError("indices must map degree -> list of names")
    indices = {}
    seen = set()
    for k, pts in raw_idx.items():
        s = int(k)
        if not isinstance(pts, list) or any(not isinstance(p, str) for p in pts):
            raise ValidationError(f"indices[{k}] must be a list of strings")
        for p in pts:
            if p in seen:
                raise ValidationError(f"critical point {p!r} listed twice")
            seen.add(p)
        indices[s] = tuple(pts)
    h = {s: _matrix(M, f"h[{s}]") for s, M in _per_index(obj.get("h"), indices, "h").items()}
    X = {p: tuple(_int(x, f"X[{p}]") for x in v) for p, v in obj.get("X", {}).items()}
    lam = {p: tuple(_int(x, f"lambda[{p}]") for x in v) for p, v in obj.get("lambda", {}).items()}
    for p in list(X) + list(lam):
        if p not in seen:
            raise ValidationError(f"vector given for unknown critical point {p!r}")
    direct = {}
    for item in obj.get("direct", []):
        direct[(item["x"], item["y"])] = _int(item["c"], "direct.c")
    group = None
    kw = {}
    if "group" in obj:
        group = group_from_json(obj["group"])
        m = group.m
        if "h_hat" in obj:
            hh = _per_index(obj["h_hat"], indices, "h_hat")
            kw["h_hat"] = {s: SemilinearEndo(group, tuple(tuple(zh_from_json(a, m) for a in r) for r in M))
                           for s, M in hh.items()}
            kw["X_hat"] = {p: tuple(zh_from_json(a, m) for a in v) for p, v in obj.get("X_hat", {}).items()}
            kw["lam_hat"] = {p: tuple(zh_from_json(a, m) for a in v)
                             for p, v in obj.get("lambda_hat", {}).items()}
            kw["direct_hat"] = {(it["x"], it["y"]): zh_from_json(it["c"], m) for it in obj.get("direct_hat", [])}
        else:
            # integer data embedded as constants of ZH
            kw["h_hat"] = {s: SemilinearEndo(group, tuple(tuple(ZH.const(m, a) for a in r) for r in M))
                           for s, M in h.items()}
            kw["X_hat"] = {p: tuple(ZH.const(m, a) for a in v) for p, v in X.items()}
            kw["lam_hat"] = {p: tuple(ZH.const(m, a) for a in v) for p, v in lam.items()}
            kw["direct_hat"] = {k: ZH.const(m, c) for k, c in direct.items()}
    if group is not None and "h_hat" in obj and not ({"h", "X", "lambda", "direct"} & set(obj)):
        # integer data by augmentation, a ring map for every monodromy
        aug = augment(CyclicMorseData(indices, {}, {}, {}, {}, group, **kw))
        h, X, lam, direct = aug.h, aug.X, aug.lam, aug.direct
    d = CyclicMorseData(indices, h, X, lam, direct, group, **kw)
    for x, y in d.pairs():
        d._triple(x, y)
    return d


def load_problem(path: str) -> CyclicMorseData:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_problem(load_json_text(text, path))

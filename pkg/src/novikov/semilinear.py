"""theta-semilinear endomorphisms of free right ZH-modules.

An endomorphism ``xi`` of F = (ZH)^r is theta-semilinear when
``xi(x lam) = xi(x) theta lam theta^-1``.  It is stored by the matrix
``xi_hat`` whose *columns* are the images of the basis:
``xi(e_i) = sum_j e_j xi_hat[j][i]``.  Vectors are columns with scalars
acting on the right.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import ValidationError
from .twisted import (
    NovikovElt, TwistedGroup, TypeLElement, ZH, _addmul_into, expand_typeL, g_identity,
)


@dataclass(frozen=True, eq=False)
class SemilinearEndo:
    group: TwistedGroup
    xi_hat: tuple

    def __post_init__(self):
        xi = tuple(tuple(r) for r in self.xi_hat)
        object.__setattr__(self, "xi_hat", xi)
        n = len(xi)
        if any(len(r) != n for r in xi):
            raise ValidationError("xi_hat must be square")
        for r in xi:
            for a in r:
                if not isinstance(a, ZH) or a.m != self.group.m:
                    raise ValidationError("xi_hat entries must be ZH elements of the group's rank")

    @property
    def rank(self) -> int:
        return len(self.xi_hat)


@dataclass(frozen=True)
class IntegerFunctionalData:
    """A functional l: F -> Z given by triples ``(i, h, v)`` meaning
    ``l(e_i h^-1) = v``; l vanishes on all other ``e_i g``."""

    rank: int
    m: int
    triples: tuple


def _check_vec(xi: SemilinearEndo, x: Sequence[ZH]):
    if len(x) != xi.rank:
        raise ValidationError(f"vector of length {len(x)} for an endomorphism of rank {xi.rank}")


def apply(xi: SemilinearEndo, x: Sequence[ZH]) -> tuple:
    """One application: ``xi(x)_j = sum_i xi_hat[j][i] * Phi(x_i)``."""
    _check_vec(xi, x)
    G = xi.group
    tw = [xi_.conj(G, 1) for xi_ in x]
    out = []
    for j in range(xi.rank):
        acc: dict = {}
        for i in range(xi.rank):
            a = xi.xi_hat[j][i]
            if a.terms and tw[i].terms:
                _addmul_into(acc, a.terms, tw[i].terms)
        out.append(ZH(G.m, acc))
    return tuple(out)


def apply_iterated(xi: SemilinearEndo, x: Sequence[ZH], n: int) -> tuple:
    """n-fold :func:`apply`, the naive route."""
    if n < 0:
        raise ValidationError("n must be nonnegative")
    y = tuple(x)
    for _ in range(n):
        y = apply(xi, y)
    return y


def twisted_matrix_power(xi: SemilinearEndo, n: int) -> list[list[NovikovElt]]:
    """``(xi_hat theta)**n`` with entries in the Novikov ring."""
    G = xi.group
    r = xi.rank
    trunc = 2 * n + 2
    base = [[NovikovElt.from_coeff(G, xi.xi_hat[j][i], 1, trunc) for i in range(r)] for j in range(r)]
    M = [[NovikovElt.from_coeff(G, ZH.const(G.m, int(i == j)), 0, trunc) for j in range(r)] for i in range(r)]
    for _ in range(n):
        M = [[_nsum(G, [M[j][l] * base[l][i] for l in range(r)], trunc) for i in range(r)] for j in range(r)]
    return M


def _nsum(G, items, trunc):
    acc = NovikovElt.zero(G, trunc)
    for it in items:
        acc = acc + it
    return acc


def apply_power(xi: SemilinearEndo, x: Sequence[ZH], n: int) -> tuple:
    """``xi**n(x) = sum_j e_j eta_ji x_i theta^-n`` with ``eta = (xi_hat theta)**n``.

    Every product is formed in the Novikov ring; the result must sit at
    level zero.
    """
    if n < 0:
        raise ValidationError("n must be nonnegative")
    _check_vec(xi, x)
    G = xi.group
    M = twisted_matrix_power(xi, n)
    trunc = 2 * n + 2
    back = NovikovElt.from_coeff(G, ZH.const(G.m, 1), -n, trunc)
    out = []
    for j in range(xi.rank):
        acc = NovikovElt.zero(G, trunc)
        for i in range(xi.rank):
            xi_elt = NovikovElt.from_coeff(G, x[i], 0, trunc)
            acc = acc + M[j][i] * xi_elt * back
        if acc.levels and (acc.offset != 0 or any(not a.is_zero() for a in acc.levels[1:])):
            raise ArithmeticError("theta bookkeeping left a nonzero off-level term")
        out.append(acc.coefficient(0))
    return tuple(out)


def underline_hom(d: IntegerFunctionalData) -> tuple:
    """The right ZH-module map ``Lambda(x) = sum_h l(x h^-1) h`` as a covector."""
    out = [dict() for _ in range(d.rank)]
    for i, h, v in d.triples:
        if not 0 <= i < d.rank:
            raise ValidationError("basis index out of range")
        h = tuple(h)
        out[i][h] = out[i].get(h, 0) + v
    return tuple(ZH(d.m, t) for t in out)


def pair(lam: Sequence[ZH], x: Sequence[ZH]) -> ZH:
    """``Lambda(x) = sum_i Lambda_i x_i``."""
    if len(lam) != len(x):
        raise ValidationError("covector and vector lengths differ")
    m = lam[0].m if lam else 0
    acc: dict = {}
    for a, b in zip(lam, x):
        if a.terms and b.terms:
            _addmul_into(acc, a.terms, b.terms)
    return ZH(m, acc)


def direct_series(xi: SemilinearEndo, lam: Sequence[ZH], x: Sequence[ZH], N: int) -> NovikovElt:
    """``sum_{k<=N} lam(xi^k(x)) theta^k`` by iterating :func:`apply`."""
    _check_vec(xi, x)
    levels = []
    y = tuple(x)
    for k in range(N + 1):
        levels.append(pair(lam, y))
        if k < N:
            y = apply(xi, y)
    return NovikovElt.make(xi.group, 0, levels, N)


def summed_series(xi: SemilinearEndo, lam: Sequence[ZH], x: Sequence[ZH], N: int):
    """Closed form of ``sum_k lam(xi^k(x)) theta^k`` and its expansion to level -N."""
    _check_vec(xi, x)
    if len(lam) != xi.rank:
        raise ValidationError("covector length does not match the endomorphism")
    G = xi.group
    e = g_identity(G)
    T = TypeLElement(G, e, tuple(lam), xi.xi_hat, tuple(x), e)
    return T, expand_typeL(T, N)

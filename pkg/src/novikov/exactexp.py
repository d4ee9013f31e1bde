"""Rigorous rational enclosures of exp(x) for rational x.

Used to decide inequalities of the form ``n <= C * exp(k * D)`` without
floating point.  The enclosure comes from a truncated Taylor series at
``x / 2**j`` with an explicit remainder bound, followed by repeated squaring
with outward rounding to a fixed binary denominator.
"""

from __future__ import annotations

from fractions import Fraction
from math import floor, ceil


def _round_down(q: Fraction, bits: int) -> Fraction:
    scale = 1 << bits
    return Fraction(floor(q * scale), scale)


def _round_up(q: Fraction, bits: int) -> Fraction:
    scale = 1 << bits
    return Fraction(ceil(q * scale), scale)


def exp_bounds(x: Fraction | int, bits: int = 64) -> tuple[Fraction, Fraction]:
    """Return rationals ``lo <= exp(x) <= hi``.

    The relative width shrinks roughly like ``2**-bits`` times a modest
    factor from the squaring steps.
    """
    x = Fraction(x)
    if x == 0:
        return Fraction(1), Fraction(1)
    if x < 0:
        lo, hi = exp_bounds(-x, bits)
        # exp(x) < 2**-e, so a grid finer by e bits keeps the relative width
        fine = bits + ceil(-x * Fraction(3, 2)) + 2
        return _round_down(1 / hi, fine), _round_up(1 / lo, fine)
    # reduce to y <= 1/2
    j = 0
    y = x
    while y > Fraction(1, 2):
        y /= 2
        j += 1
    work = bits + 2 * j + 8
    term = Fraction(1)
    total = Fraction(1)
    i = 0
    while True:
        i += 1
        term = term * y / i
        total += term
        # tail after term i is at most 2 * term * y / (i + 1)
        tail = 2 * term * y / (i + 1)
        if tail * (1 << work) < 1:
            break
    lo = _round_down(total, work)
    hi = _round_up(total + tail, work)
    for _ in range(j):
        lo = _round_down(lo * lo, work)
        hi = _round_up(hi * hi, work)
    return lo, hi


def power_bounds(base: tuple[Fraction, Fraction], k: int) -> tuple[Fraction, Fraction]:
    """Bounds of ``b**k`` given ``lo <= b <= hi`` with ``lo > 0``."""
    lo, hi = base
    if k >= 0:
        return lo ** k, hi ** k
    return hi ** k, lo ** k


def leq_c_exp(value: int | Fraction, C: Fraction, D: Fraction, k: int) -> bool:
    """Decide ``value <= C * exp(k * D)`` exactly.

    ``exp(q)`` is irrational for rational ``q != 0``, so refinement always
    terminates; the exact case ``k * D == 0`` is handled directly.
    """
    value = Fraction(value)
    C = Fraction(C)
    D = Fraction(D)
    if k == 0 or D == 0:
        return value <= C
    bits = 64
    while True:
        lo, hi = power_bounds(exp_bounds(D, bits), k)
        if value <= C * lo:
            return True
        if value > C * hi:
            return False
        bits *= 2
        if bits > 1 << 16:
            raise ArithmeticError("exp comparison did not separate")

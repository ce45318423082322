"""Exact rational helpers: generalized binomials, the delta indicator, level indices.

Every scalar in the package is a :class:`fractions.Fraction` (or a plain ``int``
where the value is known to be integral); floats never appear.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import re

Rat = Fraction


def as_rat(x) -> Fraction:
    """Coerce ``int``, ``Fraction`` or a ``"p/q"`` string to a reduced Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rat(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


_RAT_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rat(s: str) -> Fraction:
    m = _RAT_RE.match(s)
    if not m:
        raise ValueError(f"not a rational literal: {s!r}")
    den = int(m.group(2)) if m.group(2) else 1
    if den == 0:
        raise ValueError(f"zero denominator in {s!r}")
    return Fraction(int(m.group(1)), den)


def fmt_rat(x) -> str:
    """Serialize as ``"p/q"``, dropping ``q`` when it is 1."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


@lru_cache(maxsize=None)
def rat_binomial(alpha, j: int) -> Fraction:
    """Generalized binomial ``alpha (alpha-1) ... (alpha-j+1) / j!``.

    ``alpha`` may be any rational; ``j`` must be a nonnegative integer.
    """
    if j < 0:
        raise ValueError("lower index of a binomial must be nonnegative")
    alpha = Fraction(alpha)
    num = Fraction(1)
    for t in range(j):
        num *= alpha - t
    den = 1
    for t in range(2, j + 1):
        den *= t
    return num / den


def delta(i: int, r: int, T: int) -> int:
    """Indicator ``1 if i >= r else 0`` with ``r`` allowed to equal ``T``.

    ``r = T`` arises from ``delta_i(T - r)`` at ``r = 0``; since ``i <= T-1`` it
    always evaluates to 0.
    """
    if T < 1:
        raise ValueError("automorphism order T must be positive")
    if not 0 <= i <= T - 1:
        raise ValueError(f"i={i} outside [0, {T - 1}]")
    if not 0 <= r <= T:
        raise ValueError(f"r={r} outside [0, {T}]")
    return 1 if i >= r else 0


def is_frac_exp(value, T: int) -> bool:
    """True when ``value`` lies in (1/T)Z."""
    return (Fraction(value) * T).denominator == 1


def fmt_frac_exp(value) -> dict:
    value = Fraction(value)
    return {"num": value.numerator, "den": value.denominator}


@dataclass(frozen=True, order=True)
class ModIndex:
    """A level ``n = l + i/T`` with ``0 <= i <= T-1``."""

    l: int
    i: int
    T: int

    def __post_init__(self):
        if self.T < 1:
            raise ValueError("T must be positive")
        if self.l < 0:
            raise ValueError("l must be nonnegative")
        if not 0 <= self.i <= self.T - 1:
            raise ValueError(f"i={self.i} outside [0, {self.T - 1}]")

    @property
    def n(self) -> Fraction:
        return self.l + Fraction(self.i, self.T)

    def delta(self, r: int) -> int:
        return delta(self.i, r, self.T)

    def lower(self) -> "ModIndex":
        """The level ``n - 1/T``."""
        if self.l == 0 and self.i == 0:
            raise ValueError("level 0 has no lower level")
        return decompose_n(self.n - Fraction(1, self.T), self.T)

    def label(self) -> str:
        return f"{self.l}+{self.i}/{self.T}"

    def __str__(self) -> str:
        return fmt_rat(self.n)


def decompose_n(n, T: int) -> ModIndex:
    """Split ``n`` in (1/T)Z_+ as ``l + i/T``."""
    n = as_rat(n)
    if T < 1:
        raise ValueError("T must be positive")
    if n < 0 or not is_frac_exp(n, T):
        raise ValueError(f"n={fmt_rat(n)} is not in (1/{T})Z_+")
    scaled = int(n * T)
    return ModIndex(scaled // T, scaled % T, T)


_LIT_RE = re.compile(r"^\s*l\s*=\s*(\d+)\s*,\s*i\s*=\s*(\d+)\s*,\s*T\s*=\s*(\d+)\s*$")


def parse_level(text: str, T: int) -> ModIndex:
    """Accept ``"3/2"`` or ``"l=1,i=1,T=2"``; the latter must agree with ``T``."""
    m = _LIT_RE.match(text)
    if m:
        l, i, t = (int(g) for g in m.groups())
        if t != T:
            raise ValueError(f"level {text!r} has T={t} but the automorphism has order {T}")
        return ModIndex(l, i, T)
    return decompose_n(parse_rat(text), T)

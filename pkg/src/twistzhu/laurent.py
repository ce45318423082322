"""Finite Laurent polynomials and truncated series with exponents in (1/T)Z.

Also holds the combinatorial identities that the bimodule constructions rely
on; each ``check_*`` function expands the identity symbolically and compares
exactly.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb

from .exact import fmt_rat, rat_binomial


class UncertifiedResidue(ArithmeticError):
    """The truncation order of a series is too low to certify a coefficient."""


def _clean(coeffs):
    return {e: c for e, c in coeffs.items() if c != 0}


class LaurentPoly:
    """Finite-support Laurent polynomial in one variable."""

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs=None, var="z"):
        self.coeffs = _clean({Fraction(e): Fraction(c) for e, c in (coeffs or {}).items()})
        self.var = var

    @classmethod
    def monomial(cls, exp, coef=1, var="z"):
        return cls({exp: coef}, var)

    @classmethod
    def constant(cls, c, var="z"):
        return cls({0: c}, var)

    @classmethod
    def one_plus_z_pow(cls, k: int, var="z"):
        """``(1+z)^k`` for a nonnegative integer ``k``."""
        if k < 0:
            raise ValueError("use binom_expand for negative powers")
        return cls({j: comb(k, j) for j in range(k + 1)}, var)

    def _check(self, other):
        if isinstance(other, LaurentPoly) and other.var != self.var:
            raise ValueError(f"variable mismatch: {self.var} vs {other.var}")

    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(other, self.var)
        self._check(other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly(out, self.var)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({e: -c for e, c in self.coeffs.items()}, self.var)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            c = Fraction(other)
            return LaurentPoly({e: c * v for e, v in self.coeffs.items()}, self.var)
        self._check(other)
        out = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly(out, self.var)

    __rmul__ = __mul__

    def shift(self, e):
        """Multiply by ``z**e``."""
        e = Fraction(e)
        return LaurentPoly({k + e: c for k, c in self.coeffs.items()}, self.var)

    def derivative(self):
        return LaurentPoly({e - 1: e * c for e, c in self.coeffs.items()}, self.var)

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(other, self.var)
        return self.var == other.var and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.var, frozenset(self.coeffs.items())))

    def __getitem__(self, e):
        return self.coeffs.get(Fraction(e), Fraction(0))

    def is_zero(self):
        return not self.coeffs

    def is_monomial(self):
        return len(self.coeffs) == 1

    def to_json(self):
        return [{"exp": fmt_rat(e), "coef": fmt_rat(c)} for e, c in sorted(self.coeffs.items())]

    def __repr__(self):
        if not self.coeffs:
            return "0"
        terms = [f"{fmt_rat(c)}*{self.var}^{fmt_rat(e)}" for e, c in sorted(self.coeffs.items())]
        return " + ".join(terms)


class TruncSeries:
    """Laurent series known exactly for exponents ``<= order``.

    ``order=None`` means the series is exact (finite support).
    """

    __slots__ = ("coeffs", "order", "var")

    def __init__(self, coeffs, order, var="z"):
        order = None if order is None else Fraction(order)
        coeffs = {Fraction(e): Fraction(c) for e, c in coeffs.items()}
        if order is not None:
            coeffs = {e: c for e, c in coeffs.items() if e <= order}
        self.coeffs = _clean(coeffs)
        self.order = order
        self.var = var

    @classmethod
    def from_poly(cls, p: LaurentPoly):
        return cls(p.coeffs, None, p.var)

    @property
    def valuation(self):
        return min(self.coeffs) if self.coeffs else None

    def certified(self, e) -> bool:
        return self.order is None or Fraction(e) <= self.order

    def coefficient(self, e) -> Fraction:
        if not self.certified(e):
            raise UncertifiedResidue(
                f"coefficient of {self.var}^{fmt_rat(e)} lies beyond the truncation order {fmt_rat(self.order)}"
            )
        return self.coeffs.get(Fraction(e), Fraction(0))

    def shift(self, e):
        e = Fraction(e)
        order = None if self.order is None else self.order + e
        return TruncSeries({k + e: c for k, c in self.coeffs.items()}, order, self.var)

    def __add__(self, other):
        if isinstance(other, LaurentPoly):
            other = TruncSeries.from_poly(other)
        orders = [o for o in (self.order, other.order) if o is not None]
        order = min(orders) if orders else None
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return TruncSeries(out, order, self.var)

    def __mul__(self, other):
        if isinstance(other, LaurentPoly):
            other = TruncSeries.from_poly(other)
        if not isinstance(other, TruncSeries):
            c = Fraction(other)
            return TruncSeries({e: c * v for e, v in self.coeffs.items()}, self.order, self.var)
        va, vb = self.valuation, other.valuation
        if va is None or vb is None:
            bounds = [o for o in (self.order, other.order) if o is not None]
            return TruncSeries({}, min(bounds) if bounds else None, self.var)
        bounds = []
        if self.order is not None:
            bounds.append(self.order + vb)
        if other.order is not None:
            bounds.append(other.order + va)
        order = min(bounds) if bounds else None
        out = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                if order is None or e <= order:
                    out[e] = out.get(e, 0) + c1 * c2
        return TruncSeries(out, order, self.var)

    __rmul__ = __mul__

    def __repr__(self):
        body = repr(LaurentPoly(self.coeffs, self.var))
        if self.order is None:
            return body
        return f"{body} + O({self.var}^>{fmt_rat(self.order)})"


def binom_expand(alpha, K: int, var="z") -> TruncSeries:
    """``(1+z)^alpha`` through ``z^K``.

    When ``alpha`` is a nonnegative integer no larger than ``K`` the result is
    flagged exact.
    """
    if K < 0:
        raise ValueError("truncation order must be nonnegative")
    alpha = Fraction(alpha)
    coeffs = {j: rat_binomial(alpha, j) for j in range(K + 1)}
    exact = alpha.denominator == 1 and 0 <= alpha <= K
    return TruncSeries(coeffs, None if exact else K, var)


def kernel(alpha, pole: int, top, var="z") -> TruncSeries:
    """``(1+z)^alpha / z^pole`` certified through exponent ``top``."""
    K = max(0, int(top) + pole)
    return binom_expand(alpha, K, var).shift(-pole)


def residue(p) -> Fraction:
    """Coefficient of ``z^{-1}``; refuses when truncation could hide it."""
    if isinstance(p, LaurentPoly):
        return p[-1]
    return p.coefficient(-1)


def residue_pairing(series: TruncSeries, field: dict):
    """``Res_z f(z) F(z)`` where ``F(z) = sum_k field[k] z^{-k-1}``.

    ``field`` maps a mode index ``k`` to a vector (anything supporting scalar
    multiplication and addition); only finitely many modes may be nonzero.
    Returns the list of ``(coefficient, vector)`` pairs whose sum is the residue.
    """
    terms = []
    for k, vec in field.items():
        c = series.coefficient(k)  # z^k pairs with z^{-k-1}
        if c:
            terms.append((c, vec))
    return terms


# -- combinatorial identities ----------------------------------------------


def identity_unit_sum(l: int) -> LaurentPoly:
    """``sum_m C(m+l,l) [(-1)^m (1+z)^{l+1} - (-1)^l (1+z)^m] / z^{l+m+1}``."""
    if l < 0:
        raise ValueError("l must be nonnegative")
    total = LaurentPoly()
    for m in range(l + 1):
        num = (-1) ** m * LaurentPoly.one_plus_z_pow(l + 1) - (-1) ** l * LaurentPoly.one_plus_z_pow(m)
        total = total + (comb(m + l, l) * num).shift(-(l + m + 1))
    return total


def check_identity_unit(l: int) -> bool:
    return identity_unit_sum(l) == LaurentPoly.constant(1)


def check_identity_L(l: int) -> LaurentPoly:
    """``sum_m (-1)^m C(m+l,l) (m z + l + m + 1) / z^{l+m+2}``; must be one monomial."""
    if l < 0:
        raise ValueError("l must be nonnegative")
    total = LaurentPoly()
    for m in range(l + 1):
        num = LaurentPoly({1: m, 0: l + m + 1})
        total = total + ((-1) ** m * comb(m + l, l) * num).shift(-(l + m + 2))
    if not total.is_monomial():
        raise AssertionError(f"sum for l={l} is not a single monomial: {total!r}")
    return total


def identity_L_constant(l: int) -> Fraction:
    """Closed form ``(-1)^l (2l+1) C(2l,l)`` of the coefficient of ``z^{-2l-2}``."""
    return Fraction((-1) ** l * (2 * l + 1) * comb(2 * l, l))


def printed_identity_L_constant(l: int) -> Fraction:
    """The constant ``(-1)^l C(2l+1,l)(2l+1)`` as it appears in print."""
    return Fraction((-1) ** l * comb(2 * l + 1, l) * (2 * l + 1))


def check_binom_vanish(l: int, k: int) -> Fraction:
    """``sum_{m<=k} C(m+l,l) C(-l-m-1,k-m)``; zero for ``1 <= k <= l``."""
    if l < 0 or not 0 <= k <= l:
        raise ValueError("need l >= 0 and 0 <= k <= l")
    return sum((comb(m + l, l) * rat_binomial(-l - m - 1, k - m) for m in range(k + 1)), Fraction(0))


class BiLaurent:
    """Finite Laurent polynomial in two variables ``z1, z2``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = _clean({(Fraction(a), Fraction(b)): Fraction(c) for (a, b), c in (coeffs or {}).items()})

    def __add__(self, other):
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return BiLaurent(out)

    def __mul__(self, other):
        if not isinstance(other, BiLaurent):
            c = Fraction(other)
            return BiLaurent({e: c * v for e, v in self.coeffs.items()})
        out = {}
        for (a1, b1), c1 in self.coeffs.items():
            for (a2, b2), c2 in other.coeffs.items():
                e = (a1 + a2, b1 + b2)
                out[e] = out.get(e, 0) + c1 * c2
        return BiLaurent(out)

    __rmul__ = __mul__

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        return isinstance(other, BiLaurent) and self.coeffs == other.coeffs

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(
            f"{fmt_rat(c)}*z1^{fmt_rat(a)}*z2^{fmt_rat(b)}" for (a, b), c in sorted(self.coeffs.items())
        )


def expand_difference_power(k: int, region: str, terms: int) -> BiLaurent:
    """Expand ``(z1 - z2)^k`` for integer ``k``, keeping ``terms`` terms.

    ``region="z1"`` expands in nonnegative powers of ``z2`` (|z1| > |z2|),
    ``region="z2"`` writes it as ``(-z2 + z1)^k`` in nonnegative powers of ``z1``.
    For ``k >= 0`` both regions give the same finite polynomial.
    """
    if region not in ("z1", "z2"):
        raise ValueError("region must be 'z1' or 'z2'")
    out = {}
    for j in range(terms):
        c = rat_binomial(k, j)
        if c == 0:
            continue
        if region == "z1":
            out[(k - j, j)] = c * (-1) ** j
        else:
            out[(j, k - j)] = c * (-1) ** (k - j)
    return BiLaurent(out)


def prop53_sum(l: int) -> BiLaurent:
    """The two-variable sum that must vanish identically for every ``l``."""
    if l < 0:
        raise ValueError("l must be nonnegative")
    total = BiLaurent()
    for m1 in range(l + 1):
        inner = {}
        for i in range(l - m1 + 1):
            ci = rat_binomial(-l - m1 - 1, i) * (-1) ** i
            for j in range(m1 + 1):
                e = (-(i + m1), i + j)
                inner[e] = inner.get(e, 0) + ci * comb(m1, j)
        inner[(-m1, 0)] = inner.get((-m1, 0), 0) - 1
        total = total + BiLaurent(inner) * ((-1) ** m1 * comb(m1 + l, l))
    return total


def check_prop53(l: int) -> bool:
    return prop53_sum(l).is_zero()


def residue_change_of_variable(g: TruncSeries) -> Fraction:
    """``Res_{z0} g(f(z0)) f'(z0)`` for ``f(z0) = -z0/(1+z0)``.

    ``g`` must have integer exponents. Each ``z^e`` becomes
    ``(-1)^{e+1} z0^e (1+z0)^{-e-2}``; only ``e <= -1`` reach ``z0^{-1}``.
    The result equals ``Res_z g`` whenever ``g`` is certified through ``z^{-1}``.
    """
    total = Fraction(0)
    for e, c in g.coeffs.items():
        if e.denominator != 1:
            raise ValueError("change of variable needs integer exponents")
        e = int(e)
        if e > -1:
            continue
        # coefficient of z0^{-1-e} in (1+z0)^{-e-2}
        total += c * (-1) ** (e + 1) * rat_binomial(-e - 2, -1 - e)
    if not g.certified(-1):
        raise UncertifiedResidue("series not certified through z^{-1}")
    return total

"""Graded components of an intertwining operator and the homomorphism checks.

The only intertwiner available from the backend is the module vertex operator
itself: ``I(w, z) = Y_{M1}(w, z)`` of type ``(M1 / V M1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .bimod import BimoduleContext
from .exact import fmt_rat
from .fock import TWISTED, UNTWISTED, FockVector, basis_of_degree, degrees_upto, format_key
from .zhu import window_basis


@dataclass(frozen=True)
class Intertwiner:
    """Type ``(M2 / M0 M1)`` with ``M0 = V`` and ``M1 = M2`` the Fock module of ``g``."""

    aut: str
    sector: str
    h0: Fraction
    h1: Fraction
    h2: Fraction
    zero: bool = False

    @property
    def shift(self) -> Fraction:
        """``h0 + h1 - h2``: ``w(n)`` is the ordinary mode ``w_{n + shift}``."""
        return self.h0 + self.h1 - self.h2

    def type_label(self):
        m = "M(1)^tw" if self.sector == TWISTED else "M(1)"
        return {"M0": "M(1)", "M1": m, "M2": m}


def adjoint_intertwiner(ctx: BimoduleContext, zero=False) -> Intertwiner:
    voa = ctx.voa
    sector = TWISTED if voa.aut == "theta" else UNTWISTED
    h = voa.conformal_weight(sector)
    return Intertwiner(voa.aut, sector, Fraction(0), h, h, zero)


class GradedHom:
    """Exact matrix of a map ``M1(s) -> M2(t)`` in the monomial bases."""

    def __init__(self, source, target, sector, rows=None):
        self.source = Fraction(source)
        self.target = Fraction(target)
        self.sector = sector
        self.source_keys = basis_of_degree(self.source, sector)
        self.target_keys = basis_of_degree(self.target, sector)
        self.rows = rows or [[Fraction(0)] * len(self.source_keys) for _ in self.target_keys]

    @classmethod
    def from_images(cls, source, target, sector, images):
        hom = cls(source, target, sector)
        index = {k: i for i, k in enumerate(hom.target_keys)}
        for j, img in enumerate(images):
            for k, c in img.terms.items():
                if k not in index:
                    raise AssertionError(
                        f"image term {format_key(k, sector)} leaves level {fmt_rat(target)}"
                    )
                hom.rows[index[k]][j] += c
        return hom

    @classmethod
    def identity(cls, level, sector):
        hom = cls(level, level, sector)
        for i in range(len(hom.source_keys)):
            hom.rows[i][i] = Fraction(1)
        return hom

    def __matmul__(self, other: "GradedHom") -> "GradedHom":
        if other.target != self.source:
            raise ValueError("levels do not compose")
        out = GradedHom(other.source, self.target, self.sector)
        for i, row in enumerate(self.rows):
            for j in range(len(other.source_keys)):
                out.rows[i][j] = sum((row[k] * other.rows[k][j] for k in range(len(row))), Fraction(0))
        return out

    def __add__(self, other):
        out = GradedHom(self.source, self.target, self.sector)
        out.rows = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)]
        return out

    def __mul__(self, c):
        out = GradedHom(self.source, self.target, self.sector)
        out.rows = [[a * c for a in r] for r in self.rows]
        return out

    __rmul__ = __mul__

    def __eq__(self, other):
        return (self.source, self.target, self.rows) == (other.source, other.target, other.rows)

    def is_zero(self):
        return all(x == 0 for r in self.rows for x in r)

    def to_json(self):
        return {
            "source": fmt_rat(self.source),
            "target": fmt_rat(self.target),
            "source_basis": [format_key(k, self.sector) for k in self.source_keys],
            "target_basis": [format_key(k, self.sector) for k in self.target_keys],
            "matrix": [[fmt_rat(x) for x in r] for r in self.rows],
        }

    def __repr__(self):
        return f"GradedHom({fmt_rat(self.source)}->{fmt_rat(self.target)}, {[[fmt_rat(x) for x in r] for r in self.rows]})"


def intertwiner_mode(ctx: BimoduleContext, I: Intertwiner, w: FockVector, n, w1: FockVector) -> FockVector:
    """``w(n) w1``; zero when the shifted index is outside the coset allowed by ``w``."""
    if I.zero:
        return FockVector.zero(I.sector)
    out = FockVector.zero(I.sector)
    k = Fraction(n) + I.shift
    for key, c in w.terms.items():
        if I.sector == TWISTED and (k - Fraction(len(key) % 2, 2)).denominator != 1:
            continue
        if I.sector == UNTWISTED and k.denominator != 1:
            continue
        out = out + c * ctx.voa.mode_act(FockVector.basis(key), k, w1)
    return out


def o_I(ctx: BimoduleContext, w: FockVector, t, s, I: Intertwiner) -> GradedHom:
    """Matrix of ``o^I_{t,s}(w) = w(deg w - 1 - t + s): M1(s) -> M2(t)`` (linear in ``w``)."""
    t, s = Fraction(t), Fraction(s)
    hom = GradedHom(s, t, I.sector)
    for key, c in w.terms.items():
        deg = sum(key) - I.h0
        idx = deg - 1 - t + s
        wb = FockVector.basis(key)
        images = [intertwiner_mode(ctx, I, wb, idx, FockVector.basis(k1, I.sector)) for k1 in hom.source_keys]
        hom = hom + c * GradedHom.from_images(s, t, I.sector, images)
    return hom


def o_level(ctx: BimoduleContext, u: FockVector, level, sector) -> GradedHom:
    """``o(u)`` restricted to the level ``level`` of the Fock module."""
    hom = GradedHom(level, level, sector)
    images = [ctx.voa.zero_mode(u, FockVector.basis(k, sector)) for k in hom.source_keys]
    return GradedHom.from_images(level, level, sector, images)


def levels_upto(n, sector):
    return degrees_upto(n, sector)


def check_pi_hom(I: Intertwiner, ctx: BimoduleContext, s, t, window=3):
    """The three identities making ``pi(I)`` an ``A_{g,n}(V)``-module map ``M1(s) -> M2(t)``."""
    n = ctx.level.n
    s, t = Fraction(s), Fraction(t)
    if s > n or t > n:
        raise ValueError("levels s, t must not exceed n")
    basis = window_basis(window)
    failures = []
    counts = {"left": 0, "right": 0, "O": 0}
    for u in basis:
        (ukey,) = u.terms
        if ctx.voa.eigen_label(ukey) != 0:
            continue
        ou_t = o_level(ctx, u, t, I.sector)
        ou_s = o_level(ctx, u, s, I.sector)
        for w0 in basis:
            ow = o_I(ctx, w0, t, s, I)
            counts["left"] += 1
            if o_I(ctx, ctx.star_left(u, w0), t, s, I) != ou_t @ ow:
                failures.append({"case": "left", "u": repr(u), "w0": repr(w0)})
            counts["right"] += 1
            if o_I(ctx, ctx.star_right(w0, u), t, s, I) != ow @ ou_s:
                failures.append({"case": "right", "u": repr(u), "w0": repr(w0)})
    for g in ctx.span_O_M():
        counts["O"] += 1
        if not o_I(ctx, g, t, s, I).is_zero():
            failures.append({"case": "O", "generator": repr(g)})
    return {"ok": not failures, "s": fmt_rat(s), "t": fmt_rat(t), "checked": counts, "failures": failures}


def pi_hom_suite(I: Intertwiner, ctx: BimoduleContext, window=3):
    levels = levels_upto(ctx.level.n, I.sector)
    reports = [check_pi_hom(I, ctx, s, t, window) for s in levels for t in levels]
    return {"ok": all(r["ok"] for r in reports), "pairs": reports}


def injectivity_probe(I: Intertwiner, ctx: BimoduleContext, window=3):
    """Whether ``pi(I)`` is nonzero on some ``(s, t)`` with ``s, t <= n``; returns a witness."""
    for s in levels_upto(ctx.level.n, I.sector):
        for t in levels_upto(ctx.level.n, I.sector):
            for w in window_basis(window):
                hom = o_I(ctx, w, t, s, I)
                if not hom.is_zero():
                    return {"nonzero": True, "s": fmt_rat(s), "t": fmt_rat(t), "witness": repr(w),
                            "matrix": hom.to_json()["matrix"]}
    return {"nonzero": False}


def grading_and_truncation(I: Intertwiner, ctx: BimoduleContext, window=3, depth=3):
    """``w(n) M1(m)`` lands in ``M2(deg w + m - n - 1)`` and vanishes below degree 0."""
    failures = []
    sector = I.sector
    for w in window_basis(window):
        (key,) = w.terms
        deg = sum(key) - I.h0
        for m in levels_upto(depth, sector):
            for k1 in basis_of_degree(m, sector):
                w1 = FockVector.basis(k1, sector)
                step = Fraction(len(key) % 2, 2) if sector == TWISTED else 0
                lo = -int(depth) - 1
                for j in range(lo, int(deg + m) + 4):
                    n = j + step - I.shift
                    target = deg + m - n - 1
                    if target > ctx.cutoff:
                        continue
                    img = intertwiner_mode(ctx, I, w, n, w1)
                    if target < 0:
                        if img:
                            failures.append(("truncation", repr(w), repr(w1), fmt_rat(n)))
                    elif any(sum(k) != target for k in img.terms):
                        failures.append(("grading", repr(w), repr(w1), fmt_rat(n)))
    return {"ok": not failures, "failures": failures}


def derivative_property(I: Intertwiner, ctx: BimoduleContext, window=2, depth=2):
    """``(L(-1)w)(n) = -(n + h0 + h1 - h2) w(n-1)`` on low levels."""
    failures = []
    sector = I.sector
    for w in window_basis(window):
        (key,) = w.terms
        lw = ctx.voa.L(-1, w)
        step = Fraction(len(key) % 2, 2) if sector == TWISTED else 0
        for m in levels_upto(depth, sector):
            for k1 in basis_of_degree(m, sector):
                w1 = FockVector.basis(k1, sector)
                for j in range(-2, int(sum(key) + m) + 3):
                    n = j + step - I.shift
                    lhs = intertwiner_mode(ctx, I, lw, n, w1)
                    rhs = -(n + I.shift) * intertwiner_mode(ctx, I, w, n - 1, w1)
                    if lhs != rhs:
                        failures.append((repr(w), repr(w1), fmt_rat(n)))
    return {"ok": not failures, "failures": failures}


def fusion_metadata(I: Intertwiner):
    """Bookkeeping only: the adjoint triple has a one-dimensional intertwiner space."""
    return {"type": I.type_label(), "fusion_rule": 1, "dim_hom_lower_bound": 1,
            "h": [fmt_rat(I.h0), fmt_rat(I.h1), fmt_rat(I.h2)]}

"""The bimodules ``A_{g,n}(M) = M / O_{g,n}(M)`` for the adjoint module ``M = V``.

``O_{g,n}(M)`` is spanned by the circle products ``u o w`` alone; unlike
``O_{g,n}(V)`` it has no separate ``(L(-1)+L(0))`` generators.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .echelon import QuotientSpace
from .fock import UNTWISTED, CutoffOverflow, FockVector, basis_of_degree, degrees_upto, format_key
from .zhu import ZhuContext, window_basis


class BimoduleContext:
    """Left/right actions of ``A_{g,n}(V)`` on the adjoint module at a weight cutoff."""

    module = "adjoint"

    def __init__(self, zhu: ZhuContext):
        self.zhu = zhu
        self.voa = zhu.voa
        self.cutoff = zhu.cutoff
        self._quotient = None

    @classmethod
    def create(cls, aut="id", n=0, cutoff=10, threads=1):
        return cls(ZhuContext(aut, n, cutoff, threads))

    @property
    def level(self):
        return self.zhu.level

    def at_level(self, n):
        return BimoduleContext(self.zhu.at_level(n))

    def lower(self):
        return BimoduleContext(self.zhu.lower())

    def __repr__(self):
        return f"BimoduleContext(aut={self.zhu.aut!r}, n={self.level}, cutoff={self.cutoff})"

    # products
    def circ_M(self, u, w, path="modes"):
        return self.zhu.circ(u, w, path)

    def star_left(self, u, w, path="modes"):
        return self.zhu.star(u, w, path)

    def star_right(self, w, u, path="modes"):
        return self.zhu.star_right(w, u, path)

    # the span and the quotient
    def span_O_M(self, N=None):
        return self.zhu.circ_generators(N)

    def build_bimodule(self, N=None) -> QuotientSpace:
        N = self.cutoff if N is None else N
        if N == self.cutoff and self._quotient is not None:
            return self._quotient
        q = QuotientSpace(N, UNTWISTED, label=f"A_{{{self.zhu.aut},{self.level}}}(M)")
        for g in self.span_O_M(N):
            q.add_generator(g)
        if N == self.cutoff:
            self._quotient = q
        return q

    def reduce(self, w):
        return self.build_bimodule().reduce(w)

    def phi_M(self, w):
        return self.voa.exp_L1_sign(w)


def _fits(vec, N):
    return (vec.max_degree() or 0) <= N


def _record(failures, label, *items):
    failures.append({"case": label, "inputs": [repr(x) for x in items]})


# -- lemma-level membership checks ---------------------------------------------


def lemma_residue_membership(ctx: BimoduleContext, kmax=2, window=None):
    """``Res Y(u,z) w (1+z)^{a+k} / z^{p+m}`` lies in ``O_{g,n}(M)`` for ``m >= k >= 0``.

    ``(a, p)`` is the circle-product kernel of ``u``; pairs are admitted when the
    residue stays within the cutoff.
    """
    Q = ctx.build_bimodule()
    N = ctx.cutoff if window is None else window
    failures, checked = [], 0
    for du in degrees_upto(N):
        for ukey in basis_of_degree(du):
            alpha, pole = ctx.zhu.circ_kernel(ukey)
            for k in range(kmax + 1):
                for m in range(k, kmax + 1):
                    spread = pole + m - 1
                    for dw in degrees_upto(N - du - spread):
                        for wkey in basis_of_degree(dw):
                            w = FockVector.basis(wkey)
                            x = ctx.zhu.res_product(ukey, alpha + k, pole + m, w)
                            checked += 1
                            if not Q.contains(x):
                                _record(failures, f"k={k},m={m}", FockVector.basis(ukey), w)
    return {"ok": not failures, "checked": checked, "failures": failures}


def commutator_membership(ctx: BimoduleContext, window=3):
    """``u*w - w*u - Res Y(u,z) w (1+z)^{wt u - 1}`` lies in ``O_{g,n}(M)`` for ``u`` in ``V^0``."""
    Q = ctx.build_bimodule()
    failures, checked = [], 0
    for u in window_basis(window):
        (ukey,) = u.terms
        if ctx.voa.eigen_label(ukey) != 0:
            continue
        for w in window_basis(window):
            x = ctx.star_left(u, w) - ctx.star_right(w, u) - ctx.zhu.res_product(ukey, sum(ukey) - 1, 0, w)
            checked += 1
            if not Q.contains(x):
                _record(failures, "commutator", u, w)
    return {"ok": not failures, "checked": checked, "failures": failures}


def lemma_L_membership(ctx: BimoduleContext, window=3):
    """``(L(-1)+L(0))u * w`` and ``w * (L(-1)+L(0))u`` lie in ``O_{g,n}(M)``."""
    Q = ctx.build_bimodule()
    failures, checked = [], 0
    for u in window_basis(window):
        lu = ctx.zhu.L_minus1_plus_L0(u)
        for w in window_basis(window):
            for label, x in (("left", ctx.star_left(lu, w)), ("right", ctx.star_right(w, lu))):
                checked += 1
                if not Q.contains(x):
                    _record(failures, label, u, w)
    return {"ok": not failures, "checked": checked, "failures": failures}


def lemma_O_stability(ctx: BimoduleContext, window=3):
    """``O(V)*M``, ``M*O(V)``, ``V*O(M)`` and ``O(M)*V`` all lie in ``O_{g,n}(M)``.

    Scans every spanning element (circle products and ``(L(-1)+L(0))u``) whose
    product with a window element stays within the cutoff.
    """
    Q = ctx.build_bimodule()
    N = ctx.cutoff
    l = ctx.level.l
    failures, checked = [], 0
    basis = window_basis(window)
    for u in basis:
        budget = N - (u.max_degree() or 0) - 2 * l
        if budget < 0:
            continue
        for gen in ctx.zhu.span_O_V(budget):
            cases = (
                ("O(V)*M", ctx.star_left(gen, u)),
                ("M*O(V)", ctx.star_right(u, gen)),
            )
            for label, x in cases:
                checked += 1
                if not Q.contains(x):
                    _record(failures, label, gen, u)
        for gen in ctx.span_O_M(budget):
            cases = (
                ("V*O(M)", ctx.star_left(u, gen)),
                ("O(M)*V", ctx.star_right(gen, u)),
            )
            for label, x in cases:
                checked += 1
                if not Q.contains(x):
                    _record(failures, label, u, gen)
    return {"ok": not failures, "checked": checked, "failures": failures}


# -- bimodule axioms --------------------------------------------------------------


def _samples(window, count, seed):
    """Seeded rational combinations of window basis vectors."""
    rng = random.Random(seed)
    basis = window_basis(window)
    out = []
    for _ in range(count):
        picks = rng.sample(basis, k=min(3, len(basis)))
        vec = FockVector.zero()
        for b in picks:
            vec = vec + b * Fraction(rng.randint(-5, 5), rng.randint(1, 4))
        out.append(vec)
    return out


def bimodule_axiom_suite(ctx: BimoduleContext, window=3, samples=0, seed=0):
    """The four bimodule identities in ``A_{g,n}(M)`` over the weight window.

    Intermediate results are replaced by canonical representatives before the
    next product, so every product stays as low in weight as the quotient allows.
    """
    QM = ctx.build_bimodule()
    QV = ctx.zhu.build_quotient()
    zhu = ctx.zhu
    red, redV = QM.reduce, QV.reduce

    def L(u, w):
        return red(ctx.star_left(redV(u), red(w)))

    def R(w, u):
        return red(ctx.star_right(red(w), redV(u)))

    def V(u, v):
        return redV(zhu.star(redV(u), redV(v)))

    basis = window_basis(window)
    extra = _samples(window, samples, seed) if samples else []
    one = ctx.voa.vacuum()
    counts = {"left_right": 0, "unit": 0, "left_assoc": 0, "right_assoc": 0}
    failures = []
    for w in basis + extra:
        counts["unit"] += 1
        if not (L(one, w) == red(w) and R(w, one) == red(w)):
            _record(failures, "unit", w)
    for u in basis + extra:
        for v in basis:
            uv = V(u, v)
            for w in basis:
                counts["left_right"] += 1
                if R(L(u, w), v) != L(u, R(w, v)):
                    _record(failures, "(u*w)*v = u*(w*v)", u, w, v)
                counts["left_assoc"] += 1
                if L(uv, w) != L(u, L(v, w)):
                    _record(failures, "(u*v)*w = u*(v*w)", u, v, w)
                counts["right_assoc"] += 1
                if R(w, uv) != R(R(w, u), v):
                    _record(failures, "w*(u*v) = (w*u)*v", w, u, v)
    return {"ok": not failures, "checked": counts, "failures": failures}


# -- level change, phi, filtration -----------------------------------------------


def epi_lower(ctx: BimoduleContext, lower: BimoduleContext | None = None, window=3):
    """``O_{g,n}(M) in O_{g,n-1/T}(M)`` and the products agree modulo the lower span.

    When ``i >= 1`` the two levels share ``l`` and the products must agree exactly.
    """
    if ctx.level.n == 0:
        raise ValueError("level 0 has no lower level")
    lower = lower or ctx.lower()
    if lower.level != ctx.level.lower():
        raise ValueError("second context must sit exactly 1/T below the first")
    Q_low = lower.build_bimodule()
    exact = ctx.level.i >= 1
    gen_failures = [repr(g) for g in ctx.span_O_M() if not Q_low.contains(g)]
    prod_failures = []
    for u in window_basis(window):
        for w in window_basis(window):
            for label, hi, lo in (
                ("left", ctx.star_left(u, w), lower.star_left(u, w)),
                ("right", ctx.star_right(w, u), lower.star_right(w, u)),
            ):
                diff = hi - lo
                ok = diff.is_zero() if exact else Q_low.contains(diff)
                if not ok:
                    _record(prod_failures, label, u, w)
    return {
        "ok": not gen_failures and not prod_failures,
        "mode": "equality" if exact else "congruence",
        "generator_failures": gen_failures,
        "product_failures": prod_failures,
    }


def phi_M_suite(ctx: BimoduleContext, window=3):
    """``phi(O(M)) in O(M)``, ``phi(u*w) = phi(w)*phi(u)`` and ``phi(w*u) = phi(u)*phi(w)``.

    ``g`` is an involution here, so the target quotient is the same one.
    """
    Q = ctx.build_bimodule()
    phi = ctx.phi_M
    gen_failures = []
    for g in ctx.span_O_M():
        try:
            if not Q.contains(phi(g)):
                gen_failures.append(repr(g))
        except CutoffOverflow:
            gen_failures.append("overflow: " + repr(g))
    failures = []
    for u in window_basis(window):
        for w in window_basis(window):
            lhs = phi(ctx.star_left(u, w))
            rhs = ctx.star_right(phi(w), phi(u))
            if not Q.contains(lhs - rhs):
                _record(failures, "phi(u*w)", u, w)
            lhs = phi(ctx.star_right(w, u))
            rhs = ctx.star_left(phi(u), phi(w))
            if not Q.contains(lhs - rhs):
                _record(failures, "phi(w*u)", u, w)
    return {"ok": not gen_failures and not failures, "generator_failures": gen_failures, "failures": failures}


class ChainContainmentError(AssertionError):
    pass


def filtration_report(ctx: BimoduleContext, window=2):
    """Dimensions along ``O_{g,n} in O_{g,n-1/T} in ... in O_{g,0}`` and additivity.

    Also checks that each subquotient is stable under the level-``n`` actions of
    window elements.
    """
    T = ctx.level.T
    steps = int(ctx.level.n * T)
    chain = [ctx]
    for _ in range(steps):
        chain.append(chain[-1].lower())
    quotients = [c.build_bimodule() for c in chain]
    for upper, lower_q, c in zip(quotients, quotients[1:], chain[1:]):
        if not lower_q.contains_space(upper):
            missing = next(r for r in upper.rows_as_vectors() if not lower_q.contains(r))
            raise ChainContainmentError(f"O at level {c.level} misses {missing!r}")
    subquotients = []
    for s in range(1, steps + 1):
        lower_q, upper = quotients[s], quotients[s - 1]
        subquotients.append({
            "s": s,
            "levels": [str(chain[s].level), str(chain[s - 1].level)],
            "dim": lower_q.rank - upper.rank,
        })
    dim_n = quotients[0].dim
    dim_0 = quotients[-1].dim
    additive = dim_n == dim_0 + sum(x["dim"] for x in subquotients)

    stability_failures = []
    for s in range(1, steps + 1):
        sub = chain[s]
        for u in window_basis(window):
            budget = ctx.cutoff - (u.max_degree() or 0) - 2 * ctx.level.l
            for gen in sub.span_O_M(budget):
                for label, x in (("left", ctx.star_left(u, gen)), ("right", ctx.star_right(gen, u))):
                    if not quotients[s].contains(x):
                        _record(stability_failures, f"s={s} {label}", u, gen)
    return {
        "ok": additive and not stability_failures,
        "A_gn": dim_n,
        "A_g0": dim_0,
        "subquotients": subquotients,
        "additive": additive,
        "stability_failures": stability_failures,
    }

"""The twisted Zhu algebras ``A_{g,n}(V) = V / O_{g,n}(V)`` for the Heisenberg VOA."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from math import comb

from .echelon import QuotientSpace, nullspace
from .exact import ModIndex, as_rat, decompose_n, fmt_rat, rat_binomial
from .fock import (
    TWISTED,
    UNTWISTED,
    CutoffOverflow,
    FockVector,
    VoaContext,
    basis_of_degree,
    degrees_upto,
    format_key,
)
from .laurent import kernel as laurent_kernel
from .laurent import residue_pairing


class VerificationError(AssertionError):
    """A claimed identity failed; the message names the offending inputs."""


def _split_basis(u: FockVector):
    for key, c in u.terms.items():
        yield key, c, FockVector.basis(key, u.sector)


class ZhuContext:
    """Level-``n`` products for the automorphism ``aut`` at weight cutoff ``cutoff``."""

    def __init__(self, aut="id", n=0, cutoff=10, threads=1):
        self.voa = VoaContext(aut, cutoff)
        self.T = self.voa.T
        self.level = n if isinstance(n, ModIndex) else decompose_n(as_rat(n), self.T)
        if self.level.T != self.T:
            raise ValueError("level and automorphism disagree on T")
        self.cutoff = cutoff
        self.threads = threads

    @property
    def aut(self):
        return self.voa.aut

    @property
    def l(self):
        return self.level.l

    def __repr__(self):
        return f"ZhuContext(aut={self.aut!r}, n={self.level}, cutoff={self.cutoff})"

    def at_level(self, n):
        return ZhuContext(self.aut, n, self.cutoff, self.threads)

    def lower(self):
        return self.at_level(self.level.lower())

    # kernels ``(1+z)^alpha / z^pole``
    def circ_kernel(self, key):
        r = self.voa.eigen_label(key)
        lv = self.level
        d1, d2 = lv.delta(r), lv.delta(self.T - r)
        alpha = sum(key) + lv.l - 1 + d1 + Fraction(r, self.T)
        pole = 2 * lv.l + d1 + d2 + 1
        return alpha, pole

    def circ_spread(self, key) -> int:
        """Largest amount by which ``u o v`` exceeds ``wt u + wt v``."""
        return self.circ_kernel(key)[1] - 1

    def res_product(self, key, alpha, pole, w: FockVector) -> FockVector:
        """``Res_z Y(u, z) w (1+z)^alpha / z^pole`` for a basis monomial ``u``."""
        u = FockVector.basis(key)
        top = sum(key) - 1 + (w.max_degree() or 0)
        out = FockVector.zero(w.sector)
        j = 0
        while j - pole <= top:
            c = rat_binomial(alpha, j)
            if c:
                out = out + c * self.voa.mode_act(u, j - pole, w)
            j += 1
        return out

    def res_product_series(self, key, alpha, pole, w: FockVector) -> FockVector:
        """Same residue, assembled from a certified truncated Laurent series."""
        u = FockVector.basis(key)
        top = sum(key) - 1 + (w.max_degree() or 0)
        series = laurent_kernel(alpha, pole, top)
        field = {}
        k = -pole
        while k <= top:
            field[k] = self.voa.mode_act(u, k, w)
            k += 1
        out = FockVector.zero(w.sector)
        for c, vec in residue_pairing(series, field):
            out = out + c * vec
        return out

    # products on V (and on the adjoint module, which uses the same formulas)
    def circ(self, u: FockVector, v: FockVector, path="modes") -> FockVector:
        out = FockVector.zero(v.sector)
        for key, c, _ in _split_basis(u):
            alpha, pole = self.circ_kernel(key)
            fn = self.res_product if path == "modes" else self.res_product_series
            out = out + c * fn(key, alpha, pole, v)
        return out

    def star_terms(self, key):
        """``[(sign*C(m+l,l), alpha, pole)]`` for the left product, empty if ``r > 0``."""
        if self.voa.eigen_label(key) != 0:
            return []
        l = self.l
        wt = sum(key)
        return [((-1) ** m * comb(m + l, l), wt + l, l + m + 1) for m in range(l + 1)]

    def star_right_terms(self, key):
        if self.voa.eigen_label(key) != 0:
            return []
        l = self.l
        wt = sum(key)
        return [((-1) ** l * comb(m + l, l), wt + m - 1, l + m + 1) for m in range(l + 1)]

    def _star_generic(self, u, w, terms_fn, path):
        out = FockVector.zero(w.sector)
        fn = self.res_product if path == "modes" else self.res_product_series
        for key, c, _ in _split_basis(u):
            for coef, alpha, pole in terms_fn(key):
                out = out + (c * coef) * fn(key, alpha, pole, w)
        return out

    def star(self, u: FockVector, v: FockVector, path="modes") -> FockVector:
        """Left product ``u * v`` (also the left action on a module element)."""
        return self._star_generic(u, v, self.star_terms, path)

    def star_right(self, w: FockVector, u: FockVector, path="modes") -> FockVector:
        """Right product ``w * u`` of a module element by a VOA element."""
        return self._star_generic(u, w, self.star_right_terms, path)

    def star_series(self, u: FockVector, v: FockVector) -> FockVector:
        """Left product assembled as one Laurent kernel, then one residue."""
        out = FockVector.zero(v.sector)
        for key, c, ub in _split_basis(u):
            terms = self.star_terms(key)
            if not terms:
                continue
            top = sum(key) - 1 + (v.max_degree() or 0)
            series = None
            for coef, alpha, pole in terms:
                part = laurent_kernel(alpha, pole, top) * coef
                series = part if series is None else series + part
            field = {k: self.voa.mode_act(ub, k, v) for k in range(-(2 * self.l + 1), int(top) + 1)}
            for cc, vec in residue_pairing(series, field):
                out = out + (c * cc) * vec
        return out

    def L_minus1_plus_L0(self, u: FockVector) -> FockVector:
        return self.voa.L(-1, u) + self.voa.L(0, u)

    # generators of O_{g,n}
    def circ_pairs(self, N=None):
        """Basis pairs ``(u, v)`` whose circle product stays within weight ``N``."""
        N = self.cutoff if N is None else N
        pairs = []
        for du in degrees_upto(N):
            for ukey in basis_of_degree(du):
                spread = self.circ_spread(ukey)
                for dv in degrees_upto(N - du - spread):
                    for vkey in basis_of_degree(dv):
                        pairs.append((ukey, vkey))
        return pairs

    def _pool_map(self, fn, items):
        if self.threads <= 1:
            return [fn(x) for x in items]
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            return list(pool.map(fn, items))

    def circ_generators(self, N=None):
        pairs = self.circ_pairs(N)
        return self._pool_map(lambda p: self.circ(FockVector.basis(p[0]), FockVector.basis(p[1])), pairs)

    def span_O_V(self, N=None):
        N = self.cutoff if N is None else N
        gens = self.circ_generators(N)
        for d in degrees_upto(N - 1):
            for key in basis_of_degree(d):
                gens.append(self.L_minus1_plus_L0(FockVector.basis(key)))
        return gens

    def build_quotient(self, N=None) -> QuotientSpace:
        N = self.cutoff if N is None else N
        q = QuotientSpace(N, UNTWISTED, label=f"A_{{{self.aut},{self.level}}}(V)")
        for g in self.span_O_V(N):
            q.add_generator(g)
        return q

    # algebra operations on cosets
    def alg_mul(self, a: FockVector, b: FockVector, Q: QuotientSpace) -> FockVector:
        return Q.reduce(self.star(Q.reduce(a), Q.reduce(b)))

    def phi(self, u: FockVector) -> FockVector:
        return self.voa.exp_L1_sign(u)


def window_basis(max_weight, sector=UNTWISTED):
    keys = []
    for d in degrees_upto(max_weight, sector):
        keys.extend(basis_of_degree(d, sector))
    return [FockVector.basis(k, sector) for k in keys]


def check_associativity(ctx: ZhuContext, Q: QuotientSpace, window=3, record_overflow=False):
    """Exhaustive ``([u][v])[w] = [u]([v][w])`` over the weight window.

    With ``record_overflow`` a triple whose products leave the cutoff is listed
    under ``overflow`` instead of aborting the scan.
    """
    basis = window_basis(window)
    failures = []
    overflow = []
    checked = 0
    for u in basis:
        for v in basis:
            for w in basis:
                try:
                    lhs = ctx.alg_mul(ctx.alg_mul(u, v, Q), w, Q)
                    rhs = ctx.alg_mul(u, ctx.alg_mul(v, w, Q), Q)
                except CutoffOverflow:
                    if not record_overflow:
                        raise
                    overflow.append((repr(u), repr(v), repr(w)))
                    continue
                checked += 1
                if lhs != rhs:
                    failures.append((repr(u), repr(v), repr(w)))
    return {"checked": checked, "failures": failures, "overflow": overflow}


def surjection_check(ctx_n: ZhuContext, ctx_lower: ZhuContext | None = None, window=3, Q_lower=None):
    """Containment ``O_{g,n} in O_{g,n-1/T}`` plus agreement of products modulo the lower span."""
    if ctx_n.level.n == 0:
        raise ValueError("level 0 has no lower level")
    if ctx_lower is None:
        ctx_lower = ctx_n.lower()
    if ctx_lower.level != ctx_n.level.lower():
        raise ValueError("second context must sit exactly 1/T below the first")
    Q_lower = Q_lower or ctx_lower.build_quotient()
    bad_gens = [repr(g) for g in ctx_n.span_O_V() if not Q_lower.contains(g)]
    bad_products = []
    basis = window_basis(window)
    for u in basis:
        for v in basis:
            diff = ctx_n.star(u, v) - ctx_lower.star(u, v)
            if not Q_lower.contains(diff):
                bad_products.append((repr(u), repr(v)))
    return {"ok": not bad_gens and not bad_products, "generator_failures": bad_gens,
            "product_failures": bad_products}


def phi_check(ctx: ZhuContext, Q: QuotientSpace, window=3):
    """``phi(O_{g,n}) in O_{g^{-1},n}`` and ``phi(u*v) = phi(v)*phi(u)`` modulo it.

    For ``g`` in {id, theta} the inverse automorphism equals ``g``.
    """
    gen_failures = [repr(g) for g in ctx.span_O_V() if not Q.contains(ctx.phi(g))]
    anti_failures = []
    basis = window_basis(window)
    for u in basis:
        for v in basis:
            lhs = ctx.phi(ctx.star(u, v))
            rhs = ctx.star(ctx.phi(v), ctx.phi(u))
            if not Q.contains(lhs - rhs):
                anti_failures.append((repr(u), repr(v)))
    return {"ok": not gen_failures and not anti_failures, "generator_failures": gen_failures,
            "anti_failures": anti_failures}


# -- modules for the algebra ----------------------------------------------------


def module_sector(ctx: ZhuContext):
    return TWISTED if ctx.aut == "theta" else UNTWISTED


def omega_filter(ctx: ZhuContext, N, sector=None):
    """Basis of ``Omega_n(W)`` through degree ``N`` by scanning annihilation conditions.

    Conditions: ``u_{wt u - 1 + k} w = 0`` for every basis ``u`` of weight at most
    ``N`` and every ``k > n`` in the coset allowed by ``u`` on ``W``.
    """
    sector = sector or module_sector(ctx)
    n = ctx.level.n
    voa = ctx.voa
    result = []
    for d in degrees_upto(N, sector):
        wkeys = basis_of_degree(d, sector)
        if d <= n:
            result.extend(FockVector.basis(k, sector) for k in wkeys)
            continue
        columns = [dict() for _ in wkeys]
        for du in degrees_upto(N):
            for ukey in basis_of_degree(du):
                u = FockVector.basis(ukey)
                step = Fraction(len(ukey) % 2, 2) if sector == TWISTED else 0
                k = Fraction(int(n)) + step
                while k <= n:
                    k += 1
                while k <= d:
                    for j, wk in enumerate(wkeys):
                        img = voa.mode_act(u, du - 1 + k, FockVector.basis(wk, sector))
                        for ok, c in img.terms.items():
                            columns[j][(ukey, k, ok)] = c
                    k += 1
        for combo in nullspace(columns):
            result.append(FockVector({wkeys[j]: c for j, c in combo.items()}, sector))
    return result


def check_zero_mode_products(ctx: ZhuContext, window=3, sector=None):
    """``o(u*v) = o(u) o(v)`` on each level ``M(m)``, ``m <= n``, of the Fock module."""
    sector = sector or module_sector(ctx)
    voa = ctx.voa
    levels = [d for d in degrees_upto(ctx.level.n, sector)]
    states = [FockVector.basis(k, sector) for d in levels for k in basis_of_degree(d, sector)]
    basis = window_basis(window)
    failures = []
    for u in basis:
        for v in basis:
            uv = ctx.star(u, v)
            for w in states:
                if voa.zero_mode(uv, w) != voa.zero_mode(u, voa.zero_mode(v, w)):
                    failures.append((repr(u), repr(v), repr(w)))
    return {"ok": not failures, "failures": failures, "levels": [fmt_rat(x) for x in levels]}


def check_O_acts_trivially(ctx: ZhuContext, window=None, sector=None):
    """Every generator of ``O_{g,n}(V)`` acts as zero on ``M(m)``, ``m <= n``."""
    sector = sector or module_sector(ctx)
    voa = ctx.voa
    states = [FockVector.basis(k, sector) for d in degrees_upto(ctx.level.n, sector)
              for k in basis_of_degree(d, sector)]
    failures = []
    for g in ctx.span_O_V(window):
        for w in states:
            if voa.zero_mode(g, w):
                failures.append((repr(g), repr(w)))
    return {"ok": not failures, "failures": failures}


def structure_constants(ctx: ZhuContext, Q: QuotientSpace, max_weight=2):
    """Products of quotient basis representatives of weight at most ``max_weight``."""
    reps = [FockVector.basis(k) for k in Q.basis_keys() if sum(k) <= max_weight]
    out = []
    for a in reps:
        for b in reps:
            try:
                prod = ctx.alg_mul(a, b, Q)
            except CutoffOverflow:
                continue
            out.append({
                "left": format_key(next(iter(a.terms))),
                "right": format_key(next(iter(b.terms))),
                "product": prod.to_json()["terms"],
            })
    return out

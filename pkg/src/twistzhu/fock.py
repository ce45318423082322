"""Rank-one Heisenberg vertex operator algebra and its two Fock modules.

Basis monomials are tuples of positive depths in weakly decreasing order:
``(2, 1, 1)`` is ``a(-2) a(-1) a(-1) 1``.  Untwisted depths are ``int``; twisted
depths are half-odd ``Fraction`` values and the empty tuple is the twisted
vacuum.  Vertex operators are computed by peeling one boson factor at a time
from the normal-ordered product.  On the twisted module the field of ``u`` is
the untwisted-shaped field of ``exp(Delta_z) u`` (Delta_z pairs annihilators
with coefficients from ``-log(((1+x)^(1/2) + (1+y)^(1/2))/2)``).
"""

from __future__ import annotations

from bisect import insort
from fractions import Fraction
import math
from math import comb
import threading

from .exact import fmt_rat, parse_rat, rat_binomial

UNTWISTED = "untwisted"
TWISTED = "twisted"
SECTORS = (UNTWISTED, TWISTED)
HALF = Fraction(1, 2)
TWISTED_CONFORMAL_WEIGHT = Fraction(1, 16)


class CutoffOverflow(ArithmeticError):
    """An exact result would need states above the configured weight cutoff."""


# -- basis keys -------------------------------------------------------------


def key_degree(key) -> Fraction | int:
    return sum(key)


def key_parity(key) -> int:
    return len(key) % 2


def _sort_key(key):
    return (sum(key), key)


def partitions(total, parts):
    """Weakly decreasing tuples of elements from ``parts`` (descending) summing to ``total``."""
    out = []

    def rec(remaining, start, prefix):
        if remaining == 0:
            out.append(tuple(prefix))
            return
        for idx in range(start, len(parts)):
            p = parts[idx]
            if p <= remaining:
                prefix.append(p)
                rec(remaining - p, idx, prefix)
                prefix.pop()

    rec(total, 0, [])
    return out


def basis_of_degree(degree, sector=UNTWISTED):
    """All monomials of the given degree, sorted by (degree, lex)."""
    degree = Fraction(degree)
    if sector == UNTWISTED:
        if degree.denominator != 1:
            return []
        d = int(degree)
        keys = partitions(d, list(range(d, 0, -1)))
    else:
        if (2 * degree).denominator != 1:
            return []
        parts = [Fraction(2 * j + 1, 2) for j in range(int(degree), -1, -1)]
        parts = [p for p in parts if p <= degree]
        keys = partitions(degree, parts)
    return sorted(keys, key=_sort_key)


def degrees_upto(N, sector=UNTWISTED):
    step = 1 if sector == UNTWISTED else HALF
    out, d = [], Fraction(0)
    while d <= N:
        out.append(d)
        d += step
    return out


def basis_upto(N, sector=UNTWISTED):
    keys = []
    for d in degrees_upto(N, sector):
        keys.extend(basis_of_degree(d, sector))
    return keys


def annihilate(key, m):
    """``a(m) key`` for ``m > 0``: returns ``(coef, new_key)`` or ``None``."""
    c = key.count(m)
    if not c:
        return None
    idx = key.index(m)
    return m * c, key[:idx] + key[idx + 1:]


def create(key, depth):
    """``a(-depth) key`` for ``depth > 0``."""
    lst = [-x for x in key]
    insort(lst, -depth)
    return tuple(-x for x in lst)


def format_key(key, sector=UNTWISTED) -> str:
    if not key:
        return "1" if sector == UNTWISTED else "w0"
    body = " ".join(f"a(-{fmt_rat(d)})" for d in key)
    return body + (" 1" if sector == UNTWISTED else " w0")


# -- vectors ----------------------------------------------------------------


class FockVector:
    """Finite linear combination of Fock monomials in one sector."""

    __slots__ = ("terms", "sector")

    def __init__(self, terms=None, sector=UNTWISTED):
        if sector not in SECTORS:
            raise ValueError(f"unknown sector {sector!r}")
        self.terms = {k: c for k, c in (terms or {}).items() if c != 0}
        self.sector = sector

    @classmethod
    def basis(cls, key, sector=UNTWISTED, coef=1):
        return cls({tuple(key): coef}, sector)

    @classmethod
    def zero(cls, sector=UNTWISTED):
        return cls({}, sector)

    def _same(self, other):
        if other.sector != self.sector:
            raise ValueError("cannot combine vectors from different sectors")

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._same(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return FockVector(out, self.sector)

    __radd__ = __add__

    def __neg__(self):
        return FockVector({k: -c for k, c in self.terms.items()}, self.sector)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        if scalar == 0:
            return FockVector({}, self.sector)
        return FockVector({k: c * scalar for k, c in self.terms.items()}, self.sector)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, FockVector):
            return NotImplemented
        return self.sector == other.sector and self.terms == other.terms

    def __hash__(self):
        return hash((self.sector, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def degrees(self):
        return sorted({key_degree(k) for k in self.terms})

    def max_degree(self):
        return max((key_degree(k) for k in self.terms), default=None)

    def component(self, degree):
        degree = Fraction(degree)
        return FockVector({k: c for k, c in self.terms.items() if key_degree(k) == degree}, self.sector)

    def is_homogeneous(self):
        return len(self.degrees()) <= 1

    def parities(self):
        return sorted({key_parity(k) for k in self.terms})

    def sorted_items(self):
        return sorted(self.terms.items(), key=lambda kv: _sort_key(kv[0]))

    def to_json(self):
        return {
            "sector": self.sector,
            "terms": [{"modes": [fmt_rat(d) for d in k], "coef": fmt_rat(c)} for k, c in self.sorted_items()],
        }

    @classmethod
    def from_json(cls, data):
        sector = data["sector"]
        terms = {}
        for t in data["terms"]:
            modes = [parse_rat(m) for m in t["modes"]]
            if sector == UNTWISTED:
                modes = [int(m) for m in modes]
            key = tuple(sorted(modes, reverse=True))
            terms[key] = terms.get(key, 0) + parse_rat(t["coef"])
        return cls(terms, sector)

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({fmt_rat(c)}) {format_key(k, self.sector)}" for k, c in self.sorted_items())


def _acc(out, vec, scale=1):
    for k, c in vec.items():
        v = out.get(k, 0) + c * scale
        if v:
            out[k] = v
        else:
            out.pop(k, None)


# -- mode computations on basis keys ----------------------------------------

_lock = threading.Lock()
_W_CACHE: dict = {}
_EXP_DELTA_CACHE: dict = {}
_C_TABLE: dict = {"D": -1, "c": {}}


def _deriv_coef(m, n):
    """Coefficient ``C(-m-1, n-1)`` of ``a(m)`` in ``(1/(n-1)!) d^{n-1} a(z)``."""
    if isinstance(m, int):
        if m <= -1:
            return comb(-m - 1, n - 1)
        return (-1) ** (n - 1) * comb(m + n - 1, n - 1)
    return rat_binomial(-m - 1, n - 1)


def _field_mode(ukey, k, wkey, sector):
    """Mode ``k`` of the normal-ordered product field of ``ukey`` applied to ``wkey``.

    On the untwisted module this is the vertex operator itself; on the twisted
    module it is the uncorrected field ``W``.  Returns a dict (do not mutate).
    """
    memo = (ukey, k, wkey, sector)
    hit = _W_CACHE.get(memo)
    if hit is not None:
        return hit
    wt_u = sum(ukey)
    deg_w = sum(wkey)
    target = wt_u - k - 1 + deg_w
    out = {}
    if target < 0:
        pass
    elif not ukey:
        if k == -1:
            out = {wkey: 1}
    else:
        n = ukey[0]
        rest = ukey[1:]
        if sector == UNTWISTED:
            lo = k + 1 - wt_u - deg_w
            creators = range(int(lo), 0)
            annihilators = range(1, int(deg_w) + 1)
        else:
            lo = k + 1 - wt_u - deg_w
            m = Fraction(math.ceil(lo - HALF)) + HALF  # smallest half-odd >= lo
            creators = []
            while m < 0:
                creators.append(m)
                m += 1
            annihilators = []
            m = HALF
            while m <= deg_w:
                annihilators.append(m)
                m += 1
        for m in creators:
            coef = _deriv_coef(m, n)
            if not coef:
                continue
            inner = _field_mode(rest, k - m - n, wkey, sector)
            for key2, c2 in inner.items():
                nk = create(key2, -m)
                v = out.get(nk, 0) + coef * c2
                if v:
                    out[nk] = v
                else:
                    out.pop(nk, None)
        for m in annihilators:
            hit2 = annihilate(wkey, m)
            if hit2 is None:
                continue
            coef = _deriv_coef(m, n)
            if not coef:
                continue
            a, wkey2 = hit2
            inner = _field_mode(rest, k - m - n, wkey2, sector)
            _acc(out, inner, coef * a)
    _W_CACHE[memo] = out
    return out


def _c_table(D):
    """Coefficients c_{mn} (1 <= m, n <= D) of ``-log(((1+x)^(1/2) + (1+y)^(1/2))/2)``."""
    with _lock:
        if _C_TABLE["D"] >= D:
            return _C_TABLE["c"]
        # t = ((1+x)^(1/2) + (1+y)^(1/2))/2 - 1, no constant term
        t = {}
        for j in range(1, D + 1):
            c = rat_binomial(HALF, j) / 2
            t[(j, 0)] = c
            t[(0, j)] = c

        def mul(a, b):
            out = {}
            for (i1, j1), c1 in a.items():
                for (i2, j2), c2 in b.items():
                    i, j = i1 + i2, j1 + j2
                    if i <= D and j <= D:
                        out[(i, j)] = out.get((i, j), 0) + c1 * c2
            return out

        result = {}
        power = dict(t)
        for k in range(1, 2 * D + 1):
            sign = Fraction((-1) ** k, k)
            for e, c in power.items():
                result[e] = result.get(e, 0) + sign * c
            power = mul(power, t)
            if not power:
                break
        c = {e: v for e, v in result.items() if e[0] >= 1 and e[1] >= 1 and v != 0}
        _C_TABLE["D"] = D
        _C_TABLE["c"] = c
        return c


def zero_mode_pairing(m, n):
    """The coefficient ``c_{mn}`` of ``a(m) a(n) z^{-m-n}`` in Delta_z."""
    return _c_table(max(m, n)).get((m, n), Fraction(0))


def _apply_delta(key):
    """``Delta`` on an untwisted key: dict ``d -> {key: coef}`` for the ``z^{-d}`` parts."""
    deg = sum(key)
    if deg < 2:
        return {}
    table = _c_table(deg)
    out = {}
    distinct = sorted(set(key))
    for m in distinct:
        h1 = annihilate(key, m)
        if h1 is None:
            continue
        c1, k1 = h1
        for n in sorted(set(k1)):
            h2 = annihilate(k1, n)
            if h2 is None:
                continue
            c2, k2 = h2
            cmn = table.get((n, m), 0)  # a(n) a(m) key; the table is symmetric
            if not cmn:
                continue
            d = m + n
            bucket = out.setdefault(d, {})
            v = bucket.get(k2, 0) + cmn * c1 * c2
            if v:
                bucket[k2] = v
            else:
                bucket.pop(k2, None)
    return out


def exp_delta(key):
    """``exp(Delta_z) key`` as a dict ``d -> {key: coef}`` (coefficient of ``z^{-d}``)."""
    hit = _EXP_DELTA_CACHE.get(key)
    if hit is not None:
        return hit
    total = {0: {key: Fraction(1)}}
    current = {0: {key: Fraction(1)}}
    j = 0
    while current:
        j += 1
        nxt = {}
        for d, vec in current.items():
            for k2, c2 in vec.items():
                for d2, vec2 in _apply_delta(k2).items():
                    bucket = nxt.setdefault(d + d2, {})
                    _acc(bucket, vec2, c2 / j)
        current = {d: v for d, v in nxt.items() if v}
        for d, vec in current.items():
            _acc(total.setdefault(d, {}), vec)
    total = {d: v for d, v in total.items() if v}
    _EXP_DELTA_CACHE[key] = total
    return total


def mode_on_basis(ukey, k, wkey, sector):
    """``u_k w`` for basis monomials; ``u`` always lives in the untwisted VOA."""
    if sector == UNTWISTED:
        return _field_mode(ukey, k, wkey, sector)
    out = {}
    for d, vec in exp_delta(ukey).items():
        for k2, c2 in vec.items():
            _acc(out, _field_mode(k2, k - d, wkey, sector), c2)
    return out


def clear_caches():
    _W_CACHE.clear()
    _EXP_DELTA_CACHE.clear()


# -- the VOA context ----------------------------------------------------------


def _coset_ok(k, parity, sector):
    k = Fraction(k)
    if sector == UNTWISTED:
        return k.denominator == 1
    return (k - Fraction(parity, 2)).denominator == 1


def _norm_mode(k, sector):
    k = Fraction(k)
    if sector == UNTWISTED:
        if k.denominator != 1:
            raise ValueError(f"untwisted modes are integral, got {fmt_rat(k)}")
        return int(k)
    return k


class VoaContext:
    """The Heisenberg VOA ``M(1)`` (c = 1) with an automorphism ``g`` in {id, theta}.

    ``cutoff`` bounds the degree of every state an operation may produce;
    exceeding it raises :class:`CutoffOverflow`.
    """

    def __init__(self, aut="id", cutoff=12):
        if aut not in ("id", "theta"):
            raise ValueError(f"automorphism must be 'id' or 'theta', got {aut!r}")
        self.aut = aut
        self.T = 1 if aut == "id" else 2
        self.cutoff = cutoff
        self.central_charge = Fraction(1)

    def __repr__(self):
        return f"VoaContext(aut={self.aut!r}, cutoff={self.cutoff})"

    # states
    def vacuum(self):
        return FockVector.basis((), UNTWISTED)

    def twisted_vacuum(self):
        return FockVector.basis((), TWISTED)

    def omega(self):
        return FockVector({(1, 1): HALF}, UNTWISTED)

    def alpha(self, *depths, sector=UNTWISTED):
        """Monomial ``a(-d1) ... a(-dk)`` on the vacuum of ``sector``."""
        if sector == UNTWISTED:
            depths = [int(d) for d in depths]
        else:
            depths = [Fraction(d) for d in depths]
        return FockVector.basis(tuple(sorted(depths, reverse=True)), sector)

    def conformal_weight(self, sector):
        return Fraction(0) if sector == UNTWISTED else TWISTED_CONFORMAL_WEIGHT

    # automorphism
    def theta_act(self, v: FockVector) -> FockVector:
        if v.sector != UNTWISTED:
            raise ValueError("theta acts on the VOA, not on the twisted module")
        return FockVector({k: (-1) ** len(k) * c for k, c in v.terms.items()}, UNTWISTED)

    def g_act(self, v: FockVector) -> FockVector:
        return v if self.aut == "id" else self.theta_act(v)

    def eigen_component(self, v: FockVector, r: int) -> FockVector:
        """Projection onto ``V^r`` (``g`` acts by ``exp(-2 pi i r / T)``)."""
        if not 0 <= r <= self.T - 1:
            raise ValueError(f"r={r} outside [0, {self.T - 1}]")
        if self.T == 1:
            return v
        return FockVector({k: c for k, c in v.terms.items() if len(k) % 2 == r}, v.sector)

    def eigen_label(self, key) -> int:
        return 0 if self.T == 1 else len(key) % 2

    # modes
    def mode_act(self, u: FockVector, k, w: FockVector) -> FockVector:
        """``u_k w`` exactly; ``w`` may live in either sector."""
        if u.sector != UNTWISTED:
            raise ValueError("the first argument must be a VOA state")
        sector = w.sector
        k = Fraction(k)
        out = {}
        for ukey, uc in u.terms.items():
            if not _coset_ok(k, len(ukey) % 2, sector):
                raise ValueError(
                    f"mode {fmt_rat(k)} is not in the coset forced by {format_key(ukey)} on the {sector} module"
                )
            kk = _norm_mode(k, sector)
            wt_u = sum(ukey)
            for wkey, wc in w.terms.items():
                target = wt_u - kk - 1 + sum(wkey)
                if target < 0:
                    continue
                if target > self.cutoff:
                    raise CutoffOverflow(
                        f"{format_key(ukey)} mode {fmt_rat(k)} on {format_key(wkey, sector)} reaches degree "
                        f"{fmt_rat(target)} > cutoff {self.cutoff}"
                    )
                _acc(out, mode_on_basis(ukey, kk, wkey, sector), uc * wc)
        return FockVector(out, sector)

    def L(self, n: int, w: FockVector) -> FockVector:
        return self.mode_act(self.omega(), n + 1, w)

    def heisenberg(self, m, w: FockVector) -> FockVector:
        """The free-field mode ``a(m)``, read off as ``(a(-1)1)_m``."""
        return self.mode_act(self.alpha(1), m, w)

    def zero_mode(self, u: FockVector, w: FockVector) -> FockVector:
        """``o(u) = u_{wt u - 1}`` extended linearly over homogeneous parts; modes outside the coset vanish."""
        out = FockVector.zero(w.sector)
        for ukey, c in u.terms.items():
            if not _coset_ok(0, len(ukey) % 2, w.sector):
                continue
            out = out + self.mode_act(FockVector.basis(ukey, coef=c), sum(ukey) - 1, w)
        return out

    def exp_L1_sign(self, u: FockVector) -> FockVector:
        """``exp(L(1)) (-1)^{L(0)} u``; terminates because ``L(1)`` lowers weight."""
        signed = FockVector({k: (-1) ** sum(k) * c for k, c in u.terms.items()}, u.sector)
        total = signed
        term = signed
        j = 0
        while term:
            j += 1
            term = self.L(1, term) * Fraction(1, j)
            total = total + term
        return total

    # bases
    def basis_upto(self, N=None, sector=UNTWISTED):
        return basis_upto(self.cutoff if N is None else N, sector)

    def dimension_upto(self, N=None, sector=UNTWISTED):
        return len(self.basis_upto(N, sector))


def zero_point_energy_oracle() -> Fraction:
    """Twisted minus untwisted zeta-regularized zero-point energy ``(1/2) sum m``.

    Uses the Hurwitz value ``zeta(-1, a) = -B_2(a)/2`` with ``B_2(a) = a^2 - a + 1/6``.
    """
    def zeta_m1(a):
        a = Fraction(a)
        return -(a * a - a + Fraction(1, 6)) / 2

    return (zeta_m1(HALF) - zeta_m1(1)) / 2


# -- Jacobi identity checks ---------------------------------------------------


def _coset_range(parity_twist, bound):
    """Values in ``parity_twist + Z`` with absolute value at most ``bound``."""
    start = Fraction(parity_twist) - int(bound) - 1
    out = []
    x = start
    while x <= bound:
        if abs(x) <= bound:
            out.append(x)
        x += 1
    return out


def commutator_check(ctx: VoaContext, ukey, vkey, w: FockVector, m, n):
    """``[u_m, v_n] w`` against ``sum_j C(m, j) (u_j v)_{m+n-j} w``."""
    u = FockVector.basis(ukey)
    v = FockVector.basis(vkey)
    lhs = ctx.mode_act(u, m, ctx.mode_act(v, n, w)) - ctx.mode_act(v, n, ctx.mode_act(u, m, w))
    rhs = FockVector.zero(w.sector)
    for j in range(sum(ukey) + sum(vkey)):
        c = rat_binomial(m, j)
        if not c:
            continue
        ujv = ctx.mode_act(u, j, v)
        if ujv:
            rhs = rhs + c * ctx.mode_act(ujv, m + n - j, w)
    return lhs == rhs


def iterate_check(ctx: VoaContext, ukey, vkey, w: FockVector, p: int, q):
    """The residue form of the twisted Jacobi identity for ``(u_p v)`` modes.

    ``sum_i C(s, i) (u_{p+i} v)_{q+s-i} w =
      sum_j (-1)^j C(p, j) [u_{p+s-j} v_{q+j} w - (-1)^p v_{p+q-j} u_{s+j} w]``
    with ``s = r/T`` the twist of ``u`` on the module holding ``w``.
    """
    u = FockVector.basis(ukey)
    v = FockVector.basis(vkey)
    s = Fraction(len(ukey) % 2, 2) if w.sector == TWISTED else Fraction(0)
    wt_u, wt_v = sum(ukey), sum(vkey)
    deg_w = max((sum(k) for k in w.terms), default=0)
    lhs = FockVector.zero(w.sector)
    i = 0
    while p + i <= wt_u + wt_v - 1:
        c = rat_binomial(s, i)
        if c:
            upv = ctx.mode_act(u, p + i, v)
            if upv:
                lhs = lhs + c * ctx.mode_act(upv, q + s - i, w)
        i += 1
    rhs = FockVector.zero(w.sector)
    j = 0
    while True:
        active = False
        c = rat_binomial(p, j) * (-1) ** j
        if wt_v - (q + j) - 1 + deg_w >= 0:
            active = True
            if c:
                rhs = rhs + c * ctx.mode_act(u, p + s - j, ctx.mode_act(v, q + j, w))
        if wt_u - (s + j) - 1 + deg_w >= 0:
            active = True
            if c:
                rhs = rhs - c * (-1) ** p * ctx.mode_act(v, p + q - j, ctx.mode_act(u, s + j, w))
        if not active:
            break
        j += 1
    return lhs == rhs


def verify_twisted_jacobi(ctx: VoaContext, u: FockVector, v: FockVector, w: FockVector, order: int):
    """Check commutator and iterate forms for all indices of size at most ``order``.

    ``u`` and ``v`` must be single basis monomials (hence homogeneous in weight
    and theta-parity). Returns ``(ok, failures)``.
    """
    if len(u.terms) != 1 or len(v.terms) != 1:
        raise ValueError("u and v must be basis monomials")
    (ukey,) = u.terms
    (vkey,) = v.terms
    tw = w.sector == TWISTED
    su = Fraction(len(ukey) % 2, 2) if tw else 0
    sv = Fraction(len(vkey) % 2, 2) if tw else 0
    failures = []
    for m in _coset_range(su, order):
        for n in _coset_range(sv, order):
            if not commutator_check(ctx, ukey, vkey, w, m, n):
                failures.append(("commutator", fmt_rat(m), fmt_rat(n)))
    for p in range(-order, order + 1):
        for q in _coset_range(sv, order):
            if not iterate_check(ctx, ukey, vkey, w, p, q):
                failures.append(("iterate", p, fmt_rat(q)))
    return not failures, failures

"""Suite registry and deterministic report assembly."""

from __future__ import annotations

import json
import random
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from . import __version__
from .bimod import (BimoduleContext, bimodule_axiom_suite, commutator_membership, epi_lower,
                    filtration_report, lemma_L_membership, lemma_O_stability,
                    lemma_residue_membership, phi_M_suite)
from .exact import fmt_rat, parse_level
from .fock import (TWISTED, UNTWISTED, FockVector, VoaContext, basis_upto, format_key,
                   verify_twisted_jacobi, zero_point_energy_oracle)
from .intertwine import (adjoint_intertwiner, derivative_property, fusion_metadata,
                         grading_and_truncation, injectivity_probe, o_I, pi_hom_suite)
from .laurent import (check_binom_vanish, check_identity_L, check_identity_unit, check_prop53,
                      identity_L_constant, printed_identity_L_constant)
from .zhu import (ZhuContext, check_associativity, check_O_acts_trivially,
                  check_zero_mode_products, module_sector, omega_filter, phi_check,
                  structure_constants, surjection_check, window_basis)

SCHEMA = "twistzhu-report/1"
DIM_LABEL = "dim≤N (upper bound)"
LEMMA_CONSTANT_NOTE = (
    "identity_L: the bare sum equals (-1)^l (2l+1) C(2l,l) / z^(2l+2); the printed constant "
    "(-1)^l C(2l+1,l) (2l+1) differs for l >= 1. Membership conclusions only need a nonzero constant."
)


@dataclass
class RunConfig:
    aut: str = "id"
    n: str = "0"
    cutoff: int = 10
    suites: list = field(default_factory=list)
    out: str | None = None
    seed: int = 0
    threads: int = 1
    window: int = 3
    lmax: int = 8
    samples: int = 100
    jacobi_order: int = 6
    voa: str = "heisenberg"

    def validate(self):
        """Raise ``ValueError`` for anything a module precondition would reject."""
        if self.voa != "heisenberg":
            raise ValueError(f"unsupported voa {self.voa!r}")
        if self.aut not in ("id", "theta"):
            raise ValueError(f"unknown automorphism {self.aut!r}")
        if not isinstance(self.cutoff, int) or self.cutoff < 0:
            raise ValueError("cutoff must be a nonnegative integer")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")
        for name in ("window", "lmax", "samples", "jacobi_order"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        unknown = [s for s in self.suites if s not in SUITES]
        if unknown:
            raise ValueError(f"unknown suite(s): {', '.join(unknown)}")
        self.level  # parse check

    @property
    def T(self):
        return 2 if self.aut == "theta" else 1

    @property
    def level(self):
        return parse_level(str(self.n), self.T)

    def echo(self):
        d = asdict(self)
        d.pop("out")
        d.pop("threads")
        d["n"] = fmt_rat(self.level.n)
        d["level"] = self.level.label()
        return d


class Report:
    def __init__(self, command: str, config: RunConfig | None = None):
        self.data = {
            "schema": SCHEMA,
            "tool": {"name": "twistzhu", "version": __version__},
            "command": command,
            "config": config.echo() if config else {},
            "suites": {},
            "notes": [],
        }
        self.timing = {"threads": config.threads} if config else {}

    def add_suite(self, name, result, seconds=None):
        self.data["suites"][name] = {"verdict": "pass" if result.get("ok") else "fail", "detail": result}
        if seconds is not None:
            self.timing[name] = round(seconds, 3)

    def note(self, text):
        if text not in self.data["notes"]:
            self.data["notes"].append(text)

    @property
    def ok(self):
        return all(s["verdict"] == "pass" for s in self.data["suites"].values())

    def to_dict(self, timing=True):
        out = dict(self.data)
        out["verdict"] = "pass" if self.ok else "fail"
        if timing:
            out["timing"] = dict(self.timing)
        return out

    def dumps(self, timing=True):
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def strip_timing(doc: dict) -> dict:
    return {k: v for k, v in doc.items() if k != "timing"}


def render_table(doc: dict) -> str:
    """Plain-text summary of a report document."""
    lines = [f"{doc.get('schema')}  command={doc.get('command')}  verdict={doc.get('verdict')}"]
    cfg = doc.get("config") or {}
    if cfg:
        lines.append("config: " + ", ".join(f"{k}={cfg[k]}" for k in sorted(cfg) if k != "suites"))
    if "dim_upper" in doc:
        lines.append(f"{doc.get('dim_label', 'dim')}: A_gn(V) = {doc['dim_upper']}  generators = {doc.get('generators')}")
    if "independent_powers" in doc:
        lines.append("independent a(-1)^k 1 images: k = " + ", ".join(map(str, doc["independent_powers"])))
    if "odd_generator_reduces_to_zero" in doc:
        lines.append(f"a(-1)1 reduces to 0: {doc['odd_generator_reduces_to_zero']}")
    dims = doc.get("dims")
    if dims:
        lines.append(f"A_gn(M) = {dims.get('A_gn')}  A_g0(M) = {dims.get('A_g0')}")
        for sq in dims.get("subquotients", []):
            lines.append(f"  s={sq['s']}  {sq['levels'][0]} / {sq['levels'][1]}  dim = {sq['dim']}")
    suites = doc.get("suites", {})
    if suites:
        width = max(len(k) for k in suites)
        for name in sorted(suites):
            lines.append(f"{name.ljust(width)}  {suites[name]['verdict']}")
    for note in doc.get("notes", []):
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"


# -- suites ----------------------------------------------------------------------


def suite_identities(cfg: RunConfig, report: Report):
    lmax = cfg.lmax
    failures = []
    constants = []
    for l in range(lmax + 1):
        if not check_identity_unit(l):
            failures.append({"identity": "unit", "l": l})
        p = check_identity_L(l)
        expected = identity_L_constant(l)
        if p[-(2 * l + 2)] != expected or len(p.coeffs) != 1:
            failures.append({"identity": "L", "l": l, "got": repr(p)})
        constants.append({"l": l, "constant": fmt_rat(expected),
                          "printed": fmt_rat(printed_identity_L_constant(l))})
        for k in range(1, l + 1):
            if check_binom_vanish(l, k) != 0:
                failures.append({"identity": "binom_vanish", "l": l, "k": k})
        if l <= min(lmax, 5) and not check_prop53(l):
            failures.append({"identity": "prop53", "l": l})
    report.note(LEMMA_CONSTANT_NOTE)
    return {"ok": not failures, "lmax": lmax, "identity_L_constants": constants, "failures": failures}


def heisenberg_commutators(voa: VoaContext, bound=Fraction(7, 2), depth=3):
    """``[a(m), a(n)] = m delta_{m+n,0}`` on both sectors for ``|m|, |n| <= bound``."""
    failures = []
    checked = 0
    for sector, step in ((UNTWISTED, Fraction(0)), (TWISTED, Fraction(1, 2))):
        idx = [Fraction(j) + step for j in range(-4, 5) if abs(Fraction(j) + step) <= bound]
        for w in basis_upto(depth, sector):
            wv = FockVector.basis(w, sector)
            for m in idx:
                for n in idx:
                    lhs = voa.heisenberg(m, voa.heisenberg(n, wv)) - voa.heisenberg(n, voa.heisenberg(m, wv))
                    rhs = wv * (m if m + n == 0 else 0)
                    checked += 1
                    if lhs != rhs:
                        failures.append({"sector": sector, "m": fmt_rat(m), "n": fmt_rat(n), "w": repr(wv)})
    return {"ok": not failures, "checked": checked, "failures": failures}


def jacobi_inputs(voa: VoaContext, max_weight=2):
    """VOA basis of weight ``<= max_weight`` and module bases whose ``L(0)`` value is ``<= max_weight``."""
    vs = window_basis(max_weight)
    ws = []
    for sector in (UNTWISTED, TWISTED):
        h = voa.conformal_weight(sector)
        ws += [FockVector.basis(k, sector) for k in basis_upto(max_weight, sector) if sum(k) + h <= max_weight]
    return vs, ws


def suite_backend(cfg: RunConfig, report: Report):
    voa = VoaContext("theta", max(cfg.cutoff, 16))
    w0 = voa.twisted_vacuum()
    energy = voa.L(0, w0)
    oracle = zero_point_energy_oracle()
    vacuum_ok = energy == w0 * Fraction(1, 16) and oracle == Fraction(1, 16)
    comm = heisenberg_commutators(voa)
    vs, ws = jacobi_inputs(voa)
    jac_fail = []
    checked = 0
    for u in vs:
        for v in vs:
            for w in ws:
                if w.sector == UNTWISTED:
                    ctx = VoaContext("id", voa.cutoff)
                else:
                    ctx = voa
                ok, fails = verify_twisted_jacobi(ctx, u, v, w, cfg.jacobi_order)
                checked += 1
                if not ok:
                    jac_fail.append({"u": repr(u), "v": repr(v), "w": repr(w), "first": str(fails[0])})
    return {
        "ok": vacuum_ok and comm["ok"] and not jac_fail,
        "twisted_vacuum_L0": fmt_rat(energy.terms.get((), 0)),
        "zero_point_oracle": fmt_rat(oracle),
        "commutators": comm,
        "jacobi": {"order": cfg.jacobi_order, "checked": checked, "failures": jac_fail},
    }


def random_inputs(rng: random.Random, max_weight=3, count=100):
    basis = window_basis(max_weight)
    out = []
    for _ in range(count):
        u = basis[rng.randrange(len(basis))] * Fraction(rng.randint(1, 5), rng.randint(1, 3))
        v = FockVector.zero()
        for b in rng.sample(basis, k=2):
            v = v + b * Fraction(rng.randint(-4, 4), rng.randint(1, 3))
        out.append((u, v))
    return out


def two_path_compare(zctx: ZhuContext, seed=0, count=100, max_weight=3):
    """Mode sums against residues of certified Laurent kernels on seeded inputs."""
    rng = random.Random(seed)
    bctx = BimoduleContext(zctx)
    products = {
        "circ_V": lambda u, v, p: zctx.circ(u, v, p),
        "star_V": lambda u, v, p: zctx.star(u, v, p),
        "circ_M": lambda u, v, p: bctx.circ_M(u, v, p),
        "star_left": lambda u, v, p: bctx.star_left(u, v, p),
        "star_right": lambda u, v, p: bctx.star_right(v, u, p),
    }
    counts = {}
    failures = []
    pairs = random_inputs(rng, max_weight, count)
    for name, fn in products.items():
        counts[name] = 0
        for u, v in pairs:
            counts[name] += 1
            if fn(u, v, "modes") != fn(u, v, "series"):
                failures.append({"product": name, "u": repr(u), "v": repr(v)})
    star_series_ok = all(zctx.star(u, v) == zctx.star_series(u, v) for u, v in pairs[:20])
    return {"ok": not failures and star_series_ok, "checked": counts, "failures": failures}


def _zhu(cfg):
    return ZhuContext(cfg.aut, cfg.level, cfg.cutoff, cfg.threads)


def _bimod(cfg):
    return BimoduleContext(_zhu(cfg))


def suite_two_path(cfg, report):
    return two_path_compare(_zhu(cfg), cfg.seed, cfg.samples)


def suite_associativity(cfg, report):
    ctx = _zhu(cfg)
    res = check_associativity(ctx, ctx.build_quotient(), cfg.window)
    return {"ok": not res["failures"], **res}


def suite_surjection(cfg, report):
    ctx = _zhu(cfg)
    if ctx.level.n == 0:
        return {"ok": True, "skipped": "level 0 has no lower level"}
    return surjection_check(ctx, window=cfg.window)


def suite_phi(cfg, report):
    ctx = _zhu(cfg)
    res = phi_check(ctx, ctx.build_quotient(), cfg.window)
    involution = all(ctx.phi(ctx.phi(u)) == u for u in window_basis(min(cfg.cutoff, 6)))
    return {**res, "ok": res["ok"] and involution, "involution": involution}


def suite_zero_mode(cfg, report):
    ctx = _zhu(cfg)
    prod = check_zero_mode_products(ctx, cfg.window)
    triv = check_O_acts_trivially(ctx)
    return {"ok": prod["ok"] and triv["ok"], "products": prod, "O_trivial": triv}


def suite_omega(cfg, report):
    ctx = _zhu(cfg)
    N = min(cfg.cutoff, 5)
    found = omega_filter(ctx, N)
    sector = module_sector(ctx)
    return {"ok": True, "N": N, "sector": sector,
            "basis": [format_key(next(iter(v.terms)), sector) for v in found]}


def suite_bimodule_axioms(cfg, report):
    return bimodule_axiom_suite(_bimod(cfg), cfg.window, samples=50, seed=cfg.seed)


def suite_lemmas(cfg, report):
    ctx = _bimod(cfg)
    parts = {
        "residue": lemma_residue_membership(ctx),
        "commutator": commutator_membership(ctx, cfg.window),
        "L_minus1_plus_L0": lemma_L_membership(ctx, cfg.window),
        "O_stability": lemma_O_stability(ctx, cfg.window),
    }
    report.note(LEMMA_CONSTANT_NOTE)
    return {"ok": all(p["ok"] for p in parts.values()), **parts}


def suite_epimorphism(cfg, report):
    ctx = _bimod(cfg)
    if ctx.level.n == 0:
        return {"ok": True, "skipped": "level 0 has no lower level"}
    return epi_lower(ctx, window=cfg.window)


def suite_phi_M(cfg, report):
    return phi_M_suite(_bimod(cfg), cfg.window)


def suite_filtration(cfg, report):
    return filtration_report(_bimod(cfg))


def suite_pi_hom(cfg, report):
    ctx = _bimod(cfg)
    I = adjoint_intertwiner(ctx)
    res = pi_hom_suite(I, ctx, cfg.window)
    invariants = {"grading": grading_and_truncation(I, ctx), "derivative": derivative_property(I, ctx)}
    omega = []
    if I.sector == TWISTED:
        from .intertwine import GradedHom, levels_upto
        for t in levels_upto(max(ctx.level.n, 1), TWISTED):
            got = o_I(ctx, ctx.voa.omega(), t, t, I)
            want = GradedHom.identity(t, TWISTED) * (t + Fraction(1, 16))
            omega.append({"t": fmt_rat(t), "ok": got == want})
    report.note("pi(I) is checked as a module map plus a nonvanishing probe; the fusion rule is metadata only.")
    ok = res["ok"] and all(v["ok"] for v in invariants.values()) and all(o["ok"] for o in omega)
    return {"ok": ok, **res, "invariants": invariants, "omega_levels": omega,
            "metadata": fusion_metadata(I)}


def suite_injectivity(cfg, report):
    ctx = _bimod(cfg)
    probe = injectivity_probe(adjoint_intertwiner(ctx), ctx, cfg.window)
    zero = injectivity_probe(adjoint_intertwiner(ctx, zero=True), ctx, cfg.window)
    return {"ok": probe["nonzero"] and not zero["nonzero"], "adjoint": probe, "zero_intertwiner": zero}


SUITES = {
    "identities": suite_identities,
    "backend": suite_backend,
    "two-path": suite_two_path,
    "associativity": suite_associativity,
    "surjection": suite_surjection,
    "phi": suite_phi,
    "zero-mode": suite_zero_mode,
    "omega": suite_omega,
    "bimodule-axioms": suite_bimodule_axioms,
    "lemmas": suite_lemmas,
    "epimorphism": suite_epimorphism,
    "phi-M": suite_phi_M,
    "filtration": suite_filtration,
    "pi-hom": suite_pi_hom,
    "injectivity": suite_injectivity,
}


def run_suites(cfg: RunConfig, command="verify") -> Report:
    report = Report(command, cfg)
    for name in cfg.suites:
        start = time.perf_counter()
        result = SUITES[name](cfg, report)
        report.add_suite(name, result, time.perf_counter() - start)
    return report


def identities_report(lmax: int) -> Report:
    cfg = RunConfig(lmax=lmax, suites=["identities"])
    report = Report("identities")
    report.data["config"] = {"lmax": lmax}
    start = time.perf_counter()
    report.add_suite("identities", suite_identities(cfg, report), time.perf_counter() - start)
    return report


def build_report(cfg: RunConfig, verify=False) -> Report:
    """Quotient dimensions, structure constants and level notes for one configuration."""
    report = Report("build", cfg)
    start = time.perf_counter()
    zctx = _zhu(cfg)
    Q = zctx.build_quotient()
    bctx = BimoduleContext(zctx)
    QM = bctx.build_bimodule()
    lv = zctx.level
    report.data.update({
        "g": cfg.aut,
        "n": f"{lv.l}+{lv.i}/{lv.T}",
        "cutoff": cfg.cutoff,
        "dim_upper": Q.dim,
        "dim_label": DIM_LABEL,
        "generators": len(zctx.span_O_V()),
        "basis": [format_key(k) for k in Q.basis_keys()],
        "structure_constants": structure_constants(zctx, Q),
        "module": "adjoint",
        "dims": {"A_gn": QM.dim, "A_g0": None, "subquotients": []},
    })
    if lv.n > 0:
        filt = filtration_report(bctx, window=0)
        report.data["dims"].update({"A_g0": filt["A_g0"], "subquotients": filt["subquotients"]})
    else:
        report.data["dims"]["A_g0"] = QM.dim
    if cfg.aut == "theta":
        odd = zctx.voa.alpha(1)
        collapsed = Q.contains(odd)
        report.data["odd_generator_reduces_to_zero"] = collapsed
        report.note("V^1 collapse: a(-1)1 lies in the O-span at this cutoff" if collapsed
                    else "a(-1)1 survives in the quotient at this cutoff")
    if cfg.aut == "id" and lv.n == 0:
        from .echelon import EchelonSpace
        space = EchelonSpace(len(Q.keys))
        independent = []
        for k in range(cfg.cutoff + 1):
            vec = zctx.voa.alpha(*([1] * k))
            if space.add({Q.index[key]: c for key, c in Q.coordinates(vec).items()}):
                independent.append(k)
        report.data["independent_powers"] = independent
        report.note("images of a(-1)^k 1 for the listed k are linearly independent in the quotient")
    report.timing["build"] = round(time.perf_counter() - start, 3)
    if verify:
        vcfg = RunConfig(**{**asdict(cfg), "suites": ["associativity", "bimodule-axioms", "phi-M"]})
        for name in vcfg.suites:
            t0 = time.perf_counter()
            report.add_suite(name, SUITES[name](vcfg, report), time.perf_counter() - t0)
    return report

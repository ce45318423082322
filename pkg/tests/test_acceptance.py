"""Acceptance gate: one PASS/FAIL line per criterion.

Run with ``pytest -v tests/test_acceptance.py`` or directly as a script.
"""

import json
import sys
import time
from fractions import Fraction as F

import pytest

from twistzhu.bimod import (BimoduleContext, bimodule_axiom_suite, commutator_membership,
                            epi_lower, filtration_report, lemma_L_membership, lemma_O_stability,
                            lemma_residue_membership, phi_M_suite)
from twistzhu.cli import main
from twistzhu.fock import FockVector, TWISTED
from twistzhu.intertwine import GradedHom, adjoint_intertwiner, injectivity_probe, o_I, pi_hom_suite
from twistzhu.laurent import (LaurentPoly, check_binom_vanish, check_identity_L,
                              check_identity_unit, check_prop53, identity_L_constant,
                              printed_identity_L_constant)
from twistzhu.report import RunConfig, strip_timing, suite_backend, two_path_compare, Report
from twistzhu.zhu import (ZhuContext, check_associativity, check_zero_mode_products,
                          omega_filter, surjection_check)

H = F(1, 2)
ZHU_MATRIX = [("id", 0), ("id", 1), ("theta", 0), ("theta", H), ("theta", 1)]


def _label(aut, n):
    return f"({aut},{n})"


@pytest.fixture
def emit(capsys):
    def _emit(number, ok, text):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {text}"
        with capsys.disabled():
            print("\n" + line, flush=True)
        return line
    return _emit


def test_criterion_1_identity_suite(emit):
    start = time.perf_counter()
    unit = all(check_identity_unit(l) for l in range(11))
    vanish = all(check_binom_vanish(l, k) == 0 for l in range(1, 13) for k in range(1, l + 1))
    prop = all(check_prop53(l) for l in range(6))
    ident = all(check_identity_L(l) == LaurentPoly.monomial(-(2 * l + 2), identity_L_constant(l))
                for l in range(9))
    oracle = [(-1) ** l * (2 * l + 1) * F(__import__("math").comb(2 * l, l)) for l in range(9)]
    ident = ident and [identity_L_constant(l) for l in range(9)] == oracle
    differs = [l for l in range(9) if printed_identity_L_constant(l) != identity_L_constant(l)]
    elapsed = time.perf_counter() - start
    ok = unit and vanish and prop and ident and elapsed < 5
    emit(1, ok, f"unit={unit} binom_vanish={vanish} prop53={prop} identity_L={ident} "
                f"printed constant differs for l={differs[0]}..{differs[-1]} ({elapsed:.2f}s)")
    assert ok


def test_criterion_2_backend(emit):
    start = time.perf_counter()
    res = suite_backend(RunConfig(jacobi_order=6, cutoff=16), Report("acceptance"))
    elapsed = time.perf_counter() - start
    ok = res["ok"] and elapsed < 60
    emit(2, ok, f"L(0)w0={res['twisted_vacuum_L0']} oracle={res['zero_point_oracle']} "
                f"commutators={res['commutators']['checked']} checked, "
                f"jacobi order 6 on {res['jacobi']['checked']} triples, "
                f"{len(res['jacobi']['failures'])} failures ({elapsed:.1f}s)")
    assert ok


def test_criterion_3_two_path_oracle(emit):
    counts, failures = {}, []
    for aut, n in ZHU_MATRIX:
        res = two_path_compare(ZhuContext(aut, n, 12), seed=2024, count=100)
        for k, v in res["checked"].items():
            counts[k] = counts.get(k, 0) + v
        failures += res["failures"]
        failures += [] if res["ok"] else ["star_series"]
    ok = not failures and all(v >= 100 for v in counts.values())
    emit(3, ok, "agreement on " + ", ".join(f"{k}:{v}" for k, v in sorted(counts.items()))
                + f" seeded inputs; {len(failures)} mismatches")
    assert ok


def test_criterion_4_zhu_layer(emit):
    parts = []
    ok = True
    for aut, n in ZHU_MATRIX:
        ctx = ZhuContext(aut, n, 10)
        res = check_associativity(ctx, ctx.build_quotient(), 3, record_overflow=True)
        good = not res["failures"] and not res["overflow"]
        ok &= good
        parts.append(f"assoc{_label(aut, n)}={res['checked']}ok"
                     + (f"/{len(res['overflow'])}overflow" if res["overflow"] else ""))
    # the same check one step further out, where every product fits
    wide = ZhuContext("id", 1, 13)
    res13 = check_associativity(wide, wide.build_quotient(), 3)
    parts.append(f"assoc(id,1)@N=13={res13['checked']}ok/{len(res13['failures'])}bad")
    surj = [surjection_check(ZhuContext(a, n, 10))["ok"] for a, n in (("theta", H), ("id", 1))]
    th0 = ZhuContext("theta", 0, 10)
    collapse = th0.build_quotient().contains(th0.voa.alpha(1))
    omega = omega_filter(ZhuContext("theta", 0, 10), 5) == [FockVector.basis((), TWISTED)]
    zero = all(check_zero_mode_products(ZhuContext(a, n, 10), 3)["ok"] for a, n in ZHU_MATRIX)
    ok = ok and all(surj) and collapse and omega and zero
    emit(4, ok, " ".join(parts) + f" surjection={all(surj)} V1-collapse={collapse} "
                f"Omega0=span(w0):{omega} o(u*v)=o(u)o(v):{zero}")
    assert ok


BIMOD_MATRIX = [("id", 0, 10), ("theta", 0, 10), ("theta", H, 10), ("theta", 1, 10), ("id", 1, 13)]


def test_criterion_5_bimodule_layer(emit):
    start = time.perf_counter()
    notes = []
    ok = True
    for aut, n, N in BIMOD_MATRIX:
        ctx = BimoduleContext.create(aut, n, N)
        checks = {
            "axioms": bimodule_axiom_suite(ctx, 3, samples=50, seed=0)["ok"],
            "residue": lemma_residue_membership(ctx)["ok"],
            "commutator": commutator_membership(ctx)["ok"],
            "L(-1)+L(0)": lemma_L_membership(ctx)["ok"],
            "O-stability": lemma_O_stability(ctx)["ok"],
            "phi_M": phi_M_suite(ctx)["ok"],
        }
        if ctx.level.n > 0:
            epi = epi_lower(ctx)
            expected = "equality" if ctx.level.i >= 1 else "congruence"
            checks[f"epi[{epi['mode']}]"] = epi["ok"] and epi["mode"] == expected
        bad = [k for k, v in checks.items() if not v]
        ok &= not bad
        notes.append(f"{_label(aut, n)}@N={N}:" + ("ok" if not bad else "FAILED " + ",".join(bad)))
    filt = []
    for aut, n in (("theta", H), ("id", 1)):
        rep = filtration_report(BimoduleContext.create(aut, n, 8))
        ok &= rep["ok"]
        filt.append(f"{_label(aut, n)}:{rep['A_gn']}={rep['A_g0']}+"
                    + "+".join(str(s["dim"]) for s in rep["subquotients"]))
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 600
    emit(5, ok, " ".join(notes) + " filtration@N=8 " + " ".join(filt) + f" ({elapsed:.0f}s)")
    assert ok


def test_criterion_6_intertwiner_layer(emit):
    notes = []
    ok = True
    for aut, n in (("id", 0), ("theta", H)):
        ctx = BimoduleContext.create(aut, n, 10)
        I = adjoint_intertwiner(ctx)
        res = pi_hom_suite(I, ctx)
        probe = injectivity_probe(I, ctx)
        ok &= res["ok"] and probe["nonzero"]
        notes.append(f"{_label(aut, n)}: pi_hom on {len(res['pairs'])} level pairs={res['ok']} "
                     f"probe={probe['nonzero']}")
    ctx = BimoduleContext.create("theta", H, 10)
    I = adjoint_intertwiner(ctx)
    levels = [F(k, 2) for k in range(5)]
    omega = all(o_I(ctx, ctx.voa.omega(), t, t, I) == GradedHom.identity(t, TWISTED) * (t + F(1, 16))
                for t in levels)
    ok = ok and omega
    emit(6, ok, "; ".join(notes) + f"; o_tt(omega)=(t+1/16)id for t<=2: {omega}")
    assert ok


def test_criterion_7_determinism(emit, tmp_path, capsys):
    base = ["verify", "--aut", "theta", "--n", "1/2", "--cutoff", "10", "--seed", "17",
            "--suite", "two-path", "bimodule-axioms", "epimorphism", "phi-M", "pi-hom"]
    texts = []
    for threads in (1, 8):
        out = tmp_path / f"t{threads}.json"
        code = main(base + ["--threads", str(threads), "--out", str(out)])
        assert code == 0
        texts.append(json.dumps(strip_timing(json.loads(out.read_text(encoding="utf-8"))),
                                indent=2, sort_keys=True, ensure_ascii=False).encode())
    same = texts[0] == texts[1]
    emit(7, same, f"threads 1 vs 8: {len(texts[0])} bytes each, identical={same}")
    assert same


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))

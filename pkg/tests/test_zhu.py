import json
from fractions import Fraction as F
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from twistzhu.fock import TWISTED, FockVector, basis_upto
from twistzhu.report import two_path_compare
from twistzhu.zhu import (ZhuContext, check_associativity, check_O_acts_trivially,
                          check_zero_mode_products, omega_filter, phi_check, surjection_check,
                          window_basis)

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="module")
def id0():
    ctx = ZhuContext("id", 0, 10)
    return ctx, ctx.build_quotient()


@pytest.fixture(scope="module")
def th0():
    ctx = ZhuContext("theta", 0, 8)
    return ctx, ctx.build_quotient()


def test_vacuum_circle_vanishes():
    for aut, n in (("id", 0), ("id", 1), ("theta", F(1, 2)), ("theta", 1)):
        ctx = ZhuContext(aut, n, 8)
        for key in basis_upto(3):
            assert ctx.circ(ctx.voa.vacuum(), FockVector.basis(key)).is_zero()


def test_circle_examples():
    ctx = ZhuContext("id", 0, 8)
    om, one = ctx.voa.omega(), ctx.voa.vacuum()
    assert ctx.circ(om, one) == ctx.voa.L(-1, om) + om * 2
    th = ZhuContext("theta", 0, 8)
    a1 = th.voa.alpha(1)
    assert th.circ(a1, a1) == om * 2 - one * F(1, 8)


def test_star_examples():
    ctx = ZhuContext("id", 0, 8)
    om, one = ctx.voa.omega(), ctx.voa.vacuum()
    assert ctx.star(om, one) == om
    for aut, n in (("id", 1), ("theta", F(1, 2))):
        c = ZhuContext(aut, n, 8)
        for key in basis_upto(3):
            v = FockVector.basis(key)
            assert c.star(one, v) == v
    th = ZhuContext("theta", F(1, 2), 8)
    assert th.star(th.voa.alpha(1), om).is_zero()


def test_generators_reduce_to_zero(id0):
    ctx, Q = id0
    assert all(Q.reduce(g).is_zero() for g in ctx.span_O_V())
    om = ctx.voa.omega()
    assert Q.reduce(ctx.L_minus1_plus_L0(om)).is_zero()
    assert Q.reduce(ctx.circ(om, ctx.voa.vacuum())).is_zero()


def test_powers_of_a1_stay_independent():
    ctx = ZhuContext("id", 0, 6)
    Q = ctx.build_quotient()
    reps = [Q.reduce(ctx.voa.alpha(*[1] * k)) for k in range(4)]
    assert reps == [ctx.voa.alpha(*[1] * k) for k in range(4)]


def test_odd_generator_collapses_for_theta(th0):
    ctx, Q = th0
    assert Q.contains(ctx.voa.alpha(1))
    assert Q.reduce(ctx.voa.omega()) == ctx.voa.vacuum() * F(1, 16)


def test_omega_squared_golden(id0):
    ctx, Q = id0
    om = ctx.voa.omega()
    golden = json.loads((GOLDEN / "omega_squared_id0.json").read_text())
    assert ctx.alg_mul(om, om, Q) == FockVector.from_json(golden["product"])
    assert ctx.alg_mul(om, om, Q) == Q.reduce(ctx.star(om, om))


def test_unit(id0):
    ctx, Q = id0
    for u in window_basis(3):
        assert ctx.alg_mul(ctx.voa.vacuum(), u, Q) == Q.reduce(u)


def test_associativity_small_levels():
    for aut, n in (("id", 0), ("theta", 0), ("theta", F(1, 2))):
        ctx = ZhuContext(aut, n, 10)
        res = check_associativity(ctx, ctx.build_quotient(), window=2)
        assert not res["failures"]


def test_surjection():
    assert surjection_check(ZhuContext("theta", F(1, 2), 8))["ok"]
    with pytest.raises(ValueError):
        surjection_check(ZhuContext("theta", 0, 8))


@given(st.sampled_from(basis_upto(6)))
def test_phi_involution(key):
    ctx = ZhuContext("id", 0, 8)
    u = FockVector.basis(key)
    assert ctx.phi(ctx.phi(u)) == u


def test_phi_examples_and_antihomomorphism(th0):
    ctx, Q = th0
    voa = ctx.voa
    assert ctx.phi(voa.vacuum()) == voa.vacuum()
    assert ctx.phi(voa.alpha(1)) == voa.alpha(1) * -1
    assert ctx.phi(voa.omega()) == voa.omega()
    assert phi_check(ctx, Q, window=2)["ok"]


def test_omega_filter_theta_zero():
    ctx = ZhuContext("theta", 0, 8)
    assert omega_filter(ctx, 5) == [FockVector.basis((), TWISTED)]


def test_zero_modes():
    ctx = ZhuContext("theta", F(1, 2), 8)
    w = FockVector.basis((F(1, 2),), TWISTED)
    assert ctx.voa.zero_mode(ctx.voa.vacuum(), w) == w
    assert ctx.voa.zero_mode(ctx.voa.omega(), w) == ctx.voa.L(0, w)
    assert check_zero_mode_products(ctx, window=2)["ok"]
    assert check_O_acts_trivially(ctx)["ok"]


@pytest.mark.parametrize("aut,n", [("id", 0), ("id", 1), ("theta", 0), ("theta", F(1, 2)), ("theta", 1)])
def test_two_paths_agree(aut, n):
    res = two_path_compare(ZhuContext(aut, n, 12), seed=11, count=100)
    assert res["ok"], res["failures"][:2]
    assert all(c >= 100 for c in res["checked"].values())

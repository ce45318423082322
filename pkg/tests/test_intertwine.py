from fractions import Fraction as F

import pytest

from twistzhu.bimod import BimoduleContext
from twistzhu.fock import TWISTED, UNTWISTED, FockVector
from twistzhu.intertwine import (GradedHom, adjoint_intertwiner, check_pi_hom,
                                 derivative_property, grading_and_truncation, injectivity_probe,
                                 o_I)
from twistzhu.zhu import window_basis

H = F(1, 2)


@pytest.fixture(scope="module")
def th_half():
    ctx = BimoduleContext.create("theta", H, 10)
    return ctx, adjoint_intertwiner(ctx)


def test_conformal_weights():
    I = adjoint_intertwiner(BimoduleContext.create("id", 0, 6))
    assert (I.h0, I.h1, I.h2) == (0, 0, 0) and I.sector == UNTWISTED
    I = adjoint_intertwiner(BimoduleContext.create("theta", 0, 6))
    assert (I.h1, I.h2) == (F(1, 16), F(1, 16)) and I.sector == TWISTED


def test_vacuum_gives_identity(th_half):
    ctx, I = th_half
    one = ctx.voa.vacuum()
    for t in (0, H, 1):
        assert o_I(ctx, one, t, t, I) == GradedHom.identity(t, TWISTED)
    assert o_I(ctx, one, H, 0, I).is_zero()


def test_conformal_vector_on_levels(th_half):
    ctx, I = th_half
    for t in (0, H, 1, F(3, 2)):
        assert o_I(ctx, ctx.voa.omega(), t, t, I) == GradedHom.identity(t, TWISTED) * (t + F(1, 16))


def test_odd_generator_raises_level(th_half):
    ctx, I = th_half
    hom = o_I(ctx, ctx.voa.alpha(1), H, 0, I)
    assert hom.to_json()["matrix"] == [["1"]]
    assert hom.target_keys == [(H,)]


def test_pi_hom_examples(th_half):
    ctx, I = th_half
    for s in (0, H):
        for t in (0, H):
            assert check_pi_hom(I, ctx, s, t, window=2)["ok"]
    om, one = ctx.voa.omega(), ctx.voa.vacuum()
    lhs = o_I(ctx, ctx.star_left(om, one), 0, 0, I)
    rhs = o_I(ctx, om, 0, 0, I) @ o_I(ctx, one, 0, 0, I)
    assert lhs == rhs
    for g in ctx.span_O_M():
        assert o_I(ctx, g, H, 0, I).is_zero()


def test_pi_hom_rejects_high_levels(th_half):
    ctx, I = th_half
    with pytest.raises(ValueError):
        check_pi_hom(I, ctx, 1, 0)


def test_pi_hom_untwisted():
    ctx = BimoduleContext.create("id", 0, 10)
    assert check_pi_hom(adjoint_intertwiner(ctx), ctx, 0, 0)["ok"]


def test_injectivity(th_half):
    ctx, I = th_half
    probe = injectivity_probe(I, ctx)
    assert probe["nonzero"] and probe["s"] == "0" and probe["t"] == "0"
    assert not injectivity_probe(adjoint_intertwiner(ctx, zero=True), ctx)["nonzero"]


def test_grading_truncation_and_derivative(th_half):
    ctx, I = th_half
    assert grading_and_truncation(I, ctx, window=2, depth=2)["ok"]
    assert derivative_property(I, ctx)["ok"]


def test_graded_hom_composition():
    a = GradedHom.identity(H, TWISTED) * 3
    b = GradedHom.identity(H, TWISTED) * F(1, 3)
    assert a @ b == GradedHom.identity(H, TWISTED)
    with pytest.raises(ValueError):
        GradedHom.identity(0, TWISTED) @ GradedHom.identity(H, TWISTED)

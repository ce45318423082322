from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from twistzhu.fock import (TWISTED, UNTWISTED, CutoffOverflow, FockVector, VoaContext,
                           annihilate, basis_of_degree, basis_upto, create, exp_delta,
                           verify_twisted_jacobi, zero_point_energy_oracle)

H = F(1, 2)


@pytest.fixture(scope="module")
def voa():
    return VoaContext("theta", 12)


def test_untwisted_level_dimensions_are_partition_numbers():
    assert [len(basis_of_degree(d)) for d in range(8)] == [1, 1, 2, 3, 5, 7, 11, 15]


def test_twisted_levels_count_odd_half_partitions():
    # partitions of 2d into odd parts
    dims = [len(basis_of_degree(F(k, 2), TWISTED)) for k in range(9)]
    assert dims == [1, 1, 1, 2, 2, 3, 4, 5, 6]


def test_key_helpers():
    assert create((2, 1), 3) == (3, 2, 1)
    assert create((2, 1), 1) == (2, 1, 1)
    assert annihilate((2, 1, 1), 1) == (2, (2, 1))
    assert annihilate((2,), 1) is None


def test_json_roundtrip():
    v = FockVector({(H, H): F(-3, 7), (F(3, 2),): 2}, TWISTED)
    assert FockVector.from_json(v.to_json()) == v


def test_sector_mixing_rejected():
    with pytest.raises(ValueError):
        FockVector.basis(()) + FockVector.basis((), TWISTED)


def test_theta_examples(voa):
    one, a1, om = voa.vacuum(), voa.alpha(1), voa.omega()
    assert voa.theta_act(one) == one
    assert voa.theta_act(a1) == a1 * -1
    assert voa.theta_act(om) == om


@given(st.dictionaries(st.sampled_from(basis_upto(4)), st.fractions(max_denominator=5), max_size=5))
def test_theta_is_an_involution(terms):
    voa = VoaContext("theta", 8)
    v = FockVector(terms)
    assert voa.theta_act(voa.theta_act(v)) == v


def test_eigen_components(voa):
    om, a1 = voa.omega(), voa.alpha(1)
    assert voa.eigen_component(om, 0) == om
    assert voa.eigen_component(a1, 1) == a1
    assert voa.eigen_component(a1 + om, 0) == om


def test_vacuum_modes(voa):
    w = voa.alpha(2, 1)
    assert voa.mode_act(voa.vacuum(), -1, w) == w
    assert voa.mode_act(voa.vacuum(), 0, w).is_zero()
    assert voa.mode_act(voa.vacuum(), -2, w).is_zero()
    tw = voa.alpha(F(3, 2), H, sector=TWISTED)
    assert voa.mode_act(voa.vacuum(), -1, tw) == tw


def test_creation_on_vacuum(voa):
    assert voa.mode_act(voa.alpha(1), -1, voa.vacuum()) == voa.alpha(1)


def test_zero_point_energy(voa):
    w0 = voa.twisted_vacuum()
    assert voa.mode_act(voa.omega(), 1, w0) == w0 * F(1, 16)
    assert zero_point_energy_oracle() == F(1, 16)


def test_exp_delta_on_quadratic_state():
    # twice the c11 coefficient 1/16 appears at z^-2
    assert exp_delta((1, 1)) == {0: {(1, 1): 1}, 2: {(): F(1, 8)}}


def test_virasoro(voa):
    assert voa.L(0, voa.alpha(2, 1)) == voa.alpha(2, 1) * 3
    assert voa.L(-1, voa.vacuum()).is_zero()
    one = voa.vacuum()
    assert voa.L(2, voa.L(-2, one)) - voa.L(-2, voa.L(2, one)) == one * H


def test_twisted_l0_spectrum(voa):
    for k in basis_upto(3, TWISTED):
        v = FockVector.basis(k, TWISTED)
        assert voa.L(0, v) == v * (sum(k) + F(1, 16))


@pytest.mark.parametrize("sector,idx", [
    (UNTWISTED, [F(j) for j in range(-3, 4)]),
    (TWISTED, [F(j) + H for j in range(-4, 4)]),
])
def test_heisenberg_relations(voa, sector, idx):
    for key in basis_upto(2, sector):
        w = FockVector.basis(key, sector)
        for m in idx:
            for n in idx:
                lhs = voa.heisenberg(m, voa.heisenberg(n, w)) - voa.heisenberg(n, voa.heisenberg(m, w))
                assert lhs == w * (m if m + n == 0 else 0)


def test_coset_violation_rejected(voa):
    with pytest.raises(ValueError):
        voa.mode_act(voa.alpha(1), 0, voa.twisted_vacuum())
    with pytest.raises(ValueError):
        voa.mode_act(voa.alpha(1), H, voa.vacuum())


def test_cutoff_overflow_is_reported():
    small = VoaContext("id", 3)
    with pytest.raises(CutoffOverflow):
        small.mode_act(small.alpha(2), -3, small.alpha(1))


def test_vacuum_jacobi_trivial(voa):
    ok, _ = verify_twisted_jacobi(voa, voa.vacuum(), voa.alpha(2), voa.twisted_vacuum(), 3)
    assert ok


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(basis_upto(2)), st.sampled_from(basis_upto(2)),
       st.sampled_from(basis_upto(F(3, 2), TWISTED)))
def test_jacobi_on_twisted_module(ukey, vkey, wkey):
    voa = VoaContext("theta", 14)
    ok, fails = verify_twisted_jacobi(voa, FockVector.basis(ukey), FockVector.basis(vkey),
                                      FockVector.basis(wkey, TWISTED), 3)
    assert ok, fails[:1]


def test_exp_L1_sign_values(voa):
    assert voa.exp_L1_sign(voa.vacuum()) == voa.vacuum()
    assert voa.exp_L1_sign(voa.alpha(1)) == voa.alpha(1) * -1
    assert voa.exp_L1_sign(voa.omega()) == voa.omega()

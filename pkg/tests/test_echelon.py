import random
from fractions import Fraction as F

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from twistzhu.echelon import EchelonSpace, QuotientSpace, nullspace
from twistzhu.fock import CutoffOverflow, FockVector

SIZE = 7
coef = st.fractions(min_value=-4, max_value=4, max_denominator=3)
rows = st.lists(st.dictionaries(st.integers(0, SIZE - 1), coef, max_size=4), min_size=0, max_size=6)


def _dense(vec):
    return [vec.get(i, 0) for i in range(SIZE)]


def _build(vectors):
    e = EchelonSpace(SIZE)
    for v in vectors:
        e.add(v)
    return e


@given(rows)
def test_rank_matches_sympy(vectors):
    e = _build(vectors)
    expected = sympy.Matrix([_dense(v) for v in vectors]).rank() if vectors else 0
    assert e.rank == expected


@given(rows, st.randoms(use_true_random=False))
def test_pivots_and_remainders_independent_of_order(vectors, rnd):
    a = _build(vectors)
    shuffled = list(vectors)
    rnd.shuffle(shuffled)
    b = _build(shuffled)
    assert set(a.rows) == set(b.rows)
    probe = {i: F(i + 1, 2) for i in range(SIZE)}
    assert a.reduce(probe) == b.reduce(probe)


@given(rows, st.lists(coef, min_size=6, max_size=6))
def test_span_members_reduce_to_zero(vectors, scalars):
    e = _build(vectors)
    combo = {}
    for s, v in zip(scalars, vectors):
        for i, c in v.items():
            combo[i] = combo.get(i, 0) + s * c
    assert e.contains(combo)


@given(rows)
def test_remainder_avoids_pivots(vectors):
    e = _build(vectors)
    x = e.reduce({i: 1 for i in range(SIZE)})
    assert not set(x) & set(e.rows)


@settings(max_examples=30)
@given(rows)
def test_nullspace(vectors):
    kernel = nullspace(vectors)
    for combo in kernel:
        total = {}
        for j, c in combo.items():
            for i, v in vectors[j].items():
                total[i] = total.get(i, 0) + c * v
        assert not any(total.values())
    rank = sympy.Matrix([_dense(v) for v in vectors]).rank() if vectors else 0
    assert len(kernel) == len(vectors) - rank


def test_quotient_prefers_low_degree_representatives():
    q = QuotientSpace(3)
    q.add_generator(FockVector({(2,): 1, (1, 1): -1}))
    # a(-2)1 is identified with a(-1)^2 1, and the latter is the representative
    assert q.reduce(FockVector.basis((2,))) == FockVector.basis((1, 1))
    assert q.dim == q.ambient_dim - 1


def test_quotient_rejects_out_of_range():
    q = QuotientSpace(2)
    assert not q.fits(FockVector.basis((3,)))
    with pytest.raises(CutoffOverflow):
        q.contains(FockVector.basis((3,)))


def test_zero_reduces_to_zero():
    q = QuotientSpace(4)
    assert q.reduce(FockVector.zero()).is_zero()

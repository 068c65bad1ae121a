import random
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import INDEX_GAMMA, brute_psl2_size
from modunits.psl2 import (
    ENUMERATION_BOUND,
    I,
    MINUS_I,
    S,
    T,
    InconsistentOracle,
    MatModN,
    SubgroupHandle,
    UniMatrix,
    coset_reps_gamma,
    decompose_st,
    enumerate_psl2_modn,
    exact_st_word,
    format_word,
    gamma,
    gamma0,
    gamma1,
    index_gamma,
    lift_modn,
    parse_word,
    schreier_generators,
    todd_coxeter_index,
    word_matrix,
)


def random_unimatrix(rng: random.Random, bound: int) -> UniMatrix:
    while True:
        c, d = rng.randint(-bound, bound), rng.randint(-bound, bound)
        if gcd(c, d) != 1:
            continue
        # solve a d - b c = 1
        x0, y0, x1, y1, a_, b_ = 1, 0, 0, 1, d, c
        while b_:
            q, r = divmod(a_, b_)
            a_, b_ = b_, r
            x0, x1 = x1, x0 - q * x1
            y0, y1 = y1, y0 - q * y1
        # x0 d + y0 c = a_ = +-1
        a, b = x0 * a_, -y0 * a_
        k = rng.randint(-bound, bound)
        return UniMatrix(a + k * c, b + k * d, c, d)


@st.composite
def unimatrices(draw, bound=10**6):
    return random_unimatrix(random.Random(draw(st.integers(0, 2**32))), bound)


def test_index_small_cases():
    assert index_gamma(1) == 1
    assert index_gamma(2) == 6
    assert index_gamma(3) == 12
    assert index_gamma(5) == 60


def test_index_rejects_nonpositive():
    with pytest.raises(ValueError):
        index_gamma(0)


@pytest.mark.parametrize("N", range(1, 13))
def test_index_matches_frozen_and_enumeration(N):
    assert index_gamma(N) == INDEX_GAMMA[N] == len(enumerate_psl2_modn(N))


@pytest.mark.parametrize("N", [2, 3, 4, 6])
def test_brute_force_oracle(N):
    assert brute_psl2_size(N) == index_gamma(N)


def test_enumeration_bound():
    assert len(enumerate_psl2_modn(2)) == 6
    with pytest.raises(ValueError):
        enumerate_psl2_modn(ENUMERATION_BOUND + 1)


@pytest.mark.parametrize("N", range(1, 13))
def test_lifts_reduce_correctly(N):
    for m in enumerate_psl2_modn(N):
        A = lift_modn(m)
        assert (A.a - m.a) % N == (A.b - m.b) % N == (A.c - m.c) % N == (A.d - m.d) % N == 0
        assert A.max_entry() <= 4 * N ** 3


def test_matmodn_checks_determinant():
    with pytest.raises(ValueError):
        MatModN(5, 1, 1, 1, 1)


def test_unimatrix_checks_determinant():
    with pytest.raises(ValueError):
        UniMatrix(1, 1, 1, 1)


@settings(max_examples=200, deadline=None)
@given(unimatrices())
def test_decomposition_round_trip(A):
    w = decompose_st(A)
    assert word_matrix(w).proj_eq(A)
    assert word_matrix(exact_st_word(A)) == A
    assert parse_word(format_word(w)) == w


def test_generator_relations():
    assert T @ T == MINUS_I
    assert (S @ T) ** 3 in (I, MINUS_I)
    assert word_matrix(exact_st_word(I)) == I


def test_projective_conventions():
    A = UniMatrix(2, 1, 1, 1)
    assert A.proj_eq(-A)
    assert (-A).normalized() == A.normalized()
    assert gamma(3).member(-UniMatrix(1, 3, 0, 1))


@pytest.mark.parametrize("N", range(2, 9))
def test_schreier_generators_close_up(N):
    gens = schreier_generators(gamma(N))
    assert all(g.congruent_identity(N) or (-g).congruent_identity(N) for g in gens)
    assert todd_coxeter_index([exact_st_word(g) for g in gens]) == index_gamma(N)


def test_full_group_generators():
    gens = schreier_generators(gamma(1))
    assert {g.normalized() for g in gens} == {S.normalized(), T.normalized()}


def test_explicit_reps_match_table():
    for N in (3, 5):
        reps = coset_reps_gamma(N)
        gens_a = schreier_generators(gamma(N), ambient_reps=reps)
        assert todd_coxeter_index([exact_st_word(g) for g in gens_a]) == index_gamma(N)


def test_incomplete_reps_are_rejected():
    reps = coset_reps_gamma(3)[:-1]
    with pytest.raises(InconsistentOracle):
        schreier_generators(gamma(3), ambient_reps=reps)


def test_broken_oracle_is_detected():
    H = SubgroupHandle(3, lambda A: A.c % 3 == 0, index_hint=7, name="bad")
    with pytest.raises(InconsistentOracle):
        H.table()


@pytest.mark.parametrize("ctor,N,index", [(gamma0, 4, 6), (gamma0, 6, 12), (gamma1, 5, 12), (gamma1, 4, 6)])
def test_other_congruence_subgroups(ctor, N, index):
    H = ctor(N)
    assert len(H.table()) == index
    gens = schreier_generators(H)
    assert todd_coxeter_index([exact_st_word(g) for g in gens]) == index


@settings(max_examples=60, deadline=None)
@given(unimatrices(200), unimatrices(200), st.sampled_from([3, 4, 5, 6]))
def test_membership_closure(A, B, N):
    H = gamma(N)
    x, y = A @ UniMatrix(1, N, 0, 1) @ A.inverse(), B @ UniMatrix(1, 0, N, 1) @ B.inverse()
    assert H.member(x) and H.member(y) and H.member(x @ y) and H.member(x.inverse())
    assert H.member(x) == H.member(-x)

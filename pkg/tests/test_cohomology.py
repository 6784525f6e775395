import random
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, strategies as st

from padic_simpson.cohomology import (ChainComplex, append_sign, character_blocks, cohomology,
                                      comparison_higgs, comparison_map, expected_ranks, higgs_complex,
                                      koszul_complex, lift_rep, tower_complex)
from padic_simpson.errors import ContextMismatch
from padic_simpson.matfun import Mat, mat
from padic_simpson.rings import PrecisionContext, Scalar, ScalarRing
from padic_simpson.sampling import random_small_images
from padic_simpson.smallrep import trivial_rep, validate_rep

C32 = PrecisionContext(p=3, N=2)
C34 = PrecisionContext(p=3, N=4)


def test_wedge_sign_convention():
    assert append_sign((), 0) == 1
    assert append_sign((1,), 0) == -1
    assert append_sign((0,), 1) == 1
    assert append_sign((0,), 0) == 0


def test_trivial_koszul_complex():
    rho = trivial_rep(ScalarRing(C32), 1, 2)
    c = koszul_complex(rho)
    assert c.ranks == (1, 2, 1)
    assert all(D.is_zero() for D in c.diffs)
    rep = cohomology(c)
    assert rep.divisor_lists() == [(2,) * comb(2, k) for k in range(3)]


def test_rank_one_examples():
    rho = validate_rep([mat(C32, [[4]])])
    c = koszul_complex(rho)
    assert c.diffs[0] == mat(C32, [[3]])
    rep = cohomology(c)
    assert rep.divisor_lists() == [(1,), (1,)]
    assert rep[0].annihilator == 1 and rep[1].annihilator == 1
    assert higgs_complex([mat(C32, [[3]])]).diffs[0] == mat(C32, [[3]])


def test_unit_differential_is_exact():
    ring = ScalarRing(C32)
    c = ChainComplex(ring, (1, 1), (mat(C32, [[1]]),))
    assert cohomology(c).divisor_lists() == [(), ()]


def test_higgs_complex_with_two_coefficients():
    c = higgs_complex([mat(C34, [[3]]), mat(C34, [[6]])])
    assert c.diffs[0] == mat(C34, [[3], [6]])
    # the new wedge factor is appended on the right: e_2 ^ e_1 = -e_1 ^ e_2
    assert c.diffs[1] == mat(C34, [[6, -3]])
    assert c.is_complex()
    zero = higgs_complex([Mat.zeros(ScalarRing(C34), 2)] * 2)
    assert all(D.is_zero() for D in zero.diffs)


def test_comparison_map_examples():
    rho = validate_rep([mat(C32, [[4]])])
    u = comparison_map(rho)
    assert u.maps[1] == mat(C32, [[7]])
    target = higgs_complex(comparison_higgs(rho))
    assert u.commutes(koszul_complex(rho), target)
    assert u.is_invertible()
    triv = trivial_rep(ScalarRing(C32), 2, 2)
    assert all(m == Mat.identity(m.ring, m.nrows) for m in comparison_map(triv).maps)


def test_character_block_examples():
    ctx = PrecisionContext(p=3, N=2, m=1)
    rho = lift_rep(trivial_rep(ScalarRing(C32), 1, 1), 1)
    blocks = dict(character_blocks(rho, 1))
    assert blocks[(Fraction(0),)].diffs[0].is_zero()
    D = blocks[(Fraction(1, 3),)].diffs[0]
    assert D == Mat(ScalarRing(ctx), [[Scalar.zeta(ctx) - 1]])
    for index, cplx in blocks.items():
        if index != (Fraction(0),):
            for r in cohomology(cplx).degrees:
                assert r.annihilator == Fraction(1, 2)

    rho4 = lift_rep(validate_rep([mat(C32, [[4]])]), 1)
    for index, cplx in character_blocks(rho4, 1):
        if index != (Fraction(0),):
            assert all(r.annihilator <= 1 for r in cohomology(cplx).degrees)


def test_character_blocks_need_lifted_rep():
    with pytest.raises(ContextMismatch):
        character_blocks(validate_rep([mat(C32, [[4]])]), 1)


def test_tower_complex_is_sum_of_blocks():
    rho = lift_rep(validate_rep([mat(C32, [[4]])]), 1)
    blocks = character_blocks(rho, 1)
    total = tower_complex(blocks)
    assert total.ranks == (3, 3)
    lengths = [sum(cohomology(c)[k].length for _, c in blocks) for k in range(2)]
    assert [r.length for r in cohomology(total).degrees] == lengths


reps = st.builds(
    lambda p, N, n, d, seed: validate_rep(random_small_images(PrecisionContext(p=p, N=N), n, d,
                                                              random.Random(seed))),
    st.sampled_from([3, 5]), st.integers(1, 3), st.integers(1, 2), st.integers(1, 3), st.integers(0, 2 ** 32))


@given(reps)
def test_group_and_higgs_cohomology_agree(rho):
    group = koszul_complex(rho)
    higgs = higgs_complex(comparison_higgs(rho))
    assert group.is_complex() and higgs.is_complex()
    u = comparison_map(rho)
    assert u.commutes(group, higgs)
    assert u.is_invertible()
    assert cohomology(group).divisor_lists() == cohomology(higgs).divisor_lists()


@given(reps)
def test_euler_length_vanishes(rho):
    # the alternating sum of lengths of H^k equals that of C^k, which is 0 for d >= 1
    assert cohomology(koszul_complex(rho)).euler_length() == 0


@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 3))
def test_trivial_ranks(n, d, N):
    ctx = PrecisionContext(p=3, N=N)
    rep = cohomology(koszul_complex(trivial_rep(ScalarRing(ctx), n, d)))
    assert [len(r.divisors) for r in rep.degrees] == expected_ranks(n, d)
    assert all(f == N for r in rep.degrees for f in r.divisors)

import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from padic_simpson.errors import NotCommuting, NotSmall, SearchSpaceTooLarge
from padic_simpson.matfun import Mat, mat
from padic_simpson.rings import LaurentRing, PrecisionContext, RingElement, Scalar, ScalarRing, galois_act
from padic_simpson.sampling import random_invertible, random_small_images
from padic_simpson.smallrep import (DeltaElement, TwistedCocycle, coboundary, evaluate, find_conjugator,
                                    rep_equivalent, trivial_rep, twisted_cocycle_check, validate_rep)

C32 = PrecisionContext(p=3, N=2)
C34 = PrecisionContext(p=3, N=4)


def test_validate_examples():
    rho = validate_rep([mat(C32, [[4, 0], [0, 1]]), mat(C32, [[1, 0], [0, 4]])])
    assert rho.d == 2 and rho.n == 2
    with pytest.raises(NotCommuting) as info:
        validate_rep([mat(C34, [[1, 3], [0, 1]]), mat(C34, [[1, 0], [3, 1]])])
    assert (info.value.i, info.value.j) == (1, 2)
    assert info.value.witness == mat(C34, [[9, 0], [0, -9]])
    with pytest.raises(NotSmall) as info:
        validate_rep([mat(C32, [[2]])])
    assert info.value.i == 1


def test_evaluate_examples():
    rho = validate_rep([mat(C32, [[4]])])
    assert evaluate(rho, DeltaElement((0,))) == mat(C32, [[1]])
    assert evaluate(rho, (2,)) == mat(C32, [[7]])
    assert evaluate(rho, (9,)) == mat(C32, [[1]])


@given(st.integers(0, 2 ** 32), st.integers(0, 40), st.integers(0, 40))
def test_evaluate_is_a_homomorphism(seed, a, b):
    rho = validate_rep(random_small_images(C32, 2, 2, random.Random(seed)))
    g, h = DeltaElement((a, b)), DeltaElement((b, 3))
    assert evaluate(rho, g + h) == evaluate(rho, g) @ evaluate(rho, h)


def test_cocycle_examples():
    hom = TwistedCocycle((mat(C32, [[4]]),), action="trivial", extra=[((3,), mat(C32, [[64]]))])
    assert twisted_cocycle_check(hom)

    ctx = PrecisionContext(p=3, N=2, m=1)
    ring = LaurentRing(ctx, 1, 2)
    T13 = RingElement.monomial(ctx, 1, 2, [Fraction(1, 3)])
    b = Mat(ring, [[ring.one() + T13.scale(Scalar(ctx, [3]))]])
    assert twisted_cocycle_check(coboundary(b, 1, extra_powers=[(2,), (3,)]))

    bad = TwistedCocycle((T13,), action="toric", law="additive", extra=[((2,), T13 + T13)])
    assert not twisted_cocycle_check(bad)
    good = TwistedCocycle((T13,), action="toric", law="additive", extra=[((2,), T13 + galois_act([1], T13))])
    assert twisted_cocycle_check(good)


def test_rep_equivalent_examples():
    rho = validate_rep([mat(C32, [[4, 0], [0, 1]])])
    assert rep_equivalent(rho, rho) == Mat.identity(rho.ring, 2)
    rho2 = validate_rep([mat(C32, [[4, 3], [0, 1]])])
    C = rep_equivalent(rho, rho2, mode="exact-search")
    assert C == mat(C32, [[1, 1], [0, 1]])
    certified = rep_equivalent(rho, rho2, mode="certified")
    assert certified @ rho2.images[0] == rho.images[0] @ certified
    rho3 = validate_rep([mat(C32, [[7, 0], [0, 1]])])
    assert rep_equivalent(rho, rho3, mode="exact-search") is None
    assert rep_equivalent(rho, rho3, mode="certified") is None


def test_exact_search_cap():
    rho = validate_rep([mat(C32, [[4, 0], [0, 1]])])
    with pytest.raises(SearchSpaceTooLarge):
        find_conjugator(rho.images, rho.images, mode="exact-search", cap=10)


@given(st.integers(0, 2 ** 32))
def test_certified_finds_planted_conjugator(seed):
    rng = random.Random(seed)
    ctx = PrecisionContext(p=3, N=3)
    ring = ScalarRing(ctx)
    rho = validate_rep(random_small_images(ctx, 2, 2, rng))
    B = random_invertible(ring, 2, rng)
    conj = validate_rep([B.inverse() @ g @ B for g in rho.images])
    C = rep_equivalent(rho, conj, mode="certified")
    assert C is not None
    for g1, g2 in zip(rho.images, conj.images):
        assert C @ g2 == g1 @ C


def test_trivial_rep():
    rho = trivial_rep(ScalarRing(C32), 3, 2)
    assert all(g == Mat.identity(rho.ring, 3) for g in rho.images)

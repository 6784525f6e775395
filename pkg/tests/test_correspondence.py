import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from padic_simpson.correspondence import (CocycleBasis, DescentConfig, HiggsField,
                                          cocycle_from_hom_and_gauge, descend_cocycle, higgs_to_rep,
                                          rep_to_higgs, specialize_at_one, transfer_morphism)
from padic_simpson.errors import (ConvergenceViolation, DescentStalled, HiggsConditionViolated, NotAMorphism,
                                   NotSmall, PrecisionExhausted)
from padic_simpson.matfun import Mat, mat, mat_exp, trim
from padic_simpson.rings import LaurentRing, PrecisionContext, RingElement, ScalarRing
from padic_simpson.sampling import (constant_matrix, random_higgs_coefficients, random_invertible,
                                    random_scalar)
from padic_simpson.smallrep import TwistedCocycle, coboundary, rep_equivalent, validate_rep

C32 = PrecisionContext(p=3, N=2)
C34 = PrecisionContext(p=3, N=4)


def test_higgs_to_rep_examples():
    rho = higgs_to_rep(HiggsField((mat(C34, [[0, 3], [0, 0]]),)))
    assert rho.images[0] == mat(C34, [[1, 3], [0, 1]])
    rho = higgs_to_rep(HiggsField((mat(C34, [[3, 0], [0, 0]]), mat(C34, [[0, 0], [0, 3]]))))
    assert rho.images == (mat(C34, [[67, 0], [0, 1]]), mat(C34, [[1, 0], [0, 67]]))
    zero = HiggsField((mat(C34, [[0, 0], [0, 0]]),) * 2)
    assert all(g == Mat.identity(g.ring, 2) for g in higgs_to_rep(zero).images)


def test_rep_to_higgs_examples():
    assert rep_to_higgs(validate_rep([mat(C32, [[4]])])).coefficients == (mat(C32, [[3]]),)
    ring = ScalarRing(C32)
    trivial = validate_rep([Mat.identity(ring, 2)] * 2)
    assert all(A.is_zero() for A in rep_to_higgs(trivial).coefficients)
    assert rep_to_higgs(validate_rep([mat(C32, [[1, 3], [0, 1]])])).coefficients == (mat(C32, [[0, 3], [0, 0]]),)


def test_higgs_field_validation():
    with pytest.raises(ConvergenceViolation):
        HiggsField((mat(C32, [[1]]),))
    with pytest.raises(HiggsConditionViolated):
        HiggsField((mat(C34, [[0, 3], [0, 0]]), mat(C34, [[0, 0], [3, 0]])))


def test_singular_basis_rejected():
    theta = HiggsField((mat(C32, [[3]]), mat(C32, [[6]])))
    with pytest.raises(ValueError):
        higgs_to_rep(theta, CocycleBasis(((1, 1), (1, 1))))


def test_transfer_morphism_examples():
    ring = ScalarRing(C32)
    A = HiggsField((mat(C32, [[3, 0], [0, 0]]),))
    I = Mat.identity(ring, 2)
    assert transfer_morphism(I, (A, A), "higgs-to-rep") == I
    phi = mat(C32, [[1, 1], [0, 1]])
    B = HiggsField((phi @ A.coefficients[0] @ phi.inverse(),))
    assert transfer_morphism(phi, (A, B), "higgs-to-rep") == phi
    rho1, rho2 = higgs_to_rep(A), higgs_to_rep(B)
    assert transfer_morphism(phi, (rho1, rho2), "rep-to-higgs") == phi
    zero = Mat.zeros(ring, 2)
    assert transfer_morphism(zero, (A, B), "higgs-to-rep") == zero
    with pytest.raises(NotAMorphism) as info:
        transfer_morphism(phi, (A, A), "higgs-to-rep")
    assert info.value.index == 1 and info.value.side == "source"


thetas = st.builds(
    lambda p, N, n, d, seed: HiggsField(tuple(random_higgs_coefficients(
        PrecisionContext(p=p, N=N), n, d, random.Random(seed)))),
    st.sampled_from([3, 5]), st.integers(1, 4), st.integers(1, 3), st.integers(1, 3), st.integers(0, 2 ** 32))


@given(thetas)
def test_round_trip(theta):
    rho = higgs_to_rep(theta)
    assert rep_to_higgs(rho) == theta
    assert higgs_to_rep(rep_to_higgs(rho)) == rho


@given(thetas, st.integers(0, 2 ** 32))
def test_gauge_equivariance(theta, seed):
    B = random_invertible(theta.ring, theta.n, random.Random(seed))
    lhs = higgs_to_rep(theta.conjugate(B))
    rhs = higgs_to_rep(theta)
    Binv = B.inverse()
    assert lhs.images == tuple(Binv @ g @ B for g in rhs.images)


@given(thetas, st.integers(0, 2 ** 32))
def test_rescaling_invariance(theta, seed):
    rng = random.Random(seed)
    ctx = theta.ring.ctx
    while True:
        u = random_scalar(ctx, rng)
        if u.is_unit():
            break
    d = theta.d
    basis = CocycleBasis(tuple(tuple(u if i == j else 0 for j in range(d)) for i in range(d)))
    uinv = u.inverse()
    scaled = HiggsField(tuple(A.scale(uinv) for A in theta.coefficients))
    assert higgs_to_rep(scaled, basis) == higgs_to_rep(theta)


@given(thetas, st.integers(0, 2 ** 32))
def test_basis_change_covariance(theta, seed):
    ring, d = theta.ring, theta.d
    B = random_invertible(ring, d, random.Random(seed))
    Binv = B.inverse()
    primed = HiggsField(tuple(
        sum((theta.coefficients[i].scale(B.rows[i][j]) for i in range(1, d)),
            theta.coefficients[0].scale(B.rows[0][j]))
        for j in range(d)))
    basis = CocycleBasis(tuple(tuple(Binv.rows[j][k] for k in range(d)) for j in range(d)))
    assert higgs_to_rep(primed, basis) == higgs_to_rep(theta)


# -- descent -----------------------------------------------------------------

C33 = PrecisionContext(p=3, N=3, m=1)
RING = LaurentRing(C33, 1, 16)


def _exp_pair(X):
    return trim(mat_exp(X)), trim(mat_exp(-X))


def test_descent_of_a_homomorphism_is_trivial():
    psi = constant_matrix(RING, mat(C33, [[4, 3], [0, 1]]))
    res = descend_cocycle(TwistedCocycle((psi,), action="toric"))
    assert res.rep.images == (psi,)
    assert res.gauge == Mat.identity(RING, 2)
    assert res.iterations == 0 and res.loss == 0


def test_descent_of_a_coboundary():
    T13 = RingElement.monomial(C33, 1, 16, [Fraction(1, 3)], 3)
    b, binv = _exp_pair(Mat(RING, [[T13]]))
    c = coboundary(b, 1)
    res = descend_cocycle(c)
    assert res.rep.images == (Mat.identity(RING, 1),)
    assert res.loss == 0
    # gauge * b is Delta-invariant up to the (zeta - 1) ambiguity of the block solve
    u = (b @ res.gauge).rows[0][0]
    _, frac = u.split_invariant()
    assert frac.valuation() >= C33.N - Fraction(1, 2)


def test_descent_of_a_planted_cocycle():
    T13 = RingElement.monomial(C33, 1, 16, [Fraction(1, 3)], 3)
    b, binv = _exp_pair(Mat(RING, [[T13]]))
    psi = [constant_matrix(RING, mat(C33, [[4]]))]
    res = descend_cocycle(cocycle_from_hom_and_gauge(psi, b, binv))
    assert res.rep.images == tuple(psi)
    assert [t["obstruction"] for t in res.trace][-1] == "inf"


def test_descent_trace_precision_and_json():
    X = Mat(RING, [[RingElement.monomial(C33, 1, 16, [Fraction(1, 3)], 3), 0],
                   [0, RingElement.monomial(C33, 1, 16, [Fraction(-2, 3)], 6)]])
    b, binv = _exp_pair(X)
    psi = [constant_matrix(RING, mat(C33, [[4, 3], [0, 1]]))]
    res = descend_cocycle(cocycle_from_hom_and_gauge(psi, b, binv), DescentConfig())
    assert res.loss <= res.iterations * DescentConfig().gamma_tors
    assert rep_equivalent(validate_rep([specialize_at_one(g) for g in res.rep.images]),
                          validate_rep([specialize_at_one(g) for g in psi])) is not None
    obj = res.to_json()
    assert set(obj) == {"rep", "gauge", "precision", "loss", "iterations"}


def test_descent_rejects_large_cocycles():
    big = constant_matrix(RING, mat(C33, [[2]]))
    with pytest.raises(NotSmall):
        descend_cocycle(TwistedCocycle((big,), action="toric"))


def test_descent_error_paths():
    T13 = RingElement.monomial(C33, 1, 16, [Fraction(1, 3)], 3)
    X = Mat(RING, [[T13, 0], [0, T13.scale(2)]])
    b, binv = _exp_pair(X)
    psi = [constant_matrix(RING, mat(C33, [[4, 0], [0, 1]])), constant_matrix(RING, mat(C33, [[1, 0], [0, 4]]))]
    ring2 = LaurentRing(C33, 2, 16)
    not_a_cocycle = TwistedCocycle((constant_matrix(ring2, mat(C33, [[1, 3], [0, 1]])),
                                    constant_matrix(ring2, mat(C33, [[1, 0], [3, 1]]))), action="toric")
    with pytest.raises(DescentStalled):
        descend_cocycle(not_a_cocycle)
    c = cocycle_from_hom_and_gauge(psi[:1], b, binv)
    assert descend_cocycle(c).iterations >= 1
    with pytest.raises(PrecisionExhausted):
        descend_cocycle(c, DescentConfig(max_iter=0))

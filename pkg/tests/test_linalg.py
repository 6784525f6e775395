import itertools

from hypothesis import given, strategies as st

from padic_simpson.linalg import (cokernel_exponents, det_mod_p, identity, kernel_generators, matmul,
                                  mult_matrix, restrict_scalars, smith)
from padic_simpson.rings import PrecisionContext, Scalar

P, N = 3, 2
Q = P ** N

small_mats = st.integers(1, 3).flatmap(lambda r: st.integers(1, 3).flatmap(
    lambda c: st.lists(st.lists(st.integers(0, Q - 1), min_size=c, max_size=c), min_size=r, max_size=r)))


def brute_image(A):
    c = len(A[0])
    out = set()
    for x in itertools.product(range(Q), repeat=c):
        out.add(tuple(sum(a * b for a, b in zip(row, x)) % Q for row in A))
    return out


def span(vectors, length):
    out = {tuple([0] * length)}
    for v in vectors:
        out = {tuple((a + k * b) % Q for a, b in zip(w, v)) for w in out for k in range(Q)}
    return out


@given(small_mats)
def test_smith_factorisation(A):
    S = smith(A, P, N)
    D = matmul(matmul(S.U, A, Q), S.V, Q)
    for i, row in enumerate(D):
        for j, x in enumerate(row):
            expected = P ** S.exps[i] % Q if i == j and i < len(S.exps) else 0
            assert x == expected
    assert matmul(S.V, S.Vinv, Q) == identity(len(A[0]))
    assert S.exps == sorted(S.exps)


@given(small_mats)
def test_cokernel_order_matches_brute_force(A):
    r = len(A)
    exps, _ = cokernel_exponents(A, P, N, r)
    image = brute_image(A)
    assert Q ** r // len(image) == P ** sum(exps)


@given(small_mats)
def test_kernel_generators_span_the_kernel(A):
    c = len(A[0])
    gens = kernel_generators(A, P, N, c)
    for g in gens:
        assert all(row == [0] for row in matmul(A, [[y] for y in g], Q))
    kernel_size = Q ** c // len(brute_image(A))
    assert len(span(gens, c)) == kernel_size


def test_det_mod_p():
    assert det_mod_p([[1, 2], [3, 4]], 5) == (4 - 6) % 5
    assert det_mod_p([[3, 0], [0, 1]], 3) == 0


def test_restrict_scalars_of_zeta():
    ctx = PrecisionContext(p=3, N=2, m=1)
    z = Scalar.zeta(ctx)
    m = mult_matrix(z)
    # zeta * 1 = zeta, zeta * zeta = -1 - zeta
    assert m == [[0, Q - 1], [1, Q - 1]]
    assert restrict_scalars([[z]], ctx) == m

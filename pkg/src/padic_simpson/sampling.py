"""Seeded random generators for commuting families, gauges and planted cocycles.

Commuting families are produced as polynomials in one random matrix X, so
they commute exactly without any rejection sampling.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .errors import NotAUnit
from .matfun import Mat, mat_exp, trim
from .rings import LaurentRing, RingElement, Scalar, ScalarRing


def random_scalar(ctx, rng: random.Random, min_val: int = 0) -> Scalar:
    q = ctx.pN
    base = ctx.p ** min_val
    return Scalar(ctx, [rng.randrange(q) * base for _ in range(ctx.phi)])


def random_matrix(ring, n: int, rng: random.Random, min_val: int = 0) -> Mat:
    ctx = ring.ctx
    return Mat(ring, [[random_scalar(ctx, rng, min_val) for _ in range(n)] for _ in range(n)])


def random_invertible(ring, n: int, rng: random.Random) -> Mat:
    while True:
        B = random_matrix(ring, n, rng)
        try:
            B.inverse()
        except NotAUnit:
            continue
        return B


def _poly_in(X: Mat, coeffs) -> Mat:
    ring, n = X.ring, X.n
    out = Mat.zeros(ring, n)
    power = Mat.identity(ring, n)
    for a in coeffs:
        out = out + power.scale(a)
        power = power @ X
    return out


def commuting_family(ring, n: int, d: int, rng: random.Random, min_val: int = 1) -> list:
    """d commuting matrices of valuation >= min_val: p^min_val * f_i(X) for one random X."""
    ctx = ring.ctx
    X = random_matrix(ring, n, rng)
    p = ctx.p ** min_val
    out = []
    for _ in range(d):
        deg = rng.randrange(n)
        coeffs = [random_scalar(ctx, rng) for _ in range(deg + 1)]
        out.append(_poly_in(X, coeffs).scale(p))
    return out


def block_triangular_family(ring, n1: int, n2: int, d: int, rng: random.Random, min_val: int = 1):
    """Commuting block upper-triangular matrices p^min_val * f_i(X) and their two diagonal blocks.

    X has a random upper-right block, so the family is genuinely triangular.
    """
    n = n1 + n2
    X = random_matrix(ring, n, rng)
    zero = ring.zero()
    X = Mat(ring, [[zero if (i >= n1 and j < n1) else X.rows[i][j] for j in range(n)] for i in range(n)])
    p = ring.ctx.p ** min_val
    full, top, bottom = [], [], []
    for _ in range(d):
        coeffs = [random_scalar(ring.ctx, rng) for _ in range(rng.randrange(n) + 1)]
        F = _poly_in(X, coeffs).scale(p)
        full.append(F)
        top.append(Mat(ring, [r[:n1] for r in F.rows[:n1]]))
        bottom.append(Mat(ring, [r[n1:] for r in F.rows[n1:]]))
    return full, top, bottom


def random_higgs_coefficients(ctx, n: int, d: int, rng: random.Random) -> list:
    return commuting_family(ScalarRing(ctx), n, d, rng)


def random_small_images(ctx, n: int, d: int, rng: random.Random) -> list:
    ring = ScalarRing(ctx)
    one = Mat.identity(ring, n)
    return [one + A for A in commuting_family(ring, n, d, rng)]


def random_unipotent(ring, n: int, rng: random.Random) -> Mat:
    """Upper unitriangular matrix with strictly upper entries divisible by p."""
    ctx = ring.ctx
    rows = []
    for i in range(n):
        rows.append([1 if i == j else (random_scalar(ctx, rng, 1) if j > i else 0) for j in range(n)])
    return Mat(ring, rows)


def random_fractional_exponent(ctx, d: int, rng: random.Random) -> tuple:
    den = ctx.denom
    while True:
        e = tuple(Fraction(rng.randrange(-den + 1, den), den) for _ in range(d))
        if any(x.denominator > 1 for x in e):
            return e


def random_tower_gauge(ring: LaurentRing, n: int, rng: random.Random, terms: int = 1) -> tuple[Mat, Mat]:
    """(b0, b0^-1) with b0 = exp(X), X = p * sum_k B_k T^(a_k) for nonzero random B_k and fractional a_k.

    Both are trimmed to precision N, so b0 b0^-1 = 1 holds at precision N only.
    """
    ctx = ring.ctx
    zero = ring.zero()
    rows = [[zero] * n for _ in range(n)]
    for _ in range(terms):
        e = random_fractional_exponent(ctx, ring.d, rng)
        cs = [[0] * n for _ in range(n)]
        while not any(any(r) for r in cs):
            cs = [[rng.randrange(ctx.p) for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for j in range(n):
                c = cs[i][j]
                if c:
                    mono = RingElement.monomial(ctx, ring.d, ring.bound, e, c * ctx.p)
                    rows[i][j] = rows[i][j] + mono
    X = Mat(ring, rows)
    return trim(mat_exp(X)), trim(mat_exp(-X))


def constant_matrix(ring: LaurentRing, M: Mat) -> Mat:
    """Embed a scalar matrix into the Laurent ring as constants."""
    return M.map(lambda a: RingElement.constant(ring.ctx, ring.d, ring.bound, a), ring)

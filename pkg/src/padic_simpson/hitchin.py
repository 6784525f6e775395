"""Hitchin maps: characteristic polynomials of Higgs fields and of small representations.

For theta = sum_i A_i delta_i the Hitchin point is (a_1, ..., a_n) with

    det(T - sum_i A_i delta_i) = T^n + a_1 T^(n-1) + ... + a_n,

each a_k a homogeneous polynomial of degree k in the formal variables delta_i.
So a_1 = -sum_i tr(A_i) delta_i.  The determinant is expanded with the
division-free Berkowitz recursion, since the entries live in a polynomial ring.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ContextMismatch
from .correspondence import rep_to_higgs
from .rings import RingElement, Scalar


@dataclass(frozen=True, eq=False)
class HitchinPoint:
    """Coefficients a_1..a_n of the characteristic polynomial, as polynomials in delta_1..delta_d."""

    n: int
    d: int
    ctx: object
    coefficients: tuple

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(self.coefficients))
        if len(self.coefficients) != self.n:
            raise ValueError(f"expected {self.n} coefficients, got {len(self.coefficients)}")

    def __eq__(self, other):
        if not isinstance(other, HitchinPoint):
            return NotImplemented
        return (self.n, self.d, self.ctx) == (other.n, other.d, other.ctx) and all(
            _sub(a, b).is_zero() for a, b in zip(self.coefficients, other.coefficients))

    def __hash__(self):
        return hash((self.n, self.d, self.ctx))

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self.coefficients)

    def is_homogeneous(self) -> bool:
        den = self.ctx.denom
        return all(sum(e) == k * den for k, a in enumerate(self.coefficients, start=1)
                   for e, c in a.terms.items() if any(x % self.ctx.pN for x in c))

    def coefficient(self, k: int, exps) -> Scalar:
        """The coefficient of delta^exps (integer exponents) in a_k."""
        den = self.ctx.denom
        return self.coefficients[k - 1].coefficient(tuple(int(e) * den for e in exps))

    def to_json(self) -> dict:
        return {"n": self.n,
                "coefficients": [{"degree": k, "poly": a.to_json(compact=True)}
                                 for k, a in enumerate(self.coefficients, start=1)]}


def _sub(a: RingElement, b: RingElement) -> RingElement:
    bound = max(a.bound, b.bound)
    return _rebound(a, bound) - _rebound(b, bound)


def _rebound(a: RingElement, bound: int) -> RingElement:
    return RingElement._raw(a.ctx, a.d, bound, a.terms, a.exact)


def berkowitz(M: list, one, zero) -> list:
    """[1, c_1, ..., c_n] with det(T - M) = sum c_k T^(n-k); M is a square list of lists."""
    n = len(M)
    if n == 0:
        return [one]
    vect = [one, -M[0][0]]
    for r in range(1, n):
        R = M[r][:r]
        S = [row[:r] for row in M[:r]]
        v = [M[i][r] for i in range(r)]
        col = [one, -M[r][r]]
        for _ in range(r):
            acc = zero
            for x, y in zip(R, v):
                acc = acc + x * y
            col.append(-acc)
            nv = []
            for row in S:
                s = zero
                for x, y in zip(row, v):
                    s = s + x * y
                nv.append(s)
            v = nv
        new = []
        for i in range(r + 2):
            acc = zero
            for j in range(min(i, r) + 1):
                acc = acc + col[i - j] * vect[j]
            new.append(acc)
        vect = new
    return vect


def theta_matrix(coefficients, bound: int | None = None) -> list:
    """Entries of sum_i A_i delta_i as polynomials in the delta_i."""
    A0 = coefficients[0]
    ctx, n, d = A0.ctx, A0.n, len(coefficients)
    bound = max(n, 1) if bound is None else bound
    rows = []
    for a in range(n):
        row = []
        for b in range(n):
            terms = {}
            for i, A in enumerate(coefficients):
                x = A.rows[a][b]
                if not isinstance(x, Scalar):
                    raise ContextMismatch("Hitchin maps are computed for scalar Higgs fields")
                if not x.is_storage_zero():
                    e = tuple(ctx.denom if j == i else 0 for j in range(d))
                    terms[e] = x
            row.append(RingElement(ctx, d, bound, terms))
        rows.append(row)
    return rows


def hitchin_map(theta) -> HitchinPoint:
    """Coefficients of det(T - sum_i A_i delta_i); accepts a HiggsField or a list of matrices."""
    coeffs = list(getattr(theta, "coefficients", theta))
    A0 = coeffs[0]
    ctx, n, d = A0.ctx, A0.n, len(coeffs)
    bound = max(n, 1)
    M = theta_matrix(coeffs, bound)
    one = RingElement.constant(ctx, d, bound, 1)
    zero = RingElement.zero(ctx, d, bound)
    cp = berkowitz(M, one, zero)
    return HitchinPoint(n, d, ctx, tuple(cp[1:]))


def trivial_point(ctx, d: int) -> HitchinPoint:
    """The rank-0 point (the empty product, characteristic polynomial 1)."""
    return HitchinPoint(0, d, ctx, ())


def hitchin_product(h1: HitchinPoint, h2: HitchinPoint) -> HitchinPoint:
    """Coefficients of the product of the two monic characteristic polynomials."""
    if h1.ctx != h2.ctx or h1.d != h2.d:
        raise ContextMismatch("Hitchin points over different rings")
    ctx, d = h1.ctx, h1.d
    n = h1.n + h2.n
    bound = max(n, 1)
    one = RingElement.constant(ctx, d, bound, 1)
    f = [one] + [_rebound(a, bound) for a in h1.coefficients]
    g = [one] + [_rebound(a, bound) for a in h2.coefficients]
    out = []
    for k in range(1, n + 1):
        acc = RingElement.zero(ctx, d, bound)
        for i in range(max(0, k - h2.n), min(k, h1.n) + 1):
            acc = acc + f[i] * g[k - i]
        out.append(acc)
    return HitchinPoint(n, d, ctx, tuple(out))


def betti_hitchin(rho) -> HitchinPoint:
    """hitchin_map(rep_to_higgs(rho))."""
    return hitchin_map(rep_to_higgs(rho))


def point_from_roots(ctx, d: int, roots) -> HitchinPoint:
    """Coefficients of prod_i (T - sum_j roots[i][j] delta_j); roots are scalars or ints."""
    point = trivial_point(ctx, d)
    for lin in roots:
        terms = {}
        for j, x in enumerate(lin):
            s = x if isinstance(x, Scalar) else Scalar(ctx, [int(x)])
            if not s.is_storage_zero():
                terms[tuple(ctx.denom if k == j else 0 for k in range(d))] = -s
        point = hitchin_product(point, HitchinPoint(1, d, ctx, (RingElement(ctx, d, 1, terms),)))
    return point

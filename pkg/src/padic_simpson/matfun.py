"""Matrices over the finite-precision rings, exp/log, and the congruence filtration.

``G_k`` is the subgroup of matrices ``g`` with ``v(g - 1) >= k``; on
``p*M_n`` the exponential is a bijection onto ``G_1`` with inverse ``log``.

Convention: ``adjoint(g, A) = g^-1 A g``, so that
``mat_exp(adjoint(g, A)) == g^-1 mat_exp(A) g``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Sequence

from .errors import ContextMismatch, ConvergenceViolation, NotAUnit
from .rings import INF, LaurentRing, RingElement, Scalar, ScalarRing, ilog, vp_int


class Mat:
    """Dense matrix over a :class:`ScalarRing` or :class:`LaurentRing`.

    Equality is entrywise equality at precision N.
    """

    __slots__ = ("ring", "rows")

    def __init__(self, ring, rows: Sequence[Sequence]):
        self.ring = ring
        self.rows = tuple(tuple(ring.coerce(x) for x in row) for row in rows)
        if len({len(r) for r in self.rows}) > 1:
            raise ValueError("ragged matrix")

    @classmethod
    def _raw(cls, ring, rows):
        obj = object.__new__(cls)
        obj.ring = ring
        obj.rows = rows
        return obj

    @classmethod
    def identity(cls, ring, n: int) -> "Mat":
        one, zero = ring.one(), ring.zero()
        return cls._raw(ring, tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, ring, r: int, c: int | None = None) -> "Mat":
        zero = ring.zero()
        return cls._raw(ring, tuple((zero,) * (r if c is None else c) for _ in range(r)))

    @classmethod
    def diag(cls, ring, entries) -> "Mat":
        n = len(entries)
        zero = ring.zero()
        return cls(ring, [[entries[i] if i == j else zero for j in range(n)] for i in range(n)])

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @property
    def n(self) -> int:
        if self.nrows != self.ncols:
            raise ValueError("matrix is not square")
        return self.nrows

    @property
    def ctx(self):
        return self.ring.ctx

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def _check(self, other: "Mat"):
        if not isinstance(other, Mat):
            raise TypeError(f"expected Mat, got {type(other).__name__}")
        if other.ring != self.ring:
            raise ContextMismatch(f"{self.ring} vs {other.ring}")

    def __add__(self, other: "Mat") -> "Mat":
        self._check(other)
        return Mat._raw(self.ring, tuple(tuple(a + b for a, b in zip(r, s))
                                         for r, s in zip(self.rows, other.rows)))

    def __sub__(self, other: "Mat") -> "Mat":
        self._check(other)
        return Mat._raw(self.ring, tuple(tuple(a - b for a, b in zip(r, s))
                                         for r, s in zip(self.rows, other.rows)))

    def __neg__(self) -> "Mat":
        return Mat._raw(self.ring, tuple(tuple(-a for a in r) for r in self.rows))

    def __matmul__(self, other: "Mat") -> "Mat":
        self._check(other)
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        cols = list(zip(*other.rows))
        zero = self.ring.zero()
        out = []
        for r in self.rows:
            row = []
            for col in cols:
                acc = zero
                for a, b in zip(r, col):
                    acc = acc + a * b
                row.append(acc)
            out.append(tuple(row))
        return Mat._raw(self.ring, tuple(out))

    def __mul__(self, other):
        if isinstance(other, Mat):
            return self @ other
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, s) -> "Mat":
        return Mat._raw(self.ring, tuple(tuple(a * s for a in r) for r in self.rows))

    def __pow__(self, k: int) -> "Mat":
        result, base = Mat.identity(self.ring, self.n), self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def map(self, f: Callable, ring=None) -> "Mat":
        ring = self.ring if ring is None else ring
        return Mat._raw(ring, tuple(tuple(f(a) for a in r) for r in self.rows))

    def transpose(self) -> "Mat":
        return Mat._raw(self.ring, tuple(zip(*self.rows)))

    def __eq__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        if other.ring != self.ring or (self.nrows, self.ncols) != (other.nrows, other.ncols):
            return False
        return all(a == b for r, s in zip(self.rows, other.rows) for a, b in zip(r, s))

    def __hash__(self):
        return hash((self.ring, self.rows))

    def is_zero(self) -> bool:
        return all(a.is_zero() for r in self.rows for a in r)

    def valuation(self):
        return min((a.valuation() for r in self.rows for a in r), default=INF)

    def trace(self):
        acc = self.ring.zero()
        for i in range(self.n):
            acc = acc + self.rows[i][i]
        return acc

    def __repr__(self):
        body = "; ".join(", ".join(_short(a) for a in r) for r in self.rows)
        return f"Mat[{body}]"

    def with_ring(self, ring) -> "Mat":
        return self.map(ring.move, ring)

    def div_int(self, k: int) -> "Mat":
        return self.map(lambda a: a.div_int(k))

    def galois_act(self, gamma) -> "Mat":
        return self.map(lambda a: a.galois_act(gamma))

    def inverse(self) -> "Mat":
        """Gauss-Jordan inverse with invertible pivots; raises NotAUnit."""
        n = self.n
        one, zero = self.ring.one(), self.ring.zero()
        a = [list(r) + [one if i == j else zero for j in range(n)] for i, r in enumerate(self.rows)]
        for col in range(n):
            piv, inv = None, None
            best = None
            for r in range(col, n):
                x = a[r][col]
                v = x.valuation()
                if v == INF:
                    continue
                if best is None or v < best:
                    try:
                        inv = x.inverse()
                    except NotAUnit:
                        continue
                    piv, best = r, v
                    if v == 0:
                        break
            if piv is None:
                raise NotAUnit("matrix is not invertible at this precision")
            inv = a[piv][col].inverse()
            a[col], a[piv] = a[piv], a[col]
            a[col] = [x * inv for x in a[col]]
            for r in range(n):
                if r != col:
                    f = a[r][col]
                    if not f.is_storage_zero():
                        a[r] = [x - f * y for x, y in zip(a[r], a[col])]
        return Mat._raw(self.ring, tuple(tuple(r[n:]) for r in a))

    def det(self):
        """Determinant by cofactor expansion over permutations (small n only)."""
        from itertools import permutations
        n = self.n
        total = self.ring.zero()
        for perm in permutations(range(n)):
            sign = _perm_sign(perm)
            term = self.ring.one()
            for i, j in enumerate(perm):
                term = term * self.rows[i][j]
            total = total + term if sign > 0 else total - term
        return total

    def to_json(self, compact: bool = True):
        def enc(a):
            if isinstance(a, Scalar):
                return a.to_compact() if compact else a.to_json()
            return a.to_json(compact=compact)
        return [[enc(a) for a in r] for r in self.rows]

    @classmethod
    def from_json(cls, ring, obj) -> "Mat":
        return cls(ring, obj)


def _short(a) -> str:
    if isinstance(a, Scalar):
        c = a.to_compact()
        return c if isinstance(c, str) else "(" + ",".join(c) + ")"
    return repr(a)


def _perm_sign(perm) -> int:
    sign, seen = 1, [False] * len(perm)
    for i in range(len(perm)):
        if not seen[i]:
            j, length = i, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            if length % 2 == 0:
                sign = -sign
    return sign


def mat(ctx_or_ring, rows) -> Mat:
    """Convenience constructor: ``mat(ctx, [[1, 3], [0, 1]])``."""
    ring = ctx_or_ring if isinstance(ctx_or_ring, (ScalarRing, LaurentRing)) else ScalarRing(ctx_or_ring)
    return Mat(ring, rows)


# ---------------------------------------------------------------------------
# Series
# ---------------------------------------------------------------------------


def _int_matmul(a, b, mod):
    cols = list(zip(*b))
    return [[sum(x * y for x, y in zip(r, c)) % mod for c in cols] for r in a]


def _series(X: Mat, K: int, coeff: Callable[[int], tuple[int, int]], start_power: int) -> Mat:
    """Evaluate sum_{k < K} sign_k * X^(k + start_power) / div_k exactly at storage precision.

    ``coeff(k)`` returns (sign, divisor) for term k.  The computation is done
    with ``extra`` more digits than the storage precision, where ``extra`` is
    the largest p-adic valuation among the divisors, so every division is an
    exact division of an honest numerator.
    """
    ring = X.ring
    ctx = ring.ctx
    p = ctx.p
    extra = max((vp_int(coeff(k)[1], p) for k in range(K)), default=0)
    wide = ring.widened(extra)
    n = X.n
    if isinstance(ring, ScalarRing) and ctx.m == 0:
        mod = wide.ctx.modulus
        x = [[a.coeffs[0] for a in r] for r in X.rows]
        power = [[int(i == j) for j in range(n)] for i in range(n)]
        for _ in range(start_power):
            power = _int_matmul(power, x, mod)
        total = [[0] * n for _ in range(n)]
        for k in range(K):
            sign, div = coeff(k)
            s = vp_int(div, p)
            q = p ** s
            u = pow(div // q, -1, mod) * sign
            for i in range(n):
                for j in range(n):
                    c = power[i][j]
                    if c:
                        if c % q:
                            raise AssertionError("inexact division in series (guard-digit bug)")
                        total[i][j] += (c // q) * u
            power = _int_matmul(power, x, mod)
        out = ctx.modulus
        return Mat._raw(ring, tuple(tuple(Scalar._raw(ctx, (c % out,)) for c in r) for r in total))
    Xw = X.with_ring(wide)
    power = Mat.identity(wide, n)
    for _ in range(start_power):
        power = power @ Xw
    total = Mat.zeros(wide, n)
    for k in range(K):
        sign, div = coeff(k)
        term = power.div_int(div)
        total = total + term if sign > 0 else total - term
        power = power @ Xw
    return total.with_ring(ring)


def _require_valuation(X: Mat, what: str):
    v = X.valuation()
    if v < 1:
        raise ConvergenceViolation(f"{what}: entry valuation {v} < 1")


def exp_terms(ctx) -> int:
    """Number of exp terms: stop at the first k with k - (k-1)/(p-1) >= N + guard."""
    p, target = ctx.p, ctx.M
    k = 0
    while Fraction(k) - Fraction(k - 1, p - 1) < target:
        k += 1
    return k


def log_terms(ctx, shift: int = 0) -> int:
    """First k with (k - shift) - floor(log_p k) >= N + guard."""
    k = 1
    while (k - shift) - ilog(ctx.p, k) < ctx.M:
        k += 1
    return k


def mat_exp(A: Mat) -> Mat:
    """Matrix exponential on p*M_n; the result lies in G_1."""
    _require_valuation(A, "mat_exp")
    K = exp_terms(A.ctx)
    fact = [1]
    for k in range(1, K + 1):
        fact.append(fact[-1] * k)
    return _series(A, K, lambda k: (1, fact[k]), 0)


def mat_log(g: Mat) -> Mat:
    """Matrix logarithm on G_1."""
    X = g - Mat.identity(g.ring, g.n)
    _require_valuation(X, "mat_log")
    K = log_terms(g.ctx)
    return _series(X, K - 1, lambda k: (1 if k % 2 == 0 else -1, k + 1), 1)


def log_quotient(g: Mat) -> Mat:
    """u = f(g - 1) with f(x) = sum_{w>=1} (-1)^(w+1) x^(w-1)/w, so that u (g - 1) = log g."""
    X = g - Mat.identity(g.ring, g.n)
    _require_valuation(X, "log_quotient")
    K = log_terms(g.ctx, shift=1)
    return _series(X, K - 1, lambda k: (1 if k % 2 == 0 else -1, k + 1), 0)


def trim(M: Mat) -> Mat:
    """Drop Laurent monomials whose coefficient vanishes mod p^N.

    The result agrees with M at precision N but no longer carries the guard
    digits of those monomials; use it only where precision N is all that is
    needed (it keeps supports from growing with the guard).
    """
    if not isinstance(M.ring, LaurentRing):
        return M
    q = M.ctx.pN

    def keep(x: RingElement) -> RingElement:
        if all(any(y % q for y in c) for c in x.terms.values()):
            return x
        return x._like({e: c for e, c in x.terms.items() if any(y % q for y in c)})
    return M.map(keep)


def commutator(A: Mat, B: Mat) -> Mat:
    return A @ B - B @ A


def adjoint(g: Mat, A: Mat) -> Mat:
    """g^-1 A g; raises NotAUnit if g is not invertible."""
    return g.inverse() @ A @ g


def level_of(g: Mat):
    """Largest k with g in G_k, i.e. the minimal valuation of g - 1 (N for the identity)."""
    v = (g - Mat.identity(g.ring, g.n)).valuation()
    if v == INF:
        return Fraction(g.ctx.N)
    return Fraction(v)


def in_level(g: Mat, k) -> bool:
    return level_of(g) >= k

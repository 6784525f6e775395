"""Finite-precision arithmetic in Z_p[zeta_{p^m}] and truncated toric Laurent rings.

All values are stored with flat absolute precision: a :class:`Scalar` is a
residue in ``Z[x]/(Phi_{p^m}(x), p^(N+guard))`` and equality is decided
modulo ``p^N``.  A :class:`RingElement` is a finite Laurent polynomial in
``d`` variables whose exponents are rationals with denominator ``p^m`` and
whose coefficients are scalars; the group ``Z_p^d`` acts on it through
``T_j^(a/p^m) -> zeta^(a*gamma_j) T_j^(a/p^m)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import ContextMismatch, NotAUnit, SupportOverflow

INF = math.inf


def vp_int(n: int, p: int) -> float | int:
    """p-adic valuation of an integer (``INF`` for 0)."""
    if n == 0:
        return INF
    n = abs(n)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def ilog(p: int, n: int) -> int:
    """Largest k with p**k <= n, for n >= 1."""
    k, q = 0, p
    while q <= n:
        q *= p
        k += 1
    return k


def clog(p: int, n: int) -> int:
    """Smallest k with p**k >= n, for n >= 1."""
    k, q = 0, 1
    while q < n:
        q *= p
        k += 1
    return k


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def default_guard(p: int, N: int) -> int:
    return -(-N // (p - 2)) + clog(p, N + 1) + 2


def format_valuation(v) -> str:
    if v == INF:
        return "inf"
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


@dataclass(frozen=True)
class PrecisionContext:
    """Precision regime ``(p, m, N, guard)``.

    ``N`` is the precision at which results are meaningful; values are stored
    modulo ``p^(N+guard)`` so that series evaluation has room for the
    denominators ``k!`` and ``k``.
    """

    p: int
    N: int
    m: int = 0
    guard: int | None = None

    def __post_init__(self):
        p, N, m = self.p, self.N, self.m
        if not isinstance(p, int) or not is_prime(p):
            raise ValueError(f"p must be prime, got {p!r}")
        if p == 2:
            raise ValueError("p = 2 is not supported (exp does not converge on p*M_n)")
        if N < 1:
            raise ValueError("N must be >= 1")
        if m < 0:
            raise ValueError("m must be >= 0")
        floor = default_guard(p, N)
        if self.guard is None:
            object.__setattr__(self, "guard", floor)
        elif self.guard < floor:
            raise ValueError(f"guard {self.guard} below the minimum {floor} for p={p}, N={N}")

    @property
    def M(self) -> int:
        """Storage exponent N + guard."""
        return self.N + self.guard

    @cached_property
    def modulus(self) -> int:
        return self.p ** self.M

    @cached_property
    def pN(self) -> int:
        return self.p ** self.N

    @property
    def phi(self) -> int:
        """Degree of Z_p[zeta_{p^m}] over Z_p (the ramification index e)."""
        return 1 if self.m == 0 else (self.p - 1) * self.p ** (self.m - 1)

    e = phi

    @property
    def denom(self) -> int:
        return self.p ** self.m

    def widened(self, extra: int) -> "PrecisionContext":
        return replace(self, guard=self.guard + extra)

    def with_level(self, m: int) -> "PrecisionContext":
        return replace(self, m=m)

    @cached_property
    def _step(self) -> int:
        return self.p ** (self.m - 1) if self.m else 1

    @cached_property
    def _q_poly(self) -> tuple:
        # Q(x) = (Phi(x) - p)/(x - 1), so that p = -(zeta - 1) Q(zeta)
        phi, step = self.phi, self._step
        Phi = [0] * (phi + 1)
        for j in range(self.p):
            Phi[j * step] += 1
        Phi[0] -= self.p
        q = [0] * phi
        acc = 0
        for i in range(phi, 0, -1):
            acc += Phi[i]
            q[i - 1] = acc
        return tuple(q)

    def zeta_power(self, k: int) -> "Scalar":
        if self.m == 0:
            raise ContextMismatch("zeta requires cyclotomic level m >= 1")
        k %= self.denom
        cache = self.__dict__.setdefault("_zeta_cache", {})
        z = cache.get(k)
        if z is None:
            coeffs = [0] * max(k + 1, 1)
            coeffs[k] = 1
            z = cache[k] = Scalar(self, coeffs)
        return z

    def to_json(self) -> dict:
        return {"p": self.p, "m": self.m, "N": self.N, "guard": self.guard}


def _reduce_poly(ctx: PrecisionContext, coeffs: list) -> tuple:
    phi = ctx.phi
    mod = ctx.modulus
    if len(coeffs) > phi:
        step, p = ctx._step, ctx.p
        for k in range(len(coeffs) - 1, phi - 1, -1):
            c = coeffs[k]
            if c:
                base = k - phi
                for j in range(p - 1):
                    coeffs[base + j * step] -= c
        coeffs = coeffs[:phi]
    elif len(coeffs) < phi:
        coeffs = list(coeffs) + [0] * (phi - len(coeffs))
    return tuple(c % mod for c in coeffs)


def _mul_coeffs(ctx: PrecisionContext, a: tuple, b: tuple) -> tuple:
    if ctx.m == 0:
        return ((a[0] * b[0]) % ctx.modulus,)
    prod = [0] * (2 * len(a) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    prod[i + j] += x * y
    return _reduce_poly(ctx, prod)


def _check_ctx(a, b):
    if a.ctx != b.ctx:
        raise ContextMismatch(f"{a.ctx} vs {b.ctx}")


class Scalar:
    """Element of Z[zeta_{p^m}]/(p^(N+guard)), compared modulo p^N."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: PrecisionContext, coeffs: Iterable[int]):
        if isinstance(coeffs, int):
            coeffs = [coeffs]
        self.ctx = ctx
        self.coeffs = _reduce_poly(ctx, list(coeffs))

    @classmethod
    def _raw(cls, ctx, coeffs: tuple) -> "Scalar":
        obj = object.__new__(cls)
        obj.ctx = ctx
        obj.coeffs = coeffs
        return obj

    @classmethod
    def from_int(cls, ctx: PrecisionContext, n: int) -> "Scalar":
        return cls(ctx, [n])

    @classmethod
    def zeta(cls, ctx: PrecisionContext, k: int = 1) -> "Scalar":
        return ctx.zeta_power(k)

    def _coerce(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            _check_ctx(self, other)
            return other
        if isinstance(other, int):
            return Scalar(self.ctx, [other])
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        mod = self.ctx.modulus
        return Scalar._raw(self.ctx, tuple((x + y) % mod for x, y in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        mod = self.ctx.modulus
        return Scalar._raw(self.ctx, tuple((x - y) % mod for x, y in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        mod = self.ctx.modulus
        return Scalar._raw(self.ctx, tuple((-x) % mod for x in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, int):
            mod = self.ctx.modulus
            return Scalar._raw(self.ctx, tuple((x * other) % mod for x in self.coeffs))
        if not isinstance(other, Scalar):
            return NotImplemented
        _check_ctx(self, other)
        return Scalar._raw(self.ctx, _mul_coeffs(self.ctx, self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result, base = Scalar.from_int(self.ctx, 1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def reduced(self) -> tuple:
        """Coefficients modulo p^N (the canonical representative at precision)."""
        q = self.ctx.pN
        return tuple(c % q for c in self.coeffs)

    def is_zero(self) -> bool:
        q = self.ctx.pN
        return all(c % q == 0 for c in self.coeffs)

    def is_storage_zero(self) -> bool:
        return not any(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = Scalar(self.ctx, [other])
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.ctx == other.ctx and self.reduced() == other.reduced()

    def __hash__(self):
        return hash((self.ctx, self.reduced()))

    def __repr__(self):
        if self.ctx.m == 0:
            return f"Scalar({self.reduced()[0]} mod {self.ctx.p}^{self.ctx.N})"
        return f"Scalar({list(self.reduced())} mod {self.ctx.p}^{self.ctx.N}, m={self.ctx.m})"

    def with_context(self, ctx: PrecisionContext) -> "Scalar":
        """Reinterpret the stored lift in another context (same p; level may grow)."""
        if ctx.p != self.ctx.p or ctx.m < self.ctx.m:
            raise ContextMismatch(f"cannot move {self.ctx} to {ctx}")
        if ctx.m == self.ctx.m:
            return Scalar._raw(ctx, tuple(c % ctx.modulus for c in self.coeffs))
        stride = ctx.p ** (ctx.m - self.ctx.m)
        coeffs = [0] * ((len(self.coeffs) - 1) * stride + 1)
        for i, c in enumerate(self.coeffs):
            coeffs[i * stride] = c
        return Scalar(ctx, coeffs)

    # -- valuation and division ------------------------------------------

    def _pi_divide_exact(self, y: list) -> list:
        """Divide an integer polynomial (representing an element of pi*O) by pi."""
        p = self.ctx.p
        if self.ctx.m == 0:
            return [y[0] // p]
        phi = self.ctx.phi
        q = [0] * phi
        acc = 0
        for i in range(phi - 1, 0, -1):
            acc += y[i]
            q[i - 1] = acc
        r = acc + y[0]
        rp = r // p
        Q = self.ctx._q_poly
        return [q[i] - rp * Q[i] for i in range(phi)]

    def _split(self):
        """Return (k, j, unit_coeffs) with self = p^k * pi^j * unit and 0 <= j < e."""
        p = self.ctx.p
        k = min(vp_int(c, p) for c in self.coeffs if c)
        pk = p ** k
        y = [c // pk for c in self.coeffs]
        j = 0
        if self.ctx.m:
            while sum(y) % p == 0:
                y = self._pi_divide_exact(y)
                j += 1
        return k, j, y

    def valuation(self):
        """Valuation normalised so that v(p) = 1; ``INF`` when zero at precision N."""
        if self.is_zero():
            return INF
        k, j, _ = self._split()
        return Fraction(k) + Fraction(j, self.ctx.e)

    def pi_valuation(self):
        v = self.valuation()
        return INF if v == INF else int(v * self.ctx.e)

    def is_unit(self) -> bool:
        return self.valuation() == 0

    def inverse(self) -> "Scalar":
        ctx = self.ctx
        p, mod = ctx.p, ctx.modulus
        if ctx.m == 0:
            if self.coeffs[0] % p == 0:
                raise NotAUnit(f"{self!r} is not a unit")
            return Scalar._raw(ctx, (pow(self.coeffs[0], -1, mod),))
        s = sum(self.coeffs) % p
        if s == 0:
            raise NotAUnit(f"{self!r} is not a unit")
        w = Scalar(ctx, [pow(sum(self.coeffs), -1, mod)])
        one = Scalar(ctx, [1])
        for _ in range(2 * (ctx.M * ctx.e).bit_length() + 4):
            err = self * w
            if err.coeffs == one.coeffs:
                return w
            w = w * (2 - err)
        raise AssertionError("Newton inversion failed to converge")

    def div_p(self, s: int) -> "Scalar":
        """Exact division by p^s (coefficientwise)."""
        if s == 0:
            return self
        q = self.ctx.p ** s
        if any(c % q for c in self.coeffs):
            raise ArithmeticError(f"{self!r} is not divisible by p^{s}")
        return Scalar._raw(self.ctx, tuple(c // q for c in self.coeffs))

    def div_int(self, k: int) -> "Scalar":
        p = self.ctx.p
        s = vp_int(k, p)
        u = k // p ** s
        return self.div_p(s) * pow(u, -1, self.ctx.modulus)

    def div_pi(self, j: int = 1) -> "Scalar":
        """Exact division by (zeta - 1)^j (by p^j when m = 0)."""
        if self.ctx.m == 0:
            return self.div_p(j)
        y = list(self.coeffs)
        p = self.ctx.p
        for _ in range(j):
            if sum(y) % p:
                raise ArithmeticError(f"{self!r} is not divisible by pi^{j}")
            y = self._pi_divide_exact(y)
        return Scalar(self.ctx, y)

    def divide(self, other: "Scalar") -> "Scalar":
        """Exact division ``self / other``; requires v(self) >= v(other)."""
        other = self._coerce(other)
        if other.is_storage_zero():
            raise ZeroDivisionError("division by zero")
        if self.is_storage_zero():
            return self
        k, j, unit = other._split()
        u = Scalar(self.ctx, unit).inverse()
        return self.div_p(k).div_pi(j) * u

    # -- serialisation ---------------------------------------------------

    def to_json(self) -> dict:
        c = self.ctx
        return {"p": c.p, "m": c.m, "N": c.N, "coeffs": [str(x) for x in self.reduced()]}

    def to_compact(self):
        r = self.reduced()
        return str(r[0]) if self.ctx.m == 0 else [str(x) for x in r]

    @classmethod
    def from_json(cls, obj, ctx: PrecisionContext | None = None) -> "Scalar":
        if isinstance(obj, dict):
            if ctx is None:
                ctx = PrecisionContext(p=int(obj["p"]), N=int(obj["N"]), m=int(obj.get("m", 0)))
            elif (int(obj["p"]), int(obj.get("m", 0)), int(obj["N"])) != (ctx.p, ctx.m, ctx.N):
                raise ContextMismatch(f"scalar context {obj} differs from {ctx}")
            return cls(ctx, [int(x) for x in obj["coeffs"]])
        if ctx is None:
            raise ValueError("a context is required for compact scalars")
        if isinstance(obj, (int, str)):
            return cls(ctx, [int(obj)])
        if isinstance(obj, list):
            return cls(ctx, [int(x) for x in obj])
        raise TypeError(f"cannot read a scalar from {obj!r}")


def valuation(a) -> Fraction | float:
    return a.valuation()


def scalar_arith(a: Scalar, b: Scalar | None, op: str) -> Scalar:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inverse()
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# Truncated Laurent rings
# ---------------------------------------------------------------------------


def _add_into(ctx, out: dict, e, c: tuple):
    prev = out.get(e)
    if prev is None:
        out[e] = c
    else:
        mod = ctx.modulus
        out[e] = tuple((x + y) % mod for x, y in zip(prev, c))


class RingElement:
    """Finite Laurent polynomial with exponents in (1/p^m)Z inside the box [-E, E]^d.

    ``terms`` maps integer numerator vectors (over the denominator ``p^m``)
    to coefficient tuples of the underlying :class:`Scalar` ring.  Zero
    coefficients are never stored.  ``exact`` is False once a truncating
    multiplication dropped monomials.
    """

    __slots__ = ("ctx", "d", "bound", "terms", "exact")

    def __init__(self, ctx: PrecisionContext, d: int, bound: int,
                 terms: Mapping | None = None, exact: bool = True):
        self.ctx, self.d, self.bound, self.exact = ctx, d, bound, exact
        lim = bound * ctx.denom
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != d:
                raise ValueError(f"exponent {e} has wrong length for d={d}")
            if any(abs(x) > lim for x in e):
                raise SupportOverflow(f"exponent {e} outside the box |e| <= {bound}")
            if isinstance(c, Scalar):
                if c.ctx != ctx:
                    raise ContextMismatch("coefficient context differs")
                c = c.coeffs
            elif isinstance(c, int):
                c = Scalar(ctx, [c]).coeffs
            else:
                c = Scalar(ctx, c).coeffs
            _add_into(ctx, clean, e, c)
        self.terms = {e: c for e, c in clean.items() if any(c)}

    @classmethod
    def _raw(cls, ctx, d, bound, terms, exact=True):
        obj = object.__new__(cls)
        obj.ctx, obj.d, obj.bound, obj.terms, obj.exact = ctx, d, bound, terms, exact
        return obj

    @classmethod
    def zero(cls, ctx, d, bound):
        return cls._raw(ctx, d, bound, {})

    @classmethod
    def constant(cls, ctx, d, bound, c=1):
        c = c if isinstance(c, Scalar) else Scalar(ctx, [c])
        return cls._raw(ctx, d, bound, {(0,) * d: c.coeffs} if any(c.coeffs) else {})

    @classmethod
    def monomial(cls, ctx, d, bound, exps: Sequence, coeff=1):
        """Monomial ``coeff * T^exps``; exponents are rationals with denominator dividing p^m."""
        nums = []
        for x in exps:
            x = Fraction(x) * ctx.denom
            if x.denominator != 1:
                raise ValueError(f"exponent {Fraction(x, ctx.denom)} needs denominator dividing p^{ctx.m}")
            nums.append(int(x))
        return cls(ctx, d, bound, {tuple(nums): coeff})

    # -- helpers -----------------------------------------------------------

    def _like(self, terms, exact=None, bound=None):
        return RingElement._raw(self.ctx, self.d, self.bound if bound is None else bound, terms,
                                self.exact if exact is None else exact)

    def _coerce(self, other):
        if isinstance(other, RingElement):
            if other.ctx != self.ctx or other.d != self.d:
                raise ContextMismatch("ring elements live in different rings")
            return other
        if isinstance(other, (int, Scalar)):
            return RingElement.constant(self.ctx, self.d, self.bound, other)
        return NotImplemented

    def coefficient(self, exps) -> Scalar:
        c = self.terms.get(tuple(exps))
        return Scalar._raw(self.ctx, c) if c is not None else Scalar(self.ctx, [0])

    def items(self):
        for e, c in sorted(self.terms.items()):
            yield e, Scalar._raw(self.ctx, c)

    def constant_term(self) -> Scalar:
        return self.coefficient((0,) * self.d)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            _add_into(self.ctx, out, e, c)
        return self._like({e: c for e, c in out.items() if any(c)},
                          self.exact and other.exact, max(self.bound, other.bound))

    __radd__ = __add__

    def __neg__(self):
        mod = self.ctx.modulus
        return self._like({e: tuple((-x) % mod for x in c) for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s) -> "RingElement":
        if isinstance(s, int):
            s = Scalar(self.ctx, [s])
        out = {}
        for e, c in self.terms.items():
            prod = _mul_coeffs(self.ctx, c, s.coeffs)
            if any(prod):
                out[e] = prod
        return self._like(out)

    def __mul__(self, other):
        if isinstance(other, (int, Scalar)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return laurent_mul(self, other, "strict")

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = RingElement.constant(self.ctx, self.d, self.bound, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- precision-level predicates -----------------------------------------

    def is_zero(self) -> bool:
        q = self.ctx.pN
        return all(x % q == 0 for c in self.terms.values() for x in c)

    def is_storage_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, (int, Scalar)):
            other = RingElement.constant(self.ctx, self.d, self.bound, other)
        if not isinstance(other, RingElement):
            return NotImplemented
        if other.ctx != self.ctx or other.d != self.d:
            return False
        return (self - other).is_zero()

    def __hash__(self):
        q = self.ctx.pN
        items = []
        for e, c in sorted(self.terms.items()):
            r = tuple(x % q for x in c)
            if any(r):
                items.append((e, r))
        return hash((self.ctx, self.d, tuple(items)))

    def valuation(self):
        """Gauss valuation: the minimum valuation of the coefficients."""
        v = INF
        for c in self.terms.values():
            v = min(v, Scalar._raw(self.ctx, c).valuation())
        return v

    def __repr__(self):
        if not self.terms:
            return "RingElement(0)"
        parts = []
        den = self.ctx.denom
        for e, c in self.items():
            if c.is_zero():
                continue
            mono = "*".join(f"T{j + 1}^{format_valuation(Fraction(x, den))}" for j, x in enumerate(e) if x)
            parts.append(f"{c.to_compact()}" + (f"*{mono}" if mono else ""))
        return "RingElement(" + " + ".join(parts) + ")"

    def with_context(self, ctx: PrecisionContext) -> "RingElement":
        if ctx.m != self.ctx.m:
            raise ContextMismatch("tower level must match")
        return RingElement(ctx, self.d, self.bound,
                           {e: Scalar._raw(self.ctx, c).with_context(ctx) for e, c in self.terms.items()},
                           self.exact)

    def map_coeffs(self, f) -> "RingElement":
        out = {}
        for e, c in self.terms.items():
            r = f(Scalar._raw(self.ctx, c))
            if any(r.coeffs):
                out[e] = r.coeffs
        return self._like(out)

    def div_p(self, s: int) -> "RingElement":
        return self.map_coeffs(lambda c: c.div_p(s))

    def div_int(self, k: int) -> "RingElement":
        return self.map_coeffs(lambda c: c.div_int(k))

    def divide(self, s: Scalar) -> "RingElement":
        return self.map_coeffs(lambda c: c.divide(s))

    def inverse(self) -> "RingElement":
        """Inverse of ``u*T^a*(1+h)`` with u a unit and v(h) > 0 (Neumann series)."""
        lead = None
        for e, c in self.terms.items():
            if Scalar._raw(self.ctx, c).is_unit():
                if lead is not None:
                    lead = None
                    break
                lead = e
        if lead is None:
            raise NotAUnit(f"{self!r} has no dominant unit monomial")
        c_inv = Scalar._raw(self.ctx, self.terms[lead]).inverse()
        mono_inv = RingElement._raw(self.ctx, self.d, self.bound,
                                    {tuple(-x for x in lead): c_inv.coeffs})
        h = self * mono_inv - 1
        result = RingElement.constant(self.ctx, self.d, self.bound, 1)
        power = result
        neg_h = -h
        while True:
            power = power * neg_h
            if power.is_storage_zero():
                break
            result = result + power
        return result * mono_inv

    # -- toric structure ------------------------------------------------------

    def galois_act(self, gamma: Sequence[int]) -> "RingElement":
        return galois_act(gamma, self)

    def block_of(self, e) -> tuple:
        den = self.ctx.denom
        return tuple(x % den for x in e)

    def blocks(self) -> dict:
        """Split into character blocks keyed by exponent numerators mod p^m."""
        out: dict = {}
        for e, c in self.terms.items():
            out.setdefault(self.block_of(e), {})[e] = c
        return {i: self._like(t) for i, t in out.items()}

    def split_invariant(self) -> tuple["RingElement", "RingElement"]:
        """Return (integer-exponent part, fractional-exponent part)."""
        den = self.ctx.denom
        inv, rest = {}, {}
        for e, c in self.terms.items():
            (inv if all(x % den == 0 for x in e) else rest)[e] = c
        return self._like(inv), self._like(rest)

    def is_invariant(self) -> bool:
        den = self.ctx.denom
        return all(x % den == 0 for e, c in self.terms.items() for x in e
                   if any(y % self.ctx.pN for y in c))

    def evaluate_at_one(self) -> Scalar:
        """Ring map T_j^(1/p^m) -> 1."""
        total = Scalar(self.ctx, [0])
        for c in self.terms.values():
            total = total + Scalar._raw(self.ctx, c)
        return total

    # -- serialisation ------------------------------------------------------------

    def to_json(self, compact: bool = False) -> dict:
        den = self.ctx.denom
        terms = []
        for e, c in self.items():
            if c.is_zero():
                continue
            exps = []
            for x in e:
                f = Fraction(x, den)
                exps.append([str(f.numerator), str(f.denominator)])
            terms.append({"exp": exps, "coeff": c.to_compact() if compact else c.to_json()})
        return {"terms": terms}

    @classmethod
    def from_json(cls, obj, ctx: PrecisionContext, d: int, bound: int) -> "RingElement":
        if isinstance(obj, (int, str, list)) or (isinstance(obj, dict) and "coeffs" in obj):
            return cls.constant(ctx, d, bound, Scalar.from_json(obj, ctx))
        terms = {}
        for t in obj["terms"]:
            exps = []
            for x in t["exp"]:
                f = Fraction(int(x[0]), int(x[1])) if isinstance(x, list) else Fraction(x)
                num = f * ctx.denom
                if num.denominator != 1:
                    raise ValueError(f"exponent {f} not in (1/p^{ctx.m})Z")
                exps.append(int(num))
            c = Scalar.from_json(t["coeff"], ctx)
            e = tuple(exps)
            terms[e] = terms[e] + c if e in terms else c
        return cls(ctx, d, bound, terms)


def laurent_mul(f: RingElement, g: RingElement, policy: str = "strict") -> RingElement:
    """Exact product; ``strict`` raises SupportOverflow outside the box, ``truncate`` drops and flags."""
    if f.ctx != g.ctx or f.d != g.d:
        raise ContextMismatch("laurent_mul needs a shared context and variable count")
    if policy not in ("strict", "truncate"):
        raise ValueError(f"unknown policy {policy!r}")
    ctx = f.ctx
    bound = max(f.bound, g.bound)
    lim = bound * ctx.denom
    out: dict = {}
    if ctx.m == 0:
        mod = ctx.modulus
        acc: dict = {}
        for ea, (ca,) in f.terms.items():
            for eb, (cb,) in g.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                acc[e] = acc.get(e, 0) + ca * cb
        out = {e: (c % mod,) for e, c in acc.items() if c % mod}
    else:
        for ea, ca in f.terms.items():
            for eb, cb in g.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                _add_into(ctx, out, e, _mul_coeffs(ctx, ca, cb))
        out = {e: c for e, c in out.items() if any(c)}
    exact = f.exact and g.exact
    outside = [e for e in out if any(abs(x) > lim for x in e)]
    if outside:
        if policy == "strict":
            raise SupportOverflow(f"product monomial {outside[0]} leaves the box |e| <= {bound}")
        for e in outside:
            del out[e]
        exact = False
    return RingElement._raw(ctx, f.d, bound, out, exact)


def galois_act(gamma: Sequence[int], f: RingElement) -> RingElement:
    """Act by gamma in Z_p^d: T^a -> zeta^(<a, gamma> p^m) T^a."""
    ctx = f.ctx
    if ctx.m < 1:
        raise ContextMismatch("the toric action needs cyclotomic level m >= 1")
    if len(gamma) != f.d:
        raise ContextMismatch(f"gamma has {len(gamma)} components, ring has d={f.d}")
    den = ctx.denom
    out = {}
    for e, c in f.terms.items():
        k = sum(x * int(g) for x, g in zip(e, gamma)) % den
        out[e] = c if k == 0 else _mul_coeffs(ctx, c, ctx.zeta_power(k).coeffs)
    return f._like(out)


# ---------------------------------------------------------------------------
# Parent objects used by matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScalarRing:
    ctx: PrecisionContext

    def zero(self) -> Scalar:
        return Scalar._raw(self.ctx, (0,) * self.ctx.phi)

    def one(self) -> Scalar:
        return Scalar(self.ctx, [1])

    def coerce(self, x) -> Scalar:
        if isinstance(x, Scalar):
            if x.ctx != self.ctx:
                raise ContextMismatch(f"{x.ctx} vs {self.ctx}")
            return x
        if isinstance(x, int):
            return Scalar(self.ctx, [x])
        if isinstance(x, RingElement):
            raise ContextMismatch("cannot coerce a Laurent element into the scalar ring")
        return Scalar.from_json(x, self.ctx)

    def widened(self, extra: int) -> "ScalarRing":
        return ScalarRing(self.ctx.widened(extra))

    def move(self, x: Scalar) -> Scalar:
        return x.with_context(self.ctx)


@dataclass(frozen=True)
class LaurentRing:
    ctx: PrecisionContext
    d: int
    bound: int

    def zero(self) -> RingElement:
        return RingElement.zero(self.ctx, self.d, self.bound)

    def one(self) -> RingElement:
        return RingElement.constant(self.ctx, self.d, self.bound, 1)

    def coerce(self, x) -> RingElement:
        if isinstance(x, RingElement):
            if x.ctx != self.ctx or x.d != self.d:
                raise ContextMismatch("ring element lives in another ring")
            return x
        if isinstance(x, (int, Scalar)):
            return RingElement.constant(self.ctx, self.d, self.bound, x)
        return RingElement.from_json(x, self.ctx, self.d, self.bound)

    def widened(self, extra: int) -> "LaurentRing":
        return LaurentRing(self.ctx.widened(extra), self.d, self.bound)

    def move(self, x: RingElement) -> RingElement:
        return x.with_context(self.ctx)

"""Small representations of Delta = Z_p^d, twisted 1-cocycles, and a conjugacy oracle.

A representation is given by the images of the chosen generators
``gamma_1 .. gamma_d``.  It is *small* when every image lies in ``G_1`` and
the images commute; at finite precision this is exactly what continuity of
``Delta -> GL_n`` amounts to.

Conjugator convention: ``rep_equivalent(rho1, rho2)`` returns ``C`` with
``C rho2(gamma_i) C^-1 == rho1(gamma_i)``, i.e. ``C rho2 = rho1 C``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Sequence

from .errors import ContextMismatch, NotCommuting, NotSmall, SearchSpaceTooLarge
from .linalg import det_mod_p, kernel_generators, restrict_scalars
from .matfun import Mat, commutator, level_of
from .rings import RingElement, Scalar, ScalarRing


@dataclass(frozen=True)
class DeltaElement:
    """An element sum e_i gamma_i of Z_p^d, stored as integers (reduced mod p^N on use)."""

    exponents: tuple

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(int(e) for e in self.exponents))

    @property
    def d(self) -> int:
        return len(self.exponents)

    def __add__(self, other: "DeltaElement") -> "DeltaElement":
        if other.d != self.d:
            raise ContextMismatch("rank mismatch")
        return DeltaElement(tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    def scaled(self, k: int) -> "DeltaElement":
        return DeltaElement(tuple(k * e for e in self.exponents))

    @classmethod
    def generator(cls, d: int, i: int) -> "DeltaElement":
        return cls(tuple(int(j == i) for j in range(d)))


@dataclass(frozen=True, eq=False)
class SmallRep:
    """Commuting generator images in G_1.  Build it through :func:`validate_rep`."""

    images: tuple

    @property
    def d(self) -> int:
        return len(self.images)

    @property
    def n(self) -> int:
        return self.images[0].n

    @property
    def ring(self):
        return self.images[0].ring

    @property
    def ctx(self):
        return self.images[0].ctx

    def __eq__(self, other):
        return isinstance(other, SmallRep) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def to_json(self) -> dict:
        return {"d": self.d, "images": [g.to_json() for g in self.images]}


def check_commuting(mats: Sequence[Mat], exc=NotCommuting):
    for i, j in itertools.combinations(range(len(mats)), 2):
        c = commutator(mats[i], mats[j])
        if not c.is_zero():
            raise exc(i + 1, j + 1, c)


def validate_rep(images: Sequence[Mat]) -> SmallRep:
    """Return the representation if the images commute and lie in G_1."""
    images = tuple(images)
    if not images:
        raise ValueError("a representation needs at least one generator image")
    ring = images[0].ring
    for g in images:
        if g.ring != ring or g.n != images[0].n:
            raise ContextMismatch("generator images live in different matrix rings")
    for i, g in enumerate(images):
        lvl = level_of(g)
        if lvl < 1:
            raise NotSmall(i + 1, lvl)
    check_commuting(images)
    return SmallRep(images)


def trivial_rep(ring, n: int, d: int) -> SmallRep:
    return SmallRep(tuple(Mat.identity(ring, n) for _ in range(d)))


def evaluate(rho: SmallRep, gamma: DeltaElement | Sequence[int]) -> Mat:
    """rho(gamma) = prod g_i^(e_i), with each e_i reduced mod p^N first."""
    if not isinstance(gamma, DeltaElement):
        gamma = DeltaElement(tuple(gamma))
    if gamma.d != rho.d:
        raise ContextMismatch(f"gamma has rank {gamma.d}, representation has d={rho.d}")
    q = rho.ctx.pN
    out = Mat.identity(rho.ring, rho.n)
    for g, e in zip(rho.images, gamma.exponents):
        e %= q
        if e:
            out = out @ (g ** e)
    return out


# ---------------------------------------------------------------------------
# Twisted cocycles
# ---------------------------------------------------------------------------


def _is_mat(x) -> bool:
    return isinstance(x, Mat)


def _unit_like(x):
    if _is_mat(x):
        return Mat.identity(x.ring, x.n)
    return RingElement.constant(x.ctx, x.d, x.bound, 1)


def _zero_like(x):
    if _is_mat(x):
        return Mat.zeros(x.ring, x.n)
    return RingElement.zero(x.ctx, x.d, x.bound)


def _mul(x, y):
    return x @ y if _is_mat(x) else x * y


def _toric(gamma: Sequence[int], x):
    ctx = x.ctx
    if ctx.m == 0 or all(g % ctx.denom == 0 for g in gamma):
        return x
    if _is_mat(x):
        if isinstance(x.ring, ScalarRing):
            return x
        return x.galois_act(gamma)
    return x.galois_act(gamma)


@dataclass(frozen=True, eq=False)
class TwistedCocycle:
    """Generator values of a 1-cocycle c: Delta -> M.

    ``law`` is ``"multiplicative"`` (values in a matrix group, c(gh) = c(g) g.c(h))
    or ``"additive"`` (values in a module, c(gh) = c(g) + g.c(h)).
    ``action`` is ``"trivial"``, ``"toric"`` (galois_act on the Laurent
    coefficients) or ``"twisted"``: g *_b x = b(g) (g.x) b(g)^-1 where ``twist``
    lists the generator values of the cocycle b for the toric action.
    ``extra`` lists ``(exponent vector, value)`` pairs the cocycle is claimed to
    take on further group elements; the check verifies them too.
    """

    values: tuple
    action: str = "trivial"
    law: str = "multiplicative"
    twist: tuple | None = None
    extra: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "extra", tuple((tuple(e), v) for e, v in self.extra))
        if self.action not in ("trivial", "toric", "twisted"):
            raise ValueError(f"unknown action {self.action!r}")
        if self.law not in ("multiplicative", "additive"):
            raise ValueError(f"unknown law {self.law!r}")
        if self.action == "twisted":
            if self.twist is None or len(self.twist) != len(self.values):
                raise ValueError("a twisted action needs one twist value per generator")
            object.__setattr__(self, "twist", tuple(self.twist))

    @property
    def d(self) -> int:
        return len(self.values)

    def _combine(self, x, y):
        return x + y if self.law == "additive" else _mul(x, y)

    def _neutral(self):
        v = self.values[0]
        return _zero_like(v) if self.law == "additive" else _unit_like(v)

    def twist_at(self, gamma: Sequence[int]):
        """b(gamma) for the twisting cocycle, by walking generators with the toric law."""
        b = _unit_like(self.twist[0])
        pos = [0] * self.d
        for i, e in enumerate(gamma):
            for _ in range(int(e)):
                b = b @ _toric(pos, self.twist[i])
                pos[i] += 1
        return b

    def act(self, gamma: Sequence[int], x):
        if self.action == "trivial":
            return x
        if self.action == "toric":
            return _toric(gamma, x)
        bg = self.twist_at(gamma)
        return bg @ _toric(gamma, x) @ bg.inverse()

    def value_at(self, gamma: Sequence[int]):
        """c(gamma) for non-negative exponents, computed from the generator values by the cocycle law."""
        gamma = tuple(int(e) for e in gamma)
        if len(gamma) != self.d or any(e < 0 for e in gamma):
            raise ValueError("value_at needs a non-negative exponent vector of length d")
        c = self._neutral()
        pos = [0] * self.d
        for i, e in enumerate(gamma):
            for _ in range(e):
                c = self._combine(c, self.act(pos, self.values[i]))
                pos[i] += 1
        return c


def twisted_cocycle_check(c: TwistedCocycle) -> bool:
    """Check c(g_i) g_i.c(g_j) == c(g_j) g_j.c(g_i) for all pairs, plus any declared extra values."""
    d = c.d
    for i, j in itertools.combinations(range(d), 2):
        gi = tuple(int(k == i) for k in range(d))
        gj = tuple(int(k == j) for k in range(d))
        lhs = c._combine(c.values[i], c.act(gi, c.values[j]))
        rhs = c._combine(c.values[j], c.act(gj, c.values[i]))
        if not (lhs == rhs):
            return False
    for gamma, value in c.extra:
        if not (c.value_at(gamma) == value):
            return False
    return True


def coboundary(b, d: int, action: str = "toric", law: str = "multiplicative",
               extra_powers: Sequence[Sequence[int]] = ()) -> TwistedCocycle:
    """The coboundary of b: c(gamma) = b^-1 (gamma.b), or gamma.b - b additively.

    ``extra_powers`` adds explicitly computed values on further group elements
    so that the cocycle law is exercised beyond generator pairs.
    """
    def act(gamma, x):
        return x if action == "trivial" else _toric(gamma, x)

    if law == "multiplicative":
        binv = b.inverse()

        def value(gamma):
            return _mul(binv, act(gamma, b))
    else:
        def value(gamma):
            return act(gamma, b) - b

    gens = [value(tuple(int(k == i) for k in range(d))) for i in range(d)]
    extra = [(tuple(e), value(tuple(e))) for e in extra_powers]
    return TwistedCocycle(tuple(gens), action=action, law=law, extra=tuple(extra))


# ---------------------------------------------------------------------------
# Conjugacy oracle
# ---------------------------------------------------------------------------


def _int_rows(g: Mat) -> list:
    return [[a.coeffs[0] % g.ctx.pN for a in r] for r in g.rows]


def _residues(ctx):
    """All residues of O/p^N as coefficient tuples, ordered lexicographically."""
    q = ctx.pN
    return list(itertools.product(range(q), repeat=ctx.phi))


def _residue_level(ctx, coeffs) -> object:
    return Scalar(ctx, coeffs).valuation()


def exact_search_candidates(ctx, n: int, cap: int):
    """Candidates C ordered by decreasing level of C - 1, then by the residues of C - 1."""
    residues = _residues(ctx)
    total = len(residues) ** (n * n)
    if total > cap:
        raise SearchSpaceTooLarge(f"{total} candidates exceed the cap {cap}")
    vals = {r: min(_residue_level(ctx, r), ctx.N) for r in residues}
    cands = []
    for entries in itertools.product(residues, repeat=n * n):
        lvl = min(vals[r] for r in entries)
        cands.append((-lvl, entries))
    cands.sort()
    return cands


def _candidate_matrix(ring, n, entries) -> Mat:
    ctx = ring.ctx
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            s = Scalar(ctx, entries[i * n + j])
            row.append(s + 1 if i == j else s)
        rows.append(row)
    return Mat(ring, rows)


def _is_invertible(C: Mat) -> bool:
    det = C.det()
    return det.is_unit()


def find_conjugator(targets: Sequence[Mat], sources: Sequence[Mat], mode: str = "certified",
                    cap: int = 10 ** 5, seed: int = 0, stats: dict | None = None):
    """Find an invertible C with C sources[i] == targets[i] C for all i, or None."""
    if len(targets) != len(sources):
        raise ContextMismatch("tuples of different length")
    ring = targets[0].ring
    if not isinstance(ring, ScalarRing):
        raise SearchSpaceTooLarge("conjugacy search needs a finite scalar coefficient ring")
    n = targets[0].n
    if mode == "exact-search":
        return _exact_search(targets, sources, ring, n, cap, stats)
    if mode == "certified":
        return _certified(targets, sources, ring, n, cap, seed, stats)
    raise ValueError(f"unknown mode {mode!r}")


def _exact_search(targets, sources, ring, n, cap, stats):
    ctx = ring.ctx
    cands = exact_search_candidates(ctx, n, cap)
    if ctx.m == 0:
        q, p = ctx.pN, ctx.p
        T = [_int_rows(g) for g in targets]
        S = [_int_rows(g) for g in sources]
        tried = 0
        for _, entries in cands:
            tried += 1
            C = [[entries[i * n + j][0] + (i == j) for j in range(n)] for i in range(n)]
            if det_mod_p(C, p) == 0:
                continue
            ok = True
            for t, s in zip(T, S):
                for i in range(n):
                    for j in range(n):
                        lhs = sum(C[i][k] * s[k][j] for k in range(n))
                        rhs = sum(t[i][k] * C[k][j] for k in range(n))
                        if (lhs - rhs) % q:
                            ok = False
                            break
                    if not ok:
                        break
                if not ok:
                    break
            if ok:
                if stats is not None:
                    stats["candidates"] = stats.get("candidates", 0) + tried
                return Mat(ring, C)
        if stats is not None:
            stats["candidates"] = stats.get("candidates", 0) + tried
        return None
    tried = 0
    for _, entries in cands:
        tried += 1
        C = _candidate_matrix(ring, n, entries)
        if not _is_invertible(C):
            continue
        if all((C @ s) == (t @ C) for t, s in zip(targets, sources)):
            if stats is not None:
                stats["candidates"] = stats.get("candidates", 0) + tried
            return C
    if stats is not None:
        stats["candidates"] = stats.get("candidates", 0) + tried
    return None


def _certified(targets, sources, ring, n, cap, seed, stats):
    """Solve C S_i - T_i C = 0 over O/p^N, then look for a solution invertible mod pi."""
    ctx = ring.ctx
    p, N, phi = ctx.p, ctx.N, ctx.phi
    q = ctx.pN
    zero = ring.zero()
    # Unknowns: the n*n entries of C, each a vector of phi coordinates.
    blocks = []
    for t, s in zip(targets, sources):
        # Linear map C -> C s - t C as an (n^2 x n^2) matrix over O, columns indexed by E_ab.
        rows = [[zero] * (n * n) for _ in range(n * n)]
        for a in range(n):
            for b in range(n):
                col = a * n + b
                # (E_ab s)_{a j} = s_{b j};  (t E_ab)_{i b} = t_{i a}
                for j in range(n):
                    rows[a * n + j][col] = rows[a * n + j][col] + s.rows[b][j]
                for i in range(n):
                    rows[i * n + b][col] = rows[i * n + b][col] - t.rows[i][a]
        blocks.extend(rows)
    L = restrict_scalars(blocks, ctx)
    gens = kernel_generators(L, p, N, ncols=n * n * phi)

    def to_mat(vec):
        entries = []
        for k in range(n * n):
            entries.append(Scalar(ctx, vec[k * phi:(k + 1) * phi]))
        return Mat(ring, [entries[i * n:(i + 1) * n] for i in range(n)])

    # Reduce to generators whose reductions mod p are F_p-independent.
    basis, reduced = [], []
    for g in gens:
        v = [x % p for x in g]
        for (piv, bv), gv in zip(reduced, basis):
            if v[piv]:
                f = v[piv] * pow(bv[piv], -1, p)
                v = [(x - f * y) % p for x, y in zip(v, bv)]
                g = [(x - f * y) % q for x, y in zip(g, gv)]
        piv = next((k for k, x in enumerate(v) if x), None)
        if piv is not None:
            reduced.append((piv, v))
            basis.append(g)
    dim = len(basis)
    tried = 0

    def attempt(coeffs):
        vec = [sum(c * g[k] for c, g in zip(coeffs, basis)) % q for k in range(n * n * phi)]
        C = to_mat(vec)
        return C if _is_invertible(C) else None

    if dim == 0:
        if stats is not None:
            stats["candidates"] = stats.get("candidates", 0)
        return None
    if p ** dim <= cap:
        it = itertools.product(range(p), repeat=dim)
        for coeffs in it:
            if not any(coeffs):
                continue
            tried += 1
            C = attempt(coeffs)
            if C is not None:
                break
        else:
            C = None
        if stats is not None:
            stats["candidates"] = stats.get("candidates", 0) + tried
        return C
    rng = random.Random(seed)
    for _ in range(cap):
        coeffs = [rng.randrange(p) for _ in range(dim)]
        tried += 1
        C = attempt(coeffs)
        if C is not None:
            if stats is not None:
                stats["candidates"] = stats.get("candidates", 0) + tried
            return C
    raise SearchSpaceTooLarge(f"no invertible solution among {cap} random combinations of {dim} generators")


def rep_equivalent(rho1: SmallRep, rho2: SmallRep, mode: str = "certified",
                   cap: int = 10 ** 5, seed: int = 0, stats: dict | None = None):
    """A conjugator C with rho1(gamma_i) = C rho2(gamma_i) C^-1 for all i, or None."""
    if rho1.d != rho2.d or rho1.n != rho2.n or rho1.ring != rho2.ring:
        raise ContextMismatch("representations of different shape")
    if rho1 == rho2:
        return Mat.identity(rho1.ring, rho1.n)
    return find_conjugator(rho1.images, rho2.images, mode=mode, cap=cap, seed=seed, stats=stats)


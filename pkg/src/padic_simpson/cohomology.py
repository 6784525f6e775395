"""Koszul and Higgs complexes, the comparison map u, and homology over Z/p^N.

Both complexes have degree-k term ``M^(n * C(d, k))`` with basis ``m_a (x) e_I``
for strictly increasing index tuples ``I``.  The differential is

    d(m (x) e_I) = sum_j  X_j m (x) e_I ^ e_j

with ``X_j = rho(gamma_j) - 1`` (group side) or ``X_j = A_j`` (Higgs side).
The new index ``e_j`` is appended on the right and then sorted into place,
which costs the sign ``(-1)^#{i in I : i > j}``.  For d = 2 this gives
``d_1(m_1, m_2) = X_2 m_1 - X_1 m_2``.

Homology is computed over Z/p^N.  Over Z[zeta]/p^N the modules are first
restricted to Z/p^N (free of rank phi(p^m)); the annihilator is then also
reported in the pi-adic normalisation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

from .errors import ContextMismatch, NotAUnit, UnsupportedRing
from .linalg import cokernel_exponents, identity, mult_matrix, restrict_scalars, smith
from .matfun import Mat, log_quotient, mat_log
from .rings import Scalar, ScalarRing, format_valuation
from .smallrep import SmallRep


def wedge_basis(d: int, k: int) -> list:
    return list(itertools.combinations(range(d), k))


def append_sign(I: tuple, j: int) -> int:
    """Sign of e_I ^ e_j after sorting; 0 if j already occurs in I."""
    if j in I:
        return 0
    return -1 if sum(1 for i in I if i > j) % 2 else 1


@dataclass(frozen=True, eq=False)
class ChainComplex:
    """Cochain complex C^0 -> ... -> C^d; ``diffs[k]`` maps C^k to C^(k+1)."""

    ring: object
    ranks: tuple
    diffs: tuple

    @property
    def length(self) -> int:
        return len(self.ranks) - 1

    def is_complex(self) -> bool:
        """d_(k+1) d_k == 0 exactly, for every k."""
        return all((self.diffs[k + 1] @ self.diffs[k]).is_zero() for k in range(len(self.diffs) - 1))

    def direct_sum(self, other: "ChainComplex") -> "ChainComplex":
        if other.ranks.__len__() != self.ranks.__len__() or other.ring != self.ring:
            raise ContextMismatch("complexes of different shape")
        zero = self.ring.zero()
        diffs = []
        for k, (a, b) in enumerate(zip(self.diffs, other.diffs)):
            rows = [list(r) + [zero] * b.ncols for r in a.rows]
            rows += [[zero] * a.ncols + list(r) for r in b.rows]
            diffs.append(Mat._raw(self.ring, tuple(tuple(r) for r in rows)))
        ranks = tuple(x + y for x, y in zip(self.ranks, other.ranks))
        return ChainComplex(self.ring, ranks, tuple(diffs))


@dataclass(frozen=True, eq=False)
class ChainMap:
    """Degreewise maps ``maps[k]: C^k -> D^k``."""

    maps: tuple

    def commutes(self, source: ChainComplex, target: ChainComplex) -> bool:
        return all((self.maps[k + 1] @ source.diffs[k]) == (target.diffs[k] @ self.maps[k])
                   for k in range(len(source.diffs)))

    def is_invertible(self) -> bool:
        for u in self.maps:
            if u.nrows == 0:
                continue
            try:
                u.inverse()
            except NotAUnit:
                return False
        return True


def _koszul(ops: Sequence[Mat], ring, n: int) -> ChainComplex:
    d = len(ops)
    zero = ring.zero()
    bases = [wedge_basis(d, k) for k in range(d + 1)]
    ranks = tuple(n * len(b) for b in bases)
    diffs = []
    for k in range(d):
        src, dst = bases[k], bases[k + 1]
        index = {J: t for t, J in enumerate(dst)}
        rows = [[zero] * ranks[k] for _ in range(ranks[k + 1])]
        for s, I in enumerate(src):
            for j in range(d):
                sign = append_sign(I, j)
                if not sign:
                    continue
                t = index[tuple(sorted(I + (j,)))]
                X = ops[j]
                for a in range(n):
                    for b in range(n):
                        x = X.rows[a][b]
                        rows[t * n + a][s * n + b] = x if sign > 0 else -x
        diffs.append(Mat._raw(ring, tuple(tuple(r) for r in rows)))
    return ChainComplex(ring, ranks, tuple(diffs))


def koszul_complex(rho: SmallRep, n: int | None = None) -> ChainComplex:
    """Group-cohomology complex of Delta with coefficients in rho."""
    n = rho.n if n is None else n
    if n != rho.n:
        raise ContextMismatch(f"module rank {n} differs from representation size {rho.n}")
    one = Mat.identity(rho.ring, n)
    return _koszul([g - one for g in rho.images], rho.ring, n)


def higgs_complex(theta, n: int | None = None) -> ChainComplex:
    """Higgs complex of theta = sum A_j delta_j (accepts a HiggsField or a list of matrices)."""
    coeffs = list(getattr(theta, "coefficients", theta))
    n = coeffs[0].n if n is None else n
    if n != coeffs[0].n:
        raise ContextMismatch(f"module rank {n} differs from matrix size {coeffs[0].n}")
    return _koszul(coeffs, coeffs[0].ring, n)


def _block_diag(ring, blocks: Sequence[Mat]) -> Mat:
    size = sum(b.nrows for b in blocks)
    zero = ring.zero()
    rows = [[zero] * size for _ in range(size)]
    off = 0
    for b in blocks:
        for i in range(b.nrows):
            for j in range(b.ncols):
                rows[off + i][off + j] = b.rows[i][j]
        off += b.nrows
    return Mat._raw(ring, tuple(tuple(r) for r in rows))


def comparison_map(rho: SmallRep) -> ChainMap:
    """u_k = u_(i_1) ... u_(i_k) on the summand e_I, with u_i (rho(gamma_i) - 1) = log rho(gamma_i)."""
    ring, n, d = rho.ring, rho.n, rho.d
    us = [log_quotient(g) for g in rho.images]
    maps = []
    for k in range(d + 1):
        blocks = []
        for I in wedge_basis(d, k):
            u = Mat.identity(ring, n)
            for i in I:
                u = u @ us[i]
            blocks.append(u)
        maps.append(_block_diag(ring, blocks))
    return ChainMap(tuple(maps))


def comparison_higgs(rho: SmallRep) -> list:
    """The Higgs field log rho(gamma_j), matching the target of comparison_map."""
    return [mat_log(g) for g in rho.images]


# ---------------------------------------------------------------------------
# Homology over Z/p^N
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DegreeReport:
    degree: int
    divisors: tuple
    free_rank: int
    annihilator: Fraction
    pi_annihilator: int

    @property
    def length(self) -> int:
        return sum(self.divisors)

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "divisors": [f"p^{f}" for f in self.divisors],
            "annihilator": f"p^{format_valuation(self.annihilator)}",
        }


@dataclass(frozen=True)
class CohomologyReport:
    p: int
    N: int
    degrees: tuple

    def __getitem__(self, k) -> DegreeReport:
        return self.degrees[k]

    def divisor_lists(self) -> list:
        return [r.divisors for r in self.degrees]

    def euler_length(self) -> int:
        return sum((-1) ** r.degree * r.length for r in self.degrees)

    def to_json(self) -> list:
        return [r.to_json() for r in self.degrees]


def _int_matrix(D: Mat) -> list:
    if not isinstance(D.ring, ScalarRing):
        raise UnsupportedRing("homology needs a scalar coefficient ring Z[zeta]/p^N")
    return restrict_scalars(D.rows, D.ring.ctx)


class _Solver:
    """Membership in the column span of an integer matrix over Z/p^N."""

    def __init__(self, A: list, nrows: int, p: int, N: int):
        self.p, self.N, self.nrows = p, N, nrows
        self.q = p ** N
        if A and A[0]:
            self.S = smith(A, p, N)
        else:
            self.S = None

    def contains(self, b: list) -> bool:
        q, p = self.q, self.p
        b = [x % q for x in b]
        if self.S is None:
            return not any(b)
        Ub = [sum(u * x for u, x in zip(row, b)) % q for row in self.S.U]
        for t, y in enumerate(Ub):
            if t < len(self.S.exps):
                if y % (p ** self.S.exps[t]):
                    return False
            elif y:
                return False
        return True


def _degree_homology(Dk: list | None, Dprev: list | None, rank: int, p: int, N: int):
    """Elementary divisors of ker(Dk)/im(Dprev) and kernel generators, over Z/p^N."""
    q = p ** N
    if Dk is None or not Dk:
        a = [N] * rank
        V = identity(rank)
        Vinv = identity(rank)
    else:
        S = smith(Dk, p, N)
        a = list(S.exps) + [N] * (rank - len(S.exps))
        V, Vinv = S.V, S.Vinv
    keep = [t for t in range(rank) if a[t] > 0]
    kernel_gens = [[(V[i][t] * p ** (N - a[t])) % q for i in range(rank)] for t in keep]
    if not keep:
        return [], kernel_gens
    rel = []
    if Dprev is not None and Dprev and Dprev[0]:
        cols = list(zip(*Dprev))
        for col in cols:
            y = [sum(Vinv[t][i] * col[i] for i in range(rank)) % q for t in range(rank)]
            z = []
            for t in keep:
                scale = p ** (N - a[t])
                if y[t] % scale:
                    raise AssertionError("image column is not in the kernel: d^2 != 0")
                z.append((y[t] // scale) % (p ** a[t]))
            rel.append(z)
    for idx, t in enumerate(keep):
        col = [0] * len(keep)
        col[idx] = p ** a[t] % q
        rel.append(col)
    B = [[rel[c][r] for c in range(len(rel))] for r in range(len(keep))]
    divisors, _ = cokernel_exponents(B, p, N, len(keep))
    return sorted(divisors), kernel_gens


def cohomology(c: ChainComplex) -> CohomologyReport:
    """Elementary divisors of every H^k, computed by Smith normal form over Z/p^N."""
    ring = c.ring
    if not isinstance(ring, ScalarRing):
        raise UnsupportedRing("homology needs the chain ring Z/p^N or Z[zeta]/p^N")
    ctx = ring.ctx
    p, N, e = ctx.p, ctx.N, ctx.phi
    ints = [_int_matrix(D) for D in c.diffs]
    ranks = [r * e for r in c.ranks]
    reports = []
    pi_mat = None
    if e > 1:
        pi_mat = mult_matrix(Scalar.zeta(ctx) - 1)
    for k in range(len(ranks)):
        Dk = ints[k] if k < len(ints) else None
        Dprev = ints[k - 1] if k > 0 else None
        divisors, kgens = _degree_homology(Dk, Dprev, ranks[k], p, N)
        free = sum(1 for f in divisors if f == N)
        top = max(divisors, default=0)
        if e == 1:
            pi_ann = top
        else:
            pi_ann = _pi_annihilator(kgens, Dprev, ranks[k], pi_mat, e, p, N, top)
        reports.append(DegreeReport(k, tuple(divisors), free, Fraction(pi_ann, e), pi_ann))
    return CohomologyReport(p, N, tuple(reports))


def _pi_annihilator(kgens, Dprev, rank, pi_mat, e, p, N, top) -> int:
    """Least j with pi^j H = 0, searched between e*(top-1)+1 and e*top."""
    if top == 0:
        return 0
    q = p ** N
    solver = _Solver(Dprev, rank, p, N)
    phi = len(pi_mat)

    def times_pi(v):
        out = []
        for blk in range(0, rank, phi):
            x = v[blk:blk + phi]
            out.extend(sum(pi_mat[i][k] * x[k] for k in range(phi)) % q for i in range(phi))
        return out

    lo = e * (top - 1)
    cur = kgens
    for _ in range(lo):
        cur = [times_pi(v) for v in cur]
    j = lo
    while not all(solver.contains(v) for v in cur):
        cur = [times_pi(v) for v in cur]
        j += 1
    return j


# ---------------------------------------------------------------------------
# Character blocks
# ---------------------------------------------------------------------------


def lift_rep(rho: SmallRep, m: int) -> SmallRep:
    """The same representation over Z[zeta_(p^m)]/p^N."""
    ctx = rho.ctx.with_level(max(m, rho.ctx.m))
    ring = ScalarRing(ctx)
    return SmallRep(tuple(g.map(lambda a: a.with_context(ctx), ring) for g in rho.images))


def character_indices(d: int, p: int, m: int) -> list:
    den = p ** m
    return [tuple(Fraction(k, den) for k in ks) for ks in itertools.product(range(den), repeat=d)]


def character_blocks(rho: SmallRep, m: int) -> list:
    """For every character i with denominator p^m, the Koszul complex of zeta^(i_j p^m) rho(gamma_j)."""
    ctx = rho.ctx
    if ctx.m < m:
        raise ContextMismatch(f"representation lives at level {ctx.m} < {m}; use lift_rep first")
    ring, n = rho.ring, rho.n
    one = Mat.identity(ring, n)
    out = []
    for index in character_indices(rho.d, ctx.p, m):
        ops = []
        for i, g in zip(index, rho.images):
            k = int(i * ctx.denom)
            ops.append(g - one if k == 0 else g.scale(ctx.zeta_power(k)) - one)
        out.append((index, _koszul(ops, ring, n)))
    return out


def tower_complex(blocks: Sequence) -> ChainComplex:
    """The Koszul complex of the tower-level module, assembled as the direct sum of its blocks."""
    total = blocks[0][1]
    for _, c in blocks[1:]:
        total = total.direct_sum(c)
    return total


def expected_ranks(n: int, d: int) -> list:
    return [n * comb(d, k) for k in range(d + 1)]

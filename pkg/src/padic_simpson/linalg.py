"""Smith normal form and module computations over the chain ring Z/p^N.

Matrices are plain lists of lists of Python ints.  Over a chain ring every
ideal is ``(p^e)``, so choosing a pivot of minimal valuation makes it divide
its whole row and column and one elimination sweep per pivot suffices.
"""

from __future__ import annotations

from dataclasses import dataclass

from .rings import PrecisionContext, Scalar, _mul_coeffs, vp_int


def _val(x: int, p: int, N: int) -> int:
    if x == 0:
        return N
    v = vp_int(x, p)
    return N if v >= N else v


@dataclass
class Smith:
    """``U @ A @ V == diag(p^exps)`` modulo p^N, with ``Vinv = V^-1``."""

    U: list
    V: list
    Vinv: list
    exps: list
    nrows: int
    ncols: int


def identity(n: int) -> list:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: list, b: list, mod: int) -> list:
    if not a or not b:
        inner_cols = len(b[0]) if b else 0
        return [[0] * inner_cols for _ in a]
    cols = list(zip(*b))
    return [[sum(x * y for x, y in zip(r, c)) % mod for c in cols] for r in a]


def smith(A: list, p: int, N: int) -> Smith:
    q = p ** N
    r = len(A)
    c = len(A[0]) if r else 0
    a = [[x % q for x in row] for row in A]
    U, V, Vinv = identity(r), identity(c), identity(c)
    exps = []
    for t in range(min(r, c)):
        best, bi, bj = N, -1, -1
        for i in range(t, r):
            row = a[i]
            for j in range(t, c):
                x = row[j]
                if x:
                    v = _val(x, p, N)
                    if v < best:
                        best, bi, bj = v, i, j
                        if v == 0:
                            break
            if best == 0:
                break
        if bi < 0:
            break
        if bi != t:
            a[t], a[bi] = a[bi], a[t]
            U[t], U[bi] = U[bi], U[t]
        if bj != t:
            for row in a:
                row[t], row[bj] = row[bj], row[t]
            for row in V:
                row[t], row[bj] = row[bj], row[t]
            Vinv[t], Vinv[bj] = Vinv[bj], Vinv[t]
        pe = p ** best
        unit = a[t][t] // pe
        uinv = pow(unit, -1, q)
        a[t] = [(x * uinv) % q for x in a[t]]
        U[t] = [(x * uinv) % q for x in U[t]]
        for i in range(t + 1, r):
            x = a[i][t]
            if x:
                f = x // pe
                a[i] = [(y - f * z) % q for y, z in zip(a[i], a[t])]
                U[i] = [(y - f * z) % q for y, z in zip(U[i], U[t])]
        for j in range(t + 1, c):
            x = a[t][j]
            if x:
                f = x // pe
                for row in a:
                    row[j] = (row[j] - f * row[t]) % q
                for row in V:
                    row[j] = (row[j] - f * row[t]) % q
                Vinv[t] = [(y + f * z) % q for y, z in zip(Vinv[t], Vinv[j])]
        exps.append(best)
    exps += [N] * (min(r, c) - len(exps))
    return Smith(U, V, Vinv, exps, r, c)


def kernel_generators(A: list, p: int, N: int, ncols: int | None = None) -> list:
    """Generators (as vectors) of {x : A x = 0} in (Z/p^N)^c."""
    q = p ** N
    if not A:
        c = ncols or 0
        return [[int(i == j) for i in range(c)] for j in range(c)]
    S = smith(A, p, N)
    gens = []
    for t in range(S.ncols):
        if t < len(S.exps):
            e = S.exps[t]
            if e == 0:
                continue
            scale = p ** (N - e)
        else:
            scale = 1
        gens.append([(row[t] * scale) % q for row in S.V])
    return gens


def cokernel_exponents(B: list, p: int, N: int, nrows: int) -> tuple[list, "Smith | None"]:
    """Exponents f with coker(B) = sum Z/p^f over Z/p^N (zeros dropped)."""
    if not B or not B[0]:
        return [N] * nrows, None
    S = smith(B, p, N)
    exps = list(S.exps) + [N] * (nrows - len(S.exps))
    return [f for f in exps if f > 0], S


def det_mod_p(a: list, p: int) -> int:
    n = len(a)
    m = [[x % p for x in row] for row in a]
    det = 1
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col]), None)
        if piv is None:
            return 0
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det = det * m[col][col] % p
        inv = pow(m[col][col], -1, p)
        for r in range(col + 1, n):
            f = m[r][col] * inv % p
            if f:
                m[r] = [(x - f * y) % p for x, y in zip(m[r], m[col])]
    return det % p


def mult_matrix(x: Scalar) -> list:
    """Matrix of multiplication by x on O/p^N in the basis 1, zeta, ..., zeta^(phi-1)."""
    ctx = x.ctx
    phi = ctx.phi
    q = ctx.pN
    cols = []
    for k in range(phi):
        basis = tuple(int(i == k) for i in range(phi))
        cols.append([c % q for c in _mul_coeffs(ctx, x.coeffs, basis)])
    return [[cols[k][i] for k in range(phi)] for i in range(phi)]


def restrict_scalars(rows, ctx: PrecisionContext) -> list:
    """Expand a matrix over O/p^N (Scalar entries) into an integer matrix over Z/p^N."""
    phi = ctx.phi
    if phi == 1:
        q = ctx.pN
        return [[x.coeffs[0] % q for x in row] for row in rows]
    out = []
    for row in rows:
        blocks = [mult_matrix(x) for x in row]
        for i in range(phi):
            out.append([b[i][k] for b in blocks for k in range(phi)])
    return out

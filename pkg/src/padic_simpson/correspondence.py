"""Small Higgs fields versus small representations, and descent of tower-level cocycles.

With the Kronecker cocycle basis the dictionary is simply
``rho(gamma_j) = exp(A_j)`` and ``A_j = log rho(gamma_j)``.  A general basis
``rho_i(gamma_j)`` gives ``rho(gamma_j) = prod_i exp(rho_i(gamma_j) A_i)``.

The descent works on a multiplicative cocycle ``c`` with values in
``GL_n`` of the tower ring ``R_m`` (Laurent polynomials in ``T^(1/p^m)``) for
the toric action.  It produces a gauge ``b`` over ``R_m`` and a homomorphism
``phi`` into ``GL_n(R_0)`` with

    phi(gamma) = b^-1 c(gamma) (gamma . b).

Each step splits ``b^-1 c(gamma_j) gamma_j(b) = phi_j + E_j`` into its
integer-exponent part and its non-trivial character blocks, and kills the
blocks of ``E`` to first order by solving, per block ``i``,

    zeta^(i_j) phi_j Z - Z phi_j = -E_j

for the generator ``j`` whose ``zeta^(i_j) - 1`` has the least valuation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import (ContextMismatch, ConvergenceViolation, DescentStalled, HiggsConditionViolated,
                     NotAMorphism, NotSmall, PrecisionExhausted)
from .matfun import Mat, level_of, mat_exp, mat_log, trim
from .rings import INF, LaurentRing, RingElement, Scalar, ScalarRing, format_valuation
from .smallrep import SmallRep, TwistedCocycle, check_commuting, twisted_cocycle_check, validate_rep


@dataclass(frozen=True, eq=False)
class HiggsField:
    """theta = sum_i A_i (x) delta_i with commuting A_i of valuation >= 1."""

    coefficients: tuple
    labels: tuple = ()

    def __post_init__(self):
        coeffs = tuple(self.coefficients)
        object.__setattr__(self, "coefficients", coeffs)
        if not coeffs:
            raise ValueError("a Higgs field needs at least one coefficient")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"delta_{i + 1}" for i in range(len(coeffs))))
        ring, n = coeffs[0].ring, coeffs[0].n
        for A in coeffs:
            if A.ring != ring or A.n != n:
                raise ContextMismatch("Higgs coefficients live in different matrix rings")
        for i, A in enumerate(coeffs):
            v = A.valuation()
            if v < 1:
                raise ConvergenceViolation(f"A_{i + 1} has valuation {format_valuation(v)} < 1 (not small)")
        check_commuting(coeffs, HiggsConditionViolated)

    @property
    def d(self) -> int:
        return len(self.coefficients)

    @property
    def n(self) -> int:
        return self.coefficients[0].n

    @property
    def ring(self):
        return self.coefficients[0].ring

    def __eq__(self, other):
        return isinstance(other, HiggsField) and self.coefficients == other.coefficients

    def __hash__(self):
        return hash(self.coefficients)

    def conjugate(self, B: Mat) -> "HiggsField":
        """The adjoint orbit point B^-1 theta B."""
        Binv = B.inverse()
        return HiggsField(tuple(Binv @ A @ B for A in self.coefficients), self.labels)

    def to_json(self) -> dict:
        return {"d": self.d, "coefficients": [A.to_json() for A in self.coefficients],
                "labels": list(self.labels)}


@dataclass(frozen=True, eq=False)
class CocycleBasis:
    """values[i][j] = rho_i(gamma_j); must be invertible as a d x d matrix over the fraction field."""

    values: tuple

    def __post_init__(self):
        vals = tuple(tuple(row) for row in self.values)
        object.__setattr__(self, "values", vals)
        d = len(vals)
        if any(len(r) != d for r in vals):
            raise ValueError("cocycle basis must be a square d x d array")

    @property
    def d(self) -> int:
        return len(self.values)

    @classmethod
    def kronecker(cls, d: int) -> "CocycleBasis":
        return cls(tuple(tuple(int(i == j) for j in range(d)) for i in range(d)))

    def as_matrix(self, ring) -> Mat:
        return Mat(ring, [list(r) for r in self.values])

    def check(self, ring):
        det = self.as_matrix(ring).det()
        if det.is_zero():
            raise ValueError("cocycle basis is not invertible")

    def is_kronecker(self) -> bool:
        return all((x == 1) if i == j else (x == 0) for i, r in enumerate(self.values)
                   for j, x in enumerate(r) if isinstance(x, int))


def higgs_to_rep(theta: HiggsField, basis: CocycleBasis | None = None) -> SmallRep:
    """rho(gamma_j) = prod_i exp(rho_i(gamma_j) A_i)."""
    d = theta.d
    basis = CocycleBasis.kronecker(d) if basis is None else basis
    if basis.d != d:
        raise ContextMismatch(f"basis has rank {basis.d}, Higgs field has d={d}")
    ring, n = theta.ring, theta.n
    basis.check(ring)
    images = []
    for j in range(d):
        g = Mat.identity(ring, n)
        for i in range(d):
            r = basis.values[i][j]
            if isinstance(r, int) and r == 0:
                continue
            scaled = theta.coefficients[i] if (isinstance(r, int) and r == 1) else theta.coefficients[i].scale(r)
            g = g @ mat_exp(scaled)
        images.append(g)
    return validate_rep(images)


def rep_to_higgs(rho: SmallRep) -> HiggsField:
    """A_j = log rho(gamma_j); commutativity is re-verified exactly."""
    return HiggsField(tuple(mat_log(g) for g in rho.images))


def transfer_morphism(phi: Mat, source: Sequence, direction: str) -> Mat:
    """Verify that phi intertwines the source pair and its image under the correspondence.

    ``source`` is a pair of HiggsFields (direction ``higgs-to-rep``) or of
    SmallReps (``rep-to-higgs``).  Morphisms go from the first object to the
    second: phi X1_i = X2_i phi.
    """
    first, second = source
    if direction == "higgs-to-rep":
        src = (first.coefficients, second.coefficients)
        rho1, rho2 = higgs_to_rep(first), higgs_to_rep(second)
        dst = (rho1.images, rho2.images)
    elif direction == "rep-to-higgs":
        src = (first.images, second.images)
        th1, th2 = rep_to_higgs(first), rep_to_higgs(second)
        dst = (th1.coefficients, th2.coefficients)
    else:
        raise ValueError(f"unknown direction {direction!r}")
    for side, (xs, ys) in (("source", src), ("target", dst)):
        for i, (x, y) in enumerate(zip(xs, ys)):
            if not ((phi @ x) == (y @ phi)):
                raise NotAMorphism(i + 1, side)
    return phi


# ---------------------------------------------------------------------------
# Descent
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DescentConfig:
    """Step size t (digits targeted per step), torsion allowance, and iteration limits."""

    t: int = 3
    gamma_tors: int = 1
    c_min: Fraction = Fraction(1)
    max_iter: int = 40
    stall_patience: int = 2


@dataclass
class DescentResult:
    rep: SmallRep
    gauge: Mat
    trace: list = field(default_factory=list)
    precision: int = 0
    loss: int = 0
    iterations: int = 0

    def to_json(self) -> dict:
        return {
            "rep": self.rep.to_json(),
            "gauge": self.gauge.to_json(),
            "precision": self.precision,
            "loss": self.loss,
            "iterations": self.iterations,
        }


def _split_mat(M: Mat):
    """(integer-exponent part, dict block -> fractional part) of a matrix over R_m."""
    ring = M.ring
    n = M.n
    zero = ring.zero()
    inv_rows = []
    blocks: dict = {}
    for a, row in enumerate(M.rows):
        inv_row = []
        for b, x in enumerate(row):
            for key, part in x.blocks().items():
                if all(k == 0 for k in key):
                    continue
                blocks.setdefault(key, [[zero] * n for _ in range(n)])[a][b] = part
            inv_row.append(x.split_invariant()[0])
        inv_rows.append(tuple(inv_row))
    inv = Mat._raw(ring, tuple(inv_rows))
    return inv, {k: Mat(ring, v) for k, v in blocks.items()}


def _block_valuation(E: Mat):
    return E.valuation()


def _char_generator(ctx, key: tuple):
    """Generator j minimising v(zeta^(key_j) - 1) among key_j != 0, with that root of unity."""
    best = None
    for j, k in enumerate(key):
        if k % ctx.denom == 0:
            continue
        w = ctx.zeta_power(k) - 1
        v = w.valuation()
        if best is None or v < best[0]:
            best = (v, j, ctx.zeta_power(k), w)
    return best


def _reduce_mod(M: Mat, k: int) -> Mat:
    """Reduce every coefficient modulo p^k (a truncation of the error term to the step target)."""
    ctx = M.ctx
    q = ctx.p ** k

    def red(x: RingElement) -> RingElement:
        return x.map_coeffs(lambda c: Scalar(ctx, [y % q for y in c.coeffs]))
    return M.map(red)


def _solve_block(E: Mat, P: Mat, zk: Scalar, w: Scalar, ctx, max_rounds: int) -> Mat:
    """Fixed point of Z = (-E - zk P Z + Z P) / w."""
    ring = E.ring
    Z = Mat.zeros(ring, E.n)
    negE = -E
    for _ in range(max_rounds):
        rhs = negE - (P @ Z).scale(zk) + Z @ P
        Znew = rhs.map(lambda x: x.divide(w))
        if Znew == Z:
            return Znew
        Z = Znew
    return Z


def _neumann_inverse(Z: Mat, limit: int) -> Mat:
    """(1 + Z)^-1 modulo p^N for Z of positive valuation."""
    one = Mat.identity(Z.ring, Z.n)
    result, power, negZ = one, one, -Z
    for _ in range(limit):
        power = trim(power @ negZ)
        if power.is_zero():
            return result
        result = result + power
    raise PrecisionExhausted("gauge increment too large to invert")


def descend_cocycle(c: TwistedCocycle, config: DescentConfig | None = None) -> DescentResult:
    """Find b and a homomorphism phi into GL_n(R_0) with phi(gamma) = b^-1 c(gamma) gamma(b)."""
    config = DescentConfig() if config is None else config
    if c.action != "toric" or c.law != "multiplicative":
        raise ValueError("descent expects a multiplicative cocycle for the toric action")
    values = list(c.values)
    ring = values[0].ring
    if not isinstance(ring, LaurentRing) or ring.ctx.m < 1:
        raise ContextMismatch("descent needs matrices over a tower ring with m >= 1")
    ctx = ring.ctx
    N, d, n = ctx.N, c.d, values[0].n
    for j, g in enumerate(values):
        lvl = level_of(g)
        if lvl < config.c_min:
            raise NotSmall(j + 1, lvl)
    if not twisted_cocycle_check(c):
        raise DescentStalled(0, None, "input fails the cocycle law")

    gens = [tuple(int(k == j) for k in range(d)) for j in range(d)]
    b = Mat.identity(ring, n)
    cur = [trim(g) for g in values]
    trace = []
    best_val = None
    stalled = 0
    max_rounds = 4 * ctx.M * ctx.e + 8
    for step in range(config.max_iter + 1):
        split = [_split_mat(g) for g in cur]
        phis = [s[0] for s in split]
        keys = sorted({k for s in split for k in s[1]})
        norms = {}
        for key in keys:
            v = min(_block_valuation(s[1][key]) if key in s[1] else INF for s in split)
            if v != INF:
                norms[key] = v
        s_val = min(norms.values(), default=INF)
        trace.append({
            "step": step,
            "blocks": {"/".join(str(k) for k in key): format_valuation(v) for key, v in sorted(norms.items())},
            "obstruction": format_valuation(s_val),
            "precision": N,
        })
        if s_val == INF:
            break
        if step == config.max_iter:
            raise PrecisionExhausted(f"obstruction still of valuation {format_valuation(s_val)} "
                                     f"after {config.max_iter} steps")
        if best_val is not None and s_val <= best_val:
            stalled += 1
            if stalled >= config.stall_patience:
                worst = min(norms, key=lambda k: norms[k])
                raise DescentStalled(step, "/".join(str(k) for k in worst),
                                     f"obstruction valuation {format_valuation(s_val)} does not improve")
        else:
            stalled = 0
            best_val = s_val
        target = min(N, int(s_val) + config.t) if s_val != INF else N
        Z_total = Mat.zeros(ring, n)
        for key in keys:
            choice = _char_generator(ctx, key)
            _, j, zk, w = choice
            E = split[j][1].get(key)
            if E is None:
                continue
            E = _reduce_mod(E, target)
            P = phis[j] - Mat.identity(ring, n)
            Z = _solve_block(E, P, zk, w, ctx, max_rounds)
            Z_total = Z_total + Z
        Z_total = trim(Z_total)
        a = Mat.identity(ring, n) + Z_total
        ainv = _neumann_inverse(Z_total, max_rounds)
        b = trim(b @ a)
        cur = [trim(ainv @ g @ a.galois_act(gam)) for g, gam in zip(cur, gens)]

    phis = [_split_mat(g)[0] for g in cur]
    # Verified precision: b phi_j == c_j gamma_j(b) up to p^prec.
    prec = N
    for g, ph, gam in zip(values, phis, gens):
        diff = b @ ph - g @ b.galois_act(gam)
        v = diff.valuation()
        if v != INF:
            prec = min(prec, int(v))
    rep = validate_rep(phis)
    iterations = len(trace) - 1
    return DescentResult(rep=rep, gauge=b, trace=trace, precision=prec, loss=N - prec,
                         iterations=iterations)


def cocycle_from_hom_and_gauge(psi: Sequence[Mat], b0: Mat, b0inv: Mat | None = None) -> TwistedCocycle:
    """The cocycle gamma -> b0^-1 psi(gamma) gamma(b0), cohomologous to the homomorphism psi.

    Pass ``b0inv`` when it is known in closed form (e.g. exp(-X) for b0 = exp(X));
    inverting a dense Laurent matrix by Neumann series is expensive.
    """
    d = len(psi)
    b0inv = b0.inverse() if b0inv is None else b0inv
    vals = []
    for j, g in enumerate(psi):
        gam = tuple(int(k == j) for k in range(d))
        vals.append(b0inv @ g @ b0.galois_act(gam))
    return TwistedCocycle(tuple(vals), action="toric", law="multiplicative")


def specialize_at_one(M: Mat) -> Mat:
    """Apply the ring map T -> 1 entrywise, landing in the scalar ring."""
    sring = ScalarRing(M.ctx)
    return M.map(lambda x: x.evaluate_at_one(), sring)

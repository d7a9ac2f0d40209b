"""Finite abelian groups, Smith normal form, metric groups and Gauss sums.

The polynomial-time Gauss-sum engine rewrites the summand as a fixed root
of unity raised to an integral quadratic polynomial, makes all variables
range over one modulus, splits by prime powers via the Chinese remainder
theorem, and block-diagonalizes the quadratic part by unimodular p-adic
pivoting into one- and two-variable blocks evaluated by direct summation.
A brute-force twin over all group tuples serves as the independent oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .cyclotomic import CycNum
from .modular_data import InvalidDataError, ModularData, CheckResult, ValidationReport
from .graph_partition import BudgetExceededError, DEFAULT_BUDGET_LOG2, _check_budget


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b) if a and b else max(a, b)


# ----------------------------------------------------------------------
# finite abelian groups


@dataclass(frozen=True)
class FinAbGroup:
    """Product of cyclic groups Z_{n_1} x ... x Z_{n_k}; elements are tuples."""

    orders: tuple[int, ...]

    def __post_init__(self):
        if any(n < 1 for n in self.orders):
            raise ValueError("cyclic orders must be positive")

    @property
    def size(self) -> int:
        out = 1
        for n in self.orders:
            out *= n
        return out

    @property
    def rank(self) -> int:
        return len(self.orders)

    def exponent(self) -> int:
        e = 1
        for n in self.orders:
            e = _lcm(e, n)
        return e

    def zero(self) -> tuple[int, ...]:
        return (0,) * len(self.orders)

    def elements(self) -> list[tuple[int, ...]]:
        return list(itertools.product(*[range(n) for n in self.orders]))

    def add(self, x, y) -> tuple[int, ...]:
        return tuple((a + b) % n for a, b, n in zip(x, y, self.orders))

    def neg(self, x) -> tuple[int, ...]:
        return tuple((-a) % n for a, n in zip(x, self.orders))

    def scale(self, t: int, x) -> tuple[int, ...]:
        return tuple((t * a) % n for a, n in zip(x, self.orders))

    def element_order(self, x) -> int:
        o = 1
        for a, n in zip(x, self.orders):
            o = _lcm(o, n // gcd(a, n))
        return o


@dataclass(frozen=True)
class MetricGroup:
    """Finite abelian group with a quadratic form q(x) = zeta_N^qexp(x).

    The exponent table is total; the bicharacter exponent is derived as
    bexp(x, y) = qexp(x+y) - qexp(x) - qexp(y) mod N.
    """

    group: FinAbGroup
    modulus: int
    qexp: tuple[int, ...]  # indexed by the lexicographic element order

    def __post_init__(self):
        if self.modulus % 2 != 0:
            raise ValueError("modulus must be even")
        if len(self.qexp) != self.group.size:
            raise ValueError("qexp table does not cover the group")

    def index(self, x) -> int:
        idx = 0
        for a, n in zip(x, self.group.orders):
            idx = idx * n + a
        return idx

    def qexp_of(self, x) -> int:
        return self.qexp[self.index(x)] % self.modulus

    def bexp(self, x, y) -> int:
        g = self.group
        return (self.qexp_of(g.add(x, y)) - self.qexp_of(x) - self.qexp_of(y)) % self.modulus

    def q(self, x) -> CycNum:
        return CycNum.zeta(self.modulus, self.qexp_of(x))

    def b(self, x, y) -> CycNum:
        return CycNum.zeta(self.modulus, self.bexp(x, y))


def default_modulus(orders: tuple[int, ...]) -> int:
    """2 * lcm(n_j^2): every quadratic form on the group takes values in mu_N."""
    m = 1
    for n in orders:
        m = _lcm(m, n * n)
    return 2 * m


def validate_metric_group(mg: MetricGroup) -> ValidationReport:
    checks = []
    g = mg.group
    N = mg.modulus
    elems = g.elements()

    checks.append(CheckResult("q(0) = 1", mg.qexp_of(g.zero()) % N == 0))

    neg_witness = next((x for x in elems if mg.qexp_of(g.neg(x)) != mg.qexp_of(x)), None)
    checks.append(CheckResult("q(-x) = q(x)", neg_witness is None, neg_witness))

    # b(x+y, z) = b(x, z) b(y, z); exhaustive for small groups, sampled above.
    bi_witness = None
    if g.size ** 3 <= 1 << 15:
        triples = itertools.product(elems, elems, elems)
    else:
        import random

        rng = random.Random(0)
        triples = (
            (rng.choice(elems), rng.choice(elems), rng.choice(elems)) for _ in range(2000)
        )
    for x, y, z in triples:
        if (mg.bexp(g.add(x, y), z) - mg.bexp(x, z) - mg.bexp(y, z)) % N != 0:
            bi_witness = (x, y, z)
            break
    checks.append(CheckResult("b is bi-additive", bi_witness is None, bi_witness))

    nd_witness = None
    for x in elems:
        if x == g.zero():
            continue
        if all(mg.bexp(x, y) % N == 0 for y in elems):
            nd_witness = x
            break
    checks.append(CheckResult("b is nondegenerate", nd_witness is None, nd_witness))

    return ValidationReport(tuple(checks))


# ----------------------------------------------------------------------
# Smith normal form


def smith_normal_form(M: list[list[int]]) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Return (U, D, V) with U*M*V = D, U and V unimodular, D diagonal
    with each diagonal entry dividing the next."""
    rows = len(M)
    cols = len(M[0]) if rows else 0
    A = [list(r) for r in M]
    U = _identity(rows)
    V = _identity(cols)

    def row_op(i, j, q):  # row_i -= q * row_j
        A[i] = [a - q * b for a, b in zip(A[i], A[j])]
        U[i] = [a - q * b for a, b in zip(U[i], U[j])]

    def col_op(i, j, q):  # col_i -= q * col_j
        for r in range(rows):
            A[r][i] -= q * A[r][j]
        for r in range(cols):
            V[r][i] -= q * V[r][j]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in range(rows):
            A[r][i], A[r][j] = A[r][j], A[r][i]
        for r in range(cols):
            V[r][i], V[r][j] = V[r][j], V[r][i]

    t = 0
    while True:
        pivot = None
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if A[i][j] != 0 and (best is None or abs(A[i][j]) < best):
                    best = abs(A[i][j])
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        while True:
            # clear below and to the right of the pivot
            dirty = False
            for i in range(t + 1, rows):
                if A[i][t] != 0:
                    q = A[i][t] // A[t][t]
                    row_op(i, t, q)
                    if A[i][t] != 0:
                        swap_rows(i, t)
                        dirty = True
            for j in range(t + 1, cols):
                if A[t][j] != 0:
                    q = A[t][j] // A[t][t]
                    col_op(j, t, q)
                    if A[t][j] != 0:
                        swap_cols(j, t)
                        dirty = True
            if dirty:
                continue
            # pivot must divide every remaining entry
            offender = None
            for i in range(t + 1, rows):
                for j in range(t + 1, cols):
                    if A[i][j] % A[t][t] != 0:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            row_op(t, offender, -1)  # add offending row to the pivot row
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
        t += 1
        if t == min(rows, cols):
            break
    return U, A, V


def _identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def invariant_factors(M: list[list[int]]) -> list[int]:
    _, D, _ = smith_normal_form(M)
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]


def _int_matrix_inverse(M: list[list[int]]) -> list[list[int]]:
    """Exact inverse of a unimodular integer matrix."""
    n = len(M)
    aug = [[Fraction(M[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
    out = [[aug[i][n + j] for j in range(n)] for i in range(n)]
    assert all(v.denominator == 1 for row in out for v in row), "matrix is not unimodular"
    return [[int(v) for v in row] for row in out]


def _mat_mul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


# ----------------------------------------------------------------------
# quadratic exponential weights


@dataclass(frozen=True)
class QuadExpWeight:
    """zeta_N raised to an integral polynomial of degree at most two.

    ``orders`` are the cyclic moduli of the variables; the coefficient
    tables are validated so that the value only depends on the residues.
    """

    orders: tuple[int, ...]
    modulus: int
    quad: tuple[tuple[int, ...], ...]  # upper triangular, quad[v][w] for v <= w
    lin: tuple[int, ...]
    const: int = 0

    def __post_init__(self):
        n = len(self.orders)
        N = self.modulus
        if len(self.quad) != n or any(len(r) != n for r in self.quad) or len(self.lin) != n:
            raise ValueError("coefficient tables do not match the variable count")
        for v in range(n):
            for w in range(v):
                if self.quad[v][w] != 0:
                    raise ValueError("quadratic table must be upper triangular")
        # exact shift-invariance: Q(x + m_v e_v) = Q(x) mod N for every x
        for v, m in enumerate(self.orders):
            c = self.quad[v][v]
            if (2 * c * m) % N or (c * m * m + self.lin[v] * m) % N:
                raise ValueError(f"coefficients of variable {v} are incompatible with its order {m}")
            for w in range(v + 1, n):
                if (self.quad[v][w] * m) % N or (self.quad[v][w] * self.orders[w]) % N:
                    raise ValueError(
                        f"cross coefficient ({v},{w}) incompatible with the variable orders"
                    )

    def exponent_at(self, x: tuple[int, ...]) -> int:
        e = self.const
        n = len(self.orders)
        for v in range(n):
            xv = x[v]
            if xv == 0:
                continue
            e += self.quad[v][v] * xv * xv + self.lin[v] * xv
            row = self.quad[v]
            for w in range(v + 1, n):
                if x[w]:
                    e += row[w] * xv * x[w]
        return e % self.modulus

    def evaluate(self, x: tuple[int, ...]) -> CycNum:
        return CycNum.zeta(self.modulus, self.exponent_at(x))


def quadratic_weight_from_tables(
    orders, modulus, quad_entries=None, lin=None, const=0
) -> QuadExpWeight:
    n = len(orders)
    quad = [[0] * n for _ in range(n)]
    for (v, w), c in (quad_entries or {}).items():
        if v > w:
            v, w = w, v
        quad[v][w] = (quad[v][w] + c) % modulus
    linear = [0] * n
    for v, c in enumerate(lin or []):
        linear[v] = c % modulus
    return QuadExpWeight(
        tuple(orders), modulus, tuple(tuple(r) for r in quad), tuple(linear), const % modulus
    )


# ----------------------------------------------------------------------
# the quadratic sum engine


def _valuation(x: int, p: int) -> int:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def _solve_unit_congruence(a: int, b: int, q: int, p: int) -> int:
    """Solve a*s = b (mod q) given v_p(a) <= v_p(b); a, b nonzero mod handling."""
    a %= q
    b %= q
    if b == 0:
        return 0
    e = _valuation(a, p)
    assert _valuation(b, p) >= e, "congruence not solvable"
    unit = a // p ** e
    return (b // p ** e) * pow(unit, -1, q) % q


def _sum_exponents(q: int, exps) -> CycNum:
    counts = [0] * q
    for e in exps:
        counts[e % q] += 1
    return _cyc_from_counts(q, counts)


def _cyc_from_counts(q: int, counts: list[int]) -> CycNum:
    from .cyclotomic import _reduce_int_poly

    return CycNum(q, _reduce_int_poly(list(counts), q), 1)


def _prime_power_sum(q: int, p: int, n: int, quad, lin, const) -> CycNum:
    """sum over (Z_q)^n of zeta_q^(quadratic polynomial), by block pivoting.

    quad is a dense upper-triangular mutable matrix mod q, lin a mutable
    vector mod q.  Returns an element of Q(zeta_q).
    """
    active = list(range(n))
    factors: list[CycNum] = []
    free_count = 0  # number of q-fold linear factors with zero coefficient

    def norm(x):
        return x % q

    while True:
        # a diagonal с with 2c = 0 but c != 0 acts linearly: c z^2 = c z (mod q)
        for v in active:
            c = norm(quad[v][v])
            if c and (2 * c) % q == 0:
                lin[v] = (lin[v] + c) % q
                quad[v][v] = 0

        # minimal p-valuation over the doubled diagonal and the off-diagonal
        # entries; a diagonal attaining the minimum is preferred, which makes
        # the 2x2 case determinant have valuation exactly twice the minimum
        best_diag = None
        best_off = None
        for ai, v in enumerate(active):
            c2 = (2 * quad[v][v]) % q
            if c2:
                val = _valuation(c2, p)
                if best_diag is None or val < best_diag[0]:
                    best_diag = (val, v)
            for w in active[ai + 1 :]:
                g = norm(quad[v][w])
                if g:
                    val = _valuation(g, p)
                    if best_off is None or val < best_off[0]:
                        best_off = (val, v, w)
        if best_diag is None and best_off is None:
            break
        if best_diag is not None and (best_off is None or best_diag[0] <= best_off[0]):
            best = (best_diag[0], "diag", best_diag[1], best_diag[1])
        else:
            best = (best_off[0], "off", best_off[1], best_off[2])

        if best[1] == "diag":
            v = best[2]
            c2 = (2 * quad[v][v]) % q
            for w in active:
                if w == v:
                    continue
                g = (quad[min(v, w)][max(v, w)]) % q
                if g == 0:
                    continue
                s = _solve_unit_congruence(c2, -g, q, p)
                # substitute z_v -> z_v + s z_w
                quad[w][w] = (quad[w][w] + quad[v][v] * s * s + g * s) % q
                quad[min(v, w)][max(v, w)] = 0
                for u in active:
                    if u in (v, w):
                        continue
                    gvu = quad[min(v, u)][max(v, u)] % q
                    if gvu:
                        a, b = min(w, u), max(w, u)
                        quad[a][b] = (quad[a][b] + gvu * s) % q
                lin[w] = (lin[w] + lin[v] * s) % q
            factors.append(
                _sum_exponents(q, ((quad[v][v] * z * z + lin[v] * z) for z in range(q)))
            )
            active.remove(v)
        else:
            v, w = best[2], best[3]
            g_vw = quad[min(v, w)][max(v, w)] % q
            cv2 = (2 * quad[v][v]) % q
            cw2 = (2 * quad[w][w]) % q
            # divide the whole 2x2 system by p^e; the reduced block matrix has
            # unit determinant mod q because the off-diagonal is exactly p^e
            # times a unit while both doubled diagonals are divisible further
            pe = p ** best[0]
            a_r, b_r, c_r = cv2 // pe, g_vw // pe, cw2 // pe
            det_r = (a_r * c_r - b_r * b_r) % q
            inv_det = pow(det_r, -1, q)
            for u in list(active):
                if u in (v, w):
                    continue
                gvu = quad[min(v, u)][max(v, u)] % q
                gwu = quad[min(w, u)][max(w, u)] % q
                if gvu == 0 and gwu == 0:
                    continue
                r1, r2 = -(gvu // pe), -(gwu // pe)
                alpha = inv_det * (c_r * r1 - b_r * r2) % q
                beta = inv_det * (-b_r * r1 + a_r * r2) % q
                assert (cv2 * alpha + g_vw * beta + gvu) % q == 0
                assert (g_vw * alpha + cw2 * beta + gwu) % q == 0
                # substitute z_v -> z_v + alpha z_u, z_w -> z_w + beta z_u
                quad[u][u] = (
                    quad[u][u]
                    + quad[v][v] * alpha * alpha
                    + quad[w][w] * beta * beta
                    + g_vw * alpha * beta
                    + gvu * alpha
                    + gwu * beta
                ) % q
                quad[min(v, u)][max(v, u)] = 0
                quad[min(w, u)][max(w, u)] = 0
                for u2 in active:
                    if u2 in (v, w, u):
                        continue
                    gvu2 = quad[min(v, u2)][max(v, u2)] % q
                    gwu2 = quad[min(w, u2)][max(w, u2)] % q
                    delta = (alpha * gvu2 + beta * gwu2) % q
                    if delta:
                        a, b = min(u, u2), max(u, u2)
                        quad[a][b] = (quad[a][b] + delta) % q
                lin[u] = (lin[u] + alpha * lin[v] + beta * lin[w]) % q
            cv, cw = quad[v][v] % q, quad[w][w] % q
            lv, lw = lin[v] % q, lin[w] % q
            factors.append(
                _sum_exponents(
                    q,
                    (
                        (cv * z1 * z1 + cw * z2 * z2 + g_vw * z1 * z2 + lv * z1 + lw * z2)
                        for z1 in range(q)
                        for z2 in range(q)
                    ),
                )
            )
            active.remove(v)
            active.remove(w)

    # leftover variables are purely linear
    result = CycNum.zeta(q, const % q)
    for v in active:
        l = lin[v] % q
        if l == 0:
            free_count += 1
        else:
            result = result * _sum_exponents(q, (l * z for z in range(q)))
    for f in factors:
        result = result * f
    return result * CycNum.rational(q ** free_count, q)


def evaluate_quadratic_sum(weight: QuadExpWeight) -> CycNum:
    """Exact value of sum over the variable box of the quadratic weight,
    in time polynomial in the number of variables."""
    n = len(weight.orders)
    N = weight.modulus
    if n == 0:
        return CycNum.zeta(N, weight.const)
    # one common modulus M for all variables; the count factor compensates
    M = N
    for m in weight.orders:
        M = _lcm(M, m)
    scale = M // N
    quad = [[weight.quad[v][w] * scale for w in range(n)] for v in range(n)]
    lin = [weight.lin[v] * scale for v in range(n)]
    const = weight.const * scale

    # CRT split of M into prime powers
    parts = []
    m = M
    p = 2
    while p * p <= m:
        if m % p == 0:
            q = 1
            while m % p == 0:
                m //= p
                q *= p
            parts.append((p, q))
        p += 1
    if m > 1:
        parts.append((m, m))

    result = CycNum.one(1)
    for p, q in parts:
        u = pow(M // q, -1, q)
        local_quad = [[(u * quad[v][w]) % q for w in range(n)] for v in range(n)]
        local_lin = [(u * lin[v]) % q for v in range(n)]
        local = _prime_power_sum(q, p, n, local_quad, local_lin, (u * const) % q)
        order = _lcm(result.order, local.order)
        result = result.embed(order) * local.embed(order)

    count_factor = Fraction(1)
    for m_v in weight.orders:
        count_factor *= Fraction(m_v, M)
    return result * CycNum.rational(count_factor, result.order)


def evaluate_quadratic_sum_brute(
    weight: QuadExpWeight, budget_log2: int = DEFAULT_BUDGET_LOG2
) -> CycNum:
    """Direct enumeration twin of evaluate_quadratic_sum, for testing."""
    space = 1
    for m in weight.orders:
        space *= m
    _check_budget(space, budget_log2, f"quadratic sum over {space} tuples")
    N = weight.modulus
    counts = [0] * N
    for x in itertools.product(*[range(m) for m in weight.orders]):
        counts[weight.exponent_at(x)] += 1
    return _cyc_from_counts(N, counts)


# ----------------------------------------------------------------------
# Gauss sums of metric groups


def _metric_polynomial_exponents(mg: MetricGroup) -> tuple[list[int], list[list[int]]]:
    """Diagonal and cross exponents writing qexp as an integral quadratic
    polynomial in the cyclic coordinates; verified against the full table."""
    g = mg.group
    N = mg.modulus
    k = g.rank
    basis = [tuple(1 if i == j else 0 for i in range(k)) for j in range(k)]
    diag = [mg.qexp_of(e) for e in basis]
    cross = [[0] * k for _ in range(k)]
    for j in range(k):
        for l in range(j + 1, k):
            cross[j][l] = mg.bexp(basis[j], basis[l])
    for x in g.elements():
        e = 0
        for j in range(k):
            e += diag[j] * x[j] * x[j]
            for l in range(j + 1, k):
                e += cross[j][l] * x[j] * x[l]
        if (e - mg.qexp_of(x)) % N:
            raise InvalidDataError(
                f"qexp is not a quadratic form (fails polynomial form at {x})"
            )
    return diag, cross


def gauss_sum_bracket(
    mg: MetricGroup, B: list[list[int]], budget_log2: int = DEFAULT_BUDGET_LOG2
) -> CycNum:
    """Brute-force bracket: sum over Lambda^m of the q- and b-weights of B."""
    m = len(B)
    if any(len(row) != m for row in B) or any(
        B[i][j] != B[j][i] for i in range(m) for j in range(m)
    ):
        raise ValueError("linking matrix must be square and symmetric")
    g = mg.group
    N = mg.modulus
    if m == 0:
        return CycNum.one(N)
    _check_budget(g.size ** m, budget_log2, f"Gauss sum over {g.size}^{m} tuples")
    elems = g.elements()
    qe = [mg.qexp_of(x) for x in elems]
    be = [[mg.bexp(x, y) for y in elems] for x in elems]
    counts = [0] * N
    for combo in itertools.product(range(len(elems)), repeat=m):
        e = 0
        for r in range(m):
            brr = B[r][r]
            if brr:
                e += brr * qe[combo[r]]
            row = be[combo[r]]
            for s in range(r + 1, m):
                if B[r][s]:
                    e += B[r][s] * row[combo[s]]
        counts[e % N] += 1
    return _cyc_from_counts(N, counts)


def gauss_sum_fast(mg: MetricGroup, B: list[list[int]]) -> CycNum:
    """Polynomial-time evaluation of the same bracket as gauss_sum_bracket."""
    m = len(B)
    if any(len(row) != m for row in B) or any(
        B[i][j] != B[j][i] for i in range(m) for j in range(m)
    ):
        raise ValueError("linking matrix must be square and symmetric")
    g = mg.group
    N = mg.modulus
    if m == 0:
        return CycNum.one(N)
    diag, cross = _metric_polynomial_exponents(mg)
    k = g.rank
    n = m * k
    orders = tuple(g.orders[j] for _ in range(m) for j in range(k))
    quad: dict[tuple[int, int], int] = {}

    def var(r, j):
        return r * k + j

    for r in range(m):
        brr = B[r][r]
        if brr:
            for j in range(k):
                quad[(var(r, j), var(r, j))] = quad.get((var(r, j), var(r, j)), 0) + brr * diag[j]
                for l in range(j + 1, k):
                    key = (var(r, j), var(r, l))
                    quad[key] = quad.get(key, 0) + brr * cross[j][l]
    for r in range(m):
        for s in range(r + 1, m):
            brs = B[r][s]
            if not brs:
                continue
            for j in range(k):
                key = (var(r, j), var(s, j))
                quad[key] = quad.get(key, 0) + brs * 2 * diag[j]
                for l in range(k):
                    if l == j:
                        continue
                    a, b = var(r, j), var(s, l)
                    key = (min(a, b), max(a, b))
                    quad[key] = quad.get(key, 0) + brs * cross[min(j, l)][max(j, l)]
    weight = quadratic_weight_from_tables(orders, N, quad)
    value = evaluate_quadratic_sum(weight)
    return value.embed(_lcm(value.order, N)) if value.order != N else value


# ----------------------------------------------------------------------
# kernels of homomorphisms between products of cyclic groups


@dataclass(frozen=True)
class IntMatrixModOrders:
    """Integer matrix of a homomorphism from one cyclic-product group to
    another; rows follow the target coordinates, columns the source."""

    source_orders: tuple[int, ...]
    target_orders: tuple[int, ...]
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows, cols = len(self.target_orders), len(self.source_orders)
        if len(self.matrix) != rows or any(len(r) != cols for r in self.matrix):
            raise ValueError("matrix shape does not match the declared groups")
        for u in range(rows):
            for v in range(cols):
                if (self.matrix[u][v] * self.source_orders[v]) % self.target_orders[u]:
                    raise ValueError(
                        f"entry ({u},{v}) does not define a homomorphism on the cyclic orders"
                    )

    @staticmethod
    def homomorphism(source: FinAbGroup, copies: int, target: FinAbGroup, target_copies: int, matrix) -> "IntMatrixModOrders":
        src = tuple(source.orders) * copies
        tgt = tuple(target.orders) * target_copies
        reduced = tuple(
            tuple(matrix[u][v] % tgt[u] for v in range(len(src))) for u in range(len(tgt))
        )
        return IntMatrixModOrders(src, tgt, reduced)

    def in_kernel(self, x: tuple[int, ...]) -> bool:
        return all(
            sum(self.matrix[u][v] * x[v] for v in range(len(x))) % self.target_orders[u] == 0
            for u in range(len(self.target_orders))
        )


def kernel_generators(H: IntMatrixModOrders) -> tuple[list[list[int]], list[int]]:
    """Generators (columns, in source coordinates) and cyclic orders of ker H.

    The kernel lattice K = {x : Mx = 0 mod target orders} is computed from a
    Smith form of the augmented matrix; the quotient K / diag(source orders)
    is put in cyclic form by a second Smith reduction.
    """
    n = len(H.source_orders)
    m = len(H.target_orders)
    if n == 0:
        return [], []
    aug = [list(H.matrix[u]) + [H.target_orders[u] if w == u else 0 for w in range(m)] for u in range(m)]
    U, D, V = smith_normal_form(aug)
    rank = sum(1 for i in range(min(m, n + m)) if D[i][i] != 0)
    kernel_basis = []  # columns of V past the rank, projected to source coords
    for j in range(rank, n + m):
        kernel_basis.append([V[i][j] for i in range(n)])
    assert len(kernel_basis) == n, "kernel of the augmented matrix must have full source rank"
    # B_K columns generate K; diag(source orders) Z^n sits inside K
    BK = [[kernel_basis[j][i] for j in range(n)] for i in range(n)]  # n x n, columns = basis
    BK_inv_diag = _solve_integer_columns(BK, H.source_orders)
    U2, D2, V2 = smith_normal_form(BK_inv_diag)
    U2_inv = _int_matrix_inverse(U2)
    P = _mat_mul(BK, U2_inv)  # columns are the kernel generators
    gens, orders = [], []
    for i in range(n):
        s = D2[i][i]
        if s == 1:
            continue
        gens.append([P[r][i] % H.source_orders[r] for r in range(n)])
        orders.append(s)
    return gens, orders


def _solve_integer_columns(B: list[list[int]], diag: tuple[int, ...]) -> list[list[int]]:
    """Solve B * C = diag(d) for integer C; B is invertible over Q."""
    n = len(B)
    mat = [[Fraction(B[i][j]) for j in range(n)] + [Fraction(diag[i]) if j == i else Fraction(0) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if mat[r][col] != 0)
        mat[col], mat[piv] = mat[piv], mat[col]
        inv = 1 / mat[col][col]
        mat[col] = [v * inv for v in mat[col]]
        for r in range(n):
            if r != col and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [v - f * w for v, w in zip(mat[r], mat[col])]
    C = [[mat[i][n + j] for j in range(n)] for i in range(n)]
    assert all(v.denominator == 1 for row in C for v in row), "lattice containment failed"
    return [[int(v) for v in row] for row in C]


def kernel_quadratic_sum(H: IntMatrixModOrders, Q: QuadExpWeight) -> CycNum:
    """sum of Q over the kernel of H, via the kernel parametrization and the
    polynomial-time quadratic sum engine."""
    if len(Q.orders) != len(H.source_orders) or tuple(Q.orders) != tuple(H.source_orders):
        raise ValueError("weight variables do not match the source group of H")
    gens, orders = kernel_generators(H)
    if not gens:
        return CycNum.zeta(Q.modulus, Q.const)
    pulled = _pullback_weight(Q, gens, orders)
    return evaluate_quadratic_sum(pulled)


def kernel_quadratic_sum_brute(
    H: IntMatrixModOrders, Q: QuadExpWeight, budget_log2: int = DEFAULT_BUDGET_LOG2
) -> CycNum:
    """Direct kernel enumeration twin of kernel_quadratic_sum."""
    space = 1
    for m in H.source_orders:
        space *= m
    _check_budget(space, budget_log2, f"kernel sum over {space} tuples")
    N = Q.modulus
    counts = [0] * N
    for x in itertools.product(*[range(m) for m in H.source_orders]):
        if H.in_kernel(x):
            counts[Q.exponent_at(x)] += 1
    return _cyc_from_counts(N, counts)


def _pullback_weight(Q: QuadExpWeight, gens: list[list[int]], orders: list[int]) -> QuadExpWeight:
    """Compose Q with the linear substitution x = sum_i t_i * gens[i]."""
    N = Q.modulus
    n = len(Q.orders)
    r = len(gens)
    quad: dict[tuple[int, int], int] = {}
    lin = [0] * r
    for v in range(n):
        c = Q.quad[v][v]
        if c:
            for i in range(r):
                pv = gens[i][v]
                if pv:
                    quad[(i, i)] = quad.get((i, i), 0) + c * pv * pv
                    for j in range(i + 1, r):
                        if gens[j][v]:
                            quad[(i, j)] = quad.get((i, j), 0) + 2 * c * pv * gens[j][v]
        for w in range(v + 1, n):
            gvw = Q.quad[v][w]
            if gvw:
                for i in range(r):
                    for j in range(r):
                        a, b = gens[i][v], gens[j][w]
                        if a and b:
                            key = (min(i, j), max(i, j))
                            quad[key] = quad.get(key, 0) + gvw * a * b
        if Q.lin[v]:
            for i in range(r):
                lin[i] += Q.lin[v] * gens[i][v]
    return quadratic_weight_from_tables(orders, N, quad, lin, Q.const)


# ----------------------------------------------------------------------
# pointed modular data from metric groups and back


def pointed_modular_from_metric(mg: MetricGroup, D: CycNum) -> ModularData:
    """Pointed data on the group labels: S = b, theta = q, d = 1, dual = -."""
    g = mg.group
    if D * D != CycNum.rational(g.size, D.order):
        raise InvalidDataError("D^2 must equal the group order")
    N = mg.modulus
    n = _lcm(N, D.order)
    elems = g.elements()
    index = {x: i for i, x in enumerate(elems)}
    dual = tuple(index[g.neg(x)] for x in elems)
    S = tuple(tuple(mg.b(x, y).embed(n) for y in elems) for x in elems)
    theta = tuple(mg.q(x).embed(n) for x in elems)
    return ModularData(conductor=n, size=g.size, dual=dual, S=S, theta=theta, D=D.embed(n))


def metric_gauss_sums(mg: MetricGroup) -> tuple[CycNum, CycNum]:
    """(Delta_plus, Delta_minus) = (sum q(x), sum 1/q(x))."""
    N = mg.modulus
    plus = [0] * N
    minus = [0] * N
    for x in mg.group.elements():
        plus[mg.qexp_of(x)] += 1
        minus[(-mg.qexp_of(x)) % N] += 1
    return _cyc_from_counts(N, plus), _cyc_from_counts(N, minus)


def hyperbolic_center(group: FinAbGroup) -> MetricGroup:
    """Metric group on Lambda x Lambda-hat with the evaluation pairing as q.

    The character group is identified with Lambda coordinatewise; the
    induced pointed data is anomaly-free with Gauss sum |Lambda|.
    """
    k = group.rank
    orders = tuple(group.orders) + tuple(group.orders)
    N = default_modulus(orders)
    g2 = FinAbGroup(orders)
    qexp = []
    for x in g2.elements():
        e = 0
        for j in range(k):
            e += (N // group.orders[j]) * x[j] * x[k + j]
        qexp.append(e % N)
    return MetricGroup(g2, N, tuple(qexp))


def metric_from_pointed(md: ModularData) -> tuple[MetricGroup, list[tuple[int, ...]]]:
    """Recover the metric group of pointed data from fusion and twists.

    Returns the metric group together with the coordinates assigned to each
    label, so values can be transported back.  Small label sets only.
    """
    from .modular_data import fusion_product, is_pointed

    k = md.size
    if k > 64:
        raise InvalidDataError("metric recovery implemented for at most 64 labels")
    pointed, witness = is_pointed(md)
    if not pointed:
        raise InvalidDataError(f"data is not pointed (witness label {witness})")
    table = [[fusion_product(md, i, j) for j in range(k)] for i in range(k)]
    orders_tuple, coords = _cyclic_decomposition(table)
    group = FinAbGroup(orders_tuple)
    N = default_modulus(orders_tuple)
    qexp = [0] * k
    for label in range(k):
        t = md.theta[label]
        o = t.root_of_unity_order()
        if o is None or N % o:
            raise InvalidDataError(f"twist of label {label} is not a compatible root of unity")
        e = next(e for e in range(o) if CycNum.zeta(o, e) == t)
        qexp[label] = e * (N // o)
    table_by_coord = [0] * k
    for label in range(k):
        idx = 0
        for a, n in zip(coords[label], orders_tuple):
            idx = idx * n + a
        table_by_coord[idx] = qexp[label]
    mg = MetricGroup(group, N, tuple(table_by_coord))
    # the recovered pairing must reproduce S up to the dimension signs
    n = _lcm(md.conductor, N)
    for i in range(k):
        for j in range(k):
            expected = md.d(i).embed(n) * md.d(j).embed(n) * mg.b(coords[i], coords[j]).embed(n)
            if md.S[i][j].embed(n) != expected:
                raise InvalidDataError(f"S does not match the recovered bicharacter at ({i},{j})")
    return mg, coords


def _cyclic_decomposition(table: list[list[int]]) -> tuple[tuple[int, ...], list[tuple[int, ...]]]:
    """Cyclic coordinates for an abelian group given by its Cayley table."""
    k = len(table)
    if k == 1:
        return (1,), [(0,)]

    def order_of(x):
        o, y = 1, x
        while y != 0:
            y = table[y][x]
            o += 1
        return o

    orders = {x: order_of(x) for x in range(k)}
    # candidate invariant-factor shapes: multisets of cyclic orders with product k
    def shapes(remaining, max_factor):
        if remaining == 1:
            yield ()
            return
        for d in range(min(remaining, max_factor), 1, -1):
            if remaining % d == 0:
                for rest in shapes(remaining // d, d):
                    yield (d,) + rest

    for shape in shapes(k, k):
        # the largest factor must be the group exponent
        if max(orders.values()) != shape[0]:
            continue
        result = _find_basis(table, orders, shape)
        if result is not None:
            return tuple(shape), result
    raise InvalidDataError("could not decompose the fusion group into cyclic factors")


def _find_basis(table, orders, shape):
    k = len(table)

    def span(gens):
        seen = {0: (0,) * len(gens)}
        frontier = [0]
        while frontier:
            new = []
            for x in frontier:
                cx = seen[x]
                for i, g in enumerate(gens):
                    y = table[x][g]
                    if y not in seen:
                        cy = list(cx)
                        cy[i] += 1
                        seen[y] = tuple(cy)
                        new.append(y)
            frontier = new
        return seen

    def search(gens):
        if len(gens) == len(shape):
            seen = span(gens)
            if len(seen) == k:
                coords = [None] * k
                for x, c in seen.items():
                    coords[x] = tuple(a % n for a, n in zip(c, shape))
                return coords
            return None
        want = shape[len(gens)]
        for cand in range(1, k):
            if orders[cand] == want:
                out = search(gens + [cand])
                if out is not None:
                    return out
        return None

    return search([])


# ----------------------------------------------------------------------
# surgery evaluation for pointed theories


def rt_pointed_surgery(mg: MetricGroup, D: CycNum, sp) -> CycNum:
    """Surgery invariant of a pointed theory from a linking matrix.

    Z = D^(-b0 - 1) * Delta_+^(-b+) * Delta_-^(-b-) * GaussSum(B); the empty
    presentation gives D^(-1).
    """
    from .graph_manifolds import signature_data

    g = mg.group
    if D * D != CycNum.rational(g.size, D.order):
        raise InvalidDataError("D^2 must equal the group order")
    dplus, dminus = metric_gauss_sums(mg)
    if dplus.is_zero() or dminus.is_zero():
        raise InvalidDataError("degenerate Gauss sums; the quadratic form is not nondegenerate")
    b_plus, b_minus, b_zero = signature_data(sp)
    B = sp.matrix if hasattr(sp, "matrix") else sp
    bracket = gauss_sum_fast(mg, [list(row) for row in B])
    n = _lcm(_lcm(bracket.order, D.order), mg.modulus)
    value = bracket.embed(n)
    value = value * D.embed(n).inverse() ** (b_zero + 1)
    value = value * dplus.embed(n).inverse() ** b_plus
    value = value * dminus.embed(n).inverse() ** b_minus
    return value


def tv_pointed_trivial(group: FinAbGroup, target, budget_log2: int = DEFAULT_BUDGET_LOG2) -> CycNum:
    """State-sum invariant of the trivial-associator pointed theory on the
    group, evaluated through its hyperbolic double.

    Graph input goes through both the graph formula and the surgery route,
    which must agree; a linking-matrix presentation goes through surgery.
    """
    from .graph_manifolds import SurgeryPresentation, plumbing_presentation, rt_graph_manifold
    from .graph_partition import Graph

    mg = hyperbolic_center(group)
    D = CycNum.rational(group.size)
    if isinstance(target, Graph):
        md = pointed_modular_from_metric(mg, D)
        via_graph = rt_graph_manifold(md, target, budget_log2=budget_log2)
        via_surgery = rt_pointed_surgery(mg, D, plumbing_presentation(target))
        if via_graph != via_surgery:
            raise RuntimeError(
                "internal inconsistency: graph and surgery routes disagree "
                f"({via_graph} vs {via_surgery})"
            )
        return via_graph
    if isinstance(target, SurgeryPresentation):
        return rt_pointed_surgery(mg, D, target)
    raise TypeError("expected a Graph or a SurgeryPresentation")

"""Numerical modular-category data: container, validator, derived quantities.

A dataset is a finite ordered label set with unit label 0, a duality
permutation, the symmetric S-matrix, the twists, and a chosen square root D
of the global dimension, all living in one ambient cyclotomic field.
Fusion coefficients are recovered from S by the Verlinde sum; pointedness is
decided from the fusion matrices being permutation matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .cyclotomic import CycNum


class InvalidDataError(ValueError):
    """Raised when an operation's precondition on the data fails hard."""


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    witness: object = None

    def __str__(self):
        status = "pass" if self.passed else "FAIL"
        suffix = "" if self.witness is None or self.passed else f" at {self.witness}"
        return f"{self.name}: {status}{suffix}"


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[CheckResult, ...]
    warnings: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def __str__(self):
        lines = [str(c) for c in self.checks]
        lines += [f"warning: {w}" for w in self.warnings]
        return "\n".join(lines)


@dataclass(frozen=True)
class ModularData:
    """Labels are 0..size-1 with unit 0; S, theta, D share the conductor."""

    conductor: int
    size: int
    dual: tuple[int, ...]
    S: tuple[tuple[CycNum, ...], ...]
    theta: tuple[CycNum, ...]
    D: CycNum

    def __post_init__(self):
        k = self.size
        if sorted(self.dual) != list(range(k)):
            raise InvalidDataError("dual is not a permutation of the labels")
        if len(self.S) != k or any(len(row) != k for row in self.S):
            raise InvalidDataError("S is not a square matrix over the labels")
        if len(self.theta) != k:
            raise InvalidDataError("theta does not match the label set")

    @property
    def labels(self) -> range:
        return range(self.size)

    def d(self, i: int) -> CycNum:
        """Quantum dimension d_i = S_{0i}."""
        return self.S[0][i]

    def dims(self) -> tuple[CycNum, ...]:
        return tuple(self.S[0][i] for i in self.labels)

    def global_dim(self) -> CycNum:
        total = CycNum.zero(self.conductor)
        for i in self.labels:
            total = total + self.d(i) * self.d(i)
        return total


def one(md: ModularData) -> CycNum:
    return CycNum.one(md.conductor)


# ----------------------------------------------------------------------
# derived quantities


def gauss_sums(md: ModularData) -> tuple[CycNum, CycNum, CycNum, bool]:
    """(Delta_plus, Delta_minus, anomaly, anomaly_free)."""
    n = md.conductor
    dplus = CycNum.zero(n)
    dminus = CycNum.zero(n)
    for i in md.labels:
        d2 = md.d(i) * md.d(i)
        dplus = dplus + md.theta[i] * d2
        dminus = dminus + md.theta[i].inverse() * d2
    if dminus.is_zero():
        raise InvalidDataError("Delta_minus vanishes; data is not modular")
    anomaly = dplus / dminus
    return dplus, dminus, anomaly, dplus == dminus


def verlinde_fusion(md: ModularData, i: int, j: int, l: int) -> Fraction:
    """Fusion coefficient N_{ij}^l = (1/Dim) sum_a S_ia S_ja S_{l* a} / d_a."""
    n = md.conductor
    total = CycNum.zero(n)
    lstar = md.dual[l]
    for a in md.labels:
        da = md.d(a)
        if da.is_zero():
            raise InvalidDataError(f"d_{a} = 0, Verlinde sum undefined")
        total = total + md.S[i][a] * md.S[j][a] * md.S[lstar][a] / da
    value = total / md.global_dim()
    if not value.is_rational():
        raise InvalidDataError(f"Verlinde value N_{{{i}{j}}}^{l} is not rational: {value}")
    return value.as_fraction()


def fusion_tensor(md: ModularData) -> list[list[list[Fraction]]]:
    k = md.size
    return [[[verlinde_fusion(md, i, j, l) for l in range(k)] for j in range(k)] for i in range(k)]


def is_pointed(md: ModularData) -> tuple[bool, int | None]:
    """True iff every fusion matrix N_i is a permutation matrix.

    The witness, when not pointed, is a label whose fusion row fails the
    exactly-one-target test.
    """
    k = md.size
    for i in md.labels:
        for j in md.labels:
            ones = 0
            for l in md.labels:
                v = verlinde_fusion(md, i, j, l)
                if v == 1:
                    ones += 1
                elif v != 0:
                    return False, i
            if ones != 1:
                return False, i
    return True, None


def fusion_product(md: ModularData, i: int, j: int) -> int:
    """Group product of two labels of pointed data."""
    for l in md.labels:
        if verlinde_fusion(md, i, j, l) == 1:
            return l
    raise InvalidDataError(f"labels {i}, {j} have no fusion product; data not pointed")


# ----------------------------------------------------------------------
# validator


def validate_modular_data(md: ModularData) -> ValidationReport:
    checks: list[CheckResult] = []
    warnings: list[str] = []
    n = md.conductor
    k = md.size

    def check(name, passed, witness=None):
        checks.append(CheckResult(name, passed, witness))
        return passed

    # duality structure
    inv = all(md.dual[md.dual[i]] == i for i in md.labels)
    check("dual is an involution fixing 0", inv and md.dual[0] == 0)

    # S symmetric
    sym_witness = next(
        ((i, j) for i in md.labels for j in md.labels if md.S[i][j] != md.S[j][i]), None
    )
    check("S is symmetric", sym_witness is None, sym_witness)

    # dimensions
    d0 = check("d_0 = 1", md.d(0) == CycNum.one(n))
    nz_witness = next((i for i in md.labels if md.d(i).is_zero()), None)
    dims_ok = check("d_i nonzero", nz_witness is None, nz_witness)
    dd_witness = next((i for i in md.labels if md.d(md.dual[i]) != md.d(i)), None)
    check("d_{i*} = d_i", dd_witness is None, dd_witness)

    # charge conjugation symmetry of S
    cc_witness = next(
        (
            (i, j)
            for i in md.labels
            for j in md.labels
            if md.S[i][md.dual[j]] != md.S[md.dual[i]][j]
        ),
        None,
    )
    check("S_{i,j*} = S_{i*,j}", cc_witness is None, cc_witness)

    # S^2 = Dim * C
    dim = md.global_dim()
    s2_witness = None
    for i in md.labels:
        for j in md.labels:
            entry = CycNum.zero(n)
            for a in md.labels:
                entry = entry + md.S[i][a] * md.S[a][j]
            expected = dim if md.dual[i] == j else CycNum.zero(n)
            if entry != expected:
                s2_witness = (i, j)
                break
        if s2_witness:
            break
    s_invertible = check("S^2 = Dim * C", s2_witness is None, s2_witness)

    # twists
    check("theta_0 = 1", md.theta[0] == CycNum.one(n))
    td_witness = next((i for i in md.labels if md.theta[md.dual[i]] != md.theta[i]), None)
    check("theta_{i*} = theta_i", td_witness is None, td_witness)
    ru_witness = next((i for i in md.labels if md.theta[i].root_of_unity_order() is None), None)
    check("twists are roots of unity", ru_witness is None, ru_witness)

    # Gauss sums and D
    if dims_ok and d0:
        dplus, dminus, _, anomaly_free = gauss_sums(md)
        check("Delta_+ * Delta_- = Dim", dplus * dminus == dim)
        dsq = check("D^2 = Dim", md.D * md.D == dim)
        if anomaly_free and dsq and md.D != dplus:
            warnings.append("anomaly-free data with D != Delta_+; graph-formula evaluators require D = Delta_+")
    else:
        check("Delta_+ * Delta_- = Dim", False, "skipped: degenerate dimensions")
        check("D^2 = Dim", False, "skipped: degenerate dimensions")

    # Verlinde integrality
    if s_invertible and dims_ok:
        int_witness = None
        for i in md.labels:
            for j in md.labels:
                for l in md.labels:
                    v = verlinde_fusion(md, i, j, l)
                    if v.denominator != 1 or v < 0:
                        int_witness = (i, j, l, str(v))
                        break
                if int_witness:
                    break
            if int_witness:
                break
        check("Verlinde coefficients are nonnegative integers", int_witness is None, int_witness)
    else:
        check("Verlinde coefficients are nonnegative integers", False, "skipped: S not invertible")

    return ValidationReport(tuple(checks), tuple(warnings))


# ----------------------------------------------------------------------
# constructions


def with_conductor(md: ModularData, n: int) -> ModularData:
    """Rewrite all scalars over Q(zeta_n); n must be a common multiple."""
    if n == md.conductor:
        return md
    return ModularData(
        conductor=n,
        size=md.size,
        dual=md.dual,
        S=tuple(tuple(x.embed(n) for x in row) for row in md.S),
        theta=tuple(t.embed(n) for t in md.theta),
        D=md.D.embed(n),
    )


def minimal_conductor(md: ModularData) -> int:
    m = 1
    for row in md.S:
        for x in row:
            r = x.reduce_order()
            m = m * r.order // gcd(m, r.order)
    for t in md.theta:
        r = t.reduce_order()
        m = m * r.order // gcd(m, r.order)
    r = md.D.reduce_order()
    return m * r.order // gcd(m, r.order)


def normalize_conductor(md: ModularData) -> ModularData:
    """Shrink the ambient field to the smallest cyclotomic field that works."""
    m = minimal_conductor(md)
    if m == md.conductor:
        return md
    return ModularData(
        conductor=m,
        size=md.size,
        dual=md.dual,
        S=tuple(tuple(x.reduce_order().embed(m) for x in row) for row in md.S),
        theta=tuple(t.reduce_order().embed(m) for t in md.theta),
        D=md.D.reduce_order().embed(m),
    )


def reverse_data(md: ModularData) -> ModularData:
    """Mirror data: S_{ij} -> S_{i,j*}, twists inverted, same duality and D."""
    return ModularData(
        conductor=md.conductor,
        size=md.size,
        dual=md.dual,
        S=tuple(tuple(md.S[i][md.dual[j]] for j in md.labels) for i in md.labels),
        theta=tuple(t.inverse() for t in md.theta),
        D=md.D,
    )


def deligne_product(md1: ModularData, md2: ModularData) -> ModularData:
    """Product data on the label set I x J: Kronecker S, multiplied twists."""
    n = md1.conductor * md2.conductor // gcd(md1.conductor, md2.conductor)
    a, b = with_conductor(md1, n), with_conductor(md2, n)
    k1, k2 = a.size, b.size

    def flat(i, j):
        return i * k2 + j

    size = k1 * k2
    dual = [0] * size
    S = [[None] * size for _ in range(size)]
    theta = [None] * size
    for i in range(k1):
        for j in range(k2):
            dual[flat(i, j)] = flat(a.dual[i], b.dual[j])
            theta[flat(i, j)] = a.theta[i] * b.theta[j]
            for p in range(k1):
                for q in range(k2):
                    S[flat(i, j)][flat(p, q)] = a.S[i][p] * b.S[j][q]
    return ModularData(
        conductor=n,
        size=size,
        dual=tuple(dual),
        S=tuple(tuple(row) for row in S),
        theta=tuple(theta),
        D=a.D * b.D,
    )


def center_of_modular(md: ModularData) -> ModularData:
    """Double of the data: the product with its own reverse; anomaly-free."""
    return deligne_product(md, reverse_data(md))


def trivial_data() -> ModularData:
    unit = CycNum.one(1)
    return ModularData(conductor=1, size=1, dual=(0,), S=((unit,),), theta=(unit,), D=unit)


def data_equal(md1: ModularData, md2: ModularData) -> bool:
    """Entrywise equality irrespective of the ambient conductors."""
    if (md1.size, md1.dual) != (md2.size, md2.dual):
        return False
    if md1.D != md2.D:
        return False
    if any(md1.theta[i] != md2.theta[i] for i in md1.labels):
        return False
    return all(md1.S[i][j] == md2.S[i][j] for i in md1.labels for j in md1.labels)

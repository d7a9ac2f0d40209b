"""Normalized 3-cocycles on finite abelian groups and the dichotomy labels.

The trivializability test evaluates the alternating trilinear form obtained
by antisymmetrizing the cocycle over the six permutations of its arguments;
the class is trivializable exactly when this form is identically one, which
needs checking on generator triples only.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .cyclotomic import CycNum
from .modular_data import CheckResult, ModularData, ValidationReport, is_pointed
from .abelian_gauss import FinAbGroup
from .graph_partition import edge_weight_matrix, is_mbr1, Mbr1Result


_SIGNED_PERMS = (
    ((0, 1, 2), 1),
    ((1, 2, 0), 1),
    ((2, 0, 1), 1),
    ((0, 2, 1), -1),
    ((2, 1, 0), -1),
    ((1, 0, 2), -1),
)


@dataclass(frozen=True)
class Cocycle:
    """Exponent table of a normalized 3-cocycle, omega = zeta_N^table."""

    group: FinAbGroup
    modulus: int
    table: dict[tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]], int]

    def exponent(self, x, y, z) -> int:
        return self.table.get((x, y, z), 0) % self.modulus

    def omega(self, x, y, z) -> CycNum:
        return CycNum.zeta(self.modulus, self.exponent(x, y, z))


def trivial_cocycle(group: FinAbGroup, modulus: int = 2) -> Cocycle:
    return Cocycle(group, modulus, {})


def trilinear_cocycle(group: FinAbGroup, coefficients: dict[tuple[int, int, int], int], modulus: int) -> Cocycle:
    """omega(x, y, z) = zeta_N^(sum c_{jkl} x_j y_k z_l); trilinear forms are
    always cocycles."""
    table = {}
    for x in group.elements():
        for y in group.elements():
            for z in group.elements():
                e = 0
                for (j, k, l), c in coefficients.items():
                    e += c * x[j] * y[k] * z[l]
                if e % modulus:
                    table[(x, y, z)] = e % modulus
    return Cocycle(group, modulus, table)


def validate_cocycle(c: Cocycle, sample_limit: int = 1 << 16, seed: int = 0) -> ValidationReport:
    """Normalization plus the 3-cocycle identity, exhaustive for small
    groups and randomized beyond sample_limit quadruples."""
    g = c.group
    N = c.modulus
    checks = []
    zero = g.zero()

    norm_witness = None
    for x in g.elements():
        for y in g.elements():
            if (
                c.exponent(zero, x, y) % N
                or c.exponent(x, zero, y) % N
                or c.exponent(x, y, zero) % N
            ):
                norm_witness = (x, y)
                break
        if norm_witness:
            break
    checks.append(CheckResult("normalized", norm_witness is None, norm_witness))

    def identity_defect(x, y, z, t):
        lhs = c.exponent(y, z, t) + c.exponent(x, g.add(y, z), t) + c.exponent(x, y, z)
        rhs = c.exponent(g.add(x, y), z, t) + c.exponent(x, y, g.add(z, t))
        return (lhs - rhs) % N

    size = g.size
    witness = None
    if size ** 4 <= sample_limit:
        quads = itertools.product(g.elements(), repeat=4)
    else:
        rng = random.Random(seed)
        elems = g.elements()
        quads = (
            tuple(rng.choice(elems) for _ in range(4)) for _ in range(sample_limit)
        )
    for x, y, z, t in quads:
        if identity_defect(x, y, z, t):
            witness = (x, y, z, t)
            break
    checks.append(CheckResult("3-cocycle identity", witness is None, witness))
    return ValidationReport(tuple(checks))


def psi_exponent(c: Cocycle, x1, x2, x3) -> int:
    args = (x1, x2, x3)
    e = 0
    for perm, sign in _SIGNED_PERMS:
        e += sign * c.exponent(args[perm[0]], args[perm[1]], args[perm[2]])
    return e % c.modulus


def psi_trilinear(c: Cocycle, x1, x2, x3) -> CycNum:
    """The six-term alternating product over the argument permutations."""
    return CycNum.zeta(c.modulus, psi_exponent(c, x1, x2, x3))


def is_trivializable(c: Cocycle) -> tuple[bool, tuple | None]:
    """True iff the alternating form is one on all generator triples.

    Trilinearity reduces the check to the standard generators; for small
    groups all triples are rechecked as a guard.
    """
    g = c.group
    k = g.rank
    basis = [tuple(1 if i == j else 0 for i in range(k)) for j in range(k)]
    for a, b, d in itertools.combinations(range(k), 3):
        if psi_exponent(c, basis[a], basis[b], basis[d]):
            return False, (basis[a], basis[b], basis[d])
    if g.size ** 3 <= 1 << 12:
        for x, y, z in itertools.product(g.elements(), repeat=3):
            if psi_exponent(c, x, y, z):
                return False, (x, y, z)
    return True, None


# ----------------------------------------------------------------------
# dichotomy classifiers


@dataclass(frozen=True)
class Classification:
    problem: str  # "RT" or "TV"
    label: str  # "FP" or "#P-hard"
    criterion: str
    witness: object = None
    mbr1: Mbr1Result | None = None

    def __str__(self):
        out = f"{self.problem}: {self.label} ({self.criterion}"
        if self.witness is not None:
            out += f"; witness {self.witness}"
        if self.mbr1 is not None and not self.mbr1.mbr1 and self.mbr1.violation is not None:
            i, j, i2, j2 = self.mbr1.violation
            out += f"; MBR1 violation at rows {{{i},{i2}}} cols {{{j},{j2}}}"
        return out + ")"


def classify_rt(md: ModularData) -> Classification:
    """Pointed data evaluates by abelian Gauss sums in polynomial time;
    everything else makes surgery evaluation #P-hard."""
    pointed, witness = is_pointed(md)
    mbr1 = is_mbr1(edge_weight_matrix(md))
    if pointed:
        return Classification(
            "RT",
            "FP",
            "pointed: every fusion matrix is a permutation, so surgery invariants "
            "reduce to finite abelian Gauss sums",
            None,
            mbr1,
        )
    return Classification(
        "RT",
        "#P-hard",
        "non-pointed: the edge-weight matrix is not multiplicative-block-rank-one, "
        "so bounded-degree graph evaluation is #P-hard",
        witness,
        mbr1,
    )


def classify_tv(group: FinAbGroup, c: Cocycle) -> Classification:
    """Trivializable pointed input evaluates in polynomial time; otherwise
    the state-sum problem is #P-hard."""
    trivializable, witness = is_trivializable(c)
    if trivializable:
        return Classification(
            "TV",
            "FP",
            "trivializable pointed: the alternating trilinear form vanishes, the "
            "double is pointed and the state sum is a kernel-restricted Gauss sum",
        )
    return Classification(
        "TV",
        "#P-hard",
        "not trivializable: the alternating trilinear form is nontrivial, so the "
        "double is non-pointed",
        witness,
    )


def classify_dichotomy(target, cocycle: Cocycle | None = None) -> Classification:
    if isinstance(target, ModularData):
        return classify_rt(target)
    if isinstance(target, FinAbGroup):
        if cocycle is None:
            raise TypeError("classifying a pointed theory needs its cocycle")
        return classify_tv(target, cocycle)
    raise TypeError("expected modular data or a (group, cocycle) pair")


# ----------------------------------------------------------------------
# coboundaries, for the class-invariance property tests


def coboundary_of_cochain(group: FinAbGroup, modulus: int, eta: dict) -> Cocycle:
    """delta eta for a normalized 2-cochain given by an exponent table."""

    def val(x, y):
        if x == group.zero() or y == group.zero():
            return 0
        return eta.get((x, y), 0)

    table = {}
    for x in group.elements():
        for y in group.elements():
            for z in group.elements():
                e = val(y, z) - val(group.add(x, y), z) + val(x, group.add(y, z)) - val(x, y)
                if e % modulus:
                    table[(x, y, z)] = e % modulus
    return Cocycle(group, modulus, table)


def multiply_cocycles(c1: Cocycle, c2: Cocycle) -> Cocycle:
    if c1.group != c2.group or c1.modulus != c2.modulus:
        raise ValueError("cocycles live on different groups or moduli")
    table = {}
    for x in c1.group.elements():
        for y in c1.group.elements():
            for z in c1.group.elements():
                e = (c1.exponent(x, y, z) + c2.exponent(x, y, z)) % c1.modulus
                if e:
                    table[(x, y, z)] = e
    return Cocycle(c1.group, c1.modulus, table)

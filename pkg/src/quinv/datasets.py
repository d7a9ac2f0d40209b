"""Constructors for the bundled example datasets.

These are the smallest representatives of the behaviors the library
distinguishes: an anomalous pointed theory (semion), an anomaly-free
pointed one (toric code), two non-pointed ones (Fibonacci, Ising), and an
anomaly-free pointed double (doubled semion).  The shipped data files are
generated from these constructors; see quinv.fileio.
"""

from __future__ import annotations

from .cyclotomic import CycNum
from .modular_data import ModularData, center_of_modular, normalize_conductor


def semion() -> ModularData:
    n = 8
    one = CycNum.one(n)
    i = CycNum.zeta(n, 2)
    sqrt2 = CycNum.zeta(n) - CycNum.zeta(n, 3)
    return ModularData(
        conductor=n,
        size=2,
        dual=(0, 1),
        S=((one, one), (one, -one)),
        theta=(one, i),
        D=sqrt2,
    )


def toric_code() -> ModularData:
    # Labels are Z2 x Z2 in lexicographic order; S is the hyperbolic pairing.
    n = 2
    one = CycNum.one(n)

    def b(x, y):
        return -one if (x[0] * y[1] + x[1] * y[0]) % 2 else one

    elems = [(0, 0), (0, 1), (1, 0), (1, 1)]
    S = tuple(tuple(b(x, y) for y in elems) for x in elems)
    theta = tuple(-one if x[0] * x[1] % 2 else one for x in elems)
    return ModularData(
        conductor=n,
        size=4,
        dual=(0, 1, 2, 3),
        S=S,
        theta=theta,
        D=CycNum.rational(2, n),
    )


def fibonacci() -> ModularData:
    # The golden ratio lives in Q(zeta_5) but sqrt(Dim) needs conductor 20.
    n = 20
    one = CycNum.one(n)
    z5 = CycNum.zeta(n, 4)
    phi = one + z5 + z5 ** 4
    i = CycNum.zeta(n, 5)
    # (z5 - z5^4)^2 = -(2 + phi), so D = -i (z5 - z5^4) satisfies D^2 = Dim.
    D = -i * (z5 - z5 ** 4)
    return ModularData(
        conductor=n,
        size=2,
        dual=(0, 1),
        S=((one, phi), (phi, -one)),
        theta=(one, z5 ** 2),
        D=D,
    )


def ising() -> ModularData:
    n = 16
    one = CycNum.one(n)
    sqrt2 = CycNum.zeta(n, 2) + CycNum.zeta(n, 14)
    zero = CycNum.zero(n)
    return ModularData(
        conductor=n,
        size=3,
        dual=(0, 1, 2),
        S=(
            (one, sqrt2, one),
            (sqrt2, zero, -sqrt2),
            (one, -sqrt2, one),
        ),
        theta=(one, CycNum.zeta(n), -one),
        D=CycNum.rational(2, n),
    )


def doubled_semion() -> ModularData:
    return normalize_conductor(center_of_modular(semion()))


BUILTIN = {
    "semion": semion,
    "toric": toric_code,
    "fib": fibonacci,
    "ising": ising,
    "doubled_semion": doubled_semion,
}

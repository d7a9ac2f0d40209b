"""Exact arithmetic in cyclotomic fields Q(zeta_n).

Elements are stored in the power basis 1, z, ..., z^(phi(n)-1) of
Q(zeta_n) = Q[x]/(Phi_n), reduced modulo the n-th cyclotomic polynomial.
Coefficients are rationals kept as an integer numerator vector over a
single positive denominator in lowest terms, so equality of elements of
the same order is a plain tuple comparison and the zero test is exact.
No floating point enters any computation; complex approximations exist
only for display.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence


class OrderMismatchError(ValueError):
    """Raised when two elements of different cyclotomic orders are combined."""


class ZeroDivisionCycError(ZeroDivisionError):
    """Raised on inversion of zero."""


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    assert n >= 1
    result = n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, low degree first, computed by exact division
    of x^n - 1 by the Phi_d for proper divisors d of n."""
    assert n >= 1
    # x^n - 1
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divide_exact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


def _poly_divide_exact(num: list[int], den: list[int]) -> list[int]:
    # Exact division of integer polynomials, den monic up to leading +-1.
    num = list(num)
    deg_n, deg_d = len(num) - 1, len(den) - 1
    lead = den[-1]
    quot = [0] * (deg_n - deg_d + 1)
    for i in range(deg_n - deg_d, -1, -1):
        c = num[i + deg_d]
        if c == 0:
            continue
        assert c % lead == 0
        q = c // lead
        quot[i] = q
        for j, dj in enumerate(den):
            num[i + j] -= q * dj
    assert all(c == 0 for c in num)
    return quot


def _content(nums: Iterable[int]) -> int:
    g = 0
    for v in nums:
        g = gcd(g, v)
        if g == 1:
            return 1
    return g


class CycNum:
    """An element of Q(zeta_n) in canonical reduced form.

    ``num`` is the integer numerator vector of length phi(n) and ``den``
    the common positive denominator; gcd(content(num), den) = 1.
    Instances are immutable and safe to share between threads.
    """

    __slots__ = ("order", "num", "den", "_min_form")

    def __init__(self, order: int, num: Sequence[int], den: int = 1):
        if order < 1:
            raise ValueError("order must be a positive integer")
        phi = euler_phi(order)
        if len(num) != phi:
            raise ValueError(f"expected {phi} coefficients for order {order}, got {len(num)}")
        if den == 0:
            raise ZeroDivisionCycError("zero denominator")
        if den < 0:
            num = [-c for c in num]
            den = -den
        g = gcd(_content(num), den)
        if g > 1:
            num = [c // g for c in num]
            den //= g
        if all(c == 0 for c in num):
            den = 1
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "num", tuple(num))
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "_min_form", None)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("CycNum is immutable")

    # ------------------------------------------------------------------
    # constructors

    @staticmethod
    def rational(value, order: int = 1) -> "CycNum":
        f = Fraction(value)
        phi = euler_phi(order)
        num = [0] * phi
        num[0] = f.numerator
        return CycNum(order, num, f.denominator)

    @staticmethod
    def zero(order: int = 1) -> "CycNum":
        return CycNum(order, [0] * euler_phi(order))

    @staticmethod
    def one(order: int = 1) -> "CycNum":
        return CycNum.rational(1, order)

    @staticmethod
    def zeta(order: int, power: int = 1) -> "CycNum":
        """The root of unity zeta_order^power."""
        power %= order
        poly = [0] * order
        poly[power] = 1
        num, den = _reduce_mod_cyclotomic(poly, [1] * order, order)
        return CycNum(order, num, den)

    # ------------------------------------------------------------------
    # structure

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.num)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.num[1:])

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return Fraction(self.num[0], self.den)

    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self.den) for c in self.num)

    def embed(self, order: int) -> "CycNum":
        """Image under the canonical embedding Q(zeta_n) -> Q(zeta_m), n | m."""
        if order == self.order:
            return self
        if order % self.order != 0:
            raise OrderMismatchError(f"cannot embed order {self.order} into {order}")
        step = order // self.order
        poly = [0] * order
        for i, c in enumerate(self.num):
            poly[i * step] = c
        num, den = _reduce_mod_cyclotomic(poly, [self.den] * order, order)
        return CycNum(order, num, den)

    def reduce_order(self) -> "CycNum":
        """Rewrite over the smallest cyclotomic subfield Q(zeta_m), m | n,
        that contains this element (tested via Galois fixedness)."""
        cached = object.__getattribute__(self, "_min_form")
        if cached is not None:
            return cached
        n = self.order
        best = self
        for m in sorted(_divisors(n)):
            if m == n:
                break
            # fixed by every sigma_t with t = 1 mod m  <=>  lies in Q(zeta_m)
            if all(
                self.galois(t) == self
                for t in range(1, n)
                if gcd(t, n) == 1 and t % m == 1 and t != 1
            ):
                best = _project_to_subfield(self, m)
                if best is not None:
                    break
                best = self
        object.__setattr__(self, "_min_form", best)
        return best

    def galois(self, t: int) -> "CycNum":
        """Galois conjugate sigma_t: zeta -> zeta^t, gcd(t, n) = 1."""
        n = self.order
        t %= n
        if gcd(t, n) != 1:
            raise ValueError(f"sigma_{t} is not a Galois automorphism of Q(zeta_{n})")
        poly = [0] * n
        for i, c in enumerate(self.num):
            poly[(i * t) % n] += c
        num, den = _reduce_mod_cyclotomic(poly, [self.den] * n, n)
        return CycNum(n, num, den)

    def conjugate(self) -> "CycNum":
        """sigma_{-1}, complex conjugation on every embedding."""
        return self.galois(self.order - 1 if self.order > 1 else 1)

    # ------------------------------------------------------------------
    # arithmetic

    def _check_order(self, other: "CycNum") -> None:
        if self.order != other.order:
            raise OrderMismatchError(
                f"mixed cyclotomic orders {self.order} and {other.order}; embed first"
            )

    def __add__(self, other):
        other = _coerce(other, self.order)
        self._check_order(other)
        d = self.den * other.den // gcd(self.den, other.den)
        fa, fb = d // self.den, d // other.den
        num = [a * fa + b * fb for a, b in zip(self.num, other.num)]
        return CycNum(self.order, num, d)

    __radd__ = __add__

    def __neg__(self):
        return CycNum(self.order, [-c for c in self.num], self.den)

    def __sub__(self, other):
        return self + (-_coerce(other, self.order))

    def __rsub__(self, other):
        return _coerce(other, self.order) + (-self)

    def __mul__(self, other):
        other = _coerce(other, self.order)
        self._check_order(other)
        n = self.order
        a, b = self.num, other.num
        prod = [0] * (len(a) + len(b) - 1) if a and b else [0]
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                if bj:
                    prod[i + j] += ai * bj
        num = _reduce_int_poly(prod, n)
        return CycNum(n, num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "CycNum":
        """Multiplicative inverse via extended gcd with Phi_n over Q."""
        if self.is_zero():
            raise ZeroDivisionCycError("inverse of zero")
        n = self.order
        a = [Fraction(c, self.den) for c in self.num]
        phi = [Fraction(c) for c in cyclotomic_polynomial(n)]
        inv = _poly_xgcd_inverse(a, phi)
        den = 1
        for c in inv:
            den = den * c.denominator // gcd(den, c.denominator)
        num = [int(c * den) for c in inv]
        return CycNum(n, num, den)

    def __truediv__(self, other):
        other = _coerce(other, self.order)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _coerce(other, self.order) * self.inverse()

    def __pow__(self, exponent: int) -> "CycNum":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = CycNum.one(self.order)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # ------------------------------------------------------------------
    # comparisons and hashing

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycNum.rational(other, self.order)
        if not isinstance(other, CycNum):
            return NotImplemented
        if self.order == other.order:
            return self.num == other.num and self.den == other.den
        m = self.order * other.order // gcd(self.order, other.order)
        a, b = self.embed(m), other.embed(m)
        return a.num == b.num and a.den == b.den

    def __hash__(self):
        r = self.reduce_order()
        return hash((r.order, r.num, r.den))

    # ------------------------------------------------------------------
    # root-of-unity structure

    def root_of_unity_order(self) -> int | None:
        """Multiplicative order if this is a root of unity, else None.

        In Q(zeta_n) the torsion units form a cyclic group of order n for
        even n and 2n for odd n, so a single power test settles membership.
        """
        n = self.order
        m_max = n if n % 2 == 0 else 2 * n
        if self ** m_max != CycNum.one(n):
            return None
        order = m_max
        for p in _prime_factors(m_max):
            while order % p == 0 and self ** (order // p) == CycNum.one(n):
                order //= p
        return order

    # ------------------------------------------------------------------
    # rendering

    def token(self) -> str:
        """Canonical text form ``n:[c0,c1,...]`` with rationals in lowest terms."""
        parts = []
        for c in self.num:
            if self.den == 1:
                parts.append(str(c))
            else:
                f = Fraction(c, self.den)
                parts.append(str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}")
        return f"{self.order}:[{','.join(parts)}]"

    @staticmethod
    def from_token(text: str) -> "CycNum":
        text = text.strip()
        if ":" not in text:
            # bare rational shorthand
            return CycNum.rational(Fraction(text))
        head, _, body = text.partition(":")
        order = int(head)
        body = body.strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise ValueError(f"malformed cyclotomic token {text!r}")
        inner = body[1:-1].strip()
        coeffs = [Fraction(p) for p in inner.split(",")] if inner else []
        phi = euler_phi(order)
        if len(coeffs) != phi:
            raise ValueError(f"token {text!r} needs {phi} coefficients")
        den = 1
        for c in coeffs:
            den = den * c.denominator // gcd(den, c.denominator)
        return CycNum(order, [int(c * den) for c in coeffs], den)

    def to_complex(self) -> complex:
        """Float approximation, for display only."""
        import cmath

        z = cmath.exp(2j * cmath.pi / self.order)
        return sum(c * z ** i for i, c in enumerate(self.num)) / self.den

    def __repr__(self):
        return f"CycNum({self.token()})"

    def __str__(self):
        if self.is_rational():
            return str(self.as_fraction())
        return self.token()


# ----------------------------------------------------------------------
# internal polynomial helpers


def _reduce_int_poly(poly: list[int], n: int) -> list[int]:
    """Remainder of an integer polynomial modulo Phi_n (monic), integer ops."""
    phi_poly = cyclotomic_polynomial(n)
    deg = len(phi_poly) - 1
    poly = list(poly)
    if len(poly) < deg:
        poly += [0] * (deg - len(poly))
    for i in range(len(poly) - 1, deg - 1, -1):
        c = poly[i]
        if c == 0:
            continue
        poly[i] = 0
        for j in range(deg):
            poly[i - deg + j] -= c * phi_poly[j]
    return poly[:deg]


def _reduce_mod_cyclotomic(int_poly: list[int], dens: list[int], n: int) -> tuple[list[int], int]:
    # All entries of int_poly share the single denominator dens[0].
    num = _reduce_int_poly(int_poly, n)
    return num, dens[0]


def _poly_xgcd_inverse(a: list[Fraction], modulus: list[Fraction]) -> list[Fraction]:
    """Inverse of a modulo the irreducible polynomial, via extended Euclid."""

    def deg(p):
        for i in range(len(p) - 1, -1, -1):
            if p[i] != 0:
                return i
        return -1

    def poly_divmod(p, q):
        p = list(p)
        dq = deg(q)
        lead = q[dq]
        quot = [Fraction(0)] * max(1, deg(p) - dq + 1)
        while deg(p) >= dq:
            dp = deg(p)
            coeff = p[dp] / lead
            quot[dp - dq] = coeff
            for j in range(dq + 1):
                p[dp - dq + j] -= coeff * q[j]
        return quot, p

    r0, r1 = list(modulus), list(a)
    s0, s1 = [Fraction(0)], [Fraction(1)]
    while deg(r1) > 0:
        q, r = poly_divmod(r0, r1)
        r0, r1 = r1, r
        s2 = list(s0) + [Fraction(0)] * max(0, len(q) + len(s1) - len(s0))
        for i, qi in enumerate(q):
            if qi:
                for j, sj in enumerate(s1):
                    s2[i + j] -= qi * sj
        s0, s1 = s1, s2
    lead = r1[deg(r1)]
    inv = [c / lead for c in s1]
    _, rem = poly_divmod(inv, modulus)
    rem += [Fraction(0)] * (len(modulus) - 1 - len(rem))
    return rem[: len(modulus) - 1]


def _project_to_subfield(x: "CycNum", m: int) -> "CycNum | None":
    """Rewrite x in Q(zeta_m) if possible; x must already be Galois-fixed."""
    n = x.order
    # Solve embed(y) = x for y by matching coefficients on the basis of Q(zeta_m).
    phi_m = euler_phi(m)
    step = n // m
    cols = []
    for i in range(phi_m):
        poly = [0] * n
        poly[i * step] = 1
        cols.append(_reduce_int_poly(poly, n))
    phi_n = euler_phi(n)
    target = [Fraction(c, x.den) for c in x.num]
    # Gaussian elimination on the phi_n x phi_m system.
    mat = [[Fraction(cols[j][i]) for j in range(phi_m)] for i in range(phi_n)]
    sol = [Fraction(0)] * phi_m
    rhs = list(target)
    pivot_rows: list[int] = []
    col_of_row: dict[int, int] = {}
    row = 0
    for col in range(phi_m):
        sel = None
        for r in range(row, phi_n):
            if mat[r][col] != 0:
                sel = r
                break
        if sel is None:
            continue
        mat[row], mat[sel] = mat[sel], mat[row]
        rhs[row], rhs[sel] = rhs[sel], rhs[row]
        inv = 1 / mat[row][col]
        mat[row] = [v * inv for v in mat[row]]
        rhs[row] *= inv
        for r in range(phi_n):
            if r != row and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [v - f * w for v, w in zip(mat[r], mat[row])]
                rhs[r] -= f * rhs[row]
        pivot_rows.append(row)
        col_of_row[row] = col
        row += 1
    for r in range(row, phi_n):
        if rhs[r] != 0:
            return None
    for r in pivot_rows:
        sol[col_of_row[r]] = rhs[r]
    den = 1
    for c in sol:
        den = den * c.denominator // gcd(den, c.denominator)
    return CycNum(m, [int(c * den) for c in sol], den)


def _divisors(n: int) -> list[int]:
    out = []
    i = 1
    while i * i <= n:
        if n % i == 0:
            out.append(i)
            if i != n // i:
                out.append(n // i)
        i += 1
    return sorted(out)


@lru_cache(maxsize=None)
def _prime_factors(n: int) -> tuple[int, ...]:
    out = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            out.append(p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        out.append(m)
    return tuple(out)


def _coerce(value, order: int) -> CycNum:
    if isinstance(value, CycNum):
        return value
    if isinstance(value, (int, Fraction)):
        return CycNum.rational(value, order)
    raise TypeError(f"cannot interpret {value!r} as a cyclotomic number")


def common_order(*values: CycNum) -> int:
    """Least common conductor of the given elements."""
    m = 1
    for v in values:
        m = m * v.order // gcd(m, v.order)
    return m


def embed_all(values: Iterable[CycNum], order: int) -> list[CycNum]:
    return [v.embed(order) for v in values]


def sqrt_integer(k: int) -> CycNum:
    """An exact square root of a positive integer as a cyclotomic number.

    Built from quadratic Gauss sums: sqrt(2) = zeta_8 + zeta_8^-1 and, for an
    odd prime p, sum_a legendre(a, p) zeta_p^a squares to (-1)^((p-1)/2) p.
    """
    if k <= 0:
        raise ValueError("need a positive integer")
    result = CycNum.one()
    square_free = 1
    m = k
    p = 2
    while p * p <= m:
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        if e:
            result = result * CycNum.rational(p ** (e // 2))
            if e % 2:
                square_free *= p
        p += 1
    if m > 1:
        square_free *= m
    for p in _prime_factors(square_free):
        result = result.embed(common_order(result, _sqrt_prime(p)))
        result = result * _sqrt_prime(p).embed(result.order)
    return result


@lru_cache(maxsize=None)
def _sqrt_prime(p: int) -> CycNum:
    if p == 2:
        return CycNum.zeta(8) + CycNum.zeta(8, 7)
    g = CycNum.zero(p)
    for a in range(1, p):
        g = g + CycNum.rational(_legendre(a, p), p) * CycNum.zeta(p, a)
    if p % 4 == 1:
        return g
    # g^2 = -p here; divide by i inside Q(zeta_4p).
    m = 4 * p
    return g.embed(m) * CycNum.zeta(m, 3 * p)  # zeta_4^-1 = zeta_{4p}^{3p}


def _legendre(a: int, p: int) -> int:
    t = pow(a, (p - 1) // 2, p)
    return -1 if t == p - 1 else t

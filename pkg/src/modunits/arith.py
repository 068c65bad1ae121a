"""Exact rational and cyclotomic arithmetic.

Elements of Q(zeta_n) are stored on the power basis 1, zeta_n, ..., zeta_n^(phi(n)-1)
after reduction modulo the n-th cyclotomic polynomial, with integer numerators
over one positive common denominator.  Mixed-order arithmetic lifts both operands
to the compositum order lcm(n1, n2).
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

RationalLike = Union[int, Fraction]


class CycloDivisionByZero(ZeroDivisionError):
    pass


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"cannot interpret {x!r} as a rational")


def parse_rational(text: str) -> Fraction:
    """Parse "p/q" or "p" (no decimals)."""
    t = text.strip()
    if "." in t or "e" in t.lower():
        raise ValueError(f"rational must be written as p/q, got {text!r}")
    return Fraction(t)


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def frac_part(x: Fraction) -> Fraction:
    """x mod 1, in [0, 1)."""
    return x - (x.numerator // x.denominator)


def bernoulli2(x: RationalLike) -> Fraction:
    x = as_fraction(x)
    return x * x - x + Fraction(1, 6)


# ---------------------------------------------------------------------------
# integer polynomial helpers (coefficient lists, low degree first)

def _trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod_exact(num: Sequence[int], den: Sequence[int]) -> list[int]:
    """Quotient of num by the monic integer polynomial den; remainder must vanish."""
    r = list(num)
    dn = len(den) - 1
    q = [0] * (len(r) - dn)
    for i in range(len(r) - 1, dn - 1, -1):
        c = r[i]
        if c:
            q[i - dn] = c
            for j in range(dn + 1):
                r[i - dn + j] -= c * den[j]
    if any(r):
        raise ArithmeticError("inexact polynomial division")
    return q


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Phi_n by dividing x^n - 1 by Phi_d for every proper divisor d of n."""
    if n < 1:
        raise ValueError("cyclotomic order must be positive")
    p = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            p = _poly_divmod_exact(p, cyclotomic_poly(d))
    return tuple(p)


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    return len(cyclotomic_poly(n)) - 1


def _mobius(n: int) -> int:
    res, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            res = -res
        p += 1
    if m > 1:
        res = -res
    return res


def prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _reduce_mod_phi(coeffs: list[int], n: int) -> list[int]:
    phi = cyclotomic_poly(n)
    deg = len(phi) - 1
    r = list(coeffs)
    for i in range(len(r) - 1, deg - 1, -1):
        c = r[i]
        if c:
            for j in range(deg + 1):
                r[i - deg + j] -= c * phi[j]
    r = r[:deg]
    r.extend([0] * (deg - len(r)))
    return r


# ---------------------------------------------------------------------------

class CycloNumber:
    """An exact element of Q(zeta_n) in canonical reduced form."""

    __slots__ = ("order", "_num", "_den")

    def __init__(self, order: int, num: Sequence[int], den: int = 1, *, _canonical=False):
        if _canonical:
            self.order, self._num, self._den = order, tuple(num), den
            return
        if order < 1:
            raise ValueError("order must be positive")
        if den == 0:
            raise CycloDivisionByZero("zero denominator")
        nums = _reduce_mod_phi(list(num), order)
        if den < 0:
            nums, den = [-c for c in nums], -den
        g = den
        for c in nums:
            g = math.gcd(g, c)
        if not any(nums):
            g = den
        self.order = order
        self._num = tuple(c // g for c in nums)
        self._den = den // g

    # -- constructors ------------------------------------------------------
    @classmethod
    def rational(cls, x: RationalLike, order: int = 1) -> "CycloNumber":
        x = as_fraction(x)
        return cls(order, [x.numerator], x.denominator)

    @classmethod
    def zeta(cls, n: int, k: int = 1) -> "CycloNumber":
        """zeta_n^k."""
        k %= n
        return cls(n, [0] * k + [1])

    @classmethod
    def from_coeffs(cls, order: int, coeffs: Iterable[RationalLike]) -> "CycloNumber":
        fr = [as_fraction(c) for c in coeffs]
        den = 1
        for c in fr:
            den = den * c.denominator // math.gcd(den, c.denominator)
        return cls(order, [int(c * den) for c in fr], den)

    @classmethod
    def coerce(cls, x) -> "CycloNumber":
        if isinstance(x, CycloNumber):
            return x
        if isinstance(x, RootOfUnity):
            return x.to_cyclo()
        return cls.rational(x)

    # -- views -------------------------------------------------------------
    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self._den) for c in self._num)

    def is_zero(self) -> bool:
        return not any(self._num)

    def is_rational(self) -> bool:
        return not any(self._num[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return Fraction(self._num[0] if self._num else 0, self._den)

    def lift(self, order: int) -> "CycloNumber":
        """Embed into Q(zeta_order) via zeta_n -> zeta_order^(order/n)."""
        if order == self.order:
            return self
        if order % self.order:
            raise ValueError(f"cannot lift order {self.order} to {order}")
        k = order // self.order
        poly = [0] * ((len(self._num) - 1) * k + 1)
        for i, c in enumerate(self._num):
            poly[i * k] = c
        return CycloNumber(order, poly, self._den)

    def _common(self, other: "CycloNumber"):
        n = math.lcm(self.order, other.order)
        return self.lift(n), other.lift(n), n

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        other = _maybe(other)
        if other is NotImplemented:
            return other
        a, b, n = self._common(other)
        num = [x * b._den + y * a._den for x, y in zip(a._num, b._num)]
        return CycloNumber(n, num, a._den * b._den)

    __radd__ = __add__

    def __neg__(self):
        return CycloNumber(self.order, [-c for c in self._num], self._den, _canonical=True)

    def __sub__(self, other):
        other = _maybe(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _maybe(other)
        if other is NotImplemented:
            return other
        a, b, n = self._common(other)
        if b.is_rational():
            c = b._num[0] if b._num else 0
            return CycloNumber(n, [x * c for x in a._num], a._den * b._den)
        if a.is_rational():
            c = a._num[0] if a._num else 0
            return CycloNumber(n, [x * c for x in b._num], a._den * b._den)
        prod = [0] * (len(a._num) + len(b._num) - 1)
        for i, x in enumerate(a._num):
            if x:
                for j, y in enumerate(b._num):
                    if y:
                        prod[i + j] += x * y
        return CycloNumber(n, prod, a._den * b._den)

    __rmul__ = __mul__

    def inverse(self) -> "CycloNumber":
        """Inverse via the extended Euclidean algorithm modulo Phi_n."""
        if self.is_zero():
            raise CycloDivisionByZero("division by zero in cyclotomic field")
        if self.is_rational():
            return CycloNumber(self.order, [self._den], self._num[0])
        n = self.order
        # s*a + t*phi = g, tracking only s
        r0 = [Fraction(c) for c in cyclotomic_poly(n)]
        r1 = _trim([Fraction(c) for c in self._num])
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while len(r1) > 1:
            q, r = _qdivmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _qsub(s0, _qmul(q, s1))
        # r1 is a nonzero constant since Phi_n is irreducible
        c = r1[0]
        inv = [x / c * self._den for x in s1]
        return CycloNumber.from_coeffs(n, inv)

    def __truediv__(self, other):
        other = _maybe(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return CycloNumber.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = CycloNumber.rational(1, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def galois(self, d: int) -> "CycloNumber":
        return galois_sigma(d, self)

    # -- comparison, hashing -----------------------------------------------
    def __eq__(self, other):
        other = _maybe(other)
        if other is NotImplemented:
            return False
        a, b, _ = self._common(other)
        return a._den == b._den and a._num == b._num

    def normalized_trace(self) -> Fraction:
        """Tr(x)/phi(n); independent of the ambient order."""
        n = self.order
        tot = Fraction(0)
        for k, c in enumerate(self._num):
            if c:
                m = n // math.gcd(n, k)
                tot += Fraction(c * _mobius(m), euler_phi(m))
        return tot / self._den

    def __hash__(self):
        return hash(self.normalized_trace())

    def __complex__(self):
        n = self.order
        return sum(
            (c * cmath.exp(2j * math.pi * k / n) for k, c in enumerate(self._num) if c),
            0j,
        ) / self._den

    def __repr__(self):
        return f"CycloNumber({self.order}, {self})"

    def __str__(self):
        parts = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
            if not mono:
                parts.append(format_rational(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{format_rational(c)}*{mono}")
        return " + ".join(parts).replace("+ -", "- ") or "0"

    def to_json(self) -> dict:
        return {"order": self.order, "coeffs": [format_rational(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj: dict) -> "CycloNumber":
        return cls.from_coeffs(int(obj["order"]), [parse_rational(c) for c in obj["coeffs"]])


def _maybe(x):
    if isinstance(x, CycloNumber):
        return x
    if isinstance(x, (int, Fraction)):
        return CycloNumber.rational(x)
    if isinstance(x, RootOfUnity):
        return x.to_cyclo()
    return NotImplemented


def _qmul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _qsub(a, b):
    n = max(len(a), len(b))
    a = a + [Fraction(0)] * (n - len(a))
    b = b + [Fraction(0)] * (n - len(b))
    return _trim([x - y for x, y in zip(a, b)]) or [Fraction(0)]


def _qdivmod(a, b):
    r = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    for i in range(len(r) - len(b), -1, -1):
        c = r[i + len(b) - 1] / lead
        q[i] = c
        if c:
            for j, y in enumerate(b):
                r[i + j] -= c * y
    return q, _trim(r[: len(b) - 1]) or [Fraction(0)]


def cyclo_arith(a: CycloNumber, b: CycloNumber, op: str) -> CycloNumber:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def galois_sigma(d: int, x: CycloNumber) -> CycloNumber:
    """The automorphism zeta_n -> zeta_n^d applied to x."""
    n = x.order
    if math.gcd(d, n) != 1:
        raise ValueError(f"sigma_{d} undefined on Q(zeta_{n}): gcd({d}, {n}) != 1")
    d %= n
    if d == 1 % n:
        return x
    poly = [0] * n
    for k, c in enumerate(x._num):
        poly[(k * d) % n] += c
    return CycloNumber(n, poly, x._den)


def sqrt_rational(r: RationalLike) -> CycloNumber:
    """Positive square root of a positive rational, as a cyclotomic number.

    Odd primes use quadratic Gauss sums; sqrt(2) = zeta_8 + zeta_8^-1.
    """
    r = as_fraction(r)
    if r <= 0:
        raise ValueError("sqrt_rational needs a positive rational")
    num, den = r.numerator, r.denominator
    m = num * den  # sqrt(num/den) = sqrt(num*den)/den
    outside, inside = 1, 1
    for p in prime_factors(m):
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        outside *= p ** (e // 2)
        if e % 2:
            inside *= p
    result = CycloNumber.rational(Fraction(outside, den))
    for p in prime_factors(inside):
        result = result * _sqrt_prime(p)
    return result


@lru_cache(maxsize=None)
def _sqrt_prime(p: int) -> CycloNumber:
    if p == 2:
        return CycloNumber.zeta(8, 1) + CycloNumber.zeta(8, 7)
    g = CycloNumber(p, [0] + [_legendre(k, p) for k in range(1, p)])
    if p % 4 == 3:
        g = g * CycloNumber.zeta(4, 3)  # g = i*sqrt(p)
    if complex(g).real < 0:
        g = -g
    return g


def _legendre(a: int, p: int) -> int:
    t = pow(a, (p - 1) // 2, p)
    return -1 if t == p - 1 else t


class RootOfUnity:
    """e^(2 pi i r) for an exact r in [0, 1)."""

    __slots__ = ("exponent",)

    def __init__(self, exponent: RationalLike = 0):
        self.exponent = frac_part(as_fraction(exponent))

    @property
    def order(self) -> int:
        return self.exponent.denominator

    def __mul__(self, other):
        if not isinstance(other, RootOfUnity):
            return NotImplemented
        return RootOfUnity(self.exponent + other.exponent)

    def __truediv__(self, other):
        return RootOfUnity(self.exponent - other.exponent)

    def __pow__(self, k: int):
        return RootOfUnity(self.exponent * k)

    def inverse(self):
        return RootOfUnity(-self.exponent)

    def is_one(self) -> bool:
        return self.exponent == 0

    def root(self, p: int) -> "RootOfUnity":
        """Canonical p-th root: exponent divided by p, landing in [0, 1/p)."""
        return RootOfUnity(self.exponent / p)

    def to_cyclo(self) -> CycloNumber:
        return CycloNumber.zeta(self.order, self.exponent.numerator)

    def __complex__(self):
        return cmath.exp(2j * math.pi * float(self.exponent))

    def __eq__(self, other):
        return isinstance(other, RootOfUnity) and self.exponent == other.exponent

    def __hash__(self):
        return hash(("rou", self.exponent))

    def __repr__(self):
        return f"RootOfUnity({format_rational(self.exponent)})"


def match_root_of_unity_times_rational(x: CycloNumber):
    """Write x = rho * r with rho a root of unity and r > 0 rational, or return None."""
    if x.is_zero():
        return None
    n = x.order
    m = 2 * n if n % 2 else n
    for k in range(m):
        rho = RootOfUnity(Fraction(k, m))
        y = x * rho.inverse().to_cyclo()
        if y.is_rational() and y.rational_value() > 0:
            return rho, y.rational_value()
    return None


def integer_root(x: int, p: int):
    """Exact integer p-th root of x >= 0, or None."""
    if x < 0:
        return None
    if x < 2:
        return x
    r = round(x ** (1.0 / p))
    for c in (r - 1, r, r + 1):
        if c >= 0 and c**p == x:
            return c
    lo, hi = 0, 1 << (x.bit_length() // p + 1)
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**p < x:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo**p == x else None


def rational_root(r: Fraction, p: int):
    """Positive rational p-th root of r > 0, if one exists."""
    a, b = integer_root(r.numerator, p), integer_root(r.denominator, p)
    if a is None or b is None:
        return None
    return Fraction(a, b)

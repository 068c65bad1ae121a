"""Siegel functions, their products and slash action, eta powers, j and sqrt(j - 1728).

Siegel functions use the product formula

    g_a(tau) = -q^(B2(a1)/2) e(a2(a1-1)/2) prod_{n>=0} (1 - q^(n+a1) e(a2)) prod_{n>=1} (1 - q^(n-a1) e(-a2))

with e(x) = exp(2 pi i x).  For each reduced symbol a we fix the holomorphic
logarithm L_a = log(-1) + pi i B2(a1) tau + pi i a2(a1-1) + (sum of principal logs
of the product factors).  Slashing by A then satisfies

    L_a(A tau) = 2 pi i C_a(A) + L_{aA}(tau)

with an exact rational C_a(A), additive along words in S and T.  Its class mod 1
is the usual multiplier; the rational itself is what fractional powers of g_a see.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Optional, Sequence

from .arith import (
    CycloNumber,
    RootOfUnity,
    as_fraction,
    bernoulli2,
    format_rational,
    frac_part,
)
from .psl2 import UniMatrix, exact_st_word
from .qseries import QSeries, series_eq, _power_of_unit, _unit_part

SNAP_TOLERANCE = 1e-6
TAU0 = complex(0.05, 0.9)


class MultiplierSnapError(RuntimeError):
    def __init__(self, message: str, raw: complex):
        super().__init__(f"{message} (raw value {raw!r})")
        self.raw = raw


@dataclass(frozen=True, order=True)
class SiegelSymbol:
    a1: Fraction
    a2: Fraction

    def __post_init__(self):
        a1, a2 = as_fraction(self.a1), as_fraction(self.a2)
        object.__setattr__(self, "a1", a1)
        object.__setattr__(self, "a2", a2)
        if not (0 <= a1 < 1 and 0 <= a2 < 1):
            raise ValueError(f"Siegel symbol ({a1}, {a2}) is not reduced into [0,1)^2")
        if a1 == 0 and a2 == 0:
            raise ValueError("Siegel symbol (0, 0) is not allowed")

    @classmethod
    def reduced(cls, a1, a2) -> "SiegelSymbol":
        return cls(frac_part(as_fraction(a1)), frac_part(as_fraction(a2)))

    @property
    def denom(self) -> int:
        return math.lcm(self.a1.denominator, self.a2.denominator)

    def scaled(self, N: int) -> tuple[int, int]:
        return int(self.a1 * N), int(self.a2 * N)

    def leading_exponent(self) -> Fraction:
        return bernoulli2(self.a1) / 2

    def __str__(self):
        return f"g[{format_rational(self.a1)},{format_rational(self.a2)}]"


# ---------------------------------------------------------------------------
# numeric evaluation (independent of the series code)

def _qpow(x: float, tau: complex) -> complex:
    return cmath.exp(2j * math.pi * x * tau)


def siegel_numeric(a1, a2, tau: complex, terms: int = 200) -> complex:
    """Direct evaluation of the defining product, truncated after `terms` factors each."""
    a1, a2 = float(a1), float(a2)
    z = cmath.exp(2j * math.pi * a2)
    val = -_qpow((a1 * a1 - a1 + 1 / 6) / 2, tau) * cmath.exp(1j * math.pi * a2 * (a1 - 1))
    for n in range(terms + 1):
        val *= 1 - _qpow(n + a1, tau) * z
    for n in range(1, terms + 1):
        val *= 1 - _qpow(n - a1, tau) / z
    return val


def siegel_log_numeric(s: SiegelSymbol, tau: complex, tol: float = 1e-18) -> complex:
    """L_s(tau): the fixed holomorphic branch of log g_s."""
    a1, a2 = s.a1, s.a2
    out = 1j * math.pi + 1j * math.pi * float(bernoulli2(a1)) * tau + 1j * math.pi * float(a2 * (a1 - 1))
    z = cmath.exp(2j * math.pi * float(a2))
    n = 0
    while True:
        x = _qpow(n + float(a1), tau) * z
        out += cmath.log(1 - x)
        if n >= 1:
            y = _qpow(n - float(a1), tau) / z
            out += cmath.log(1 - y)
            if abs(x) < tol and abs(y) < tol:
                break
        n += 1
    return out


# ---------------------------------------------------------------------------
# lifted multipliers, scaled by 12 N^2 so that all arithmetic is on integers

@lru_cache(maxsize=None)
def _t_constant_exact(d: int, y1: int, y2: int) -> int:
    """12 d^2 * C_a(T) for a = (y1/d, y2/d) in lowest terms, snapped from L at tau = i."""
    a = SiegelSymbol(Fraction(y1, d), Fraction(y2, d))
    b = SiegelSymbol.reduced(a.a2, -a.a1)
    raw = (siegel_log_numeric(a, 1j) - siegel_log_numeric(b, 1j)) / (2j * math.pi)
    scale = 12 * d * d
    m = round(raw.real * scale)
    tol = min(SNAP_TOLERANCE, 1 / (4 * scale))
    if abs(raw.imag) > tol or abs(raw.real - m / scale) > tol:
        raise MultiplierSnapError(f"T-multiplier of {a} is off the 1/{scale} grid", raw)
    return m


def _t_constant(N: int, x1: int, x2: int) -> int:
    g = math.gcd(math.gcd(x1, x2), N)
    d = N // g
    return _t_constant_exact(d, x1 // g, x2 // g) * g * g


def _lift_word(N: int, x1: int, x2: int, word) -> tuple[int, int, int]:
    """Slash (x1/N, x2/N) along a word; returns the new symbol and 12 N^2 * C."""
    total = 0
    n2 = N * N
    for letter, k in word:
        if letter == "S":
            y2 = (x2 + k * x1) % N
            total += k * (6 * x1 * x1 - 6 * x1 * N + n2) + 6 * (x2 - y2) * (x1 - N)
            x2 = y2
        else:
            for _ in range(k % 4):
                total += _t_constant(N, x1, x2)
                x1, x2 = x2, (-x1) % N
    return x1, x2, total


def siegel_log_multiplier(s: SiegelSymbol, A: UniMatrix, word=None) -> tuple[SiegelSymbol, Fraction]:
    """(a A reduced, C_a(A)) with L_a(A tau) = 2 pi i C_a(A) + L_{aA}(tau)."""
    N = s.denom
    if word is None:
        word = exact_st_word(A)
    x1, x2 = s.scaled(N)
    y1, y2, total = _lift_word(N, x1, x2, word)
    return SiegelSymbol(Fraction(y1, N), Fraction(y2, N)), Fraction(total, 12 * N * N)


def siegel_slash(s: SiegelSymbol, A: UniMatrix) -> tuple[SiegelSymbol, RootOfUnity]:
    """g_s(A tau) = eps * g_{sA}(tau); returns (sA reduced, eps)."""
    t, c = siegel_log_multiplier(s, A)
    return t, RootOfUnity(c)


def numeric_multiplier(s: SiegelSymbol, A: UniMatrix, tau0: complex = TAU0, terms: int = 400) -> RootOfUnity:
    """Multiplier of g_s under A snapped from g_s(A tau0) / g_{sA}(tau0).

    Only trustworthy while Im(A tau0) is not tiny; used as an oracle.
    """
    t = SiegelSymbol.reduced(*_row_times(s, A))
    w = (A.a * tau0 + A.b) / (A.c * tau0 + A.d)
    ratio = siegel_numeric(s.a1, s.a2, w, terms) / siegel_numeric(t.a1, t.a2, tau0, terms)
    order = 12 * s.denom ** 2
    k = round(cmath.phase(ratio) / (2 * math.pi) * order) % order
    snapped = RootOfUnity(Fraction(k, order))
    if abs(ratio - complex(snapped)) > SNAP_TOLERANCE:
        raise MultiplierSnapError(f"no root of unity of order dividing {order} matches", ratio)
    return snapped


def _row_times(s: SiegelSymbol, A: UniMatrix) -> tuple[Fraction, Fraction]:
    return s.a1 * A.a + s.a2 * A.c, s.a1 * A.b + s.a2 * A.d


# ---------------------------------------------------------------------------
# q-expansions

def _times_binomial(terms: dict, shift: int, z: CycloNumber, limit: int) -> None:
    """In place: terms *= (1 - z q^shift), keeping keys < limit."""
    for k in sorted((k for k in terms if k + shift < limit), reverse=True):
        t = terms[k] * z
        kk = k + shift
        terms[kk] = terms[kk] - t if kk in terms else -t


@lru_cache(maxsize=512)
def siegel_qexp(s: SiegelSymbol, prec) -> QSeries:
    prec = as_fraction(prec)
    lead = s.leading_exponent()
    rel = prec - lead
    d1 = s.a1.denominator
    M = math.lcm(lead.denominator, d1)
    scalar = RootOfUnity(Fraction(1, 2) + s.a2 * (s.a1 - 1) / 2).to_cyclo()
    if rel <= 0:
        return QSeries({}, prec, M)
    limit = math.ceil(rel * d1)  # relative exponents are j/d1 with j < limit
    z = RootOfUnity(s.a2).to_cyclo()
    zinv = RootOfUnity(-s.a2).to_cyclo()
    x1 = int(s.a1 * d1)
    terms = {0: CycloNumber.rational(1)}
    n = 0
    while n * d1 + x1 < limit:
        _times_binomial(terms, n * d1 + x1, z, limit)
        n += 1
    n = 1
    while n * d1 - x1 < limit:
        _times_binomial(terms, n * d1 - x1, zinv, limit)
        n += 1
    body = QSeries({Fraction(k, d1): c for k, c in terms.items()}, rel, d1)
    return body.shift(lead).scale(scalar).with_lattice(M)


def series_int_power(f: QSeries, e: int) -> QSeries:
    """f^e for any integer e, through the unit-part recurrence."""
    if e == 0:
        v = f.valuation() or Fraction(0)
        return QSeries.constant(1, f.trunc_order - v)
    if e == 1:
        return f
    c, k0, g, u, K = _unit_part(f)
    h = _power_of_unit(u, K, Fraction(e))
    ce = c ** e
    terms = {k0 * e + j * g: hj * ce for j, hj in enumerate(h) if hj is not None}
    return QSeries._raw(f.lattice_denom, terms, k0 * e + (f._trunc - k0))


# ---------------------------------------------------------------------------
# products

class UnitProduct:
    """A formal product scalar * prod g_s^e_s."""

    __slots__ = ("factors", "scalar", "_key")

    def __init__(self, factors=None, scalar: Optional[RootOfUnity] = None):
        merged: dict[SiegelSymbol, int] = {}
        for s, e in (factors.items() if isinstance(factors, dict) else (factors or ())):
            merged[s] = merged.get(s, 0) + int(e)
        self.factors = {s: merged[s] for s in sorted(merged) if merged[s] != 0}
        self.scalar = scalar if scalar is not None else RootOfUnity(0)
        self._key = (tuple(self.factors.items()), self.scalar.exponent)

    @classmethod
    def siegel(cls, a1, a2, e: int = 1) -> "UnitProduct":
        return cls({SiegelSymbol(as_fraction(a1), as_fraction(a2)): e})

    @property
    def level(self) -> int:
        """lcm of the factor denominators (1 for a constant)."""
        n = 1
        for s in self.factors:
            n = math.lcm(n, s.denom)
        return n

    def __mul__(self, other: "UnitProduct") -> "UnitProduct":
        f = dict(self.factors)
        for s, e in other.factors.items():
            f[s] = f.get(s, 0) + e
        return UnitProduct(f, self.scalar * other.scalar)

    def __pow__(self, k: int) -> "UnitProduct":
        return UnitProduct({s: e * k for s, e in self.factors.items()}, self.scalar ** k)

    def inverse(self) -> "UnitProduct":
        return self ** -1

    def leading_exponent(self) -> Fraction:
        return sum((e * s.leading_exponent() for s, e in self.factors.items()), Fraction(0))

    def same_symbols(self, other: "UnitProduct") -> bool:
        return self.factors == other.factors

    def __eq__(self, other):
        return isinstance(other, UnitProduct) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        from .grammar import format_unit

        return f"UnitProduct({format_unit(self)!r})"


def product_qexp(f: UnitProduct, prec) -> QSeries:
    return _product_qexp(f, as_fraction(prec))


@lru_cache(maxsize=256)
def _product_qexp(f: UnitProduct, prec: Fraction) -> QSeries:
    v = f.leading_exponent()
    rel = prec - v
    scalar = f.scalar.to_cyclo()
    if not f.factors:
        return QSeries.constant(scalar, prec)
    if rel <= 0:
        return QSeries({}, prec)
    out = None
    for s, e in f.factors.items():
        g = siegel_qexp(s, s.leading_exponent() + rel)
        g = series_int_power(g, e)
        out = g if out is None else out * g
    return out.scale(scalar)


def product_log_multiplier(f: UnitProduct, A: UniMatrix, word=None) -> tuple[UnitProduct, Fraction]:
    """Slash the symbols of f by A; returns (slashed product with scalar of f, sum e_s C_s(A))."""
    if word is None:
        word = exact_st_word(A)
    N = f.level
    n2 = 12 * N * N
    total = 0
    new = {}
    for s, e in f.factors.items():
        x1, x2 = s.scaled(N)
        y1, y2, c = _lift_word(N, x1, x2, word)
        new[SiegelSymbol(Fraction(y1, N), Fraction(y2, N))] = e
        total += e * c
    return UnitProduct(new, f.scalar), Fraction(total, n2)


def product_slash(f: UnitProduct, A: UniMatrix) -> UnitProduct:
    """f(A tau) as a formal product."""
    g, c = product_log_multiplier(f, A)
    return UnitProduct(g.factors, g.scalar * RootOfUnity(c))


class InvarianceResult(NamedTuple):
    ok: bool
    witness: Optional[UniMatrix]
    checked: int


def _fix_sign(A: UniMatrix, N: int) -> UniMatrix:
    """Choose the sign of A with A == I mod N when possible (same action on tau)."""
    if N > 2 and (-A).congruent_identity(N):
        return -A
    return A


def is_invariant(f: UnitProduct, gens: Sequence[UniMatrix], prec=None) -> InvarianceResult:
    """Does f(A tau) = f(tau) hold for every A in gens?

    A generator passes when the slashed product has the same symbols and scalar;
    with `prec` the q-expansions are also compared up to that order.
    """
    N = f.level
    base_series = product_qexp(f, prec) if prec is not None else None
    confirmed = set()
    for i, A in enumerate(gens):
        g = product_slash(f, _fix_sign(A, N))
        if g != f:
            return InvarianceResult(False, A, i + 1)
        if base_series is not None and g not in confirmed:
            if not series_eq(product_qexp(g, prec), base_series, prec):
                return InvarianceResult(False, A, i + 1)
            confirmed.add(g)
    return InvarianceResult(True, None, len(gens))


def order_at_cusp(f: UnitProduct, c) -> Fraction:
    """Leading q-exponent of f(sigma_c tau), sigma_c the standard matrix sending oo to c."""
    from .cusps import sigma_of

    return product_slash(f, sigma_of(c)).leading_exponent()


# ---------------------------------------------------------------------------
# eta, Eisenstein series, j

def _euler_product(K: int) -> list[int]:
    """Coefficients of prod_{n>=1} (1 - q^n) below q^K (pentagonal numbers)."""
    out = [0] * K
    k = 0
    while True:
        done = True
        for m in ((k * (3 * k - 1)) // 2, (k * (3 * k + 1)) // 2) if k else (0,):
            if m < K:
                out[m] += -1 if k % 2 else 1
                done = False
        if done and k:
            break
        k += 1
    return out


def _int_mul(a: list[int], b: list[int], K: int) -> list[int]:
    out = [0] * K
    for i, x in enumerate(a[:K]):
        if x:
            for j, y in enumerate(b[: K - i]):
                out[i + j] += x * y
    return out


def _int_pow(a: list[int], e: int, K: int) -> list[int]:
    out = [1] + [0] * (K - 1)
    base = a
    while e:
        if e & 1:
            out = _int_mul(out, base, K)
        e >>= 1
        if e:
            base = _int_mul(base, base, K)
    return out


def _int_inverse(a: list[int], K: int) -> list[int]:
    """Inverse of an integer series with constant term 1."""
    out = [1] + [0] * (K - 1)
    for n in range(1, K):
        out[n] = -sum(a[i] * out[n - i] for i in range(1, n + 1) if i < len(a))
    return out


def _sigma(n: int, k: int) -> int:
    return sum(d**k for d in range(1, n + 1) if n % d == 0)


def eisenstein_coeffs(weight: int, K: int) -> list[int]:
    """E4 or E6 coefficients below q^K."""
    c = {4: 240, 6: -504}[weight]
    return [1] + [c * _sigma(n, weight - 1) for n in range(1, K)]


@dataclass(frozen=True)
class EtaPower:
    """eta(k tau)^e."""

    exponent: int
    argument_scale: int = 1

    def __post_init__(self):
        if self.exponent == 0:
            raise ValueError("eta exponent must be nonzero")
        if self.argument_scale < 1:
            raise ValueError("argument scale must be positive")


def eta_qexp(h: EtaPower, prec) -> QSeries:
    prec = as_fraction(prec)
    k, e = h.argument_scale, h.exponent
    lead = Fraction(k * e, 24)
    rel = prec - lead
    K = max(math.ceil(rel / k), 1)
    body = _int_pow(_euler_product(K), abs(e), K)
    if e < 0:
        body = _int_inverse(body, K)
    return QSeries({lead + k * n: c for n, c in enumerate(body) if c}, prec, lead.denominator)


def j_qexp(prec) -> QSeries:
    """j = E4^3 / Delta with Delta = q prod (1 - q^n)^24."""
    prec = as_fraction(prec)
    if prec < 0:
        raise ValueError("precision must be nonnegative")
    K = math.ceil(prec) + 1
    e4 = eisenstein_coeffs(4, K)
    num = _int_pow(e4, 3, K)
    den = _int_inverse(_int_pow(_euler_product(K), 24, K), K)
    body = _int_mul(num, den, K)
    return QSeries({n - 1: c for n, c in enumerate(body) if c}, prec)


def sqrt_j_minus_1728(prec) -> QSeries:
    """E6 / eta^12 = q^(-1/2) E6 prod (1 - q^n)^(-12), a square root of j - 1728."""
    prec = as_fraction(prec)
    if prec < 0:
        raise ValueError("precision must be nonnegative")
    K = max(math.ceil(prec + Fraction(1, 2)), 1)
    e6 = eisenstein_coeffs(6, K)
    den = _int_inverse(_int_pow(_euler_product(K), 12, K), K)
    body = _int_mul(e6, den, K)
    return QSeries({Fraction(2 * n - 1, 2): c for n, c in enumerate(body) if c}, prec, 2)


def sqrt_j_minus_1728_sign(A: UniMatrix) -> RootOfUnity:
    """Factor by which E6/eta^12 changes under A: (-1)^(S-exponent sum + T count)."""
    parity = 0
    for letter, k in exact_st_word(A):
        parity += k
    return RootOfUnity(Fraction(parity % 2, 2))

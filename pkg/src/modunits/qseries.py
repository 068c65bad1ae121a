"""Truncated Puiseux-style q-expansions with exact cyclotomic coefficients.

A series lives on the exponent lattice (1/M)Z.  Terms are stored sparsely as
{k: coefficient} meaning coefficient * q^(k/M); every exponent at or beyond the
truncation order is unknown, never zero.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from typing import Mapping, Optional, Union

from .arith import (
    CycloNumber,
    RootOfUnity,
    as_fraction,
    format_rational,
    match_root_of_unity_times_rational,
    parse_rational,
    rational_root,
    sqrt_rational,
)

Scalar = Union[int, Fraction, CycloNumber, RootOfUnity]


class PrecisionError(ValueError):
    """Asked about terms beyond the known truncation order."""


class RootShapeError(ValueError):
    """Leading coefficient admits no canonical exact p-th root."""


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


class QSeries:
    __slots__ = ("lattice_denom", "_terms", "_trunc")

    def __init__(self, terms: Mapping, trunc, lattice_denom: Optional[int] = None):
        """Build from {exponent (Fraction/int): coefficient}; zeros and terms past trunc are dropped."""
        trunc = as_fraction(trunc)
        items = [(as_fraction(e), CycloNumber.coerce(c)) for e, c in terms.items()]
        M = 1 if lattice_denom is None else int(lattice_denom)
        if lattice_denom is None:
            for e, _ in items:
                M = math.lcm(M, e.denominator)
        self.lattice_denom = M
        self._trunc = _ceil_div(trunc.numerator * M, trunc.denominator)
        out = {}
        for e, c in items:
            if (e * M).denominator != 1:
                raise ValueError(f"exponent {e} is off the lattice (1/{M})Z")
            k = int(e * M)
            if k >= self._trunc or c.is_zero():
                continue
            out[k] = out[k] + c if k in out else c
        self._terms = {k: out[k] for k in sorted(out) if not out[k].is_zero()}

    @classmethod
    def _raw(cls, M: int, terms: dict, trunc_k: int) -> "QSeries":
        obj = cls.__new__(cls)
        obj.lattice_denom = M
        obj._trunc = trunc_k
        obj._terms = {k: terms[k] for k in sorted(terms) if k < trunc_k and not terms[k].is_zero()}
        return obj

    @classmethod
    def constant(cls, c: Scalar, trunc) -> "QSeries":
        return cls({0: c}, trunc)

    @classmethod
    def monomial(cls, exponent, c: Scalar, trunc) -> "QSeries":
        return cls({as_fraction(exponent): c}, trunc)

    # -- views -------------------------------------------------------------
    @property
    def trunc_order(self) -> Fraction:
        return Fraction(self._trunc, self.lattice_denom)

    @property
    def terms(self) -> dict[Fraction, CycloNumber]:
        M = self.lattice_denom
        return {Fraction(k, M): c for k, c in self._terms.items()}

    def is_zero(self) -> bool:
        return not self._terms

    def valuation(self) -> Optional[Fraction]:
        """Leading exponent n0, or None when no nonzero term is known."""
        if not self._terms:
            return None
        return Fraction(next(iter(self._terms)), self.lattice_denom)

    def leading_coefficient(self) -> CycloNumber:
        if not self._terms:
            raise PrecisionError("series has no known nonzero term")
        return next(iter(self._terms.values()))

    def coefficient(self, exponent) -> CycloNumber:
        e = as_fraction(exponent)
        if e >= self.trunc_order:
            raise PrecisionError(f"coefficient of q^{e} is beyond truncation {self.trunc_order}")
        k = e * self.lattice_denom
        if k.denominator != 1:
            return CycloNumber.rational(0)
        return self._terms.get(int(k), CycloNumber.rational(0))

    def with_lattice(self, M: int) -> "QSeries":
        if M == self.lattice_denom:
            return self
        if M % self.lattice_denom:
            raise ValueError(f"lattice 1/{self.lattice_denom} does not refine to 1/{M}")
        s = M // self.lattice_denom
        return QSeries._raw(M, {k * s: c for k, c in self._terms.items()}, self._trunc * s)

    def _common(self, other: "QSeries"):
        M = math.lcm(self.lattice_denom, other.lattice_denom)
        return self.with_lattice(M), other.with_lattice(M), M

    def truncate(self, trunc) -> "QSeries":
        t = as_fraction(trunc)
        if t > self.trunc_order:
            raise PrecisionError(f"cannot extend truncation {self.trunc_order} to {t}")
        return QSeries(self.terms, t, self.lattice_denom)

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, QSeries):
            other = QSeries.constant(other, self.trunc_order)
        a, b, M = self._common(other)
        terms = dict(a._terms)
        for k, c in b._terms.items():
            terms[k] = terms[k] + c if k in terms else c
        return QSeries._raw(M, terms, min(a._trunc, b._trunc))

    __radd__ = __add__

    def __neg__(self):
        return QSeries._raw(self.lattice_denom, {k: -c for k, c in self._terms.items()}, self._trunc)

    def __sub__(self, other):
        if not isinstance(other, QSeries):
            other = QSeries.constant(other, self.trunc_order)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Scalar) -> "QSeries":
        c = CycloNumber.coerce(c)
        return QSeries._raw(self.lattice_denom, {k: v * c for k, v in self._terms.items()}, self._trunc)

    def shift(self, exponent) -> "QSeries":
        """Multiply by q^exponent."""
        e = as_fraction(exponent)
        M = math.lcm(self.lattice_denom, e.denominator)
        a = self.with_lattice(M)
        s = int(e * M)
        return QSeries._raw(M, {k + s: c for k, c in a._terms.items()}, a._trunc + s)

    def _val_k(self) -> int:
        return next(iter(self._terms)) if self._terms else self._trunc

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return self.scale(other)
        a, b, M = self._common(other)
        trunc = min(a._val_k() + b._trunc, b._val_k() + a._trunc)
        terms: dict[int, CycloNumber] = {}
        bt = list(b._terms.items())
        for k1, c1 in a._terms.items():
            for k2, c2 in bt:
                k = k1 + k2
                if k >= trunc:
                    break
                p = c1 * c2
                terms[k] = terms[k] + p if k in terms else p
        return QSeries._raw(M, terms, trunc)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        if k < 0:
            return series_invert(self) ** (-k)
        if k == 0:
            v = self.valuation() or Fraction(0)
            return QSeries.constant(1, self.trunc_order - v)
        result = None
        base = self
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        a, b, _ = self._common(other)
        return a._trunc == b._trunc and a._terms == b._terms

    __hash__ = None

    def __repr__(self):
        shown = list(self.terms.items())[:6]
        body = " + ".join(f"({c})q^{format_rational(e)}" for e, c in shown) or "0"
        more = " + ..." if len(self._terms) > 6 else ""
        return f"QSeries({body}{more} + O(q^{format_rational(self.trunc_order)}))"

    # -- serialization -----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "lattice_denom": self.lattice_denom,
            "trunc": format_rational(self.trunc_order),
            "terms": [{"exp": format_rational(e), "coeff": c.to_json()} for e, c in self.terms.items()],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "QSeries":
        terms = {parse_rational(t["exp"]): CycloNumber.from_json(t["coeff"]) for t in obj["terms"]}
        return cls(terms, parse_rational(obj["trunc"]), int(obj["lattice_denom"]))


# ---------------------------------------------------------------------------

def series_arith(f: QSeries, g: QSeries, op: str) -> QSeries:
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    raise ValueError(f"unknown op {op!r}")


def _unit_part(f: QSeries):
    """Split f = c * q^(k0/M) * (1 + u); u on a dense grid of step g/M.

    Returns (c, k0, g, u_list, K) where u_list[j] is the coefficient at relative
    index j (u_list[0] is zero) and K is the number of known relative slots.
    """
    if f.is_zero():
        raise PrecisionError("series vanishes to its known precision")
    keys = list(f._terms)
    k0 = keys[0]
    c = f._terms[k0]
    g = 0
    for k in keys[1:]:
        g = math.gcd(g, k - k0)
    if g == 0:
        g = max(f._trunc - k0, 1)
    K = _ceil_div(f._trunc - k0, g)
    cinv = c.inverse()
    u = [None] * K
    for k in keys[1:]:
        u[(k - k0) // g] = f._terms[k] * cinv
    return c, k0, g, u, K


def _power_of_unit(u: list, K: int, alpha: Fraction) -> list:
    """Coefficients of (1 + u)^alpha on the dense grid (J.C.P. Miller recurrence)."""
    one = CycloNumber.rational(1)
    h = [one] + [None] * (K - 1)
    nz = [(i, ui) for i, ui in enumerate(u) if i and ui is not None]
    for k in range(1, K):
        acc = None
        for i, ui in nz:
            if i > k:
                break
            hk = h[k - i]
            if hk is None:
                continue
            w = alpha * i - (k - i)
            if w == 0:
                continue
            t = ui * hk * w
            acc = t if acc is None else acc + t
        if acc is not None and not acc.is_zero():
            h[k] = acc * Fraction(1, k)
    return h


def series_invert(f: QSeries) -> QSeries:
    c, k0, g, u, K = _unit_part(f)
    h = _power_of_unit(u, K, Fraction(-1))
    cinv = c.inverse()
    terms = {-k0 + j * g: hj * cinv for j, hj in enumerate(h) if hj is not None}
    return QSeries._raw(f.lattice_denom, terms, -k0 + (f._trunc - k0))


def leading_root(c: CycloNumber, p: int) -> CycloNumber:
    """Canonical p-th root of rho * r: rho^(1/p) on [0, 1/p) times the positive root of r."""
    shape = match_root_of_unity_times_rational(c)
    if shape is None:
        raise RootShapeError(f"leading coefficient {c} is not (root of unity) x (positive rational)")
    rho, r = shape
    rr = rational_root(r, p)
    if rr is not None:
        root_r = CycloNumber.rational(rr)
    elif p == 2:
        root_r = sqrt_rational(r)
    else:
        raise RootShapeError(f"leading coefficient {c}: {r} has no exact {p}-th root in a cyclotomic field")
    return rho.root(p).to_cyclo() * root_r


def _root_with_lead(f: QSeries, p: int, lead: Optional[CycloNumber]) -> QSeries:
    if p < 1:
        raise ValueError("root index must be positive")
    c, k0, g, u, K = _unit_part(f)
    h = _power_of_unit(u, K, Fraction(1, p))
    M = f.lattice_denom
    s = p // math.gcd(p, k0)  # refine the lattice so k0/p is on it
    M2 = M * s
    base = k0 * s // p
    step = g * s
    if lead is None:
        lead = CycloNumber.rational(1)
    terms = {base + j * step: hj * lead for j, hj in enumerate(h) if hj is not None}
    return QSeries._raw(M2, terms, base + (f._trunc - k0) * s)


def series_root(f: QSeries, p: int) -> QSeries:
    """Canonical branch of f^(1/p): leading coefficient from `leading_root`."""
    return _root_with_lead(f, p, leading_root(f.leading_coefficient(), p))


def series_root_monic(f: QSeries, p: int) -> QSeries:
    """(f / a_n0)^(1/p): the p-th root with leading coefficient 1.

    Always exact; differs from any other branch of f^(1/p) by a constant.
    """
    return _root_with_lead(f, p, None)


def series_eq(f: QSeries, g: QSeries, upto) -> bool:
    upto = as_fraction(upto)
    known = min(f.trunc_order, g.trunc_order)
    if upto > known:
        raise PrecisionError(f"comparison up to {upto} exceeds known precision {known}")
    a, b, M = f._common(g)
    lim = upto * M
    ka = {k: c for k, c in a._terms.items() if k < lim}
    kb = {k: c for k, c in b._terms.items() if k < lim}
    if ka.keys() != kb.keys():
        return False
    return all(ka[k] == kb[k] for k in ka)


def series_eval_numeric(f: QSeries, tau: complex, horizon=None) -> complex:
    """Sum of the terms with exponent below `horizon`, with q^x = exp(2 pi i x tau)."""
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half-plane")
    lim = f.trunc_order if horizon is None else as_fraction(horizon)
    total = 0j
    for e, c in f.terms.items():
        if e >= lim:
            break
        total += complex(c) * cmath.exp(2j * math.pi * float(e) * tau)
    return total


def is_constant(f: QSeries) -> bool:
    return all(k == 0 for k in f._terms)

"""p-th roots of Siegel products: the root ambiguity character, its kernel and the level verdict.

For f = prod g_a^e_a invariant under Gamma(N), fix the holomorphic root
h = exp((1/p) sum e_a L_a).  For A in Gamma(N) (sign chosen so A = I mod N)
the lifted log multipliers give f(A tau) = e(C) f(tau) with
C = sum e_a C_a(A), an integer exactly when f is A-invariant, and

    h(A tau) = e(C / p) h(tau).

chi(A) = e(C/p) is a homomorphism on Gamma(N) and does not depend on the
branch of h.  Its kernel is the stabilizer of the root.
"""

from __future__ import annotations

import random
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from .arith import RootOfUnity, as_fraction, prime_factors
from .cusps import Cusp, cusp_classes, fan_width
from .psl2 import (
    MatModN,
    SubgroupHandle,
    UniMatrix,
    gamma,
    index_gamma,
    lift_modn,
    proj_key_mod,
    schreier_generators,
)
from .qseries import QSeries, series_eq, series_root_monic
from .units import (
    SiegelSymbol,
    UnitProduct,
    _fix_sign,
    is_invariant,
    product_log_multiplier,
    product_qexp,
    j_qexp,
    sqrt_j_minus_1728_sign,
)

WIDTH_SAMPLE_CAP = 64


class PreconditionError(ValueError):
    """Input violates a documented precondition; carries an optional witness matrix."""

    def __init__(self, message: str, witness: Optional[UniMatrix] = None):
        super().__init__(message)
        self.witness = witness


class InternalInconsistency(RuntimeError):
    pass


def _check_prime(p: int) -> None:
    if p < 2 or prime_factors(p) != [p]:
        raise PreconditionError(f"{p} is not prime")


def _base_level(f: UnitProduct, level: Optional[int]) -> int:
    if level is None:
        return f.level
    if level < 1 or level % f.level:
        raise PreconditionError(f"symbol level {f.level} does not divide {level}")
    return level


@lru_cache(maxsize=64)
def principal_generators(N: int) -> tuple[UniMatrix, ...]:
    """Schreier generators of Gamma(N), cached per level."""
    return tuple(schreier_generators(gamma(N)))


# ---------------------------------------------------------------------------
# the character

def cocycle(f: UnitProduct, A: UniMatrix, N: Optional[int] = None) -> Fraction:
    """C = sum e_a C_a(A) for A in Gamma(N); raises unless f is A-invariant."""
    N = _base_level(f, N)
    if not (A.congruent_identity(N) or (-A).congruent_identity(N)):
        raise PreconditionError(f"{A} is not in Gamma({N})", A)
    B = _fix_sign(A, N)
    g, c = product_log_multiplier(f, B)
    if not g.same_symbols(f) or c.denominator != 1:
        raise PreconditionError(f"f is not invariant under {A}", A)
    return c


def root_ambiguity(f: UnitProduct, A: UniMatrix, p: int, prec=None, level: Optional[int] = None) -> RootOfUnity:
    """chi(A): the p-th root of unity by which f^(1/p) changes under A.

    With `prec`, the invariance f(A tau) = f(tau) is additionally confirmed on
    q-expansions up to that order.
    """
    _check_prime(p)
    c = cocycle(f, A, level)
    if prec is not None:
        g = product_slash_exact(f, A, level)
        if not series_eq(product_qexp(g, prec), product_qexp(f, prec), prec):
            raise InternalInconsistency(f"formal invariance under {A} not confirmed by q-expansion")
    return RootOfUnity(Fraction(c % p, p))


def product_slash_exact(f: UnitProduct, A: UniMatrix, level: Optional[int] = None) -> UnitProduct:
    N = _base_level(f, level)
    g, c = product_log_multiplier(f, _fix_sign(A, N))
    return UnitProduct(g.factors, g.scalar * RootOfUnity(c))


@dataclass
class AmbiguityChar:
    """chi restricted to a generator list of Gamma(domain_level)."""

    domain_level: int
    prime: int
    values: dict[UniMatrix, RootOfUnity]

    def __post_init__(self):
        for A, v in self.values.items():
            if not (v ** self.prime).is_one():
                raise InternalInconsistency(f"chi({A}) = {v} is not a {self.prime}-th root of unity")

    def nontrivial(self) -> list[UniMatrix]:
        return [A for A, v in self.values.items() if not v.is_one()]

    def is_trivial(self) -> bool:
        return not self.nontrivial()

    def raw(self) -> list[dict]:
        return [{"matrix": A.rows(), "chi": str(v.exponent)} for A, v in self.values.items()]


def ambiguity_character(f: UnitProduct, p: int, domain_level: int, base_level: Optional[int] = None) -> AmbiguityChar:
    N = _base_level(f, base_level)
    if domain_level % N:
        raise PreconditionError(f"Gamma({domain_level}) is not inside Gamma({N})")
    vals = {A: root_ambiguity(f, A, p, level=N) for A in principal_generators(domain_level)}
    return AmbiguityChar(domain_level, p, vals)


def check_multiplicative(f: UnitProduct, p: int, gens: Sequence[UniMatrix], N: int, pairs: int = 12, seed: int = 0) -> list:
    """chi(AB) against chi(A) chi(B) on random generator pairs; returns the violations."""
    rng = random.Random(seed)
    bad = []
    gens = list(gens)
    for _ in range(pairs if len(gens) > 0 else 0):
        A, B = rng.choice(gens), rng.choice(gens)
        lhs = root_ambiguity(f, A @ B, p, level=N)
        rhs = root_ambiguity(f, A, p, level=N) * root_ambiguity(f, B, p, level=N)
        if lhs != rhs:
            bad.append((A, B))
    return bad


# ---------------------------------------------------------------------------
# stabilizer subgroup

def stabilizer_handle(f: UnitProduct, p: int, level: Optional[int] = None, index_hint: bool = True) -> SubgroupHandle:
    """Gamma_1 = ker(chi) inside Gamma(N), as a subgroup of PSL2(Z).

    Coset key: (class of A mod N, chi(A r^-1)) with r a fixed lift of that class.
    """
    _check_prime(p)
    N = _base_level(f, level)
    lock = threading.Lock()
    lifts: dict[tuple, UniMatrix] = {}
    memo: dict[UniMatrix, RootOfUnity] = {}

    def chi(A: UniMatrix) -> RootOfUnity:
        A = A.normalized()
        with lock:
            hit = memo.get(A)
        if hit is None:
            hit = root_ambiguity(f, A, p, level=N)
            with lock:
                memo[A] = hit
        return hit

    def in_gamma_n(A):
        return A.congruent_identity(N) or (-A).congruent_identity(N)

    def member(A):
        return in_gamma_n(A) and chi(A).is_one()

    def key(A):
        k = proj_key_mod(A, N)
        with lock:
            r = lifts.get(k)
        if r is None:
            r = lift_modn(MatModN(N, k[2], k[3], k[0], k[1]))
            with lock:
                lifts[k] = r
        return (k, chi(A @ r.inverse()).exponent)

    trivial = all(chi(A).is_one() for A in principal_generators(N))
    hint = index_gamma(N) * (1 if trivial else p) if index_hint else None
    return SubgroupHandle(N, member, hint, key, f"Stab_{p}({f!r})")


def stabilizer_index(f: UnitProduct, p: int, level: Optional[int] = None) -> int:
    """[Gamma(N) : Gamma_1] by coset enumeration without an index hint."""
    N = _base_level(f, level)
    H = stabilizer_handle(f, p, N, index_hint=False)
    n = len(H.table())
    if n % index_gamma(N):
        raise InternalInconsistency(f"{n} cosets is not a multiple of [PSL2(Z):Gamma({N})]")
    return n // index_gamma(N)


# ---------------------------------------------------------------------------
# p-th power test

def is_pth_power(f: UnitProduct, p: int, prec=None, level: Optional[int] = None) -> bool:
    """Exponents divisible by p, f^(1/p) agreeing with the exponent-divided product
    up to a constant, and chi trivial on Gamma(N)."""
    _check_prime(p)
    N = _base_level(f, level)
    if any(e % p for e in f.factors.values()):
        return False
    h = UnitProduct({s: e // p for s, e in f.factors.items()})
    prec = as_fraction(prec if prec is not None else default_precision(N, p))
    root = series_root_monic(product_qexp(f, prec), p)
    hq = product_qexp(h, root.trunc_order)
    hq = hq.scale(hq.leading_coefficient().inverse())
    upto = min(root.trunc_order, hq.trunc_order)
    if not series_eq(root, hq, upto):
        return False
    return ambiguity_character(f, p, N, N).is_trivial()


def default_precision(N: int, p: int) -> Fraction:
    return 10 + Fraction(index_gamma(p * N), 6)


# ---------------------------------------------------------------------------
# level detection

VERDICTS = ("NotPthRootCandidate", "PthPowerInput", "NoCongruenceLevel", "LevelExactly")


@dataclass
class WidthSample:
    cusp: Cusp
    width_base: int
    width_stabilizer: int

    def to_json(self):
        return {"cusp": str(self.cusp), "width_gamma_N": self.width_base, "width_stabilizer": self.width_stabilizer}


@dataclass
class RootLevelReport:
    base_level: int
    prime: int
    verdict: str
    level: Optional[int] = None
    sigma_witness: Optional[UniMatrix] = None
    failing_generator: Optional[UniMatrix] = None
    stabilizer_index: Optional[int] = None
    width_samples: list[WidthSample] = field(default_factory=list)
    chi_base: Optional[AmbiguityChar] = None
    chi_top: Optional[AmbiguityChar] = None
    precision: Optional[Fraction] = None
    series_checks: list[str] = field(default_factory=list)
    note: str = ""

    @property
    def verdict_label(self) -> str:
        return f"LevelExactly({self.level})" if self.verdict == "LevelExactly" else self.verdict

    def to_json(self) -> dict:
        return {
            "base_level": self.base_level,
            "prime": self.prime,
            "verdict": self.verdict_label,
            "sigma_witness": self.sigma_witness.rows() if self.sigma_witness else None,
            "failing_generator": self.failing_generator.rows() if self.failing_generator else None,
            "stabilizer_index": self.stabilizer_index,
            "width_samples": [w.to_json() for w in self.width_samples],
            "chi_gamma_N": self.chi_base.raw() if self.chi_base else [],
            "chi_gamma_pN": self.chi_top.raw() if self.chi_top else [],
            "precision": str(self.precision) if self.precision is not None else None,
            "series_checks": self.series_checks,
            "note": self.note,
        }


def _series_affirm(f: UnitProduct, p: int, prec: Fraction) -> str:
    """Monic root r of qexp(f) with r^p = qexp(f)/lead, at prec and again at 2 prec."""
    roots = []
    for P in (prec, 2 * prec):
        fq = product_qexp(f, P)
        fq = fq.scale(fq.leading_coefficient().inverse())
        r = series_root_monic(fq, p)
        if not series_eq(r ** p, fq, min((r ** p).trunc_order, fq.trunc_order)):
            raise InternalInconsistency(f"root^{p} differs from f at precision {P}")
        roots.append(r)
    lo = min(roots[0].trunc_order, roots[1].trunc_order)
    if not series_eq(roots[0], roots[1], lo):
        raise InternalInconsistency("root at double precision disagrees with the lower-precision root")
    return f"root^{p} = f confirmed at {prec} and {2 * prec}"


def detect_root_level(
    f: UnitProduct,
    p: int,
    prec=None,
    level: Optional[int] = None,
    width_cap: int = WIDTH_SAMPLE_CAP,
    series_check: bool = True,
) -> RootLevelReport:
    """Verdict on the level of f^(1/p) for f invariant under Gamma(N)."""
    _check_prime(p)
    N = _base_level(f, level)
    prec = as_fraction(prec) if prec is not None else default_precision(N, p)
    rep = RootLevelReport(N, p, "NotPthRootCandidate", precision=prec)

    inv = is_invariant(f, principal_generators(N))
    if not inv.ok:
        rep.failing_generator = inv.witness
        rep.note = f"f is not invariant under Gamma({N})"
        return rep

    chi_n = ambiguity_character(f, p, N, N)
    rep.chi_base = chi_n
    gens = list(chi_n.values)
    if check_multiplicative(f, p, gens, N):
        raise InternalInconsistency("chi is not multiplicative on Gamma(N)")
    if series_check:
        rep.series_checks.append(_series_affirm(f, p, prec))

    if chi_n.is_trivial():
        rep.verdict = "PthPowerInput"
        rep.stabilizer_index = 1
        rep.note = f"f^(1/{p}) is already invariant under Gamma({N})"
        return rep

    rep.sigma_witness = chi_n.nontrivial()[0]
    chi_top = ambiguity_character(f, p, p * N, N)
    rep.chi_top = chi_top
    bad = chi_top.nontrivial()
    if bad:
        rep.verdict = "NoCongruenceLevel"
        rep.failing_generator = bad[0]
        rep.note = (f"f^(1/{p}) is not invariant under Gamma({p * N}); "
                    f"by the dichotomy it has no congruence level")
    else:
        rep.verdict = "LevelExactly"
        rep.level = p * N

    rep.stabilizer_index = stabilizer_index(f, p, N)
    if rep.stabilizer_index != p:
        raise InternalInconsistency(f"[Gamma(N):Gamma_1] = {rep.stabilizer_index}, expected {p}")

    H1 = stabilizer_handle(f, p, N)
    base = gamma(N)
    for c in cusp_classes(base).classes[:width_cap]:
        rep.width_samples.append(WidthSample(c, fan_width(base, c), fan_width(H1, c)))
    return rep


def scan_moduli(f: UnitProduct, p: int, moduli: Sequence[int], level: Optional[int] = None) -> dict[int, bool]:
    """For each M (a multiple of N): is chi trivial on Gamma(M)?"""
    N = _base_level(f, level)
    return {M: ambiguity_character(f, p, M, N).is_trivial() for M in moduli}


# ---------------------------------------------------------------------------
# sqrt(j - 1728)

def quad_extension_test(f: UnitProduct, prec=None, level: Optional[int] = None) -> bool:
    """Is f (j - 1728) a square of a Gamma(N)-invariant function?

    chi_f psi must be trivial on Gamma(N), psi being the sign character of
    E6/eta^12; the monic square root of qexp(f)(j - 1728) must then have its
    exponents in (1/N)Z.  The two conditions are cross-checked.
    """
    N = _base_level(f, level)
    prec = as_fraction(prec) if prec is not None else default_precision(N, 2)
    chi = ambiguity_character(f, 2, N, N)
    twisted = all((v * sqrt_j_minus_1728_sign(A)).is_one() for A, v in chi.values.items())
    fq = product_qexp(f, prec)
    jq = j_qexp(prec - fq.valuation() + 1)
    prod = fq * (jq - QSeries.constant(1728, jq.trunc_order))
    root = series_root_monic(prod.scale(prod.leading_coefficient().inverse()), 2)
    lattice_ok = all((e * N).denominator == 1 for e in root.terms)
    if twisted and not lattice_ok:
        raise InternalInconsistency("invariant square root has exponents off the 1/N lattice")
    return twisted and lattice_ok


def quad_implication_violations(f: UnitProduct, report: RootLevelReport, quad: bool) -> list[str]:
    out = []
    if not quad and report.verdict != "NoCongruenceLevel":
        out.append(f"quad test false but verdict {report.verdict_label}")
    if report.verdict == "LevelExactly" and not quad:
        out.append(f"verdict {report.verdict_label} but quad test false")
    return out


# ---------------------------------------------------------------------------
# corpus

def sample_units(N: int, p: int, count: int, seed: int = 0, max_factors: int = 4,
                 max_exponent: int = 3, max_attempts: int = 200_000) -> list[UnitProduct]:
    """Seeded level-N Siegel products whose p-th root is not Gamma(N)-invariant."""
    rng = random.Random(seed)
    symbols = [SiegelSymbol(Fraction(x, N), Fraction(y, N))
               for x in range(N) for y in range(N) if (x, y) != (0, 0)]
    gens = principal_generators(N)
    out, seen = [], set()
    for _ in range(max_attempts):
        if len(out) >= count:
            break
        k = rng.randint(1, max_factors)
        fac = {}
        for s in rng.sample(symbols, k):
            e = rng.choice([e for e in range(-max_exponent, max_exponent + 1) if e])
            fac[s] = e
        f = UnitProduct(fac)
        if not f.factors or f in seen or f.level != N:
            continue
        seen.add(f)
        if not is_invariant(f, gens).ok:
            continue
        if ambiguity_character(f, p, N, N).is_trivial():
            continue
        out.append(f)
    return out

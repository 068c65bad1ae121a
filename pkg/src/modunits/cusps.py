"""Cusps of finite-index subgroups: equivalence, fan widths and conductors."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Optional

from .psl2 import (
    SubgroupHandle,
    UniMatrix,
    _ext_gcd,
    gamma,
    lift_modn,
    schreier_generators,
)


class WidthSearchError(RuntimeError):
    pass


@dataclass(frozen=True)
class Cusp:
    """p/q in P^1(Q); infinity is 1/0."""

    p: int
    q: int

    def __post_init__(self):
        p, q = self.p, self.q
        if p == 0 and q == 0:
            raise ValueError("0/0 is not a cusp")
        g = math.gcd(p, q)
        p, q = p // g, q // g
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @classmethod
    def parse(cls, text: str) -> "Cusp":
        t = text.strip().lower()
        if t in ("oo", "inf", "infinity", "i*oo"):
            return INFINITY
        num, _, den = t.partition("/")
        return cls(int(num), int(den) if den else 1)

    def is_infinity(self) -> bool:
        return self.q == 0

    def __str__(self):
        return f"{self.p}/{self.q}"


INFINITY = Cusp(1, 0)


def act(A: UniMatrix, c: Cusp) -> Cusp:
    return Cusp(A.a * c.p + A.b * c.q, A.c * c.p + A.d * c.q)


def sigma_of(c: Cusp) -> UniMatrix:
    """[[p, x], [q, y]] of determinant 1 sending oo to c; |x| minimal, then |y|."""
    p, q = c.p, c.q
    _, y0, mx0 = _ext_gcd(p, q)  # p*y0 + q*mx0 = 1, i.e. x0 = -mx0
    x0 = -mx0
    if p == 0:
        # x is forced to -1/q = -1; make y as small as possible
        return UniMatrix(0, -1, 1, 0)
    k = -round(x0 / p)
    best = None
    for kk in (k - 1, k, k + 1):
        x, y = x0 + kk * p, y0 + kk * q
        cand = (abs(x), abs(y), x, y)
        if best is None or cand < best:
            best = cand
    _, _, x, y = best
    return UniMatrix(p, x, q, y)


def _conj_translation(c: Cusp, h: int) -> UniMatrix:
    """sigma_c S^h sigma_c^-1 = [[1 - hpq, hp^2], [-hq^2, 1 + hpq]]."""
    p, q = c.p, c.q
    return UniMatrix(1 - h * p * q, h * p * p, -h * q * q, 1 + h * p * q)


def fan_width(H: SubgroupHandle, c: Cusp) -> int:
    """Least h >= 1 with sigma_c S^h sigma_c^-1 in H."""
    bound = H.index
    for h in range(1, bound + 1):
        if H.member(_conj_translation(c, h)):
            return h
    raise WidthSearchError(f"no width <= index {bound} at {c} for {H.name}; membership oracle is broken")


def cusp_equivalent(H: SubgroupHandle, c1: Cusp, c2: Cusp, method: str = "auto") -> bool:
    """Is there h in H with h c1 = c2?

    The generic route scans h = sigma_2 S^k sigma_1^-1 over one period k < width(c1).
    For Gamma(N) the "auto" method uses the congruence (p, q) = +-(p', q') mod N.
    """
    N = H.principal_level
    if method == "auto" and N is not None:
        a = (c1.p % N, c1.q % N)
        b = (c2.p % N, c2.q % N)
        return a == b or a == ((-c2.p) % N, (-c2.q) % N)
    s1, s2 = sigma_of(c1), sigma_of(c2)
    s1_inv = s1.inverse()
    w = fan_width(H, c1)
    return any(H.member(s2 @ UniMatrix(1, k, 0, 1) @ s1_inv) for k in range(w))


@dataclass
class CuspClassSet:
    subgroup: SubgroupHandle
    classes: list[Cusp]
    widths: list[int]

    @property
    def lcm(self) -> int:
        return reduce(math.lcm, self.widths, 1)

    def to_json(self) -> dict:
        return {"classes": [str(c) for c in self.classes], "widths": list(self.widths), "lcm": self.lcm}


def _cusp_sort_key(c: Cusp):
    return (c.q, abs(c.p), c.p < 0)


def cusp_classes(H: SubgroupHandle) -> CuspClassSet:
    """Cusp classes as orbits of <S> on the right cosets H r; orbit length = width."""
    table = H.table()
    seen = [False] * len(table)
    classes, widths = [], []
    for start in range(len(table)):
        if seen[start]:
            continue
        orbit = []
        i = start
        while not seen[i]:
            seen[i] = True
            orbit.append(i)
            i = table.act_S[i]
        cands = [Cusp(table.reps[j].a, table.reps[j].c) for j in orbit]
        classes.append(min(cands, key=_cusp_sort_key))
        widths.append(len(orbit))
    order = sorted(range(len(classes)), key=lambda k: _cusp_sort_key(classes[k]))
    return CuspClassSet(H, [classes[k] for k in order], [widths[k] for k in order])


def conductor_lcm_widths(H: SubgroupHandle, classes: Optional[CuspClassSet] = None) -> int:
    """lcm of fan widths over all cusp classes (membership-search widths)."""
    classes = classes or cusp_classes(H)
    return reduce(math.lcm, (fan_width(H, c) for c in classes.classes), 1)


def _divisors(M: int) -> list[int]:
    return [d for d in range(1, M + 1) if M % d == 0]


def conductor_modular(H: SubgroupHandle, M: int, method: str = "generators") -> Optional[int]:
    """Least divisor N of M with Gamma(N) contained in H, for H whose membership factors mod M.

    "generators" tests the Schreier generators of Gamma(N); "scan" tests every
    element of ker(PSL2(Z/M) -> PSL2(Z/N)) through a lift.  None means no
    divisor works, i.e. H is not congruence at M.
    """
    for N in _divisors(M):
        if method == "generators":
            ok = all(H.member(A) for A in schreier_generators(gamma(N)))
        elif method == "scan":
            ok = all(H.member(A) for A in _kernel_lifts(M, N))
        else:
            raise ValueError(f"unknown method {method!r}")
        if ok:
            return N
    return None


def _kernel_lifts(M: int, N: int):
    from .psl2 import MatModN

    steps = range(0, M, N)
    for sign in (1, -1) if N > 2 else (1,):
        for ta in steps:
            a = sign + ta
            for td in steps:
                d = sign + td
                for b in steps:
                    for c in steps:
                        if (a * d - b * c - 1) % M == 0:
                            yield lift_modn(MatModN(M, a, b, c, d))

"""Seeded generators shared by several test files."""

import random
from fractions import Fraction

from modunits.arith import RootOfUnity
from modunits.units import SiegelSymbol, UnitProduct


def random_unit(rng: random.Random, max_den: int = 12, max_factors: int = 5) -> UnitProduct:
    factors = {}
    for _ in range(rng.randint(0, max_factors)):
        d = rng.randint(2, max_den)
        x, y = rng.randrange(d), rng.randrange(d)
        if (x, y) == (0, 0):
            continue
        s = SiegelSymbol(Fraction(x, d), Fraction(y, d))
        factors[s] = factors.get(s, 0) + (rng.randint(-4, 4) or 1)
    const = RootOfUnity(Fraction(rng.randrange(24), 24)) if rng.random() < 0.3 else RootOfUnity(0)
    return UnitProduct({s: e for s, e in factors.items() if e}, const)


# (text, byte offset of the first error)
MALFORMED = [
    ("g[1/3,0", 7),
    ("g[1/0,0]", 4),
    ("g[3/2,0]", 2),
    ("g[0,0]", 0),
    ("g[1/3,0]^", 9),
    ("g[1/3,0] g", 9),
    ("h[1,2]", 0),
    ("1 * g[1/2,0]", 2),
    ("zeta[1/2", 8),
    ("g[1/3,0] * é", 11),
]

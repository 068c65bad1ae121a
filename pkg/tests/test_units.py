import cmath
import random
from fractions import Fraction

import mpmath
import pytest

import oracles
from modunits.arith import CycloNumber, RootOfUnity, bernoulli2
from modunits.psl2 import I, S, T, UniMatrix, exact_st_word, parse_word, word_matrix
from modunits.qseries import QSeries, series_eq, series_eval_numeric
from modunits.units import (
    EtaPower,
    SiegelSymbol,
    UnitProduct,
    eta_qexp,
    is_invariant,
    j_qexp,
    numeric_multiplier,
    order_at_cusp,
    product_qexp,
    product_slash,
    siegel_log_multiplier,
    siegel_numeric,
    siegel_qexp,
    siegel_slash,
    sqrt_j_minus_1728,
    sqrt_j_minus_1728_sign,
)
from modunits.cusps import Cusp
from modunits.level import principal_generators

TAU0 = 0.05 + 0.9j


def sym(a1, a2):
    return SiegelSymbol(Fraction(a1), Fraction(a2))


def random_symbol(rng, max_den=6):
    while True:
        d = rng.randint(2, max_den)
        x, y = rng.randrange(d), rng.randrange(d)
        if (x, y) != (0, 0):
            return SiegelSymbol(Fraction(x, d), Fraction(y, d))


def small_matrix(rng, steps=4):
    w = []
    for _ in range(rng.randint(1, steps)):
        w.append(("S", rng.randint(-3, 3) or 1))
        w.append(("T", 1))
    return word_matrix(w)


def test_symbol_validation():
    with pytest.raises(ValueError):
        SiegelSymbol(Fraction(0), Fraction(0))
    with pytest.raises(ValueError):
        SiegelSymbol(Fraction(1), Fraction(1, 2))
    assert sym("1/6", "1/4").denom == 12


def test_leading_exponents():
    assert siegel_qexp(sym("1/2", 0), 3).valuation() == Fraction(-1, 24) == bernoulli2(Fraction(1, 2)) / 2
    g = siegel_qexp(sym(0, "1/2"), 3)
    assert g.valuation() == Fraction(1, 12)
    # -e(a2(a1-1)/2) (1 - e(1/2)) = -e(-1/4) * 2
    assert g.leading_coefficient() == -RootOfUnity(Fraction(-1, 4)).to_cyclo() * 2


def test_lattice_divides_level_scale():
    rng = random.Random(5)
    for _ in range(20):
        s = random_symbol(rng)
        assert (12 * s.denom ** 2) % siegel_qexp(s, 2).lattice_denom == 0


def test_series_matches_mpmath_product():
    rng = random.Random(11)
    for _ in range(8):
        s = random_symbol(rng)
        series = series_eval_numeric(siegel_qexp(s, 40), TAU0)
        direct = complex(oracles.siegel_product(s.a1, s.a2, oracles.TAU0))
        assert abs(series - direct) < 1e-8 * max(1, abs(direct))
        assert abs(siegel_numeric(s.a1, s.a2, TAU0) - direct) < 1e-10 * max(1, abs(direct))


def test_slash_identity_and_translation():
    s = sym("1/3", "1/5")
    assert siegel_slash(s, I) == (s, RootOfUnity(0))
    t, eps = siegel_slash(s, S)
    assert t == sym("1/3", Fraction(1, 3) + Fraction(1, 5))
    assert eps == numeric_multiplier(s, S)


def test_multipliers_match_numeric_snapping():
    rng = random.Random(2)
    for _ in range(60):
        s, A = random_symbol(rng), small_matrix(rng, 2)
        assert siegel_slash(s, A)[1] == numeric_multiplier(s, A)


def test_lifted_constant_matches_mpmath_logs():
    rng = random.Random(4)
    for _ in range(15):
        s, A = random_symbol(rng, 5), small_matrix(rng, 2)
        t, c = siegel_log_multiplier(s, A)
        tau = mpmath.mpc("0.1", "1.3")
        w = oracles.moebius((A.a, A.b, A.c, A.d), tau)
        raw = (oracles.siegel_log(s.a1, s.a2, w) - oracles.siegel_log(t.a1, t.a2, tau)) / (2j * mpmath.pi)
        assert abs(complex(raw) - float(c)) < 1e-12


def test_relations_have_zero_lifted_constant():
    rng = random.Random(9)
    for _ in range(20):
        s = random_symbol(rng)
        for word in ("T T T T", "S T S T S T S T S T S T", "T S T S T S T S T S T S"):
            t, c = siegel_log_multiplier(s, I, parse_word(word))
            assert t == s and c == 0


def test_slash_cocycle():
    rng = random.Random(21)
    for _ in range(50):
        s, A, B = random_symbol(rng), small_matrix(rng), small_matrix(rng)
        sA, cA = siegel_log_multiplier(s, A)
        sAB, cB = siegel_log_multiplier(sA, B)
        t, c = siegel_log_multiplier(s, A @ B)
        assert t == sAB and c == cA + cB
        assert siegel_slash(s, A @ B)[1] == siegel_slash(s, A)[1] * siegel_slash(sA, B)[1]


def test_product_expansions():
    assert product_qexp(UnitProduct(), 5) == QSeries.constant(1, 5)
    g = UnitProduct.siegel("1/3", "1/4")
    one = product_qexp(g * g.inverse(), 5)
    assert one.terms == {0: CycloNumber.rational(1)}
    f = UnitProduct.siegel("1/3", 0, 3)
    assert product_qexp(f, 4).valuation() == 3 * bernoulli2(Fraction(1, 3)) / 2 == Fraction(-1, 12)


def test_product_series_matches_numeric_product():
    f = UnitProduct({sym("1/3", 0): 2, sym("1/3", "2/3"): -1}, RootOfUnity(Fraction(1, 6)))
    lhs = series_eval_numeric(product_qexp(f, 30), TAU0)
    rhs = complex(RootOfUnity(Fraction(1, 6))) * siegel_numeric(Fraction(1, 3), 0, TAU0) ** 2 / siegel_numeric(
        Fraction(1, 3), Fraction(2, 3), TAU0)
    assert abs(lhs - rhs) < 1e-9 * abs(rhs)


def test_product_slash():
    f = UnitProduct({sym("1/3", 0): 2, sym(0, "1/3"): -1})
    assert product_slash(f, I) == f
    A = UniMatrix(2, 1, 1, 1)
    g = product_slash(f, A)
    w = (A.a * TAU0 + A.b) / (A.c * TAU0 + A.d)
    direct = siegel_numeric(Fraction(1, 3), 0, w) ** 2 / siegel_numeric(0, Fraction(1, 3), w)
    assert abs(series_eval_numeric(product_qexp(g, 30), TAU0) - direct) < 1e-8 * abs(direct)


def test_invariance_with_series_confirmation():
    f = UnitProduct({sym("1/3", 0): 3, sym("2/3", "2/3"): -3})
    res = is_invariant(f, principal_generators(3), prec=6)
    assert res.ok and res.checked == len(principal_generators(3))
    g = UnitProduct.siegel("1/3", 0)
    res = is_invariant(g, principal_generators(3))
    assert not res.ok and res.witness is not None


def test_order_at_cusps():
    f = UnitProduct.siegel("1/3", "1/4")
    assert order_at_cusp(f, Cusp(1, 0)) == bernoulli2(Fraction(1, 3)) / 2
    assert order_at_cusp(f, Cusp(0, 1)) == bernoulli2(Fraction(1, 4)) / 2


def test_eta_is_delta_to_the_24th():
    d = eta_qexp(EtaPower(24), 5)
    assert [d.coefficient(n).rational_value() for n in range(1, 5)] == [1, -24, 252, -1472]
    half = eta_qexp(EtaPower(1, 2), 3)
    assert half.valuation() == Fraction(1, 12)
    with pytest.raises(ValueError):
        EtaPower(0)


def test_j_coefficients_and_numeric():
    j = j_qexp(4)
    assert {n: j.coefficient(n).rational_value() for n in range(-1, 4)} == oracles.J_COEFFS
    tau = mpmath.mpc("0.1", "1.1")
    assert abs(series_eval_numeric(j_qexp(40), complex(tau)) - complex(oracles.j_numeric(tau))) < 1e-6


def test_sqrt_j_minus_1728():
    r = sqrt_j_minus_1728(31)
    for e, c in oracles.SQRT_J1728_COEFFS.items():
        assert r.coefficient(Fraction(e)).rational_value() == c
    sq = r * r
    target = j_qexp(30) - QSeries.constant(1728, 30)
    assert series_eq(sq, target, 30)
    tau = mpmath.mpc("0.1", "1.1")
    assert abs(series_eval_numeric(r, complex(tau)) - complex(oracles.sqrt_j1728_numeric(tau))) < 1e-8


def test_sqrt_j_minus_1728_sign_character():
    rng = random.Random(8)
    tau = mpmath.mpc("0.05", "1.05")
    base = oracles.sqrt_j1728_numeric(tau)
    for _ in range(10):
        A = small_matrix(rng, 2)
        w = oracles.moebius((A.a, A.b, A.c, A.d), tau)
        ratio = complex(oracles.sqrt_j1728_numeric(w) / base)
        assert cmath.isclose(ratio, complex(sqrt_j_minus_1728_sign(A)), abs_tol=1e-6)
    assert sqrt_j_minus_1728_sign(T) == RootOfUnity(Fraction(1, 2))


def test_unit_product_algebra():
    a = UnitProduct.siegel("1/3", 0, 2)
    b = UnitProduct.siegel("1/3", 0, -2)
    assert (a * b) == UnitProduct()
    assert a.level == 3 and UnitProduct().level == 1
    assert (a ** 3).factors == {sym("1/3", 0): 6}
    assert exact_st_word(I) == []

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gen import MALFORMED, random_unit
from modunits.grammar import UnitParseError, format_unit, parse_unit
from modunits.units import UnitProduct


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32))
def test_round_trip(seed):
    f = random_unit(random.Random(seed))
    text = format_unit(f)
    assert parse_unit(text) == f
    assert format_unit(parse_unit(text)) == text


def test_canonical_examples():
    assert format_unit(UnitProduct()) == "1"
    assert parse_unit("1") == UnitProduct()
    f = parse_unit(" g[ 1/3 , 0 ]^2*g[0,1/4]^-1 ")
    assert format_unit(f) == format_unit(parse_unit("g[0,1/4]^-1 * g[1/3,0]^2"))
    assert parse_unit("g[2/6,0]") == parse_unit("g[1/3,0]")
    assert parse_unit("g[1/3,0] * g[1/3,0]") == parse_unit("g[1/3,0]^2")


def test_zeta_constant():
    f = parse_unit("zeta[1/6] * g[1/2,0]")
    assert f.scalar.exponent == Fraction(1, 6)
    assert parse_unit(format_unit(f)) == f


@pytest.mark.parametrize("text,pos", MALFORMED)
def test_error_positions(text, pos):
    with pytest.raises(UnitParseError) as info:
        parse_unit(text)
    assert info.value.pos == pos
    assert f"byte {pos}" in str(info.value)


def test_byte_offset_counts_utf8():
    with pytest.raises(UnitParseError) as info:
        parse_unit("g[1/3,0]é x")
    assert info.value.pos == 8

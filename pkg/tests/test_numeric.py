from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stackel.numeric import NEG_INF, POS_INF, format_fraction, to_fraction


def test_parses_rational_strings():
    assert to_fraction("1/3") == Fraction(1, 3)
    assert to_fraction(" -4 ") == -4
    assert to_fraction(7) == 7


@pytest.mark.parametrize("bad", ["0.5", "1e3", ""])
def test_rejects_inexact_text(bad):
    with pytest.raises(ValueError):
        to_fraction(bad)


@pytest.mark.parametrize("bad", [0.5, True, None])
def test_rejects_non_rationals(bad):
    with pytest.raises(TypeError):
        to_fraction(bad)


@given(st.fractions())
def test_format_round_trips(x):
    assert to_fraction(format_fraction(x)) == x


@given(st.fractions())
def test_infinities_bracket_every_rational(x):
    assert NEG_INF < x < POS_INF
    assert -POS_INF == NEG_INF
    assert max(NEG_INF, x) == x


def test_infinities_format():
    assert format_fraction(NEG_INF) == "-inf"
    assert format_fraction(POS_INF) == "inf"

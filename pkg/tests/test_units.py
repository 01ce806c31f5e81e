import math

import pytest
from hypothesis import given, strategies as st

from bragg_decoherence.units import AMU, HBAR, Quantity, UnitError, convert, exp_neg


def test_codata_2018_values():
    assert HBAR == 1.054571817e-34
    assert AMU == 1.66053906660e-27


@pytest.mark.parametrize("value, a, b, expected, tol", [
    (3, "pm", "m", 3e-12, 1e-27),
    (720, "amu", "kg", 1.19559e-24, 1e-29),
    (10, "1/nm", "1/m", 1e10, 1e-5),
    (1, "ps", "s", 1e-12, 0),
])
def test_convert_examples(value, a, b, expected, tol):
    assert convert(value, a, b) == pytest.approx(expected, abs=tol, rel=1e-15)


def test_convert_rejects_dimension_mismatch():
    with pytest.raises(UnitError):
        convert(1.0, "pm", "kg")
    with pytest.raises(UnitError):
        convert(1.0, "furlong", "m")


UNIT_PAIRS = [("pm", "nm"), ("nm", "m"), ("amu", "kg"), ("ps", "us"), ("1/nm", "1/pm")]


@given(st.floats(min_value=-1e30, max_value=1e30).filter(lambda x: x == 0 or abs(x) > 1e-250),
       st.sampled_from(UNIT_PAIRS))
def test_round_trip(x, pair):
    a, b = pair
    back = convert(convert(x, a, b), b, a)
    assert back == pytest.approx(x, rel=1e-15, abs=1e-300)


def test_quantity_dimensions():
    q = Quantity.of(10, "1/nm")
    s = Quantity.of(3, "pm")
    x = (q * s) ** 2
    assert x.dimension == "dimensionless"
    assert float(x) == pytest.approx(9e-4, rel=1e-12)
    assert (Quantity.of(1, "amu") * Quantity.of(1, "nm") ** 2 / Quantity.of(1, "s")).dimension == "action"
    with pytest.raises(UnitError):
        q + s
    with pytest.raises(UnitError):
        float(s)
    assert s.to("m") == pytest.approx(3e-12)


def test_exponent_guard():
    assert exp_neg(Quantity(0.5)) == math.exp(-0.5)
    with pytest.raises(UnitError):
        exp_neg(Quantity.of(3, "pm"))

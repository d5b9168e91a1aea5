import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from qudit_decoherence.rates import (PresetError, RateSchedule, parse_preset,
                                     schedule_from_text, split_preset_list)


def test_preset_values():
    assert parse_preset("0.5")(3.0) == 0.5
    assert parse_preset("const(2)")(1.0) == 2.0
    assert parse_preset("exp-decay(2)")(1.0) == pytest.approx(math.exp(-2))
    assert parse_preset("tanh(1)")(0.5) == pytest.approx(math.tanh(0.5))
    assert parse_preset("neg-tanh(1, 2)")(0.5) == pytest.approx(-2 * math.tanh(0.5))


@pytest.mark.parametrize("text", ["", "foo(1)", "tanh()", "tanh(1,2,3)", "tanh(x)", "const(1"])
def test_bad_presets(text):
    with pytest.raises(PresetError):
        parse_preset(text)


@given(st.sampled_from(["const(0.7)", "exp-decay(0.3)", "tanh(2)", "neg-tanh(1.5, 0.5)",
                        "exp-decay(1e-3, 2)"]),
       st.floats(0, 5), st.floats(0, 5))
def test_exact_integral_matches_quadrature(text, a, b):
    p = parse_preset(text)
    t0, t1 = min(a, b), max(a, b)
    assert p.integral(t0, t1) == pytest.approx(quad(p, t0, t1)[0], abs=1e-10)


def test_tanh_integral_stays_finite_at_large_argument():
    p = parse_preset("tanh(50)")
    assert p.integral(0, 100) == pytest.approx(100 - math.log(2) / 50, rel=1e-12)


def test_split_list():
    assert split_preset_list("1, tanh(1,2); neg-tanh(3)") == ["1", "tanh(1,2)", "neg-tanh(3)"]


def test_schedule_from_text_skips_identity():
    labels = ("I", "x", "y", "z")
    s = schedule_from_text(labels, "0.3", skip="I")
    assert s(1.0).tolist() == [0.0, 0.3, 0.3, 0.3]
    s = schedule_from_text(labels, "1,2,tanh(1)", skip="I")
    assert s(0.0).tolist() == [0.0, 1.0, 2.0, 0.0]
    with pytest.raises(PresetError):
        schedule_from_text(labels, "1,2", skip="I")


def test_schedule_integral_and_functions():
    s = RateSchedule.from_functions(("a", "b"), (lambda t: t, lambda t: 1.0))
    assert s.integral(0, 2) == pytest.approx([2.0, 2.0])
    s2 = s.with_rate("a", "const(3)")
    assert s2.rate("a", 10.0) == 3.0
    assert np.array_equal(RateSchedule.constant(("a", "b"), 1.5)(0), [1.5, 1.5])

import numpy as np
import pytest

from fracfde.errors import ConfigError
from fracfde.expressions import compile_expression


def test_basic_arithmetic():
    f = compile_expression("2*t + s/4 - 1", ("t", "s"))
    assert f(3.0, 8.0) == 7.0


def test_power_both_spellings():
    f = compile_expression("t**2", ("t",))
    g = compile_expression("t^2", ("t",))
    assert f(3.0) == g(3.0) == 9.0


def test_functions_and_unary_minus():
    f = compile_expression("exp(-t) + sin(t) + cos(t) + log(t)", ("t",))
    t = 0.7
    expected = np.exp(-t) + np.sin(t) + np.cos(t) + np.log(t)
    assert f(t) == pytest.approx(expected, rel=1e-15)


def test_broadcasts_over_arrays():
    f = compile_expression("u1 + 2*u2", ("t", "s", "u1", "u2"))
    t = np.zeros((3, 1))
    s = np.zeros((1, 4))
    u1 = np.ones((1, 4))
    u2 = np.full((1, 4), 3.0)
    out = f(t, s, u1, u2)
    assert out.shape == (1, 4)
    np.testing.assert_allclose(out, 7.0)


def test_unknown_variable_rejected():
    with pytest.raises(ConfigError):
        compile_expression("t + q", ("t",))


def test_function_whitelist():
    with pytest.raises(ConfigError):
        compile_expression("__import__('os')", ("t",))
    with pytest.raises(ConfigError):
        compile_expression("abs(t)", ("t",))


def test_attribute_access_rejected():
    with pytest.raises(ConfigError):
        compile_expression("t.real", ("t",))


def test_comparison_rejected():
    with pytest.raises(ConfigError):
        compile_expression("t < 1", ("t",))


def test_syntax_error_reported():
    with pytest.raises(ConfigError):
        compile_expression("2*(t", ("t",))


def test_signature_enforced():
    f = compile_expression("t", ("t",))
    with pytest.raises(TypeError):
        f(1.0, 2.0)

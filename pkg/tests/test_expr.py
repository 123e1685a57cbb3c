"""
Copyright (c) Facebook, Inc. and its affiliates.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.
"""

from hypothesis import assume, given, settings
from hypothesis import strategies as st

import numpy as np
import pytest

from diffnev import expr as ex
from diffnev.errors import ExprSyntaxError

z = ex.var('z')

points = st.complex_numbers(max_magnitude=2, allow_nan=False,
                            allow_infinity=False)


def test_constructors_fold_constants():
    assert ex.add(1, 2) == ex.const(3)
    assert ex.mul(0, z) == ex.ZERO
    assert ex.mul(1, z) == z
    assert ex.div(z, 1) == z
    assert ex.power(z, 0) == ex.ONE
    assert ex.exp(0) == ex.const(1)
    assert (2 * z).op == ex.MUL


def test_division_by_exact_zero():
    assert ex.evaluate(ex.div(1, z), 0) == ex.INFINITY
    assert ex.is_domain_error(ex.evaluate(ex.div(z, z), 0))
    assert ex.is_infinite(ex.evaluate(ex.div(1, z), np.array([0, 1]))).tolist() \
        == [True, False]


def test_evaluate_preserves_shape():
    f = ex.sin(z) + z**2
    assert isinstance(ex.evaluate(f, 0.5), complex)
    grid = np.arange(6).reshape(2, 3) + 0.5j
    assert ex.evaluate(f, grid).shape == (2, 3)
    assert np.allclose(ex.evaluate(f, grid), np.sin(grid) + grid**2)


def test_integer_power_is_exact():
    assert ex.evaluate(z**2, 1 + 1j) == 2j
    assert np.isclose(ex.evaluate(z**-2, 1 + 1j), -0.5j)


def test_shift_and_scale():
    f = ex.exp(z) * z
    assert np.isclose(ex.evaluate(ex.shift(f, 1.5), 0.3),
                      ex.evaluate(f, 1.8))
    g = ex.substitute_scale(f, 0.1)
    assert np.isclose(ex.evaluate(g, 0.05), ex.evaluate(f, 0.5))
    with pytest.raises(ValueError):
        ex.substitute_scale(f, 0)


def test_nested_affine_composes():
    f = ex.shift(ex.shift(ex.sin(z), 1), 2)
    assert f.op == ex.AFFINE
    assert f.args[0].op == ex.SIN
    assert f.args[2] == 3


@settings(deadline=None, max_examples=50)
@given(points)
def test_log_abs_matches_direct_evaluation(w):
    f = ex.div(ex.sin(2 * z) - ex.cos(z) * ex.exp(1j * z), ex.shift(z, 3)**2)
    assume(abs(ex.evaluate(f, w)) > 1e-3)
    assert np.isclose(ex.log_abs(f, w), np.log(abs(ex.evaluate(f, w))),
                      rtol=1e-9, atol=1e-9)


def test_log_abs_beyond_the_float_range():
    Q = ex.exp(10j * np.pi * z)
    assert not np.isfinite(ex.evaluate(Q, -50j))
    assert np.isclose(ex.log_abs(Q, -50j), 500 * np.pi, rtol=1e-12)
    assert np.isclose(ex.log_abs(ex.div(z**2 + Q**2, 2 * z * Q), -50j),
                      500 * np.pi - np.log(100), rtol=1e-12)
    assert np.isclose(ex.log_abs(ex.sin(z), 800j), 800 - np.log(2),
                      rtol=1e-12)
    values = ex.log_abs(ex.div(1, z) + ex.sin(z), np.array([0, 1j]))
    assert values.shape == (2,)
    assert values[0] == np.inf and np.isfinite(values[1])


@settings(deadline=None, max_examples=50)
@given(points)
def test_derivative_matches_difference_quotient(w):
    f = ex.div(ex.sin(2 * z) + ex.exp(1j * z), z**2 + 9)
    h = 1e-6
    numeric = (ex.evaluate(f, w + h) - ex.evaluate(f, w - h)) / (2 * h)
    assert np.isclose(ex.evaluate(ex.differentiate(f), w), numeric,
                      rtol=1e-5, atol=1e-6)


@settings(deadline=None, max_examples=50)
@given(points)
def test_printing_parses_back(w):
    f = ex.shift(ex.div(1 + 0.5 * ex.exp(1j * np.pi * z), z**2 - 7), 0.25)
    g = ex.parse(ex.to_text(f))
    assert np.isclose(ex.evaluate(f, w), ex.evaluate(g, w), rtol=1e-12)


def test_parse_grammar():
    f = ex.parse('(1 + b*exp(pi*i*z) - exp(2*pi*i*z))/(exp(2*pi*i*z) - 1)',
                 {'b': 2.0})
    w = 0.3 + 0.2j
    u = np.exp(1j * np.pi * w)
    assert np.isclose(ex.evaluate(f, w), (1 + 2 * u - u**2) / (u**2 - 1))
    assert ex.parse('2^3') == ex.const(8)
    assert np.isclose(ex.evaluate(ex.parse('t^-1'), 4), 0.25)
    assert ex.evaluate(ex.parse('-z + +z'), 5) == 0


@pytest.mark.parametrize('text, position', [
    ('z +', 3),
    ('z $ 1', 2),
    ('sin z', 4),
    ('z^1.5', 2),
    ('y + 1', 0),
])
def test_parse_errors_carry_position(text, position):
    with pytest.raises(ExprSyntaxError) as error:
        ex.parse(text)
    assert error.value.position == position


def test_bind_params():
    params = ex.bind_params({'a': 'pi/3', 'c': [1, 2], 'b': 'a*2', 'n': 4})
    assert np.isclose(params['a'].args[0], np.pi / 3)
    assert params['c'] == 1 + 2j
    assert np.isclose(params['b'].args[0], 2 * np.pi / 3)
    assert params['n'] == 4


def test_polynomials():
    h = (z + 1) * (z - 2)**2
    assert ex.polynomial_degree(h) == 3
    assert np.allclose(ex.polynomial_coefficients(h), [4, 0, -3, 1])
    roots = dict((round(r.real, 6), m) for r, m in ex.polynomial_roots(h))
    assert roots == {-1.0: 1, 2.0: 2}
    assert ex.polynomial_degree(ex.exp(z)) is None
    # structural bound against exact degree
    assert ex.polynomial_degree((z + 1) - z) == 1
    assert len(ex.polynomial_coefficients((z + 1) - z)) == 1


def test_vanishing_order():
    f = ex.power(ex.sin(z), 2) * (z - 1)
    assert ex.vanishing_order(f, 0) == 2
    assert ex.vanishing_order(f, 1) == 1
    assert ex.vanishing_order(f, 0.5) == 0

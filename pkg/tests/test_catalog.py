"""
Copyright (c) Facebook, Inc. and its affiliates.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.
"""

from diffnev import catalog
from diffnev import expr as ex
from diffnev.diffops import casoratian
from diffnev.equations import G_of, RESIDUAL_TOL
from diffnev.errors import ParameterConstraintViolation, UnknownEntry
from diffnev.meromorphic import expand, regular_grid

import numpy as np
import pytest

IDS = ['ex2_1', 'ex2_2', 'ex2_3', 'ex2_4', 'ex3_1', 'ex3_2', 'ex5_1']


def test_list_entries():
    entries = catalog.list_entries()
    assert [entry_id for entry_id, _, _ in entries] == IDS
    for _, schema, notes in entries:
        assert notes
        assert all(spec.default is not None for spec in schema)


@pytest.mark.parametrize('entry_id', IDS)
def test_default_entries_pass_the_residual_suite(entry_id):
    table = catalog.residual_suite(catalog.get(entry_id))
    assert table['passed'].all()
    assert (table['points'] == 200).all()


@pytest.mark.parametrize('entry_id, params', [
    ('ex2_1', {'a': 'pi/4'}),
    ('ex2_1', {'a': 2.5}),
    ('ex2_2', {'b': 1.5 + 0.5j, 'b2': -3}),
    ('ex2_3', {'c0': 0.5, 'c1': 1.2}),
    ('ex2_4', {'q': 0.7, 'm': -2}),
    ('ex3_1', {'C': 0.8}),
    ('ex5_1', {'h': 'z^2 + 1', 'm2': 3}),
    ('ex5_1', {'h': '2*z - 1', 'q2': 0.5}),
])
def test_entries_with_other_parameters(entry_id, params):
    table = catalog.residual_suite(catalog.get(entry_id, **params), n=60)
    assert table['passed'].all()


def test_parameters_are_bound_from_text():
    entry = catalog.get('ex2_1', a='pi/4')
    assert np.isclose(entry.parameters['a'], np.pi / 4)
    assert catalog.get('ex2_4', m='3').parameters['m'] == 3
    assert ex.polynomial_degree(catalog.get('ex5_1', h='z^2').parameters['h']) == 2


def test_unknown_entry():
    with pytest.raises(UnknownEntry):
        catalog.get('ex9_9')
    with pytest.raises(KeyError):
        catalog.get('ex9_9')


@pytest.mark.parametrize('entry_id, params', [
    ('ex2_1', {'a': 0}),
    ('ex2_1', {'a': 'pi'}),
    ('ex2_1', {'a': 'z'}),
    ('ex2_1', {'alpha': 1}),
    ('ex2_2', {'b': 0}),
    ('ex2_3', {'c0': 2, 'c1': 0}),
    ('ex2_3', {'c0': 1, 'c1': 1}),
    ('ex2_3', {'c0': 0, 'c1': 0}),
    ('ex2_4', {'m': 1.5}),
    ('ex2_4', {'m': 0}),
    ('ex3_1', {'C': 0}),
    ('ex5_1', {'h': 'exp(z)'}),
    ('ex5_1', {'h': '3'}),
    ('ex5_1', {'h': 'z + '}),
    ('ex2_4', {'Q': 'exp(pi*i*z)'}),
    ('ex2_4', {'Q': 'z'}),
    ('ex2_3', {'beta': '0'}),
    ('ex2_3', {'beta': '2'}),
    ('ex5_1', {'Q2': '1/sin(pi*z)'}),
])
def test_parameter_constraints(entry_id, params):
    with pytest.raises(ParameterConstraintViolation):
        catalog.get(entry_id, **params)


def test_sine_pair():
    entry = catalog.get('ex2_1', a=0.9)
    f1, f2 = entry.solutions
    grid = regular_grid([f1, f2], catalog.SUITE_BOX, 50, shifts=(0, 1))
    H = ex.evaluate(casoratian(f1, f2), grid)
    assert np.allclose(H, entry.extras['casoratian'])
    zeros = [s.location for s in expand(f1.ledger, 4)]
    assert np.allclose(np.sin(0.9 * np.array(zeros)), 0)


def test_f_b_ledger():
    f_b = catalog.get('ex2_2', b=1.0).solutions[0]
    singularities = expand(f_b.ledger, 3)
    poles = sorted(s.location.real for s in singularities if s.kind == 'pole')
    assert poles == [-2, -1, 0, 1, 2]
    zeros = np.array([s.location for s in singularities if s.kind == 'zero'])
    assert len(zeros) > 0
    assert np.allclose(ex.evaluate(f_b.expr, zeros), 0, atol=1e-10)


def test_f_beta_G_closed_form():
    entry = catalog.get('ex2_3')
    f = entry.solutions[0]
    grid = catalog.suite_grid(entry, 50)
    G = G_of(entry.equation, f, grid)
    closed = ex.evaluate(entry.extras['G_closed_form'], grid)
    assert np.max(np.abs(G - closed) / (1 + np.abs(closed))) < RESIDUAL_TOL


def test_rational_solution_ledger():
    f = catalog.get('ex2_4', q=1.0, m=1).solutions[0]
    zeros = np.array([s.location for s in expand(f.ledger, 4)
                      if s.kind == 'zero'])
    assert len(zeros) > 0
    z, Q = zeros, np.exp(2j * np.pi * zeros)
    assert np.allclose(np.abs(z**2 + Q**2) / (1 + np.abs(z)**2), 0, atol=1e-9)

    f = catalog.get('ex5_1', h='z^2 + 1').solutions[0]
    assert not f.ledger.zeros_declared


def test_odd_part_of_G():
    entry = catalog.get('ex5_1')
    G1, G2 = entry.extras['G']
    assert not G1.ledger.even_unlisted
    odd = [s for s in expand(G1.ledger, 3) if s.multiplicity % 2]
    assert sorted((round(s.location.real, 9), s.multiplicity)
                  for s in odd) == [(-1, 1), (0, 3)]
    assert catalog.get('ex5_1', h='z^2 + 1').extras['G'][0].ledger.even_unlisted



def _locations(f, r):
    return sorted((s.location for s in expand(f.ledger, r)),
                  key=lambda w: (round(w.real, 6), round(w.imag, 6)))

@pytest.mark.parametrize('text, expected', [
    ('exp(2*pi*i*z)', (1, 1)),
    ('3*exp(-4*pi*i*z)', (3, -2)),
    ('exp(2*pi*i*z)^2/2', (0.5, 2)),
    ('exp(2*pi*i*z + 1)', (np.e, 1)),
    ('exp(pi*i*z)', None),
    ('exp(2*pi*i*z) + 1', None),
    ('sin(2*pi*z)', None),
])
def test_match_periodic_exponential(text, expected):
    match = catalog.match_periodic_exponential(ex.parse(text))
    if expected is None:
        assert match is None
    else:
        assert np.isclose(match[0], expected[0]) and match[1] == expected[1]


@pytest.mark.parametrize('text, expected', [
    ('2 - 0.5*exp(2*pi*i*z)', (2, -0.5)),
    ('exp(2*pi*i*z) + 1', (1, 1)),
    ('0.5', (0.5, 0)),
    ('1 + exp(4*pi*i*z)', None),
    ('1 + cos(2*pi*z)', None),
])
def test_match_periodic_coefficient(text, expected):
    match = catalog.match_periodic_coefficient(ex.parse(text))
    if expected is None:
        assert match is None
    else:
        assert np.allclose(match, expected)


def test_periodic_parameters_given_as_expressions():
    entry = catalog.get('ex5_1', h='z', Q='exp(2*pi*i*z)')
    grid = catalog.suite_grid(entry, 50)
    assert np.allclose(ex.evaluate(entry.equation.A.expr, grid),
                       1 / (grid * (grid + 1)))
    f, reference = entry.solutions[0], catalog.get('ex2_4').solutions[0]
    assert not f.derived and f.ledger.zeros_declared
    assert np.allclose(_locations(f, 4), _locations(reference, 4))
    assert catalog.residual_suite(entry, n=60)['passed'].all()

    entry = catalog.get('ex2_3', beta='1 + 0.5*exp(2*pi*i*z)')
    assert not entry.solutions[0].derived
    assert np.allclose(_locations(entry.solutions[0], 4),
                       _locations(catalog.get('ex2_3').solutions[0], 4))


@pytest.mark.parametrize('entry_id, params', [
    ('ex2_4', {'Q': '2 + sin(2*pi*z)'}),
    ('ex2_3', {'beta': '1 + 0.5*cos(2*pi*z)'}),
    ('ex5_1', {'Q2': 'exp(2*pi*i*z) + exp(4*pi*i*z)'}),
])
def test_other_periodic_parameters_give_derived_solutions(entry_id, params):
    entry = catalog.get(entry_id, **params)
    derived = [f for f in entry.solutions if f.derived]
    assert len(derived) == 1
    assert not derived[0].ledger.zeros_declared
    assert catalog.residual_suite(entry, n=60)['passed'].all()
    if entry_id == 'ex5_1':
        assert [G.derived for G in entry.extras['G']] == [False, True]

"""
Copyright (c) Facebook, Inc. and its affiliates.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.
"""

from utils import exp_proximity, integer_lattice_counting, sine_proximity
from diffnev import catalog
from diffnev import expr as ex
from diffnev.errors import (IncompleteLedger, NonFiniteSampleWarning,
                            OriginPoleSmallRadius, PoleOnCircle,
                            ZeroCharacteristic)
from diffnev.meromorphic import (POLE, ZERO, Lattice, MeromorphicFunction,
                                 Singularity, entire, make_ledger)
from diffnev.nevanlinna import (N_O, N_O_bar, TABLE_COLUMNS,
                                characteristic_T, characteristic_table,
                                counting, counting_slope, first_main_drift,
                                growth_ratio, log_plus, proximity_m)

import math
import warnings

import numpy as np
import pytest

z = ex.var('z')


def f_b():
    return catalog.get('ex2_2', b=1).solutions[0]


def sine():
    return entire(ex.sin(z), 'sin', [Lattice(0, np.pi, 1, ZERO)])


def test_log_plus():
    assert log_plus(0) == 0
    assert log_plus(0.5) == 0
    assert np.isclose(log_plus(math.e), 1)
    assert np.allclose(log_plus(np.array([0, 1, math.e**2])), [0, 0, 2])


def test_proximity_of_exponential():
    for r in (1, 5, 20):
        m = proximity_m(entire(ex.exp(z), 'exp'), r)
        assert abs(m.value / exp_proximity(r) - 1) < 1e-3
        assert m.error < 1e-2


def test_proximity_of_sine():
    m = proximity_m(sine(), 20)
    assert abs(m.value - sine_proximity(20)) < 0.05


def test_values_beyond_the_float_range():
    with warnings.catch_warnings():
        warnings.simplefilter('error')
        m = proximity_m(entire(ex.exp(ex.exp(z)), 'exp exp'), 10)
    assert np.isfinite(m.value) and m.value > 100

    with pytest.warns(NonFiniteSampleWarning):
        m = proximity_m(entire(ex.exp(ex.exp(ex.exp(z))), 'exp exp exp'), 10)
    assert m.value == math.inf


def test_counting_matches_closed_form():
    for r in (1.5, 9.5, 20.5):
        breakdown = counting(f_b(), r)
        assert np.isclose(breakdown.N, integer_lattice_counting(r), rtol=1e-12)
        assert breakdown.n == 2 * math.floor(r) + 1
        assert breakdown.n == breakdown.n_bar == breakdown.n_odd


def test_counting_edge_cases():
    with pytest.raises(PoleOnCircle):
        counting(f_b(), 10)
    with pytest.raises(OriginPoleSmallRadius):
        counting(f_b(), 0.5)
    with pytest.raises(ValueError):
        counting(f_b(), -1)
    partial = f_b()._replace(ledger=f_b().ledger._replace(even_unlisted=True))
    with pytest.raises(IncompleteLedger):
        counting(partial, 3)


def test_barred_and_odd_counting():
    f = MeromorphicFunction(
        ex.div(z - 2, ex.power(z, 2) * ex.power(z - 1, 3)),
        make_ledger([Singularity(0, 2, POLE), Singularity(1, 3, POLE),
                     Singularity(2, 1, ZERO)]))
    r = 3
    breakdown = counting(f, r)
    assert breakdown.n == 5 and breakdown.n_bar == 2
    assert breakdown.n_odd == 3 and breakdown.n_bar_odd == 1
    assert np.isclose(breakdown.N, 5 * math.log(3))
    assert np.isclose(breakdown.N_bar, 2 * math.log(3))
    assert np.isclose(N_O(f, r), 3 * math.log(3) + math.log(1.5))
    assert np.isclose(N_O_bar(f, r), math.log(3) + math.log(1.5))

    undeclared = f._replace(ledger=f.ledger._replace(zeros_declared=False))
    with pytest.raises(IncompleteLedger):
        N_O(undeclared, r)


def test_counting_slope():
    slope = counting_slope(f_b(), np.arange(20, 100) + 0.5)
    assert abs(slope - 2) < 0.1


def test_characteristic_table():
    radii = [2.5, 5.5, 8.5]
    table = characteristic_table(f_b(), radii, nodes=512)
    assert list(table.columns) == TABLE_COLUMNS
    assert table['r'].tolist() == radii
    assert np.allclose(table['T'], table['m'] + table['N'])
    estimate = characteristic_T(f_b(), 5.5, 512)
    assert np.isclose(estimate.T, table['T'].iloc[1])


def test_growth_ratio():
    entry = catalog.get('ex2_1')
    report = growth_ratio(*entry.solutions, np.linspace(5, 50, 10))
    assert report.trend == 'consistent'
    assert abs(report.final_ratio - 1) < 0.05
    assert len(report.table) == 10

    with pytest.raises(ZeroCharacteristic):
        growth_ratio(sine(), entire(ex.const(0.5), 'half'), [5, 10])


def test_first_main_theorem():
    report = first_main_drift(sine(), [4.7, 7.8, 11.0])
    assert abs(report.constant) < 1e-2
    assert report.drift < 1e-3


def test_characteristic_is_nondecreasing():
    radii = np.arange(20) + 1.5
    table = characteristic_table(f_b(), radii, nodes=512)
    for column in ('n', 'n_bar', 'n_odd', 'N'):
        assert np.all(np.diff(table[column]) >= 0)
    assert np.all(np.diff(table['T']) >= -table['quad_error'].iloc[1:].values)


@pytest.mark.parametrize('f, r', [(sine(), 7.3), (f_b(), 5.5)])
def test_doubling_nodes_stays_within_error(f, r):
    coarse = proximity_m(f, r, 2048)
    fine = proximity_m(f, r, 4096)
    assert abs(fine.value - coarse.value) <= coarse.error + 1e-4


def test_growth_of_solutions_with_distinct_periods():
    f1, f2 = catalog.get('ex5_1').solutions
    radii = np.linspace(5, 50, 10)
    report = growth_ratio(f1, f2, radii)
    assert np.all(np.diff(report.table['T1']) > 0)
    assert np.all(np.diff(report.table['T2']) > 0)
    assert abs(report.final_ratio - 0.2) < 0.02
    # log|e^{10 pi i z}| = 10 pi r |sin theta| averages to 20 r
    assert abs(report.table['T2'].iloc[-1] / (20 * 50) - 1) < 0.05


def test_first_main_theorem_over_many_poles():
    radii = np.linspace(5, 50, 10) + 0.5
    report = first_main_drift(f_b(), radii)
    assert report.drift <= 0.1
    assert np.all(np.diff(report.table['T']) > 0)
    assert report.table['T'].iloc[-1] > 50

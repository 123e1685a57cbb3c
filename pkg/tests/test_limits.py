"""
Copyright (c) Facebook, Inc. and its affiliates.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.
"""

from diffnev import catalog
from diffnev import expr as ex
from diffnev.equations import residual_main, residual_ode
from diffnev.errors import NonConvergentWarning, ResidualUnderflowWarning
from diffnev.limits import (DEFAULT_T_GRID, DIRECT, INDIRECT,
                            RESIDUAL_COLUMNS, coefficient_limit,
                            convergence_order, discrete_residual,
                            eps_schedule, experiment_from_record,
                            indirect_experiment, lambert_subsequence,
                            limiting_residual, load_experiment,
                            run_experiment, scale_equation,
                            subsequence_defect)
from diffnev.meromorphic import (MeromorphicFunction, regular_grid,
                                 scale_function)

import json
import warnings

import numpy as np
import pytest

z, t = ex.var('z'), ex.var('t')


def sine_family(eps):
    return (ex.const(-4 * np.sin(eps)**2 / eps**2), ex.const(np.cos(eps)**2))


def test_eps_schedule():
    assert np.allclose(eps_schedule(1, 0.5, 4), [1, 0.5, 0.25, 0.125])
    assert len(eps_schedule()) == 12
    for args in ((0, 0.5, 4), (1, 1, 4), (1, 0.5, 0)):
        with pytest.raises(ValueError):
            eps_schedule(*args)


def test_direct_connection_scales_the_equation():
    base = catalog.get('ex2_4').equation
    f = MeromorphicFunction(z**2, label='z^2')
    eps = 0.1
    points = eps * regular_grid([base.A, base.B], (1, 4, -1, 1), 40)
    At, Bt = scale_equation(base.A, base.B, eps)
    scaled = discrete_residual(At, Bt, scale_function(f, eps), points, eps)
    original = residual_main(base, f, points / eps)
    assert np.allclose(scaled * eps**2, original, rtol=1e-10)
    with pytest.raises(ValueError):
        scale_equation(base.A, base.B, 0)


def test_coefficient_limit():
    limit = coefficient_limit(lambda eps: ex.const(1 + eps + 3 * eps**2),
                              np.array([0.5, 1.0]))
    assert limit.converged
    assert np.allclose(limit.value, 1, atol=1e-10)

    limit = coefficient_limit(lambda eps: 2.0 * t, np.array([1.5]))
    assert limit.converged and len(limit.diagonal) == 1
    assert np.allclose(limit.value, 3)

    with pytest.warns(NonConvergentWarning):
        limit = coefficient_limit(lambda eps: ex.const(np.sin(1 / eps)),
                                  np.array([1.0]))
    assert not limit.converged


def test_limiting_residual_is_the_ode_residual():
    experiment = indirect_experiment('sin 3t', sine_family, ex.sin(3 * t))
    points = DEFAULT_T_GRID
    limit = limiting_residual(experiment, points)
    ode = residual_ode(-4, 1, ex.sin(3 * t), points)
    assert np.max(np.abs(ode)) > 1
    assert np.allclose(limit, ode, rtol=1e-8, atol=1e-8)


def test_convergence_order_of_frozen_coefficients():
    experiment = catalog.get('ex3_1').extras['limit']
    result = convergence_order(experiment)
    assert not result.underflow
    assert result.order >= 0.95
    assert list(result.table.columns) == RESIDUAL_COLUMNS
    assert np.all(np.diff(result.table['eps']) < 0)


def test_exact_families_underflow():
    experiment = catalog.get('ex3_1').extras['direct']
    with pytest.warns(ResidualUnderflowWarning):
        result = convergence_order(experiment)
    assert result.underflow
    assert result.table['max_relative'].max() < 1e-9

    table = run_experiment(catalog.get('ex3_2', phi=0.5).extras['indirect'])
    assert table['max_relative'].max() < 1e-10


def test_lambert_subsequence():
    q, m, C, t0 = 1.0, 1, 1.3, 1.0 + 0.25j
    sequence = lambert_subsequence(q, m, C, t0, 10)
    Q = catalog.periodic_exponential(q, m)
    assert np.max(subsequence_defect(Q, C, t0, sequence)) < 1e-9 * C
    assert np.all(np.diff(np.abs(sequence)) < 0)


def test_experiment_record(tmp_path):
    record = {'label': 'sine', 'mode': INDIRECT,
              'A': '-4*sin(eps)^2/eps^2', 'B': 'cos(eps)^2',
              'candidate': 'sin(2*t + phi*eps)', 'params': {'phi': 0.3},
              'schedule': {'start': 0.5, 'ratio': 0.5, 'steps': 6},
              'grid': {'box': [0.5, 2, -0.5, 0.5], 'n': 16}}
    path = str(tmp_path / 'experiment.json')
    with open(path, 'w') as f:
        json.dump(record, f)
    experiment = load_experiment(path)
    assert experiment.mode == INDIRECT
    assert len(experiment.schedule) == 6 and len(experiment.grid) == 16
    assert run_experiment(experiment)['max_relative'].max() < 1e-10

    direct = experiment_from_record({'A': '1/(z*(z+1))',
                                     'B': '(1+2*z)^2/(4*z*(z+1))',
                                     'candidate': '(C^2 + t^2)/(2*C*t)',
                                     'params': {'C': 1.3}})
    assert direct.mode == DIRECT
    with warnings.catch_warnings():
        warnings.simplefilter('ignore')
        assert convergence_order(direct).underflow

    with pytest.raises(ValueError):
        experiment_from_record({'mode': 'sideways', 'A': '1',
                                'candidate': 't'})

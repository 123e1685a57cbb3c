"""
Copyright (c) Facebook, Inc. and its affiliates.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.

-------------------------------------------------------------------

Continuous limits of the difference equation. With t = eps*z and
f(z) = w(t, eps) the equation becomes

    (w(t+eps) - w(t))^2 = eps^2 At(t, eps) (w(t) w(t+eps) - Bt(t, eps))

and, as eps -> 0, the differential equation w'^2 = At(t, 0)(w^2 - Bt(t, 0)).
In the direct connection At = A(t/eps)/eps^2 and Bt = B(t/eps); in the
indirect connection the caller supplies eps -> (At, Bt).

Residuals here are divided by eps^2, which makes them comparable to the
residual of the differential equation.
"""

from collections import namedtuple
from joblib import Parallel, delayed
from scipy.special import lambertw
from scipy.stats import linregress

import json
import warnings

import numpy as np
import pandas as pd

from diffnev import expr as ex
from diffnev.equations import as_function, check_regular, combine, values_at
from diffnev.errors import NonConvergentWarning, ResidualUnderflowWarning
from diffnev.meromorphic import MeromorphicFunction, box_grid, scale_function


DIRECT, INDIRECT = 'direct', 'indirect'

EPS_START, EPS_RATIO, EPS_STEPS = 0.5, 0.5, 12

# Successive extrapolants further apart than this (relative) do not converge.
EXTRAPOLATION_TOL = 1e-6

# Relative residuals below this are at the rounding floor.
RESIDUAL_FLOOR = 1e-10

DEFAULT_T_GRID = box_grid((0.5, 2.0, -0.5, 0.5), 5)

LimitExperiment = namedtuple(
    'LimitExperiment',
    ['label', 'mode', 'schedule', 'grid', 'w', 'A', 'B', 'family'],
    defaults=(None, None, None))
LimitExperiment.__doc__ = '''
w is a tree in t or a map eps -> tree. Direct experiments carry the base
coefficients A and B, indirect ones a map family: eps -> (At, Bt).
'''

CoefficientLimit = namedtuple('CoefficientLimit',
                              ['value', 'converged', 'diagonal'])
ConvergenceResult = namedtuple('ConvergenceResult',
                               ['order', 'table', 'underflow'])

RESIDUAL_COLUMNS = ['eps', 'max_residual', 'mean_residual', 'max_relative']


def eps_schedule(start=EPS_START, ratio=EPS_RATIO, steps=EPS_STEPS):
    '''Geometric schedule start * ratio^k, k = 0..steps-1.'''
    if start == 0 or ratio == 0 or abs(ratio) == 1 or steps < 1:
        raise ValueError('An eps schedule needs distinct non-zero values.')
    schedule = start * ratio ** np.arange(steps)
    return schedule.real if np.isrealobj(schedule) else schedule


def direct_experiment(label, A, B, w, schedule=None, grid=None):
    return LimitExperiment(
        label, DIRECT,
        eps_schedule() if schedule is None else np.asarray(schedule),
        DEFAULT_T_GRID if grid is None else np.asarray(grid),
        w, as_function(A, 'A'), as_function(B, 'B'))


def indirect_experiment(label, family, w, schedule=None, grid=None):
    return LimitExperiment(
        label, INDIRECT,
        eps_schedule() if schedule is None else np.asarray(schedule),
        DEFAULT_T_GRID if grid is None else np.asarray(grid),
        w, family=family)


def _grid_from_record(record):
    if record is None:
        return None
    if 'points' in record:
        return np.array([complex(*p) for p in record['points']])
    return box_grid(record['box'], max(1, int(round(np.sqrt(record['n'])))))


def experiment_from_record(record):
    '''
    A LimitExperiment from {'label', 'mode', 'A', 'B', 'candidate',
    'params', 'schedule', 'grid'}. Direct experiments give A and B in z,
    indirect ones in t and eps; the candidate is an expression in t that may
    use eps. The schedule holds start, ratio and steps, the grid either a
    box with a point count n or a list of [x, y] points.
    '''
    mode = record.get('mode', DIRECT)
    params = ex.bind_params(record.get('params'))
    schedule = eps_schedule(**record.get('schedule', {}))
    grid = _grid_from_record(record.get('grid'))
    label = record.get('label', '{} experiment'.format(mode))

    def parsed(text, eps, variables=('t',)):
        return ex.parse(str(text), dict(params, eps=eps), variables)

    def candidate(eps):
        return parsed(record['candidate'], eps)

    if mode == DIRECT:
        A, B = (ex.parse(str(record.get(k, 1)), params, ('z',)) for k in 'AB')
        return direct_experiment(label, A, B, candidate, schedule, grid)
    if mode != INDIRECT:
        raise ValueError('Unknown limit mode {!r}.'.format(mode))

    def family(eps):
        return parsed(record['A'], eps), parsed(record.get('B', 1), eps)

    return indirect_experiment(label, family, candidate, schedule, grid)


def load_experiment(path):
    with open(path) as f:
        return experiment_from_record(json.load(f))


##############################
# Scaling and discretization #
##############################

def scale_equation(A, B, eps):
    '''(At, Bt) = (A(t/eps)/eps^2, B(t/eps)) of the direct connection.'''
    if eps == 0:
        raise ValueError('The scaling parameter eps must be non-zero.')
    A, B = as_function(A, 'A'), as_function(B, 'B')
    scaled_A = scale_function(A, eps)
    scaled_A = scaled_A._replace(expr=ex.div(scaled_A.expr, complex(eps)**2),
                                 label='{}~'.format(A.label))
    scaled_B = scale_function(B, eps)._replace(label='{}~'.format(B.label))
    return scaled_A, scaled_B


def coefficients_at(experiment, eps):
    if experiment.mode == DIRECT:
        return scale_equation(experiment.A, experiment.B, eps)
    At, Bt = experiment.family(eps)
    return as_function(At, 'A~'), as_function(Bt, 'B~')


def candidate_at(experiment, eps):
    w = experiment.w
    return w if isinstance(w, (ex.Expr, MeromorphicFunction)) else w(eps)


def discrete_residual(At, Bt, w, t, eps, scaled=False):
    '''
    ((w(t+eps) - w(t))/eps)^2 - At (w(t) w(t+eps) - Bt), the discrete
    equation divided by eps^2.
    '''
    check_regular(t, ((At, Bt, w), 0), ((w,), eps))
    t = np.asarray(t, dtype=complex)
    w0, w1 = values_at(w, t), values_at(w, t + eps)
    At, Bt = values_at(At, t), values_at(Bt, t)
    return combine([((w1 - w0) / eps)**2, -At * w0 * w1, At * Bt], scaled)


#############################
# Coefficient extrapolation #
#############################

def _neville_diagonal(schedule, values):
    '''Diagonal of the Neville tableau extrapolating values to eps = 0.'''
    table = [np.asarray(v, dtype=complex) for v in values]
    diagonal = [table[0]]
    for j in range(1, len(table)):
        for k in range(len(table) - 1, j - 1, -1):
            table[k] = ((schedule[k - j] * table[k] - schedule[k] * table[k - 1])
                        / (schedule[k - j] - schedule[k]))
        diagonal.append(table[j])
    return diagonal


def coefficient_limit(family, t, schedule=None):
    '''
    Richardson extrapolation to eps = 0 of family(eps) evaluated at t.
    Values that do not depend on eps are returned exactly.
    '''
    schedule = eps_schedule() if schedule is None else np.asarray(schedule)
    values = []
    for eps in schedule:
        coefficient = family(eps)
        check_regular(t, ((coefficient,), 0))
        values.append(values_at(coefficient, t))
    values = np.array(values)
    if not np.all(np.isfinite(values)):
        raise ValueError('The family is singular at t={}.'.format(t))
    if np.all(values == values[0]):
        return CoefficientLimit(values[0], True, [values[0]])

    diagonal = _neville_diagonal(schedule, values)
    scale = 1 + np.max(np.abs(values))
    converged = bool(np.all(np.abs(diagonal[-1] - diagonal[-2])
                            <= EXTRAPOLATION_TOL * scale))
    if not converged:
        warnings.warn('The coefficient extrapolation did not settle.',
                      NonConvergentWarning)
    value = diagonal[-1]
    return CoefficientLimit(complex(value) if np.ndim(value) == 0 else value,
                            converged, diagonal)


def limiting_residual(experiment, t, scaled=False):
    '''
    The discrete residual at eps -> 0: the difference quotient becomes w'
    and the coefficients their extrapolated limits.
    '''
    A0 = coefficient_limit(lambda eps: coefficients_at(experiment, eps)[0],
                           t, experiment.schedule).value
    B0 = coefficient_limit(lambda eps: coefficients_at(experiment, eps)[1],
                           t, experiment.schedule).value
    w = candidate_at(experiment, 0.0)
    tree = w.expr if isinstance(w, MeromorphicFunction) else w
    w0, dw = values_at(tree, t), values_at(ex.differentiate(tree), t)
    return combine([dw**2, -A0 * w0 * w0, A0 * B0], scaled)


####################
# Convergence rate #
####################

def _record(experiment, eps):
    At, Bt = coefficients_at(experiment, eps)
    w = candidate_at(experiment, eps)
    residual, scale = discrete_residual(At, Bt, w, experiment.grid, eps,
                                        scaled=True)
    magnitude = np.abs(residual)
    return [abs(eps), float(np.max(magnitude)), float(np.mean(magnitude)),
            float(np.max(magnitude / scale))]


def run_experiment(experiment, n_jobs=1):
    '''Per-eps residual table, in schedule order.'''
    rows = Parallel(n_jobs=n_jobs)(
        delayed(_record)(experiment, eps) for eps in experiment.schedule)
    return pd.DataFrame(rows, columns=RESIDUAL_COLUMNS)


def convergence_order(experiment, n_jobs=1):
    '''
    Slope of log(max residual) against log|eps| over the smaller half of
    the schedule. When the residuals reach the rounding floor before half
    the schedule, the slope is fitted on the usable prefix (if any) and
    the result is flagged.
    '''
    table = run_experiment(experiment, n_jobs)
    above = (table['max_relative'] > RESIDUAL_FLOOR).to_numpy()
    usable = len(table) if above.all() else int(np.argmin(above))
    half = len(table) // 2

    underflow = usable < len(table) - half
    if underflow:
        warnings.warn('{}: residuals reach the rounding floor after {} of {} '
                      'eps values.'.format(experiment.label, usable, len(table)),
                      ResidualUnderflowWarning)
        rows = table.iloc[:usable]
    else:
        rows = table.iloc[half:usable]
    if len(rows) < 2:
        return ConvergenceResult(np.nan, table, underflow)
    fit = linregress(np.log(rows['eps']), np.log(rows['max_residual']))
    return ConvergenceResult(fit.slope, table, underflow)


##############################
# Subsequences of periodic Q #
##############################

def lambert_subsequence(q, m, C, t, count):
    '''
    eps_n = 1/z_n for the zeros z_n of Q(t z) - C z with
    Q(z) = q exp(2 pi i m z), so that eps_n Q(t/eps_n) = C. With
    x = -2 pi i m t the zeros are z = W_k(x q/C)/x, k = 1..count.
    '''
    x = -2j * np.pi * m * t
    zeros = np.array([lambertw(x * q / C, k) / x for k in range(1, count + 1)])
    return 1 / zeros


def subsequence_defect(Q, C, t, eps_sequence):
    '''|eps Q(t/eps) - C| along a sequence.'''
    eps_sequence = np.asarray(eps_sequence, dtype=complex)
    return np.abs(eps_sequence * ex.evaluate(Q, t / eps_sequence) - C)

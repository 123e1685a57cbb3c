"""
Copyright (c) Facebook, Inc. and its affiliates.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.

-------------------------------------------------------------------

Nevanlinna functionals of a meromorphic function f at radius r

    m(r, f) = (1/2 pi) int log+ |f(r e^{i theta})| d theta
    N(r, f) = n(0, f) log r + sum_{0 < |z_k| < r} mult_k log(r/|z_k|)
    T(r, f) = m(r, f) + N(r, f)

where the proximity m is a trapezoid sum and the counting functions
are read from the declared ledger. The barred and odd variants of N
count poles ignoring multiplicity, and only poles of odd multiplicity.
"""

from collections import namedtuple
from joblib import Parallel, delayed
from scipy.stats import linregress

import math
import warnings

import numpy as np
import pandas as pd

from diffnev import expr as ex
from diffnev.errors import (IncompleteLedger, NonFiniteSampleWarning,
                            OriginPoleSmallRadius, PoleOnCircle,
                            ZeroCharacteristic)
from diffnev.meromorphic import POLE, ZERO, expand, reciprocal


DEFAULT_NODES = 2048

# Nodes closer than this to a declared singularity move by half a step.
NODE_GUARD = 1e-6

# Declared poles closer than this to the circle |z| = r are on it.
CIRCLE_TOL = 1e-9

# Threshold on the drift of T1/T2 over the top half of the radii.
DRIFT_TOL = 0.05

Proximity = namedtuple('Proximity', ['value', 'error'])
CountingBreakdown = namedtuple(
    'CountingBreakdown',
    ['n', 'n_bar', 'n_odd', 'n_bar_odd', 'N', 'N_bar', 'N_odd', 'N_bar_odd'])
CharacteristicEstimate = namedtuple(
    'CharacteristicEstimate',
    ['r', 'm', 'N', 'T', 'quad_error', 'nodes_used'])
GrowthReport = namedtuple('GrowthReport',
                          ['table', 'final_ratio', 'drift', 'trend'])

TABLE_COLUMNS = ['r', 'm', 'N', 'T', 'n', 'n_bar', 'n_odd', 'n_bar_odd',
                 'quad_error']


def log_plus(x):
    '''max(log x, 0) with log_plus(0) = 0.'''
    with np.errstate(divide='ignore'):
        value = np.maximum(np.log(x), 0.0)
    return float(value) if np.ndim(value) == 0 else value


#############
# Proximity #
#############

def _circle_nodes(f, r, nodes):
    theta = 2 * np.pi * np.arange(nodes) / nodes
    z = r * np.exp(1j * theta)
    near = [s.location for s in expand(f.ledger, r + 1)
            if abs(abs(s.location) - r) < 2 * np.pi * r / nodes + NODE_GUARD]
    if near:
        distance = np.min(np.abs(z[:, None] - np.array(near)), axis=1)
        theta = np.where(distance < NODE_GUARD, theta + np.pi / nodes, theta)
        z = r * np.exp(1j * theta)
    return z


def proximity_m(f, r, nodes=DEFAULT_NODES):
    '''
    Trapezoid value of m(r, f) with the difference against the half
    resolution sum (even nodes only) as error estimate. log|f| is taken in
    log-polar form, so f may overflow the floating point range. Samples
    whose logarithm still overflows make m infinite; indeterminate samples
    are left out of both averages. Both are reported.
    '''
    if r <= 0:
        raise ValueError('The radius must be positive, got {}.'.format(r))
    samples = np.maximum(ex.log_abs(f.expr, _circle_nodes(f, r, nodes)), 0.0)
    finite = np.isfinite(samples)
    if not np.all(finite):
        warnings.warn('{} of {} samples of {} at r={} are not finite.'.format(
            np.sum(~finite), nodes, f.label or 'f', r), NonFiniteSampleWarning)
    if np.any(np.isposinf(samples)):
        return Proximity(math.inf, math.inf)
    value = float(np.mean(samples[finite]))
    half = samples[::2]
    coarse = float(np.mean(half[np.isfinite(half)]))
    return Proximity(value, abs(value - coarse))


############
# Counting #
############

def _check_circle(entries, r):
    for s in entries:
        if abs(abs(s.location) - r) <= CIRCLE_TOL:
            raise PoleOnCircle('A declared {} at {} lies on |z| = {}.'.format(
                s.kind, s.location, r))


def _integrated(entries, r, weight):
    '''n(0) log r + sum weight_k log(r/|z_k|), summed in ascending |z_k|.'''
    at_origin = sum(weight(s.multiplicity) for s in entries
                    if abs(s.location) == 0)
    if at_origin and r <= 1:
        raise OriginPoleSmallRadius(
            'A singularity at the origin requires r > 1, got {}.'.format(r))
    terms = [weight(s.multiplicity) * math.log(r / abs(s.location))
             for s in entries if abs(s.location) > 0]
    return at_origin * math.log(r) + math.fsum(terms)


def _multiplicity(m):
    return m


def _once(m):
    return 1


def _odd(m):
    return m if m % 2 else 0


def _odd_once(m):
    return 1 if m % 2 else 0


def _entries(f, r, kinds):
    entries = expand(f.ledger, r + 2 * CIRCLE_TOL)
    _check_circle([s for s in entries if s.kind in kinds], r)
    return [s for s in entries if s.kind in kinds and abs(s.location) < r]


def counting(f, r):
    '''The pole counts n and integrated counting functions N of f at r.'''
    if r <= 0:
        raise ValueError('The radius must be positive, got {}.'.format(r))
    if f.ledger.even_unlisted:
        raise IncompleteLedger(
            'The ledger of {} only lists odd multiplicities.'.format(f.label))
    poles = _entries(f, r, (POLE,))
    counts = [sum(w(s.multiplicity) for s in poles)
              for w in (_multiplicity, _once, _odd, _odd_once)]
    integrated = [_integrated(poles, r, w)
                  for w in (_multiplicity, _once, _odd, _odd_once)]
    return CountingBreakdown(*counts, *integrated)


def _odd_counting(f, r, weight):
    if not f.ledger.zeros_declared:
        raise IncompleteLedger('The zeros of {} are not declared.'.format(
            f.label or 'f'))
    return _integrated(_entries(f, r, (POLE, ZERO)), r, weight)


def N_O(f, r):
    '''N_odd(r, f) + N_odd(r, 1/f)'''
    return _odd_counting(f, r, _odd)


def N_O_bar(f, r):
    '''Barred N_odd(r, f) + N_odd(r, 1/f)'''
    return _odd_counting(f, r, _odd_once)


def counting_slope(f, radii):
    '''Slope of a least-squares line through (r, N(r, f)).'''
    values = [counting(f, r).N for r in radii]
    return linregress(radii, values).slope


##################
# Characteristic #
##################

def characteristic_T(f, r, nodes=DEFAULT_NODES):
    m = proximity_m(f, r, nodes)
    N = counting(f, r).N
    return CharacteristicEstimate(r, m.value, N, m.value + N, m.error, nodes)


def _table_row(f, r, nodes):
    estimate = characteristic_T(f, r, nodes)
    breakdown = counting(f, r)
    return [r, estimate.m, estimate.N, estimate.T, breakdown.n,
            breakdown.n_bar, breakdown.n_odd, breakdown.n_bar_odd,
            estimate.quad_error]


def characteristic_table(f, radii, nodes=DEFAULT_NODES, n_jobs=1):
    '''Per-radius characteristic table, one row per radius in given order.'''
    rows = Parallel(n_jobs=n_jobs)(
        delayed(_table_row)(f, r, nodes) for r in radii)
    return pd.DataFrame(rows, columns=TABLE_COLUMNS)


def growth_ratio(f1, f2, radii, nodes=DEFAULT_NODES, n_jobs=1):
    '''
    T(r, f1)/T(r, f2) over radii with a trend summary: the ratio at the
    largest radius and its drift, max |ratio - final| over the top half of
    radii. The trend is 'consistent' when both the drift and |final - 1|
    stay within DRIFT_TOL and 'growth-separated' otherwise.
    '''
    radii = sorted(radii)
    estimates = Parallel(n_jobs=n_jobs)(
        delayed(characteristic_T)(f, r, nodes)
        for r in radii for f in (f1, f2))
    rows = []
    for e1, e2 in zip(estimates[::2], estimates[1::2]):
        if e2.T <= e2.quad_error:
            raise ZeroCharacteristic(
                'T(r={}, {}) = {} is within its quadrature error.'.format(
                    e2.r, f2.label or 'f2', e2.T))
        rows.append([e1.r, e1.T, e2.T, e1.T / e2.T])
    table = pd.DataFrame(rows, columns=['r', 'T1', 'T2', 'ratio'])

    final = float(table['ratio'].iloc[-1])
    top = table['ratio'].iloc[len(table) // 2:]
    drift = float(np.max(np.abs(top - final)))
    consistent = drift <= DRIFT_TOL and abs(final - 1) <= DRIFT_TOL
    return GrowthReport(table, final, drift,
                        'consistent' if consistent else 'growth-separated')


FirstMainReport = namedtuple('FirstMainReport', ['table', 'constant', 'drift'])


def first_main_drift(f, radii, nodes=DEFAULT_NODES):
    '''
    T(r, f) - T(r, 1/f) over radii. By the first main theorem it stays
    bounded; the constant is its mean and the drift its spread relative to
    the largest T(r, f).
    '''
    g = reciprocal(f)
    rows = []
    for r in radii:
        t_f, t_g = characteristic_T(f, r, nodes).T, characteristic_T(g, r, nodes).T
        rows.append([r, t_f, t_g, t_f - t_g])
    table = pd.DataFrame(rows, columns=['r', 'T', 'T_reciprocal', 'difference'])
    spread = table['difference'].max() - table['difference'].min()
    return FirstMainReport(table, float(table['difference'].mean()),
                           float(spread / table['T'].max()))

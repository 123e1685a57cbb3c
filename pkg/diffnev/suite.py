"""
Copyright (c) Facebook, Inc. and its affiliates.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.

-------------------------------------------------------------------

The acceptance checks. Each check runs on the default catalog entries
and returns verdict rows

    criterion, check, subject, value, threshold, passed, duration

where passed compares value against threshold in the direction of the
check. run_all_checks() gathers every check into one DataFrame; a single
failing row fails the whole report.
"""

from joblib import Parallel, delayed
from time import time

import math
import warnings

import numpy as np
import pandas as pd

from diffnev import catalog
from diffnev import expr as ex
from diffnev.diffops import casoratian, periodicity_defect
from diffnev.equations import (DEGENERATE_TOL, DISCRIMINANT_TOL,
                               EQUIVALENCE_TOL, QUARTIC_TOL, RESIDUAL_TOL,
                               G_function, G_of, classify_dichotomy,
                               discriminant_identity_defect,
                               fit_relation_constant, periodic_reparam,
                               quadratic_residual, quartic_relation_defect,
                               residual_expanded, residual_main, sweep,
                               values_at, xi_defect)
from diffnev.errors import DiscrepancyWarning
from diffnev.limits import (coefficient_limit, coefficients_at,
                            convergence_order, discrete_residual,
                            lambert_subsequence, run_experiment,
                            scale_equation, subsequence_defect)
from diffnev.meromorphic import (EMPTY_LEDGER, MeromorphicFunction, entire,
                                 regular_grid, sample_points, scale_function,
                                 validate_ledger)
from diffnev.nevanlinna import (DEFAULT_NODES, N_O_bar, counting_slope,
                                growth_ratio, proximity_m)


COLUMNS = ['criterion', 'check', 'subject', 'value', 'threshold', 'passed',
           'duration']

BOX = catalog.SUITE_BOX
SUITE_POINTS = 200
GROWTH_RADII = np.linspace(5, 50, 10)
TRANSFORM_POINTS = 50

# Region and cell size of the ledger validation.
LEDGER_REGION, LEDGER_CELL = (-3, 3, -3, 3), 0.5

# The reparameterized sine overflows for large |Im z|.
REPARAM_BOX = (-3, 3, -0.3, 0.3)

LIMIT_ORDER = 0.95
PERIOD_TWO_SEPARATION = 0.1
GROWTH_TOL = 0.05
SLOPE, SLOPE_TOL = 2.0, 0.1


def _row(criterion, check, subject, value, threshold, passed=None):
    value = float(value)
    if passed is None:
        passed = value <= threshold
    return [criterion, check, subject, value, float(threshold), bool(passed)]


def _default(entry_id):
    return catalog.get(entry_id)


def _main_entries():
    return [_default(i) for i in ('ex2_1', 'ex2_2', 'ex2_3', 'ex2_4', 'ex5_1')]


def _relative(values, reference):
    values, reference = np.asarray(values), np.asarray(reference)
    return float(np.max(np.abs(values - reference) / (1 + np.abs(reference))))


################
# The criteria #
################

def check_residuals(box=BOX, points=SUITE_POINTS, **kwargs):
    rows = []
    for entry_id, _, _ in catalog.list_entries():
        table = catalog.residual_suite(_default(entry_id), points, box)
        rows += [_row(1, 'residual', '{}: {}'.format(r.entry, r.solution),
                      r.max_relative, RESIDUAL_TOL)
                 for r in table.itertuples()]
    return rows


def check_equivalence(box=BOX, points=SUITE_POINTS, **kwargs):
    '''The main and expanded forms agree pointwise.'''
    rows = []
    for entry in _main_entries():
        grid = catalog.suite_grid(entry, points, box)
        for f in entry.solutions:
            main, s1 = residual_main(entry.equation, f, grid, scaled=True)
            expanded, s2 = residual_expanded(entry.equation, f, grid,
                                             scaled=True)
            defect = np.max(np.abs(main - expanded) / np.maximum(s1, s2))
            rows.append(_row(2, 'equivalence',
                             '{}: {}'.format(entry.id, f.label),
                             defect, EQUIVALENCE_TOL))
    return rows


def check_casoratian_pipeline(**kwargs):
    '''Casoratian of sin(az), cos(az) and the relations it satisfies.'''
    entry = _default('ex2_1')
    f1, f2 = entry.solutions
    eq = entry.equation
    H = casoratian(f1, f2)
    grid = regular_grid([f1, f2], BOX, SUITE_POINTS, shifts=(0, 1))

    expected = entry.extras['casoratian']
    rows = [_row(3, 'casoratian', 'H = -sin a',
                 np.max(np.abs(ex.evaluate(H, grid) - expected)), 1e-10),
            _row(3, 'casoratian', 'H 1-periodic',
                 periodicity_defect(H, 1, grid, relative=True), RESIDUAL_TOL)]

    report = sweep(quartic_relation_defect, eq, f1, f2, H, grid=grid)
    rows.append(_row(3, 'relation', 'quartic relation', report.max_relative,
                     QUARTIC_TOL))
    linear, quadratic = xi_defect(eq, f1, f2, H, grid, scaled=True)
    for name, (defect, scale) in (('Xi linear', linear),
                                  ('Xi squared', quadratic)):
        rows.append(_row(3, 'relation', name,
                         np.max(np.abs(defect) / scale), QUARTIC_TOL))

    u, v = values_at(f1, grid), values_at(f2, grid)
    unit = np.abs(u**2 + v**2 - 1) / (1 + np.abs(u)**2 + np.abs(v)**2)
    rows.append(_row(3, 'relation', 'f1^2 + f2^2 = 1', np.max(unit), 1e-10))
    return rows


def check_dichotomy(**kwargs):
    '''Solutions either solve the linear equation or are 2-periodic.'''
    rows = []
    for entry_id in ('ex2_1', 'ex2_2', 'ex2_3'):
        entry = _default(entry_id)
        eq = entry.equation
        for f in entry.solutions:
            grid = regular_grid([eq.A, eq.B, f], BOX, SUITE_POINTS,
                                shifts=(0, 1, 2))
            result = classify_dichotomy(eq, f, grid)
            subject = '{}: {}'.format(entry_id, f.label)
            if entry_id == 'ex2_1':
                rows.append(_row(4, 'linear branch', subject, result.linear,
                                 RESIDUAL_TOL))
                rows.append(_row(4, 'not 2-periodic', subject, result.period2,
                                 PERIOD_TWO_SEPARATION,
                                 result.period2 > PERIOD_TWO_SEPARATION))
            else:
                rows.append(_row(4, '2-periodic', subject, result.period2,
                                 RESIDUAL_TOL))
    return rows


def transform_grid(eq, f, a, n=TRANSFORM_POINTS, box=BOX):
    '''n regular points at which f + a stays away from zero at z and z+1.'''
    candidates = regular_grid([eq.A, eq.B, f, a], box, 4 * n, shifts=(0, 1))
    keep = np.ones(candidates.shape, dtype=bool)
    for shift in (0, 1):
        u = values_at(f, candidates + shift)
        w = values_at(a, candidates + shift)
        keep &= np.abs(u + w) > 1e3 * DEGENERATE_TOL * (1 + np.abs(u) + np.abs(w))
    kept = candidates[keep]
    return kept[np.round(np.linspace(0, len(kept) - 1, n)).astype(int)]


def check_transform(**kwargs):
    '''The quadratic for g = (f - a)/(f + a) and its discriminant.'''
    rows = []
    for entry_id in ('ex2_1', 'ex2_2'):
        entry = _default(entry_id)
        eq = entry.equation
        f, a = entry.solutions[0], entry.solutions[1]
        grid = transform_grid(eq, f, a)
        subject = '{}: ({}, {})'.format(entry_id, f.label, a.label)
        rows.append(_row(5, 'quadratic', subject,
                         sweep(quadratic_residual, eq, a, f,
                               grid=grid).max_relative, QUARTIC_TOL))
        rows.append(_row(5, 'discriminant', subject,
                         sweep(discriminant_identity_defect, eq, a, f,
                               grid=grid).max_relative, DISCRIMINANT_TOL))
    return rows


def check_odd_counting(**kwargs):
    '''G(f) folds, factors and has the same odd counting for both solutions.'''
    rows = []
    entry = _default('ex2_2')
    G = G_function(entry.equation, entry.solutions[0])
    grid = catalog.suite_grid(entry, SUITE_POINTS, BOX)
    rows.append(_row(6, 'G constant', 'G(f_b) folds to -4',
                     0 if ex.is_const(G.expr, -4) else 1, 0))
    rows.append(_row(6, 'G constant', 'G(f_b) = -4',
                     np.max(np.abs(ex.evaluate(G.expr, grid) + 4)), 1e-12))

    entry = _default('ex2_3')
    grid = catalog.suite_grid(entry, SUITE_POINTS, BOX)
    rows.append(_row(6, 'G closed form', 'ex2_3: f_beta', _relative(
        G_of(entry.equation, entry.solutions[0], grid),
        ex.evaluate(entry.extras['G_closed_form'], grid)), RESIDUAL_TOL))

    entry = _default('ex5_1')
    G1, G2 = entry.extras['G']
    grid = regular_grid([entry.equation.A, entry.equation.B, G1, G2]
                        + entry.solutions, BOX, SUITE_POINTS)
    for f, G in zip(entry.solutions, (G1, G2)):
        rows.append(_row(6, 'G factorization', 'ex5_1: {}'.format(f.label),
                         _relative(G_of(entry.equation, f, grid),
                                   ex.evaluate(G.expr, grid)), RESIDUAL_TOL))
    for r in (3, 5, 8):
        n1, n2 = N_O_bar(G1, r), N_O_bar(G2, r)
        reference = N_O_bar(entry.extras['h_odd'], r)
        rows.append(_row(6, 'odd counting', 'r={}'.format(r),
                         max(abs(n1 - n2), abs(n1 - reference)), 1e-12))
    rows.append(_row(6, 'odd counting', 'r=5 against 2 log 5',
                     abs(N_O_bar(G1, 5) - 2 * math.log(5)), 1e-12))
    return rows


def check_nevanlinna(radii=GROWTH_RADII, nodes=DEFAULT_NODES, **kwargs):
    rows = []
    r = 20
    m = proximity_m(entire(ex.exp(ex.var('z')), 'exp'), r, nodes).value
    rows.append(_row(7, 'proximity', 'm(20, e^z) against 20/pi',
                     abs(m / (r / math.pi) - 1), 0.02))

    f1, f2 = _default('ex2_1').solutions
    report = growth_ratio(f1, f2, radii, nodes)
    subject = 'T({0:g}, sin az)/T({0:g}, cos az)'.format(max(radii))
    rows.append(_row(7, 'growth ratio', subject,
                     abs(report.final_ratio - 1), GROWTH_TOL))

    f_b = _default('ex2_2').solutions[0]
    slope = counting_slope(f_b, np.arange(20, 100) + 0.5)
    if abs(slope - 1) > SLOPE_TOL:
        warnings.warn('N(r, f_b) grows with slope {:.3f}, not like r.'.format(
            slope), DiscrepancyWarning)
    rows.append(_row(7, 'counting slope', 'N(r, f_b), 20 < r < 100',
                     abs(slope - SLOPE), SLOPE_TOL))
    return rows


def check_limits(**kwargs):
    rows = []

    # the scaled equation times eps^2 at t is the equation at z = t/eps
    base = _default('ex2_4').equation
    f = MeromorphicFunction(ex.power(ex.var('z'), 2), EMPTY_LEDGER, 'z^2')
    eps = 0.1
    t = eps * regular_grid([base.A, base.B], (1, 4, -1, 1), SUITE_POINTS)
    At, Bt = scale_equation(base.A, base.B, eps)
    scaled, scale = discrete_residual(At, Bt, scale_function(f, eps), t, eps,
                                      scaled=True)
    original = residual_main(base, f, t / eps)
    rows.append(_row(8, 'direct connection', 'f = z^2, eps = 0.1',
                     np.max(np.abs(scaled * eps**2 - original)
                            / (scale * eps**2)), 1e-12))

    entry = _default('ex3_1')
    direct = entry.extras['direct']
    t = direct.grid
    for k, expected, name in ((0, 1 / t**2, 'A~(t,0) = 1/t^2'),
                              (1, 1 + 0 * t, 'B~(t,0) = 1')):
        limit = coefficient_limit(lambda e: coefficients_at(direct, e)[k], t,
                                  direct.schedule)
        rows.append(_row(8, 'coefficient limit', name,
                         _relative(limit.value, expected), 1e-8))

    with warnings.catch_warnings():
        warnings.simplefilter('ignore')
        order = convergence_order(entry.extras['limit']).order
        exact = convergence_order(direct)
    rows.append(_row(8, 'convergence order', 'ex3_1 limit coefficients',
                     order, LIMIT_ORDER, order >= LIMIT_ORDER))
    rows.append(_row(8, 'convergence order', 'ex3_1 direct is exact',
                     float(exact.table['max_relative'].max()), RESIDUAL_TOL))

    table = run_experiment(_default('ex3_2').extras['indirect'])
    rows.append(_row(8, 'exact family', 'ex3_2 sin(2t + phi eps)',
                     table['max_relative'].max(), 1e-10))

    C, t0 = entry.parameters['C'], 1.0 + 0.25j
    sequence = lambert_subsequence(1.0, 1, C, t0, 20)
    rows.append(_row(8, 'subsequence', 'eps Q(t/eps) = C',
                     np.max(subsequence_defect(catalog.periodic_exponential(
                         1.0, 1), C, t0, sequence)) / abs(C), 1e-9))

    w1 = ex.sin(2 * ex.var('t'))
    w2 = ex.sin(2 * ex.var('t') + 0.7)
    fit = fit_relation_constant(w1, w2, sample_points((-1, 1, -1, 1), 20))
    rows.append(_row(8, 'relation constant', 'sin 2t, sin(2t + 0.7)',
                     abs(fit.c + math.cos(0.7)), 1e-8))
    return rows


def corrupted(f):
    '''f with the first record of its ledger removed.'''
    ledger = f.ledger
    for field in ('points', 'lattices', 'families'):
        records = getattr(ledger, field)
        if records:
            ledger = ledger._replace(**{field: records[1:]})
            break
    return f._replace(ledger=ledger, label='{} (corrupted)'.format(f.label))


def ledger_functions():
    '''Catalog functions with complete ledgers inside the validation region.'''
    functions = []
    for entry_id, _, _ in catalog.list_entries():
        entry = _default(entry_id)
        eq = entry.equation
        candidates = [eq.A, eq.B] + list(entry.solutions) + list(
            entry.extras.get('G', []))
        functions += [(entry_id, f) for f in candidates
                      if isinstance(f, MeromorphicFunction) and not f.derived
                      and f.ledger.zeros_declared
                      and not f.ledger.even_unlisted
                      and not ex.is_const(f.expr)]
    return functions


def check_ledgers(corrupt=False, n_jobs=1, **kwargs):
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter('ignore')
        for entry_id, f in ledger_functions():
            f = corrupted(f) if corrupt else f
            report = validate_ledger(f, LEDGER_REGION, LEDGER_CELL, n_jobs)
            rows.append(_row(9, 'ledger', '{}: {}'.format(entry_id, f.label),
                             len(report.mismatches), 0))

        sine = _default('ex2_1').solutions[0]
        report = validate_ledger(corrupted(sine), LEDGER_REGION, LEDGER_CELL,
                                 n_jobs)
    rows.append(_row(9, 'ledger', 'corrupted sin(a z) is detected',
                     len(report.mismatches), 1, len(report.mismatches) >= 1))
    return rows


def check_reparameterization(**kwargs):
    entry = _default('ex2_1')
    a = entry.parameters['a']
    kappa = ex.sin(2 * np.pi * ex.var('z'))
    f = periodic_reparam(entry.solutions[0], kappa, entry.equation)
    grid = regular_grid([entry.equation.A, entry.equation.B], REPARAM_BOX,
                        SUITE_POINTS, shifts=(0, 1))
    report = sweep(residual_main, entry.equation, f, grid=grid)
    expected = ex.evaluate(ex.sin(a * (ex.var('z') + kappa)), grid)
    return [_row(10, 'reparameterization', 'sin(a(z + sin 2 pi z))',
                 report.max_relative, QUARTIC_TOL),
            _row(10, 'reparameterization', 'tree agrees with closed form',
                 _relative(ex.evaluate(f.expr, grid), expected), 1e-12)]


CHECKS = {
    'residuals': check_residuals,
    'equivalence': check_equivalence,
    'casoratian': check_casoratian_pipeline,
    'dichotomy': check_dichotomy,
    'transform': check_transform,
    'odd-counting': check_odd_counting,
    'nevanlinna': check_nevanlinna,
    'limits': check_limits,
    'ledgers': check_ledgers,
    'reparameterization': check_reparameterization,
}


def run_single_check(name, corrupt=False, n_jobs=1, **options):
    '''
    Verdict rows of one check, with its duration in seconds. options may
    set the residual box and points, and the radii and nodes of the
    Nevanlinna check.
    '''
    time_start = time()
    rows = CHECKS[name](corrupt=corrupt, n_jobs=n_jobs, **options)
    duration = time() - time_start
    return [row + [duration] for row in rows]


def run_all_checks(corrupt=False, n_jobs=1, **options):
    '''Runs every check. This function is used by the report-all command.'''
    results = Parallel(n_jobs=n_jobs)(
        delayed(run_single_check)(name, corrupt, **options) for name in CHECKS)
    rows = [row for result in results for row in result]
    return pd.DataFrame(rows, columns=COLUMNS)

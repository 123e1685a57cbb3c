"""
Copyright (c) Facebook, Inc. and its affiliates.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.

-------------------------------------------------------------------

Residuals and identity defects for the difference equation

    (delta f)^2 = A(z) (f(z) f(z+1) - B(z))

its expanded and linear forms, the relations satisfied by pairs of
solutions, and the transform g = (f - a)/(f + a) between two solutions.

Every residual is a sum of terms. With scaled=True an operation returns
(residual, scale) where scale = 1 + max |term|, and sweep() collects these
over a grid into a ResidualReport. All operations accept a complex scalar
or an array of points.
"""

from collections import namedtuple
from numbers import Number
from scipy.optimize import least_squares

import json
import warnings

import numpy as np

from diffnev import expr as ex
from diffnev.diffops import periodicity_defect
from diffnev.errors import (DegenerateDenominator, DegenerateSample,
                            NoConsistentConstantWarning, NonPeriodicKappa,
                            SingularPoint)
from diffnev.meromorphic import (EMPTY_LEDGER, GUARD, MeromorphicFunction,
                                 box_grid, ledger_from_records, pole_distance)


MAIN, EXPANDED, LINEAR, ODE = 'main', 'expanded', 'linear', 'ode'

RESIDUAL_TOL = 1e-9
EQUIVALENCE_TOL = 1e-10
QUARTIC_TOL = 1e-8
DISCRIMINANT_TOL = 1e-7
DEGENERATE_TOL = 1e-12
RELATION_TOL = 1e-6

DifferenceEquation = namedtuple('DifferenceEquation', ['A', 'B', 'form'],
                                defaults=(MAIN,))
ResidualReport = namedtuple('ResidualReport',
                            ['grid', 'residuals', 'scale', 'max_relative'])


def make_equation(A, B, form=MAIN, samples=None):
    '''Builds an equation, rejecting a coefficient A that vanishes on samples.'''
    A, B = as_function(A, 'A'), as_function(B, 'B')
    if samples is None:
        samples = box_grid((-3, 3, -3, 3), 7) + 0.013j
    values = ex.evaluate(A.expr, samples)
    if np.all(np.abs(values[np.isfinite(values)]) == 0):
        raise ValueError('The coefficient A vanishes identically.')
    return DifferenceEquation(A, B, form)


def equation_from_record(record):
    '''
    An equation from {'A', 'B', 'params', 'form', 'ledgers'}: coefficient
    texts in the expression grammar, shared parameter bindings, the form tag
    and optional ledgers of A and B.
    '''
    form = record.get('form', MAIN)
    if form not in (MAIN, EXPANDED, LINEAR, ODE):
        raise ValueError('Unknown equation form {!r}.'.format(form))
    params = ex.bind_params(record.get('params'))
    ledgers = record.get('ledgers', {})
    if 'A' not in record:
        raise ValueError('An equation record needs the coefficient A.')
    coefficients = []
    for name in ('A', 'B'):
        text = str(record.get(name, 1))
        tree = ex.parse(text, params)
        ledger = (ledger_from_records(ledgers[name]) if name in ledgers
                  else EMPTY_LEDGER)
        coefficients.append(MeromorphicFunction(tree, ledger, name))
    return make_equation(*coefficients, form=form)


def load_equation(path):
    with open(path) as f:
        return equation_from_record(json.load(f))


def as_function(f, label=''):
    if isinstance(f, MeromorphicFunction):
        return f
    return MeromorphicFunction(ex.as_expr(f), EMPTY_LEDGER, label)


###########
# Helpers #
###########

def values_at(f, z):
    if isinstance(f, MeromorphicFunction):
        return ex.evaluate(f.expr, z)
    if isinstance(f, ex.Expr):
        return ex.evaluate(f, z)
    if isinstance(f, Number):
        return complex(f) + 0 * np.asarray(z, dtype=complex)
    return f


def check_regular(z, *pairs):
    '''pairs are (functions, shift); raises SingularPoint near a pole.'''
    for functions, shift in pairs:
        functions = [f for f in functions if isinstance(f, MeromorphicFunction)]
        if functions and np.any(pole_distance(functions, z, shift) < GUARD):
            raise SingularPoint('{} comes within {} of a declared pole.'.format(
                np.asarray(z) + shift, GUARD))


def combine(terms, scaled):
    residual = sum(terms[1:], terms[0])
    scale = 1 + np.max(np.abs(np.array(np.broadcast_arrays(*terms))), axis=0)
    if not np.all(np.isfinite(residual)):
        raise SingularPoint('The residual is not finite.')
    if np.ndim(residual) == 0:
        residual, scale = complex(residual), float(scale)
    return (residual, scale) if scaled else residual


def sweep(op, *args, grid, **kwargs):
    '''Evaluates op(*args, grid) into a ResidualReport.'''
    grid = np.asarray(grid, dtype=complex)
    residuals, scale = op(*args, grid, scaled=True, **kwargs)
    residuals = np.asarray(residuals) + 0 * grid
    scale = np.asarray(scale) + 0 * grid.real
    max_relative = float(np.max(np.abs(residuals) / scale)) if grid.size else 0.0
    return ResidualReport(grid, residuals, scale, max_relative)


#############
# Residuals #
#############

def residual_main(eq, f, z, scaled=False):
    '''(delta f)^2 - A (f f(z+1) - B)'''
    check_regular(z, ((f,), 0), ((f,), 1), ((eq.A, eq.B), 0))
    f0, f1 = values_at(f, z), values_at(f, z + np.asarray(1))
    A, B = values_at(eq.A, z), values_at(eq.B, z)
    return combine([(f1 - f0)**2, -A * f0 * f1, A * B], scaled)


def residual_expanded(eq, f, z, scaled=False):
    '''(delta f)^2 - A f delta f - A f^2 + A B'''
    check_regular(z, ((f,), 0), ((f,), 1), ((eq.A, eq.B), 0))
    f0, f1 = values_at(f, z), values_at(f, z + np.asarray(1))
    A, B = values_at(eq.A, z), values_at(eq.B, z)
    df = f1 - f0
    return combine([df**2, -A * f0 * df, -A * f0**2, A * B], scaled)


def _polynomial_terms(coefficients, g, z):
    return [values_at(c, z) * g**k for k, c in enumerate(coefficients)]


def residual_first_order(P, Q, g, z, scaled=False):
    '''
    (delta g)^2 + P(z, g) delta g + Q(z, g), where P and Q are lists of
    coefficient functions in ascending powers of g.
    '''
    check_regular(z, ((g,), 0), ((g,), 1), (tuple(P) + tuple(Q), 0))
    g0, g1 = values_at(g, z), values_at(g, z + np.asarray(1))
    dg = g1 - g0
    terms = [dg**2]
    terms += [t * dg for t in _polynomial_terms(P, g0, z)]
    terms += _polynomial_terms(Q, g0, z)
    return combine(terms, scaled)


def residual_linear(A, f, z, scaled=False):
    '''delta^2 f - A delta f - A f = f(z+2) - (A + 2) f(z+1) + f(z)'''
    check_regular(z, ((f,), 0), ((f,), 1), ((f,), 2), ((A,), 0))
    z = np.asarray(z, dtype=complex)
    f0, f1, f2 = values_at(f, z), values_at(f, z + 1), values_at(f, z + 2)
    return combine([f2, -(values_at(A, z) + 2) * f1, f0], scaled)


def residual_ode(A, B, w, t, scaled=False):
    '''(w')^2 - A (w^2 - B) with the symbolic derivative of w.'''
    check_regular(t, ((A, B, w), 0))
    tree = w.expr if isinstance(w, MeromorphicFunction) else w
    w0, dw = values_at(tree, t), values_at(ex.differentiate(tree), t)
    A, B = values_at(A, t), values_at(B, t)
    return combine([dw**2, -A * w0**2, A * B], scaled)


##########################
# Second order and pairs #
##########################

def forward_step(B, f0, f1, z):
    '''
    The value f(z+2) predicted by eliminating A between two consecutive
    instances of the equation. A vanishing denominator signals the
    2-periodic branch.
    '''
    B = values_at(B, z)
    denominator = f0 * f1 - B
    scale = 1 + np.abs(f0 * f1) + np.abs(B)
    if np.any(np.abs(denominator) <= DEGENERATE_TOL * scale):
        raise DegenerateDenominator(
            'f(z) f(z+1) - B(z) vanishes at {}.'.format(z))
    return (f1**3 - (2 * f1 - f0) * B) / denominator


def elimination_defect(eq, f, z, scaled=False):
    '''
    (f(z+2) - f(z)) (f1^3 - (2 f1 - f0) B + (B - f0 f1) f(z+2)), which
    vanishes for solutions of equations with 1-periodic coefficients.
    '''
    check_regular(z, ((f,), 0), ((f,), 1), ((f,), 2), ((eq.B,), 0))
    z = np.asarray(z, dtype=complex)
    f0, f1, f2 = values_at(f, z), values_at(f, z + 1), values_at(f, z + 2)
    B = values_at(eq.B, z)
    bracket = [f1**3, -(2 * f1 - f0) * B, (B - f0 * f1) * f2]
    return combine([(f2 - f0) * t for t in bracket], scaled)


Dichotomy = namedtuple('Dichotomy', ['branch', 'linear', 'period2'])


def classify_dichotomy(eq, f, grid, tol=RESIDUAL_TOL):
    '''
    Reports which branch a solution takes on grid: 'linear' when it solves
    the second order linear equation, 'period-2' when it is 2-periodic,
    'both', or 'neither'. Nothing is assumed.
    '''
    linear = sweep(residual_linear, eq.A, f, grid=grid).max_relative
    period2 = periodicity_defect(f, 2, grid, relative=True)
    branch = {(True, True): 'both', (True, False): 'linear',
              (False, True): 'period-2', (False, False): 'neither'}[
                  (linear <= tol, period2 <= tol)]
    return Dichotomy(branch, linear, period2)


def quartic_relation_defect(eq, f1, f2, H, z, scaled=False):
    '''
    A ((A+4) f1^2 f2^2 - 2B (f1^2 + f2^2)) H^2 - (A B (f1^2 - f2^2))^2 - H^4,
    the algebraic relation between two solutions with Casoratian H.
    '''
    check_regular(z, ((eq.A, eq.B, f1, f2, H), 0))
    A, B = values_at(eq.A, z), values_at(eq.B, z)
    u, v, h = values_at(f1, z), values_at(f2, z), values_at(H, z)
    return combine([A * (A + 4) * u**2 * v**2 * h**2,
                     -2 * A * B * (u**2 + v**2) * h**2,
                     -(A * B * (u**2 - v**2))**2,
                     -h**4], scaled)


def xi_defect(eq, f1, f2, H, z, scaled=False):
    '''
    Computes Xi = A H f1 f2 - A B (f1^2 - f2^2) + H^2 and returns the
    defects of Xi = 2 f1 H delta f2 and of
    Xi^2 = 4 f1^2 H^2 A (f2 delta f2 + f2^2 - B).
    '''
    check_regular(z, ((eq.A, eq.B, f1, f2, H), 0), ((f2,), 1))
    z = np.asarray(z, dtype=complex)
    A, B = values_at(eq.A, z), values_at(eq.B, z)
    u, v, h = values_at(f1, z), values_at(f2, z), values_at(H, z)
    dv = values_at(f2, z + 1) - v
    xi_terms = [A * h * u * v, -A * B * (u**2 - v**2), h**2]
    xi = sum(xi_terms)
    linear = combine(xi_terms + [-2 * u * h * dv], True)
    quadratic = combine([xi**2, -4 * u**2 * h**2 * A * v * dv,
                          -4 * u**2 * h**2 * A * v**2,
                          4 * u**2 * h**2 * A * B], True)
    if scaled:
        return linear, quadratic
    return linear[0], quadratic[0]


#####################
# Relation constant #
#####################

def relation_A_defect(w1, w2, c, t, scaled=False):
    '''w1^2 + 2 c w1 w2 + w2^2 - (1 - c^2)'''
    u, v = values_at(w1, t), values_at(w2, t)
    return combine([u**2, 2 * c * u * v, v**2, -(1 - c**2) + 0 * u], scaled)


RelationFit = namedtuple('RelationFit', ['c', 'max_defect', 'consistent'])


def fit_relation_constant(w1, w2, sample):
    '''
    Least-squares constant c of w1^2 + 2 c w1 w2 + w2^2 = 1 - c^2 over
    sample. The start value comes from differences of the relation between
    sample points, in which c^2 cancels.
    '''
    sample = np.asarray(sample, dtype=complex)
    if sample.size < 3:
        raise DegenerateSample('At least 3 sample points are required.')
    u, v = values_at(w1, sample), values_at(w2, sample)
    s, p = u**2 + v**2 - 1, u * v
    ds, dp = s - s.mean(), p - p.mean()
    if np.sum(np.abs(dp)**2) <= 1e-24 * (1 + np.sum(np.abs(p)**2)):
        raise DegenerateSample('w1 w2 is constant on the sample.')
    start = -np.vdot(dp, ds) / (2 * np.vdot(dp, dp))

    def residuals(x):
        defect = s + 2 * complex(*x) * p + complex(*x)**2
        return np.concatenate([defect.real, defect.imag])

    fit = least_squares(residuals, [start.real, start.imag],
                        xtol=1e-15, ftol=1e-15, gtol=1e-15)
    c = complex(*fit.x)
    defect, scale = relation_A_defect(w1, w2, c, sample, scaled=True)
    max_defect = float(np.max(np.abs(defect) / scale))
    consistent = max_defect <= RELATION_TOL
    if not consistent:
        warnings.warn('No constant c is consistent with the sample '
                      '(max relative defect {:.3g}).'.format(max_defect),
                      NoConsistentConstantWarning)
    return RelationFit(c, max_defect, consistent)


#######################
# Transform machinery #
#######################

def G_of(eq, f, z, scaled=False):
    '''G(f) = (A + 4) f^2 - 4 B'''
    check_regular(z, ((eq.A, eq.B, f), 0))
    A, B, u = values_at(eq.A, z), values_at(eq.B, z), values_at(f, z)
    return combine([(A + 4) * u**2, -4 * B], scaled)


def G_function(eq, f, ledger=None, label=None):
    '''G(f) as a function. Without a ledger it is marked derived.'''
    f_expr = f.expr if isinstance(f, MeromorphicFunction) else f
    tree = ex.sub(ex.mul(ex.add(eq.A.expr, 4), ex.power(f_expr, 2)),
                  ex.mul(4, eq.B.expr))
    label = label or 'G({})'.format(getattr(f, 'label', '') or 'f')
    if ledger is None:
        return MeromorphicFunction(tree, EMPTY_LEDGER, label, derived=True)
    return MeromorphicFunction(tree, ledger, label)


def g_transform(f, a, z):
    '''g = (f - a)/(f + a)'''
    u, w = values_at(f, z), values_at(a, z)
    denominator = u + w
    if np.any(np.abs(denominator) <= DEGENERATE_TOL * (1 + np.abs(u) + np.abs(w))):
        raise DegenerateDenominator('f(z) + a(z) vanishes at {}.'.format(z))
    return (u - w) / denominator


def g_inverse(g, a):
    '''f = -a (g + 1)/(g - 1), the inverse of g_transform for fixed a.'''
    return -a * (g + 1) / (g - 1)


def _quadratic_terms(eq, a, g, z):
    z = np.asarray(z, dtype=complex)
    A, B = values_at(eq.A, z), values_at(eq.B, z)
    a0 = values_at(a, z)
    da = values_at(a, z + 1) - a0
    C0 = 4 * A * B * (g - 1)**2 * g
    C1 = 2 * (g - 1) * (2 * A * B * (g - 1)
                        + a0**2 * A * (g + 1)
                        + da * (A + 2) * a0 * (g + 1))
    C2 = (2 * a0 * (a0 * A + da * (A + 2)) * g
          - 2 * a0 * (2 * a0 + a0 * A + da * (A + 2)))
    return C0, C1, C2


def quadratic_coeffs(eq, a, g_value, z):
    '''
    Coefficients (C0, C1, C2) of C2 (delta g)^2 + C1 delta g + C0 = 0 for
    g = (f - a)/(f + a), with g(z) = g_value.
    '''
    check_regular(z, ((eq.A, eq.B, a), 0), ((a,), 1))
    C0, C1, C2 = _quadratic_terms(eq, a, np.asarray(g_value, dtype=complex), z)
    if np.ndim(C0) == 0:
        return complex(C0), complex(C1), complex(C2)
    return C0, C1, C2


def quadratic_residual(eq, a, f, z, scaled=False):
    '''C2 (delta g)^2 + C1 delta g + C0 with g from the two solutions.'''
    check_regular(z, ((eq.A, eq.B, a, f), 0), ((a, f), 1))
    z = np.asarray(z, dtype=complex)
    g = g_transform(f, a, z)
    dg = g_transform(f, a, z + 1) - g
    C0, C1, C2 = _quadratic_terms(eq, a, g, z)
    return combine([C2 * dg**2, C1 * dg, C0], scaled)


def discriminant_identity_defect(eq, a, f, z, scaled=False):
    '''
    C1^2 - 4 C0 C2 - 64 a^4 a(z+1)^2 A G(f) / (f + a)^4, which vanishes when
    both f and a solve the equation.
    '''
    check_regular(z, ((eq.A, eq.B, a, f), 0), ((a,), 1))
    z = np.asarray(z, dtype=complex)
    g = g_transform(f, a, z)
    C0, C1, C2 = _quadratic_terms(eq, a, g, z)
    a0, a1 = values_at(a, z), values_at(a, z + 1)
    rhs = (64 * a0**4 * a1**2 * values_at(eq.A, z) * G_of(eq, f, z)
           / (values_at(f, z) + a0)**4)
    return combine([C1**2, -4 * C0 * C2, -rhs], scaled)


######################
# Reparameterization #
######################

def periodic_reparam(f, kappa, eq=None, grid=None, tol=RESIDUAL_TOL):
    '''
    The solution z -> f(kappa(z) + z) for a 1-periodic kappa, which solves
    the same equation when its coefficients are constant. Its ledger is
    left empty and has to be validated before use.
    '''
    if eq is not None and not (ex.is_const(eq.A.expr) and ex.is_const(eq.B.expr)):
        raise ValueError('Reparameterization requires constant A and B.')
    kappa = ex.as_expr(kappa)
    grid = box_grid((-1, 1, -1, 1), 10) if grid is None else grid
    defect = periodicity_defect(kappa, 1, grid, relative=True)
    if defect > tol:
        raise NonPeriodicKappa(
            'kappa is not 1-periodic on the grid (defect {:.3g}).'.format(defect))
    tree = ex.substitute(f.expr, ex.add(kappa, ex.var('z')))
    label = '{}(kappa(z) + z)'.format(f.label or 'f')
    return MeromorphicFunction(tree, EMPTY_LEDGER, label, derived=True)

"""
Copyright (c) Facebook, Inc. and its affiliates.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.

-------------------------------------------------------------------

Built-in families of equations with known solutions and declared
ledgers. Entries are addressed by id and built from parameter bindings

    get('ex2_1', a=np.pi/3)
    get('ex5_1', h='z^2 + 1', m2=3)
    get('ex5_1', h='z', Q='exp(2*pi*i*z)')

Numbers may be given as text in the expression grammar ('pi/3'). The
periodic parameters Q and beta are expressions whose defaults refer to
the numeric parameters.
"""

from collections import namedtuple

import numpy as np
import pandas as pd

from diffnev import expr as ex
from diffnev.diffops import periodicity_defect
from diffnev.equations import (ODE, DifferenceEquation, as_function,
                               residual_main, residual_ode, sweep,
                               RESIDUAL_TOL)
from diffnev.errors import (ParameterConstraintViolation, SingularGridPoint,
                            UnknownEntry)
from diffnev.limits import direct_experiment, indirect_experiment
from diffnev.meromorphic import (EMPTY_LEDGER, POLE, ZERO, Lattice,
                                 MeromorphicFunction, Singularity,
                                 box_grid, linear_exponential_zeros,
                                 make_ledger, rational_ledger, regular_grid)


CatalogEntry = namedtuple(
    'CatalogEntry',
    ['id', 'equation', 'solutions', 'parameters', 'notes', 'extras'])
ParameterSpec = namedtuple('ParameterSpec',
                           ['name', 'default', 'kind', 'constraint'])

NUMBER, INTEGER, EXPRESSION, PERIODIC = ('number', 'integer', 'expression',
                                      'periodic')

Z, T = ex.var('z'), ex.var('t')

# Sample box for the residual suite.
SUITE_BOX = (-3, 3, -3, 3)

# Off-lattice box on which periodic parameters are certified.
PERIODIC_BOX = (-0.93, 0.71, -0.57, 0.83)


def _exp_i(freq, variable=Z):
    '''exp(i * freq * variable)'''
    return ex.exp(ex.mul(1j * freq, variable))


def periodic_exponential(q, m, variable=Z):
    '''q exp(2 pi i m z), the default 1-periodic building block.'''
    return ex.mul(q, _exp_i(2 * np.pi * m, variable))

PERIODIC_TOL = 1e-9


def _frequency(w):
    '''(e^{c0}, m) when w = c0 + 2 pi i m z for a non-zero integer m.'''
    degree = ex.polynomial_degree(w)
    if degree is None or degree > 1:
        return None
    coefficients = ex.polynomial_coefficients(w)
    if len(coefficients) < 2:
        return None
    m = coefficients[1] / (2j * np.pi)
    k = int(round(m.real))
    if k == 0 or abs(m - k) > PERIODIC_TOL:
        return None
    return complex(np.exp(coefficients[0])), k


def match_periodic_exponential(Q):
    '''
    (q, m) when the tree Q has the form q exp(2 pi i m z), possibly written
    as a product, quotient or integer power of such terms, else None.
    '''
    op, args = Q
    if op == ex.EXP:
        return _frequency(args[0])
    if op == ex.MUL:
        for c, other in ((args[0], args[1]), (args[1], args[0])):
            if ex.is_const(c):
                match = match_periodic_exponential(other)
                return match and (c.args[0] * match[0], match[1])
        left, right = map(match_periodic_exponential, args)
        if left and right and left[1] + right[1] != 0:
            return left[0] * right[0], left[1] + right[1]
        return None
    if op == ex.DIV and ex.is_const(args[1]) and not ex.is_const(args[1], 0):
        match = match_periodic_exponential(args[0])
        return match and (match[0] / args[1].args[0], match[1])
    if op == ex.POW:
        match = match_periodic_exponential(args[0])
        return match and (match[0]**args[1], match[1] * args[1])
    return None


def match_periodic_coefficient(beta):
    '''(c0, c1) when beta = c0 + c1 exp(2 pi i z), else None.'''
    op, args = beta
    if ex.is_const(beta):
        return beta.args[0], 0
    match = match_periodic_exponential(beta)
    if match:
        return (0, match[0]) if match[1] == 1 else None
    if op in (ex.ADD, ex.SUB):
        sign = 1 if op == ex.ADD else -1
        for c, other, c_sign, other_sign in ((args[0], args[1], 1, sign),
                                             (args[1], args[0], sign, 1)):
            match = ex.is_const(c) and match_periodic_exponential(other)
            if match and match[1] == 1:
                return c_sign * c.args[0], other_sign * match[0]
    return None


###########
# Ledgers #
###########

def _log_lattices(u_roots, period, kind):
    '''Lattices z = log(u)/(i pi) + period*k for roots u of exp(i pi z).'''
    return [Lattice(complex(np.log(complex(u)) / (1j * np.pi)), period, m, kind)
            for u, m in u_roots]


def _cluster(values, tol=1e-9):
    clusters = []
    for v in values:
        for c in clusters:
            if abs(c[0] - v) <= tol:
                c[1] += 1
                break
        else:
            clusters.append([complex(v), 1])
    return [tuple(c) for c in clusters]


def _exponential_quotient_ledger(u_coefficients):
    '''
    Ledger of N(u)/(exp(2 pi i z) - 1) with u = exp(pi i z), where N is the
    polynomial with descending coefficients u_coefficients and does not
    vanish at u = +-1: simple poles at the integers, zero lattices of
    period 2 from the roots of N.
    '''
    coefficients = np.trim_zeros(np.asarray(u_coefficients, dtype=complex), 'f')
    zeros = _log_lattices(_cluster(np.roots(coefficients)), 2, ZERO)
    return make_ledger([Lattice(0, 1, 1, POLE)] + zeros)


def _sine_zeros(a, phase=0.0):
    '''Zeros of sin(a z + phase): -phase/a + k pi/a.'''
    return [Lattice(complex(-phase / a), complex(np.pi / a), 1, ZERO)]


def _degree(h):
    '''Exact degree of a polynomial tree, or None.'''
    if ex.polynomial_degree(h) is None:
        return None
    return len(ex.polynomial_coefficients(h)) - 1


def _polynomial_roots(h):
    return [] if _degree(h) == 0 else ex.polynomial_roots(h)


def _times(roots, k):
    return [(z, m * k) for z, m in roots]


###########
# Entries #
###########

def _ex2_1(a):
    A = ex.const(-4 * np.sin(a / 2)**2)
    B = ex.const(np.cos(a / 2)**2)
    f1 = MeromorphicFunction(ex.sin(ex.mul(a, Z)),
                             make_ledger(_sine_zeros(a)), 'sin(a z)')
    f2 = MeromorphicFunction(ex.cos(ex.mul(a, Z)),
                             make_ledger(_sine_zeros(a, np.pi / 2)), 'cos(a z)')
    equation = DifferenceEquation(as_function(A, 'A'), as_function(B, 'B'))
    return equation, [f1, f2], {'pairs': [(0, 1)],
                                'casoratian': complex(-np.sin(a))}


def _f_b(b):
    u, u2 = _exp_i(np.pi), _exp_i(2 * np.pi)
    tree = ex.div(1 + b * u - u2, u2 - 1)
    return MeromorphicFunction(tree, _exponential_quotient_ledger([-1, b, 1]),
                               'f_b(b={})'.format(_format(b)))


def _ex2_2(b, b2):
    A, B = as_function(-4, 'A'), as_function(1, 'B')
    fb, fb2 = _f_b(b), _f_b(b2)
    minus = MeromorphicFunction(ex.neg(fb.expr), fb.ledger, '-' + fb.label)
    solutions = [fb, fb2, minus]
    G = [MeromorphicFunction(ex.const(-4), EMPTY_LEDGER, 'G({})'.format(f.label))
         for f in solutions]
    return DifferenceEquation(A, B), solutions, {'pairs': [(0, 1), (0, 2)],
                                                 'G': G}


def _ex2_3(c0, c1, beta):
    u, u2 = _exp_i(np.pi), _exp_i(2 * np.pi)
    tree = ex.div(1 - beta * u + u2, u2 - 1)
    A_tree = ex.div(-4 * beta**2, beta**2 - 4)
    # G(f_beta) in closed form; its zeros need not be even
    G = ex.div(-4 * ex.power((u2 + 1) * beta - 4 * u, 2),
               ex.power(u2 - 1, 2) * (beta**2 - 4))
    extras = {'beta': beta, 'G_closed_form': G}

    match = match_periodic_coefficient(beta)
    if match is None:
        undeclared = make_ledger([], zeros_declared=False)
        f = MeromorphicFunction(tree, undeclared, 'f_beta', derived=True)
        A = MeromorphicFunction(A_tree, undeclared, 'A', derived=True)
        return DifferenceEquation(A, as_function(1, 'B')), [f], extras
    c0, c1 = match
    f = MeromorphicFunction(tree, _exponential_quotient_ledger([-c1, 1, -c0, 1]),
                            'f_beta')

    # poles of A where beta = +-2, double zeros where beta = 0, all with
    # w = exp(2 pi i z) fixed, hence lattices of period 1
    A_records = []
    if c1 != 0:
        for target, multiplicity, kind in ((2, 1, POLE), (-2, 1, POLE),
                                           (0, 2, ZERO)):
            w = (target - c0) / c1
            if w != 0:
                A_records.append(Lattice(
                    complex(np.log(complex(w)) / (2j * np.pi)), 1,
                    multiplicity, kind))
    A = MeromorphicFunction(A_tree, make_ledger(A_records), 'A')
    return DifferenceEquation(A, as_function(1, 'B')), [f], extras


def _rational_solution(h, Q, label):
    '''
    (h^2 + Q^2)/(2 h Q). When Q = q exp(2 pi i m z) its poles are the roots
    of h and its zeros are listed for linear h; any other periodic Q makes
    the solution derived.
    '''
    tree = ex.div(h**2 + Q**2, 2 * h * Q)
    match = match_periodic_exponential(Q)
    if match is None:
        return MeromorphicFunction(tree, make_ledger([], zeros_declared=False),
                                   label, derived=True)
    q, m = match
    poles = _polynomial_roots(h)
    if _degree(h) == 1:
        beta, alpha = ex.polynomial_coefficients(h)[:2]
        zeros = [linear_exponential_zeros(alpha, beta, s * q, m)
                 for s in (1j, -1j)]
        ledger = make_ledger([Singularity(z, k, POLE) for z, k in poles] + zeros)
    else:
        ledger = rational_ledger([], poles, zeros_declared=False)
    return MeromorphicFunction(tree, ledger, label)


def _G_ledger(h, Q, q, m):
    '''
    Ledger of G(f) = (h + h1)^2 (h - Q)^2 (h + Q)^2 / (4 h^3 h1 Q^2), h1 = h(z+1).
    For linear h all zeros are Lambert families. Otherwise only the roots of
    h, h1 and h + h1 are placed, so the even zeros of h -+ Q elsewhere stay
    unlisted.
    '''
    h1 = ex.shift(h, 1)
    records = [Singularity(z, k, ZERO)
               for z, k in _times(_polynomial_roots(ex.add(h, h1)), 2)]
    records += [Singularity(z, k, POLE) for z, k in _times(_polynomial_roots(h), 3)]
    records += [Singularity(z, k, POLE) for z, k in _polynomial_roots(h1)]
    if _degree(h) == 1:
        beta, alpha = ex.polynomial_coefficients(h)[:2]
        records += [linear_exponential_zeros(alpha, beta, s * q, m, 2)
                    for s in (1, -1)]
        return make_ledger(records)

    for z in {s.location for s in records}:
        for factor in (ex.sub(h, Q), ex.add(h, Q)):
            order = ex.vanishing_order(factor, z)
            if order:
                records.append(Singularity(z, 2 * order, ZERO))
    return make_ledger(records, even_unlisted=True)


def _h_coefficients(h):
    h1 = ex.shift(h, 1)
    roots = _polynomial_roots(h) + _polynomial_roots(h1)
    A = MeromorphicFunction(
        ex.div(ex.power(h1 - h, 2), h * h1),
        rational_ledger(_times(_polynomial_roots(h1 - h), 2), roots), 'A')
    B = MeromorphicFunction(
        ex.div(ex.power(h1 + h, 2), 4 * h * h1),
        rational_ledger(_times(_polynomial_roots(h1 + h), 2), roots), 'B')
    return A, B


def _ex2_4(q, m, Q):
    A, B = _h_coefficients(Z)
    f = _rational_solution(Z, Q, '(z^2+Q^2)/(2Qz)')
    return DifferenceEquation(A, B), [f], {'Q': Q}


def _ex3_1(C):
    A = MeromorphicFunction(ex.div(1, T**2), make_ledger([Singularity(0, 2, POLE)]),
                            'A~(t,0)')
    B = as_function(1, 'B~(t,0)')
    w = MeromorphicFunction(
        ex.div(C**2 + T**2, 2 * C * T),
        make_ledger([Singularity(0, 1, POLE), Singularity(1j * C, 1, ZERO),
                     Singularity(-1j * C, 1, ZERO)]),
        'w_C')
    base_A, base_B = _h_coefficients(Z)
    extras = {
        # the ex2_4 equation scaled directly, solved by w_C through Q = C/eps
        'direct': direct_experiment('ex3_1 direct', base_A, base_B, w),
        # frozen limit coefficients, whose discrete residual is O(eps)
        'limit': indirect_experiment('ex3_1 limit coefficients',
                                     lambda eps: (A, B), w),
    }
    return DifferenceEquation(A, B, ODE), [w], extras


def _ex3_2(phi):
    A, B = as_function(-4, 'A~(t,0)'), as_function(1, 'B~(t,0)')
    w = MeromorphicFunction(ex.sin(2 * T), make_ledger(_sine_zeros(2)), 'sin 2t')

    def family(eps):
        return (ex.const(-4 * np.sin(eps)**2 / eps**2),
                ex.const(np.cos(eps)**2))

    def candidate(eps):
        return ex.sin(2 * T + phi * eps)

    extras = {'indirect': indirect_experiment('ex3_2 indirect', family,
                                              candidate)}
    return DifferenceEquation(A, B, ODE), [w], extras


def _ex5_1(h, q1, m1, q2, m2, Q, Q2):
    A, B = _h_coefficients(h)
    solutions, G = [], []
    for k, Qk in enumerate((Q, Q2), 1):
        solutions.append(_rational_solution(h, Qk, 'f_{}'.format(k)))
        G_tree = ex.div(ex.power(h + ex.shift(h, 1), 2) * ex.power(h - Qk, 2)
                        * ex.power(h + Qk, 2),
                        4 * ex.power(h, 3) * ex.shift(h, 1) * ex.power(Qk, 2))
        match = match_periodic_exponential(Qk)
        if match is None:
            G.append(MeromorphicFunction(
                G_tree, make_ledger([], zeros_declared=False),
                'G(f_{})'.format(k), derived=True))
        else:
            G.append(MeromorphicFunction(G_tree, _G_ledger(h, Qk, *match),
                                         'G(f_{})'.format(k)))
    h_odd = MeromorphicFunction(
        ex.power(h, 3) * ex.shift(h, 1),
        rational_ledger(_times(_polynomial_roots(h), 3)
                        + _polynomial_roots(ex.shift(h, 1)), []),
        'h^3 h(z+1)')
    return DifferenceEquation(A, B), solutions, {'pairs': [(0, 1)], 'G': G,
                                                 'h_odd': h_odd}


##############
# Parameters #
##############

def _nonzero(value):
    return value != 0


def _not_multiple_of_pi(a):
    return abs(np.sin(a)) > 1e-9


def _non_constant_polynomial(h):
    degree = _degree(h)
    return degree is not None and degree >= 1


def _one_periodic(Q):
    '''Q is 1-periodic and not identically zero on PERIODIC_BOX.'''
    grid = box_grid(PERIODIC_BOX, 8)
    try:
        defect = periodicity_defect(Q, 1, grid, relative=True)
    except SingularGridPoint:
        return False
    return defect <= PERIODIC_TOL and np.max(np.abs(ex.evaluate(Q, grid))) > 0


def _ex2_3_constraint(params):
    match = match_periodic_coefficient(params['beta'])
    if match is None:
        return True
    c0, c1 = match
    # beta not identically 0, beta(n) != +-2 at the integer poles
    return (c0 != 0 or c1 != 0) and abs(abs(c0 + c1) - 2) > 1e-9 \
        and (c1 != 0 or abs(abs(c0) - 2) > 1e-9)


_REGISTRY = {
    'ex2_1': (_ex2_1,
              [ParameterSpec('a', np.pi / 3, NUMBER, _not_multiple_of_pi)],
              'sin(az) and cos(az) with A = -4 sin^2(a/2), B = cos^2(a/2); '
              'their Casoratian is the constant -sin(a)', None),
    'ex2_2': (_ex2_2,
              [ParameterSpec('b', 1.0, NUMBER, _nonzero),
               ParameterSpec('b2', 2.0, NUMBER, _nonzero)],
              'f_b = (1 + b e^{pi i z} - e^{2 pi i z})/(e^{2 pi i z} - 1) '
              'with A = -4, B = 1; f_b, -f_b and f_b2 share the equation '
              'and G(f) = -4', None),
    'ex2_3': (_ex2_3,
              [ParameterSpec('c0', 1.0, NUMBER, None),
               ParameterSpec('c1', 0.5, NUMBER, None),
               ParameterSpec('beta', 'c0 + c1*exp(2*pi*i*z)', PERIODIC,
                             _one_periodic)],
              'f_beta for a 1-periodic beta, by default '
              'c0 + c1 e^{2 pi i z}, '
              'A = -4 beta^2/(beta^2 - 4), B = 1', _ex2_3_constraint),
    'ex2_4': (_ex2_4,
              [ParameterSpec('q', 1.0, NUMBER, _nonzero),
               ParameterSpec('m', 1, INTEGER, _nonzero),
               ParameterSpec('Q', 'q*exp(2*pi*i*m*z)', PERIODIC,
                             _one_periodic)],
              '(z^2 + Q^2)/(2Qz) for a 1-periodic Q, by default '
              'q e^{2 pi i m z}, '
              'A = 1/(z(z+1)), B = (1+2z)^2/(4z(z+1))', None),
    'ex3_1': (_ex3_1,
              [ParameterSpec('C', 1.3, NUMBER, _nonzero)],
              'w_C = (C^2 + t^2)/(2Ct) solves w\'^2 = (w^2 - 1)/t^2, the '
              'direct limit of ex2_4 along Q = C/eps', None),
    'ex3_2': (_ex3_2,
              [ParameterSpec('phi', 0.3, NUMBER, None)],
              'sin(2t + phi eps) solves the indirect discrete equation '
              'exactly, sin 2t solves w\'^2 = -4(w^2 - 1)', None),
    'ex5_1': (_ex5_1,
              [ParameterSpec('h', 'z', EXPRESSION, _non_constant_polynomial),
               ParameterSpec('q1', 1.0, NUMBER, _nonzero),
               ParameterSpec('m1', 1, INTEGER, _nonzero),
               ParameterSpec('q2', 1.0, NUMBER, _nonzero),
               ParameterSpec('m2', 5, INTEGER, _nonzero),
               ParameterSpec('Q', 'q1*exp(2*pi*i*m1*z)', PERIODIC,
                             _one_periodic),
               ParameterSpec('Q2', 'q2*exp(2*pi*i*m2*z)', PERIODIC,
                             _one_periodic)],
              '(h^2 + Q_j^2)/(2hQ_j) for a polynomial h and 1-periodic '
              'Q_1 = Q, Q_2, by default q_j e^{2 pi i m_j z}, with '
              'A = (h1 - h)^2/(h h1), B = (h1 + h)^2/(4 h h1), h1 = h(z+1)',
              None),
}


def _format(value):
    value = complex(value)
    return '{:g}'.format(value.real) if value.imag == 0 else '{:g}'.format(value)


def _bind(spec, value, bound):
    if spec.kind in (EXPRESSION, PERIODIC):
        if isinstance(value, str):
            params = bound if spec.kind == PERIODIC else None
            return ex.parse(value, params, variables=('z',))
        return ex.as_expr(value)
    if isinstance(value, str):
        tree = ex.parse(value, variables=())
        if not ex.is_const(tree):
            raise ValueError('{!r} is not a number.'.format(value))
        value = tree.args[0]
    value = complex(value)
    if spec.kind == INTEGER:
        if value.imag != 0 or not float(value.real).is_integer():
            raise ValueError('{} is not an integer.'.format(value))
        return int(value.real)
    return value.real if value.imag == 0 else value


def get(entry_id, **params):
    '''Builds the catalog entry entry_id with the given parameter bindings.'''
    if entry_id not in _REGISTRY:
        raise UnknownEntry('Unknown catalog entry {!r}; known entries are {}.'
                           .format(entry_id, ', '.join(sorted(_REGISTRY))))
    builder, schema, notes, joint = _REGISTRY[entry_id]
    names = {spec.name for spec in schema}
    unknown = set(params) - names
    if unknown:
        raise ParameterConstraintViolation(
            '{} has no parameters {}.'.format(entry_id, sorted(unknown)))

    values = {}
    for spec in schema:
        try:
            values[spec.name] = _bind(spec, params.get(spec.name, spec.default),
                                      values)
        except (TypeError, ValueError) as e:
            raise ParameterConstraintViolation(
                '{}: cannot bind {}: {}'.format(entry_id, spec.name, e))
        if spec.constraint and not spec.constraint(values[spec.name]):
            raise ParameterConstraintViolation(
                '{}: {} = {} violates its constraint.'.format(
                    entry_id, spec.name, params.get(spec.name, spec.default)))
    if joint and not joint(values):
        raise ParameterConstraintViolation(
            '{}: the parameters {} are not admissible.'.format(entry_id, values))

    equation, solutions, extras = builder(**values)
    return CatalogEntry(entry_id, equation, solutions, values, notes, extras)


def list_entries():
    '''(id, parameter schema, provenance) of every entry.'''
    return [(entry_id, schema, notes)
            for entry_id, (_, schema, notes, _) in sorted(_REGISTRY.items())]


##################
# Residual suite #
##################

def suite_grid(entry, n=200, box=SUITE_BOX):
    '''n regular points for the residual suite of entry.'''
    eq = entry.equation
    shifts = (0,) if eq.form == ODE else (0, 1)
    return regular_grid([eq.A, eq.B] + list(entry.solutions), box, n, shifts)


def residual_suite(entry, n=200, box=SUITE_BOX, tol=RESIDUAL_TOL):
    '''Maximum relative residual of every solution of entry on its grid.'''
    grid = suite_grid(entry, n, box)
    eq = entry.equation
    rows = []
    for f in entry.solutions:
        if eq.form == ODE:
            report = sweep(residual_ode, eq.A, eq.B, f, grid=grid)
        else:
            report = sweep(residual_main, eq, f, grid=grid)
        rows.append([entry.id, f.label, len(grid), report.max_relative,
                     report.max_relative <= tol])
    return pd.DataFrame(rows, columns=['entry', 'solution', 'points',
                                       'max_relative', 'passed'])

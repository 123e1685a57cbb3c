"""
Copyright (c) Facebook, Inc. and its affiliates.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.

-------------------------------------------------------------------

A meromorphic function is an expression paired with a declared ledger of
its poles and zeros. Ledgers hold three kinds of records

    Singularity(location, multiplicity, kind)        a single point
    Lattice(base, step, multiplicity, kind)          base + k*step, k in Z
    LambertFamily(coefficient, argument, offset, multiplicity, kind)
                                                     coefficient*W_k(argument)
                                                     + offset, k in Z

where W_k is the k-th branch of the Lambert W function. The latter
describe the zeros of h(z) + s*q*exp(2*pi*i*m*z) for linear h.

Ledgers are declared, not discovered. The argument-principle counter in
this module validates them:

    argument_principle_count: (f, box) -> zeros minus poles inside box
    validate_ledger: (f, region, cell) -> LedgerReport

Boxes are tuples (x0, x1, y0, y1).
"""

from collections import namedtuple
from joblib import Parallel, delayed
from scipy.special import lambertw

import json
import math
import os
import warnings

import numpy as np
import pandas as pd

from diffnev import expr as ex
from diffnev.errors import (CrowdedCellWarning, IncompleteLedger,
                            NonIntegerWinding)


POLE, ZERO = 'pole', 'zero'

# Lattices and families are never expanded beyond this modulus.
LATTICE_BOUND = 1e6

# Minimal distance between grid points and declared poles.
GUARD = 0.05

# Points closer than this are the same location.
MERGE_TOL = 1e-9

Singularity = namedtuple('Singularity', ['location', 'multiplicity', 'kind'])
Lattice = namedtuple('Lattice', ['base', 'step', 'multiplicity', 'kind'])
LambertFamily = namedtuple(
    'LambertFamily',
    ['coefficient', 'argument', 'offset', 'multiplicity', 'kind'])

SingularityLedger = namedtuple(
    'SingularityLedger',
    ['points', 'lattices', 'families', 'zeros_declared', 'even_unlisted'],
    defaults=((), (), (), True, False))
SingularityLedger.__doc__ = '''
zeros_declared is False when the zeros of the function are not located
(its poles still are). even_unlisted is True when only the singularities
of odd multiplicity, and possibly some others, are listed.
'''

EMPTY_LEDGER = SingularityLedger()


class MeromorphicFunction(namedtuple(
        'MeromorphicFunction', ['expr', 'ledger', 'label', 'derived'],
        defaults=(EMPTY_LEDGER, '', False))):
    '''
    An expression with its declared singularity ledger. Derived functions
    carry an empty ledger that has to be validated before use.
    '''
    __slots__ = ()

    def __call__(self, z):
        return ex.evaluate(self.expr, z)


def entire(expr, label='', zeros=()):
    '''A function without poles, with the given zero records.'''
    return MeromorphicFunction(
        ex.as_expr(expr), SingularityLedger(*_split(zeros)), label)


def _split(records):
    points = tuple(r for r in records if isinstance(r, Singularity))
    lattices = tuple(r for r in records if isinstance(r, Lattice))
    families = tuple(r for r in records if isinstance(r, LambertFamily))
    return points, lattices, families


def make_ledger(records, zeros_declared=True, even_unlisted=False):
    return SingularityLedger(*_split(records), zeros_declared, even_unlisted)


#############
# Expansion #
#############

def _lattice_points(lattice, r):
    base, step = complex(lattice.base), complex(lattice.step)
    r = min(r, LATTICE_BOUND)
    k_max = int(math.ceil((r + abs(base)) / abs(step))) + 1
    ks = np.arange(-k_max, k_max + 1)
    points = base + ks * step
    return points[np.abs(points) < r]


def _family_points(family, r):
    coefficient = complex(family.coefficient)
    offset = complex(family.offset)
    r = min(r, LATTICE_BOUND)
    # |W_k(x)| >= 2*pi*(|k| - 1) for every branch k
    k_max = int(math.ceil((r + abs(offset)) / (2 * np.pi * abs(coefficient)))) + 2
    ks = np.arange(-k_max, k_max + 1)
    points = np.array([coefficient * lambertw(family.argument, k) + offset
                       for k in ks])
    return points[np.abs(points) < r]


def expand(ledger, r):
    '''
    Lists the net singularities of the ledger in the open disk |z| < r,
    sorted by modulus then argument. Coincident records are merged into
    their net order, so that a simple pole on top of a double zero is a
    simple zero.
    '''
    located = [(complex(p.location), _signed(p)) for p in ledger.points
               if abs(p.location) < r]
    for record in ledger.lattices:
        located += [(z, _signed(record)) for z in _lattice_points(record, r)]
    for record in ledger.families:
        located += [(z, _signed(record)) for z in _family_points(record, r)]

    merged = []
    for z, order in located:
        for entry in merged:
            if abs(entry[0] - z) <= MERGE_TOL:
                entry[1] += order
                break
        else:
            merged.append([complex(z), order])
    return sorted((Singularity(z, abs(order), ZERO if order > 0 else POLE)
                   for z, order in merged if order != 0),
                  key=lambda s: _sort_key(s.location))


def _signed(record):
    return record.multiplicity if record.kind == ZERO else -record.multiplicity


def _sort_key(z):
    return (round(abs(z), 12), round(math.atan2(z.imag, z.real), 12))


def poles_in_disk(f, r):
    '''All ledger poles of f with |location| < r as (location, multiplicity).'''
    if r <= 0:
        raise ValueError('The radius must be positive, got {}.'.format(r))
    return [(s.location, s.multiplicity) for s in expand(f.ledger, r)
            if s.kind == POLE]


def zeros_in_disk(f, r):
    if not f.ledger.zeros_declared:
        raise IncompleteLedger('The zeros of {} are not declared.'.format(
            f.label or ex.to_text(f.expr)))
    return [(s.location, s.multiplicity) for s in expand(f.ledger, r)
            if s.kind == ZERO]


def pole_distance(functions, z, shift=0):
    '''Distance from each z + shift to the nearest declared pole.'''
    z = np.asarray(z, dtype=complex) + shift
    r = (np.max(np.abs(z)) if z.size else 0) + 1
    poles = np.array([p for f in functions for p, _ in poles_in_disk(f, r)])
    if not len(poles):
        return np.full(z.shape, np.inf)
    return np.min(np.abs(z[..., None] - poles), axis=-1)


##########################
# Ledger transformations #
##########################

def _swap(kind):
    return ZERO if kind == POLE else POLE


def reciprocal(f):
    '''1/f, whose ledger exchanges the poles and zeros of f.'''
    ledger = f.ledger
    if not ledger.zeros_declared:
        raise IncompleteLedger('The poles of 1/{} are not declared.'.format(
            f.label or ex.to_text(f.expr)))
    swapped = SingularityLedger(
        tuple(p._replace(kind=_swap(p.kind)) for p in ledger.points),
        tuple(l._replace(kind=_swap(l.kind)) for l in ledger.lattices),
        tuple(w._replace(kind=_swap(w.kind)) for w in ledger.families),
        True, ledger.even_unlisted)
    return MeromorphicFunction(ex.div(1, f.expr), swapped,
                               '1/({})'.format(f.label), f.derived)


def scale_ledger(ledger, eps):
    '''Ledger in t = eps*z.'''
    eps = complex(eps)
    return ledger._replace(
        points=tuple(p._replace(location=eps * p.location)
                     for p in ledger.points),
        lattices=tuple(l._replace(base=eps * l.base, step=eps * l.step)
                       for l in ledger.lattices),
        families=tuple(w._replace(coefficient=eps * w.coefficient,
                                  offset=eps * w.offset)
                       for w in ledger.families))


def scale_function(f, eps):
    '''The function t -> f(t/eps) with its ledger.'''
    return MeromorphicFunction(ex.substitute_scale(f.expr, eps),
                               scale_ledger(f.ledger, eps),
                               f.label, f.derived)


def rational_ledger(numerator_roots, denominator_roots, **flags):
    '''
    Ledger of a quotient from the (location, multiplicity) roots of its
    numerator and denominator. Common roots cancel.
    '''
    records = [Singularity(z, m, ZERO) for z, m in numerator_roots]
    records += [Singularity(z, m, POLE) for z, m in denominator_roots]
    net = expand(make_ledger(records), math.inf)
    return make_ledger(net, **flags)


def linear_exponential_zeros(alpha, beta, q, m, multiplicity=1):
    '''
    Zeros of alpha*z + beta - q*exp(2*pi*i*m*z) as a LambertFamily, where
    alpha, q != 0 and m is a non-zero integer.

    With u = z + beta/alpha the equation reads u*exp(-2*pi*i*m*u) = c, so
    u = W_k(-2*pi*i*m*c) / (-2*pi*i*m).
    '''
    alpha, beta, q = complex(alpha), complex(beta), complex(q)
    assert alpha != 0 and q != 0 and m != 0
    c = q * np.exp(-2j * np.pi * m * beta / alpha) / alpha
    return LambertFamily(coefficient=1 / (-2j * np.pi * m),
                         argument=complex(-2j * np.pi * m * c),
                         offset=-beta / alpha,
                         multiplicity=multiplicity, kind=ZERO)


################
# Ledger files #
################

def ledger_to_records(ledger):
    entries = [{'x': complex(p.location).real, 'y': complex(p.location).imag,
                'multiplicity': p.multiplicity, 'kind': p.kind}
               for p in ledger.points]
    entries += [{'base_x': complex(l.base).real,
                 'base_y': complex(l.base).imag,
                 'step_x': complex(l.step).real,
                 'step_y': complex(l.step).imag,
                 'multiplicity': l.multiplicity, 'kind': l.kind}
                for l in ledger.lattices]
    entries += [{'coefficient': [complex(w.coefficient).real,
                                 complex(w.coefficient).imag],
                 'argument': [complex(w.argument).real,
                              complex(w.argument).imag],
                 'offset': [complex(w.offset).real, complex(w.offset).imag],
                 'multiplicity': w.multiplicity, 'kind': w.kind}
                for w in ledger.families]
    return {'entries': entries,
            'zeros_declared': ledger.zeros_declared,
            'even_unlisted': ledger.even_unlisted}


def ledger_from_records(records):
    '''
    Builds a ledger from either a plain list of entries or a mapping with
    an 'entries' list and the two ledger flags.
    '''
    if isinstance(records, dict):
        entries = records.get('entries', [])
        flags = {k: bool(records[k]) for k in ('zeros_declared', 'even_unlisted')
                 if k in records}
    else:
        entries, flags = records, {}
    parsed = []
    for entry in entries:
        multiplicity, kind = int(entry['multiplicity']), entry['kind']
        if multiplicity < 1 or kind not in (POLE, ZERO):
            raise ValueError('Invalid ledger entry {}.'.format(entry))
        if 'base_x' in entry:
            parsed.append(Lattice(
                complex(entry['base_x'], entry.get('base_y', 0)),
                complex(entry['step_x'], entry.get('step_y', 0)),
                multiplicity, kind))
        elif 'argument' in entry:
            parsed.append(LambertFamily(
                complex(*entry['coefficient']), complex(*entry['argument']),
                complex(*entry['offset']), multiplicity, kind))
        else:
            parsed.append(Singularity(
                complex(entry['x'], entry.get('y', 0)), multiplicity, kind))
    return make_ledger(parsed, **flags)


def save_ledger(ledger, path):
    with open(path, 'w') as f:
        json.dump(ledger_to_records(ledger), f, indent=2, sort_keys=True)


def load_ledger(path):
    with open(path) as f:
        return ledger_from_records(json.load(f))


def function_from_record(record, variables=('z', 't')):
    '''
    A function from {'expr', 'params', 'label', 'ledger'}. Without a
    ledger the function is marked derived and claims no zeros.
    '''
    params = ex.bind_params(record.get('params'), variables)
    tree = ex.parse(record['expr'], params, variables)
    label = record.get('label', record['expr'])
    if 'ledger' not in record:
        return MeromorphicFunction(tree, make_ledger([], zeros_declared=False),
                                   label, derived=True)
    return MeromorphicFunction(tree, ledger_from_records(record['ledger']),
                               label)


def load_function(path):
    with open(path) as f:
        return function_from_record(json.load(f))


######################
# Argument principle #
######################

Winding = namedtuple('Winding', ['value', 'nodes'])


def _boundary(box, nodes):
    '''Counterclockwise boundary nodes and trapezoid weights of a box.'''
    x0, x1, y0, y1 = box
    corners = [complex(x0, y0), complex(x1, y0), complex(x1, y1),
               complex(x0, y1), complex(x0, y0)]
    points, weights = [], []
    s = np.arange(nodes + 1) / nodes
    w = np.full(nodes + 1, 1.0 / nodes)
    w[0] = w[-1] = 0.5 / nodes
    for a, b in zip(corners[:-1], corners[1:]):
        points.append(a + (b - a) * s)
        weights.append((b - a) * w)
    return np.concatenate(points), np.concatenate(weights)


def _winding_at(f, derivative, box, nodes):
    z, dz = _boundary(box, nodes)
    with np.errstate(all='ignore'):
        integrand = ex.evaluate(derivative, z) / ex.evaluate(f.expr, z)
    return np.sum(integrand * dz) / (2j * np.pi)


def winding_number(f, box, derivative=None, nodes=256, max_nodes=4096,
                   stable=0.05):
    '''
    Winding integral (1/2*pi*i) of f'/f over the boundary of box, by the
    composite trapezoid rule on each edge with node doubling until two
    successive values agree within stable.
    '''
    x0, x1, y0, y1 = box
    r = max(abs(complex(x, y)) for x in (x0, x1) for y in (y0, y1)) + 1
    for s in expand(f.ledger, r):
        z = s.location
        inside_x = x0 - 1e-3 <= z.real <= x1 + 1e-3
        inside_y = y0 - 1e-3 <= z.imag <= y1 + 1e-3
        edge = min(abs(z.real - x0), abs(z.real - x1),
                   abs(z.imag - y0), abs(z.imag - y1))
        if inside_x and inside_y and edge < 1e-3:
            raise NonIntegerWinding(
                'A declared {} at {} lies on the boundary of {}.'.format(
                    s.kind, z, box))

    derivative = derivative or ex.differentiate(f.expr)
    value = _winding_at(f, derivative, box, nodes)
    while nodes < max_nodes:
        nodes *= 2
        refined = _winding_at(f, derivative, box, nodes)
        converged = abs(refined - value) <= stable
        value = refined
        if converged:
            break
    return Winding(complex(value), nodes)


def argument_principle_count(f, box, derivative=None, **kwargs):
    '''Zeros minus poles of f inside box, counted with multiplicity.'''
    winding = winding_number(f, box, derivative, **kwargs)
    count = round(winding.value.real)
    if not np.isfinite(winding.value) or abs(winding.value - count) > 0.25:
        raise NonIntegerWinding(
            'Winding value {:.4f} over {} is not close to an integer.'.format(
                winding.value, box))
    return int(count)


def ledger_count(ledger, box):
    '''Zeros minus poles declared inside box.'''
    x0, x1, y0, y1 = box
    r = max(abs(complex(x, y)) for x in (x0, x1) for y in (y0, y1)) + 1
    inside = [s for s in expand(ledger, r)
              if x0 < s.location.real < x1 and y0 < s.location.imag < y1]
    return sum(_signed(s) for s in inside), len(inside)


#####################
# Ledger validation #
#####################

LedgerReport = namedtuple('LedgerReport',
                          ['table', 'mismatches', 'crowded', 'offset'])


def _tiling_offset(ledger, region, cell, candidates=17):
    '''
    Offset of the tiling among cell*k/candidates that keeps the declared
    singularities furthest from the cell edges.
    '''
    x0, x1, y0, y1 = region
    r = max(abs(complex(x, y)) for x in (x0, x1) for y in (y0, y1)) + 2 * cell
    located = [s.location for s in expand(ledger, r)]
    best, best_distance = 0.0, -1.0
    for k in range(candidates):
        offset = cell * k / candidates
        distance = math.inf
        for z in located:
            for value, origin in ((z.real, x0), (z.imag, y0)):
                phase = (value - origin - offset) % cell
                distance = min(distance, phase, cell - phase)
        if distance > best_distance:
            best, best_distance = offset, distance
    return best


def cells(region, cell, offset=0.0):
    '''
    Tiles region into square cells shifted by offset along both axes. A
    non-zero offset adds a leading row and column, so the cells always
    cover region and overshoot it by less than one cell on each side.
    '''
    x0, x1, y0, y1 = region
    start = -1 if offset % cell else 0
    nx = int(math.ceil((x1 - x0 - offset) / cell - MERGE_TOL))
    ny = int(math.ceil((y1 - y0 - offset) / cell - MERGE_TOL))
    return [(x0 + offset + i * cell, x0 + offset + (i + 1) * cell,
             y0 + offset + j * cell, y0 + offset + (j + 1) * cell)
            for i in range(start, nx) for j in range(start, ny)]


def validate_ledger(f, region, cell, n_jobs=1):
    '''
    Compares the argument-principle count of every cell of the tiled region
    against the count the ledger predicts. Cells with more than one declared
    singularity are reported as crowded. The tiling is shifted so that cell
    edges stay clear of declared singularities; it covers all of region and
    may reach up to one cell beyond it, where singularities are checked too.
    '''
    if not f.ledger.zeros_declared or f.ledger.even_unlisted:
        raise IncompleteLedger(
            'Only a complete ledger can be validated ({}).'.format(f.label))
    offset = _tiling_offset(f.ledger, region, cell)
    boxes = cells(region, cell, offset)
    derivative = ex.differentiate(f.expr)

    counted = Parallel(n_jobs=n_jobs)(
        delayed(argument_principle_count)(f, box, derivative)
        for box in boxes)
    predicted = [ledger_count(f.ledger, box) for box in boxes]

    table = pd.DataFrame(boxes, columns=['x0', 'x1', 'y0', 'y1'])
    table['predicted'] = [p for p, _ in predicted]
    table['counted'] = counted
    table['declared'] = [n for _, n in predicted]
    table['crowded'] = table['declared'] > 1
    table = table.sort_values(['x0', 'y0'], ignore_index=True)

    mismatches = [tuple(row[['x0', 'x1', 'y0', 'y1']])
                  for _, row in table.iterrows()
                  if row['predicted'] != row['counted']]
    crowded = [tuple(row[['x0', 'x1', 'y0', 'y1']])
               for _, row in table.iterrows() if row['crowded']]
    if crowded:
        warnings.warn(
            '{} cells hold more than one declared singularity.'.format(
                len(crowded)), CrowdedCellWarning)
    return LedgerReport(table, mismatches, crowded, offset)


#########
# Grids #
#########

def box_grid(box, side):
    '''side x side cell midpoints of box, row by row.'''
    x0, x1, y0, y1 = box
    xs = x0 + (np.arange(side) + 0.5) * (x1 - x0) / side
    ys = y0 + (np.arange(side) + 0.5) * (y1 - y0) / side
    return (xs[None, :] + 1j * ys[:, None]).ravel()


def _regular(functions, z, shifts, guard):
    keep = np.ones(z.shape, dtype=bool)
    for shift in shifts:
        keep &= pole_distance(functions, z, shift) >= guard
        for f in functions:
            keep &= np.isfinite(ex.evaluate(f.expr, z + shift))
    return z[keep]


def regular_grid(functions, box, n, shifts=(0,), guard=GUARD):
    '''
    n deterministic lattice points of box whose shifts by each of shifts
    keep a distance guard from the declared poles of all functions.
    '''
    side = max(2, int(math.ceil(math.sqrt(n))))
    while True:
        z = _regular(functions, box_grid(box, side), shifts, guard)
        if len(z) >= n:
            return z[np.round(np.linspace(0, len(z) - 1, n)).astype(int)]
        if side > 64 * math.sqrt(n) + 64:
            raise ValueError('Could not place {} regular points in {}.'.format(
                n, box))
        side += max(1, side // 4)


def default_seed():
    return int(os.environ.get('DN_SEED', 0))


def sample_points(box, n, functions=(), shifts=(0,), guard=GUARD, seed=None):
    '''n uniformly random regular points of box, seeded by DN_SEED.'''
    rng = np.random.default_rng(default_seed() if seed is None else seed)
    x0, x1, y0, y1 = box
    found = np.zeros(0, dtype=complex)
    while len(found) < n:
        z = rng.uniform(x0, x1, 2 * n) + 1j * rng.uniform(y0, y1, 2 * n)
        found = np.concatenate([found, _regular(functions, z, shifts, guard)])
    return found[:n]

"""
Copyright (c) Facebook, Inc. and its affiliates.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.

-------------------------------------------------------------------

Difference operators as tree transformations

    delta: f -> f(z+1) - f(z)
    delta2: f -> f(z+2) - 2 f(z+1) + f(z)
    casoratian: (f1, f2) -> f1 delta(f2) - f2 delta(f1)

and the measurement of periodicity on finite grids.
"""

import numpy as np

from diffnev import expr as ex
from diffnev.errors import SingularGridPoint
from diffnev.meromorphic import GUARD, MeromorphicFunction, pole_distance


def _tree(f):
    return f.expr if isinstance(f, MeromorphicFunction) else ex.as_expr(f)


def shift_n(f, n):
    return ex.shift(_tree(f), n)


def delta(f):
    f = _tree(f)
    return ex.sub(ex.shift(f, 1), f)


def delta2(f):
    f = _tree(f)
    return ex.add(ex.sub(shift_n(f, 2), ex.mul(2, shift_n(f, 1))), f)


def casoratian(f1, f2):
    '''The discrete Wronskian f1*delta(f2) - f2*delta(f1).'''
    f1, f2 = _tree(f1), _tree(f2)
    return ex.sub(ex.mul(f1, delta(f2)), ex.mul(f2, delta(f1)))


def periodicity_defect(f, period, grid, relative=False):
    '''
    max |f(z + period) - f(z)| over grid, or that maximum divided by
    1 + max |f(z)| when relative. It certifies periodicity on the grid only.
    '''
    grid = np.asarray(grid, dtype=complex)
    if period == 0:
        return 0.0
    if isinstance(f, MeromorphicFunction):
        for shift in (0, period):
            if np.any(pole_distance([f], grid, shift) < GUARD):
                raise SingularGridPoint(
                    'The grid comes within {} of a pole of {}.'.format(
                        GUARD, f.label))
    tree = _tree(f)
    values = ex.evaluate(tree, grid)
    shifted = ex.evaluate(tree, grid + period)
    if not (np.all(np.isfinite(values)) and np.all(np.isfinite(shifted))):
        raise SingularGridPoint('{} is singular on the grid.'.format(
            ex.to_text(tree)))
    defect = float(np.max(np.abs(shifted - values)))
    if relative:
        return defect / (1 + float(np.max(np.abs(values))))
    return defect

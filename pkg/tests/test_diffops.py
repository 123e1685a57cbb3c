"""
Copyright (c) Facebook, Inc. and its affiliates.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.
"""

from hypothesis import given, settings
from hypothesis import strategies as st
from diffnev import expr as ex
from diffnev.diffops import (casoratian, delta, delta2, periodicity_defect,
                             shift_n)
from diffnev.errors import SingularGridPoint
from diffnev.meromorphic import (POLE, Lattice, MeromorphicFunction,
                                 box_grid, make_ledger)

import numpy as np
import pytest

z = ex.var('z')
grid = box_grid((-2, 2, -1, 1), 6)


def test_differences():
    f = z**3
    assert np.allclose(ex.evaluate(delta(f), grid), 3 * grid**2 + 3 * grid + 1)
    assert np.allclose(ex.evaluate(delta2(f), grid), 6 * grid + 6)
    assert np.allclose(ex.evaluate(shift_n(f, 2), grid), (grid + 2)**3)


def test_casoratian_of_sine_and_cosine():
    a = 0.7
    H = casoratian(ex.sin(a * z), ex.cos(a * z))
    assert np.allclose(ex.evaluate(H, grid), -np.sin(a))


@settings(deadline=None, max_examples=50)
@given(st.floats(-2, 2), st.floats(-2, 2))
def test_casoratian_is_antisymmetric(c, d):
    f1, f2 = ex.exp(c * z), z**2 + d
    total = ex.add(casoratian(f1, f2), casoratian(f2, f1))
    assert np.allclose(ex.evaluate(total, grid), 0)


def test_periodicity_defect():
    f = ex.exp(2j * np.pi * z)
    assert periodicity_defect(f, 1, grid, relative=True) < 1e-12
    assert periodicity_defect(f, 0.5, grid, relative=True) > 0.1
    assert periodicity_defect(f, 0, grid) == 0


def test_periodicity_defect_near_a_pole():
    f = MeromorphicFunction(ex.div(1, ex.sin(np.pi * z)),
                            make_ledger([Lattice(0, 1, 1, POLE)]))
    with pytest.raises(SingularGridPoint):
        periodicity_defect(f, 1, np.array([0.01 + 0.01j]))

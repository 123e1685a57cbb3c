"""
Copyright (c) Facebook, Inc. and its affiliates.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.
"""

from diffnev import expr as ex
from diffnev.errors import IncompleteLedger, NonIntegerWinding
from diffnev.meromorphic import (POLE, ZERO, Lattice, MeromorphicFunction,
                                 Singularity, argument_principle_count,
                                 box_grid, cells, expand, function_from_record,
                                 linear_exponential_zeros, load_ledger,
                                 make_ledger, pole_distance, poles_in_disk,
                                 rational_ledger, reciprocal, regular_grid,
                                 sample_points, save_ledger, scale_function,
                                 validate_ledger, zeros_in_disk)

import numpy as np
import pytest

z = ex.var('z')


def sine():
    return MeromorphicFunction(ex.sin(np.pi * z),
                               make_ledger([Lattice(0, 1, 1, ZERO)]),
                               'sin(pi z)')


def test_expand_lattice():
    ledger = make_ledger([Lattice(0, 1, 1, POLE)])
    locations = [s.location for s in expand(ledger, 2.5)]
    assert locations == [0, 1, -1, 2, -2]
    assert all(s.kind == POLE for s in expand(ledger, 2.5))


def test_expand_merges_coincident_records():
    ledger = make_ledger([Singularity(0, 1, POLE), Singularity(0, 2, ZERO),
                          Singularity(1, 1, POLE), Singularity(1, 1, ZERO)])
    assert expand(ledger, 5) == [Singularity(0, 1, ZERO)]


def test_lambert_family_locates_zeros():
    alpha, beta, q, m = 1.0, 0.5, 2.0, 1
    family = linear_exponential_zeros(alpha, beta, q, m)
    zeros = [s.location for s in expand(make_ledger([family]), 10)]
    assert len(zeros) > 5
    w = np.array(zeros)
    values = alpha * w + beta - q * np.exp(2j * np.pi * m * w)
    assert np.max(np.abs(values)) < 1e-9


def test_rational_ledger_cancels_common_roots():
    ledger = rational_ledger([(1, 2), (2, 1)], [(1, 1), (3, 1)])
    assert expand(ledger, 10) == [Singularity(1, 1, ZERO),
                                  Singularity(2, 1, ZERO),
                                  Singularity(3, 1, POLE)]


def test_disk_queries():
    f = MeromorphicFunction(ex.div(z - 2, z), rational_ledger([(2, 1)], [(0, 1)]))
    assert poles_in_disk(f, 1) == [(0, 1)]
    assert zeros_in_disk(f, 1) == []
    assert zeros_in_disk(f, 3) == [(2, 1)]
    with pytest.raises(ValueError):
        poles_in_disk(f, 0)
    g = f._replace(ledger=make_ledger([Singularity(0, 1, POLE)],
                                      zeros_declared=False))
    with pytest.raises(IncompleteLedger):
        zeros_in_disk(g, 3)
    with pytest.raises(IncompleteLedger):
        reciprocal(g)


def test_reciprocal_swaps_kinds():
    g = reciprocal(sine())
    assert all(s.kind == POLE for s in expand(g.ledger, 3))
    assert np.isclose(g(0.5), 1)


def test_scale_function():
    f = sine()
    g = scale_function(f, 0.1)
    assert np.isclose(g(0.05), f(0.5))
    assert [s.location for s in expand(g.ledger, 0.15)] == [0, 0.1, -0.1]


def test_pole_distance():
    f = MeromorphicFunction(ex.div(1, z), make_ledger([Singularity(0, 1, POLE)]))
    assert np.allclose(pole_distance([f], np.array([1, 2j])), [1, 2])
    assert np.allclose(pole_distance([f], np.array([1]), shift=-1), [0])
    assert np.all(np.isinf(pole_distance([sine()], np.array([0.5]))))


def test_ledger_file(tmp_path):
    ledger = make_ledger([Singularity(0.5j, 2, POLE), Lattice(0, 2, 1, ZERO),
                          linear_exponential_zeros(1, 0, 1, 1)])
    path = str(tmp_path / 'ledger.json')
    save_ledger(ledger, path)
    loaded = load_ledger(path)
    assert expand(loaded, 4) == expand(ledger, 4)


def test_function_from_record():
    f = function_from_record({'expr': 'sin(a*z)', 'params': {'a': 'pi/2'}})
    assert f.derived and not f.ledger.zeros_declared
    assert np.isclose(f(1), 1)
    g = function_from_record({
        'expr': '1/z', 'label': 'inverse',
        'ledger': [{'x': 0, 'y': 0, 'multiplicity': 1, 'kind': 'pole'}]})
    assert not g.derived and g.label == 'inverse'
    assert poles_in_disk(g, 1) == [(0, 1)]


def test_argument_principle():
    f = MeromorphicFunction(ex.div(ex.power(z - 0.1, 2), z + 0.2))
    assert argument_principle_count(f, (-1, 1, -1, 1)) == 1
    assert argument_principle_count(f, (0, 1, -1, 1)) == 2
    assert argument_principle_count(f, (-1, 0, -1, 1)) == -1


def test_singularity_on_boundary():
    with pytest.raises(NonIntegerWinding):
        argument_principle_count(sine(), (1, 2, -1, 1))


def test_validate_ledger():
    report = validate_ledger(sine(), (-2, 2, -1, 1), 0.5)
    assert report.mismatches == []
    assert report.crowded == []
    assert len(report.table) == 45
    assert 0 < report.offset < 0.5

    f = sine()
    broken = f._replace(ledger=make_ledger([Lattice(0, 2, 1, ZERO)]))
    report = validate_ledger(broken, (-2, 2, -1, 1), 0.5)
    assert len(report.mismatches) == 2


@pytest.mark.parametrize('offset', [0.0, 0.1, 0.37])
def test_cells_cover_the_region(offset):
    region = (-3, 2.2, -2, 2)
    boxes = np.array(cells(region, 0.5, offset))
    assert np.allclose(boxes[:, 1] - boxes[:, 0], 0.5)
    assert np.allclose(boxes[:, 3] - boxes[:, 2], 0.5)
    assert boxes[:, 0].min() <= -3 and boxes[:, 1].max() >= 2.2
    assert boxes[:, 2].min() <= -2 and boxes[:, 3].max() >= 2
    assert boxes[:, 0].min() > -3.5 and boxes[:, 1].max() < 2.7
    points = sample_points(region, 500)
    inside = ((boxes[None, :, 0] <= points.real[:, None])
              & (points.real[:, None] < boxes[None, :, 1])
              & (boxes[None, :, 2] <= points.imag[:, None])
              & (points.imag[:, None] < boxes[None, :, 3]))
    assert np.all(inside.sum(axis=1) == 1)
    assert len(cells((-2, 2, -1, 1), 0.5)) == 32


def test_validate_ledger_reaches_the_region_edges():
    w0, w1 = -1.97 + 0.3j, 1.96 - 0.93j
    f = MeromorphicFunction(ex.div(z - w0, z - w1),
                            make_ledger([Singularity(w0, 1, ZERO),
                                         Singularity(w1, 1, POLE)]))
    report = validate_ledger(f, (-2, 2, -1, 1), 0.5)
    assert report.table['declared'].sum() == 2
    assert report.mismatches == []

    missing = f._replace(ledger=make_ledger([Singularity(w1, 1, POLE)]))
    assert len(validate_ledger(missing, (-2, 2, -1, 1), 0.5).mismatches) == 1


def test_grids():
    grid = box_grid((0, 1, 0, 1), 4)
    assert len(grid) == 16
    assert np.isclose(grid[0], 0.125 + 0.125j)

    f = MeromorphicFunction(ex.div(1, z), make_ledger([Singularity(0, 1, POLE)]))
    grid = regular_grid([f], (-1, 1, -1, 1), 50, shifts=(0, 1))
    assert len(grid) == 50
    assert np.all(np.abs(grid) >= 0.05)
    assert np.all(np.abs(grid + 1) >= 0.05)


def test_sample_points_are_seeded():
    a = sample_points((-1, 1, -1, 1), 10, seed=3)
    b = sample_points((-1, 1, -1, 1), 10, seed=3)
    assert np.array_equal(a, b)
    assert np.all((np.abs(a.real) <= 1) & (np.abs(a.imag) <= 1))

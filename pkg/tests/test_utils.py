"""
Copyright (c) Facebook, Inc. and its affiliates.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.
"""

from utils import exp_proximity, integer_lattice_counting

import numpy as np


def test_integer_lattice_counting():
    f = integer_lattice_counting
    assert np.isclose(f(0.5), np.log(0.5))
    assert np.isclose(f(1.5), np.log(1.5) + 2*np.log(1.5))
    r = 9.5
    brute = np.log(r) + 2*sum(np.log(r/k) for k in range(1, 10))
    assert np.isclose(f(r), brute)
    assert np.allclose(f(np.array([1.5, 9.5])), [f(1.5), brute])


def test_exp_proximity():
    theta = np.linspace(0, 2*np.pi, 100000, endpoint=False)
    r = 3.0
    integrand = np.maximum(r*np.cos(theta), 0)
    assert np.isclose(integrand.mean(), exp_proximity(r), rtol=1e-6)

"""
Copyright (c) Facebook, Inc. and its affiliates.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.
"""

from experiments import continuous_limits, growth_ratios, pole_counting

import numpy as np


def test_growth_ratios():
    metrics = growth_ratios.run_single_experiment('ex2_1', 10, nodes=256)
    assert abs(metrics['ratio'] - 1) < 0.1


def test_continuous_limits():
    table = continuous_limits.run_single_experiment('ex3_2', 'indirect')
    assert (table['experiment'] == 'indirect').all()
    assert table['underflow'].all()


def test_pole_counting():
    metrics = pole_counting.run_single_experiment(5.5, nodes=256)
    assert metrics['n'] == 11
    assert np.isclose(metrics['N'], metrics['N_closed_form'])

"""
Copyright (c) Facebook, Inc. and its affiliates.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.
"""

from utils import cache
from diffnev import catalog
from diffnev.nevanlinna import characteristic_T
from time import time

import numpy as np
import pandas as pd


def run_single_experiment(entry_id, r, nodes=2048, **params):
    '''T(r) of the first two solutions of a catalog entry and their ratio.'''
    entry = catalog.get(entry_id, **params)
    f1, f2 = entry.solutions[:2]

    # Start timing, to estimate compute time
    time_start = time()
    estimate1 = characteristic_T(f1, r, nodes)
    estimate2 = characteristic_T(f2, r, nodes)
    duration = time() - time_start

    return {
        'entry': entry_id,
        'r': r,
        'nodes': nodes,
        'T1': estimate1.T,
        'T2': estimate2.T,
        'ratio': estimate1.T/estimate2.T,
        'quad_error': max(estimate1.quad_error, estimate2.quad_error),
        'duration': duration,
    }


def run_all_experiments(nodes=2048):
    '''Runs all experiments. This function is used by plots.py'''

    # sin(az) against cos(az), whose ratio tends to 1, and the two
    # solutions of ex5_1 with exp(2 pi i z) and exp(10 pi i z), whose ratio
    # tends to 1/5.
    metrics = [
        cache(run_single_experiment)('ex2_1', r, nodes)
        for r in np.linspace(5, 50, 10)
    ] + [
        cache(run_single_experiment)('ex5_1', r, nodes)
        for r in np.linspace(5, 50, 10)
    ]

    return pd.DataFrame(metrics).set_index(['entry', 'r'])

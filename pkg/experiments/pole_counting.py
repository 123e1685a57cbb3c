"""
Copyright (c) Facebook, Inc. and its affiliates.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.
"""

from utils import cache, integer_lattice_counting
from diffnev import catalog
from diffnev.nevanlinna import counting, proximity_m
from time import time

import numpy as np
import pandas as pd


def run_single_experiment(r, b=1.0, nodes=2048):
    '''
    Counting function and proximity of f_b, whose poles are simple and sit
    at every integer, next to the closed form of N(r, f_b).
    '''
    f_b = catalog.get('ex2_2', b=b).solutions[0]

    # Start timing, to estimate compute time
    time_start = time()
    breakdown = counting(f_b, r)
    m = proximity_m(f_b, r, nodes)
    duration = time() - time_start

    return {
        'r': r,
        'b': b,
        'n': breakdown.n,
        'N': breakdown.N,
        'N_closed_form': integer_lattice_counting(r),
        'm': m.value,
        'quad_error': m.error,
        'duration': duration,
    }


def run_all_experiments(b=1.0):
    '''Runs all experiments. This function is used by plots.py'''
    # Radii at half-integers keep the circle away from the poles.
    metrics = [cache(run_single_experiment)(r, b)
               for r in np.arange(1.5, 50, 2.0)]
    return pd.DataFrame(metrics).set_index('r')

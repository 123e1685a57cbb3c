"""
Copyright (c) Facebook, Inc. and its affiliates.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.
"""

from utils import cache
from diffnev import catalog
from diffnev.limits import convergence_order
from time import time

import warnings

import pandas as pd


EXPERIMENTS = [
    ('ex3_1', 'direct'),
    ('ex3_1', 'limit'),
    ('ex3_2', 'indirect'),
]


def run_single_experiment(entry_id, key, **params):
    experiment = catalog.get(entry_id, **params).extras[key]

    # Start timing, to estimate compute time
    time_start = time()

    # Exact families drive the residual to the rounding floor, which is
    # reported in the underflow column rather than as a warning.
    with warnings.catch_warnings():
        warnings.simplefilter('ignore')
        result = convergence_order(experiment)
    duration = time() - time_start

    table = result.table.assign(entry=entry_id, experiment=key,
                                order=result.order,
                                underflow=result.underflow,
                                duration=duration)
    return table


def run_all_experiments():
    '''Runs all experiments. This function is used by plots.py'''
    tables = [cache(run_single_experiment)(entry_id, key)
              for entry_id, key in EXPERIMENTS]
    return pd.concat(tables, ignore_index=True)

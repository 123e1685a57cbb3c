"""
Copyright (c) Facebook, Inc. and its affiliates.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.
"""

from joblib import Memory
from scipy.special import gammaln

import numpy as np

cache = Memory('.cache').cache

def integer_lattice_counting(r):
    '''
    N(r, f) for simple poles at every integer and r not an integer.
    This is log r + 2*sum_{k=1}^{floor(r)} log(r/k), computed efficiently as
    (2*floor(r) + 1)*log(r) - 2*log(floor(r)!).
    '''
    n = np.floor(r)
    return (2*n + 1)*np.log(r) - 2*gammaln(n + 1)

def exp_proximity(r):
    '''
    m(r, e^z), which is exactly r/pi: log+|e^z| = max(r cos(theta), 0).
    '''
    return r/np.pi

def sine_proximity(r):
    '''
    Large-r approximation of m(r, sin z): 2r/pi - log 2, with an error
    that decays like exp(-r) away from the real axis.
    '''
    return 2*r/np.pi - np.log(2)

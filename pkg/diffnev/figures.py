"""
Copyright (c) Facebook, Inc. and its affiliates.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.

-------------------------------------------------------------------

SVG figures drawn from the report tables. Output is reproducible: the
Agg backend is used, the SVG hash salt is fixed and no date is written.
"""

import matplotlib
matplotlib.use('Agg')

import matplotlib.pyplot as plt
import numpy as np


matplotlib.rcParams['svg.hashsalt'] = 'diffnev'
METADATA = {'Date': None}


def _save(fig, path):
    fig.savefig(path, format='svg', metadata=METADATA)
    plt.close(fig)


def growth_figure(table, path, labels=('f1', 'f2')):
    '''T(r) of two functions and their ratio, from a growth_ratio table.'''
    fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(5, 5))
    top.plot(table['r'], table['T1'], 'k.-', label='T(r, {})'.format(labels[0]))
    top.plot(table['r'], table['T2'], 'k^--', label='T(r, {})'.format(labels[1]))
    top.set_ylabel('T(r)')
    top.legend(handlelength=1.0)

    bottom.plot(table['r'], table['ratio'], 'k.-')
    bottom.axhline(1, color='gray', linewidth=0.5)
    bottom.set_xlabel('r')
    bottom.set_ylabel('ratio')
    _save(fig, path)


def characteristic_figure(tables, path, labels):
    '''m, N and T against r for each characteristic table.'''
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for table, label, style in zip(tables, labels, ['k.-', 'k^--', 'kx:']):
        ax.plot(table['r'], table['T'], style, label='T(r, {})'.format(label))
    ax.set_xlabel('r')
    ax.set_ylabel('T(r)')
    ax.legend(handlelength=1.0)
    _save(fig, path)


def limit_figure(table, path, label=''):
    '''Log-log plot of the residual against eps.'''
    fig, ax = plt.subplots(figsize=(5, 3.5))
    positive = table['max_residual'] > 0
    ax.loglog(table['eps'][positive], table['max_residual'][positive], 'k.-',
              label='max residual')
    ax.loglog(table['eps'][positive], table['mean_residual'][positive], 'k^--',
              label='mean residual')
    eps = np.asarray(table['eps'])
    ax.loglog(eps, eps * table['max_residual'].iloc[-1] / eps[-1]
              if table['max_residual'].iloc[-1] > 0 else eps,
              color='gray', linewidth=0.5, label='slope 1')
    ax.set_xlabel('eps')
    ax.set_ylabel('residual / eps^2')
    ax.set_title(label)
    ax.legend(handlelength=1.0)
    _save(fig, path)

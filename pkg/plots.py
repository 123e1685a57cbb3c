"""
Copyright (c) Facebook, Inc. and its affiliates.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.
"""

from experiments import growth_ratios, continuous_limits, pole_counting
from utils import exp_proximity

import os

import matplotlib
matplotlib.use('Agg')

import matplotlib.pyplot as plt
import numpy as np

from diffnev.figures import METADATA

matplotlib.rcParams['svg.hashsalt'] = 'diffnev'

growth = growth_ratios.run_all_experiments()
limits = continuous_limits.run_all_experiments()
poles = pole_counting.run_all_experiments()

os.makedirs('figures', exist_ok=True)

######################
# Growth ratio plots #
######################

fig, ax = plt.subplots()

growth.loc['ex2_1'][['ratio']]\
.plot(ax=ax, style=['k.-'])

growth.loc['ex5_1'][['ratio']]\
.plot(ax=ax, style=['k^-'])

ax.axhline(1, color='gray', linewidth=0.5, linestyle='--')
ax.axhline(1/5, color='gray', linewidth=0.5, linestyle='--')
ax.set_xlabel('r')
ax.set_ylabel('T(r, f1) / T(r, f2)')
ax.set_ylim(0, 1.2)
ax.legend(['sin(az) / cos(az)', 'm = 1 / m = 5'], handlelength=1.0)

fig.savefig('figures/growth-ratios.svg', metadata=METADATA)
plt.close(fig)

##########################
# Continuous limit plots #
##########################

fig, ax = plt.subplots()

for (entry_id, key), style in zip(continuous_limits.EXPERIMENTS,
                                  ['k.-', 'k^-', 'kx-']):
    table = limits[(limits.entry == entry_id) & (limits.experiment == key)]
    table = table[table.max_residual > 0]
    ax.loglog(table.eps, table.max_residual, style,
              label='{} {}'.format(entry_id, key))

eps = np.logspace(-4, 0, 5)
ax.loglog(eps, eps, color='gray', linewidth=0.5, linestyle='--',
          label='slope 1')
ax.set_xlabel('eps')
ax.set_ylabel('max residual / eps^2')
ax.legend(handlelength=1.0)

fig.savefig('figures/continuous-limits.svg', metadata=METADATA)
plt.close(fig)

#######################
# Pole counting plots #
#######################

fig, (top, bottom) = plt.subplots(2, 1, sharex=True)

poles[['N']]\
.plot(ax=top, style=['k.'])

poles[['N_closed_form']]\
.plot(ax=top, style=['k--'])

top.set_ylabel('N(r, f_b)')
top.legend(['N(r, f_b)', 'closed form'], handlelength=1.0)

poles[['m']]\
.plot(ax=bottom, style=['k.-'])

bottom.plot(poles.index, exp_proximity(poles.index), 'k--')
bottom.set_xlabel('r')
bottom.set_ylabel('m(r, f_b)')
bottom.legend(['m(r, f_b)', 'r / pi'], handlelength=1.0)

fig.savefig('figures/pole-counting.svg', metadata=METADATA)
plt.close(fig)

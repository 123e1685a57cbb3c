"""
Copyright (c) Facebook, Inc. and its affiliates.

This source code is licensed under the MIT license found in the
LICENSE file in the root directory of this source tree.

-------------------------------------------------------------------

Command line front end

    diffnev verify --catalog ex2_1 --param a=pi/3
    diffnev verify --equation eq.json --solution f.json
    diffnev nevanlinna --catalog ex2_1 --radii 5..50:10 --nodes 2048
    diffnev casoratian --catalog ex2_1
    diffnev limit --catalog ex3_1 --eps-steps 10
    diffnev report-all --out report

Every command writes its tables (CSV), a summary (JSON) and, where there
is a curve to show, an SVG figure to --out. Exit status is 0 when every
check passes, 1 on a failed verification and 2 on a usage or
configuration error.

A JSON config file (--config) may hold any of the RunConfig fields

    {"catalog": "ex2_1", "params": {"a": "pi/3"},
     "equation": "eq.json", "solutions": ["f.json"], "experiment": "x.json",
     "grid": "box:-3,3,-3,3:200", "radii": "5..50:10", "nodes": 2048,
     "eps_start": 0.5, "eps_ratio": 0.5, "eps_steps": 12,
     "out": "report", "tol": 1e-9, "mutate": ["B+=0.1"], "n_jobs": 1}

and flags given on the command line override it.
"""

from collections import namedtuple

import argparse
import json
import os
import re
import sys
import warnings

import numpy as np
import pandas as pd

from diffnev import __version__, catalog, figures, suite
from diffnev import expr as ex
from diffnev.diffops import casoratian, periodicity_defect
from diffnev.equations import (EXPANDED, LINEAR, ODE, QUARTIC_TOL,
                               RESIDUAL_TOL, load_equation,
                               quartic_relation_defect, residual_expanded,
                               residual_linear, residual_main, residual_ode,
                               sweep)
from diffnev.errors import (ConfigError, DiffnevError, ExprSyntaxError,
                            ParameterConstraintViolation, UnknownEntry)
from diffnev.limits import (EPS_RATIO, EPS_START, EPS_STEPS,
                            LimitExperiment, convergence_order, eps_schedule,
                            load_experiment)
from diffnev.meromorphic import load_function, regular_grid
from diffnev.nevanlinna import (DEFAULT_NODES, characteristic_table,
                                growth_ratio)


COMMANDS = ['verify', 'nevanlinna', 'casoratian', 'limit', 'report-all']

RunConfig = namedtuple('RunConfig', [
    'command', 'catalog', 'params', 'equation', 'solutions', 'experiment',
    'grid', 'radii', 'nodes', 'eps_start', 'eps_ratio', 'eps_steps', 'out',
    'tol', 'mutate', 'inject_corruption', 'n_jobs'])

DEFAULTS = {
    'catalog': None, 'params': {}, 'equation': None, 'solutions': [],
    'experiment': None, 'grid': None, 'radii': '5..50:10',
    'nodes': DEFAULT_NODES, 'eps_start': EPS_START, 'eps_ratio': EPS_RATIO,
    'eps_steps': EPS_STEPS, 'out': '.', 'tol': RESIDUAL_TOL, 'mutate': [],
    'inject_corruption': False, 'n_jobs': 1,
}

CSV_FORMAT = '%.17g'

USAGE_ERRORS = (ConfigError, ExprSyntaxError, ParameterConstraintViolation,
                UnknownEntry)


###########
# Parsing #
###########

def parse_radii(text):
    '''a..b[:n] for n radii evenly spaced from a to b, or a comma list.'''
    match = re.fullmatch(r'\s*([-+\d.eE]+?)\.\.([-+\d.eE]+)(?::(\d+))?\s*', text)
    try:
        if match:
            a, b = float(match.group(1)), float(match.group(2))
            radii = np.linspace(a, b, int(match.group(3) or 10))
        else:
            radii = np.array([float(r) for r in text.split(',')])
    except ValueError:
        raise ConfigError('Cannot read the radii {!r}.'.format(text))
    if not len(radii) or np.any(radii <= 0) or np.any(np.diff(radii) <= 0):
        raise ConfigError('Radii must be positive and increasing: {!r}.'
                          .format(text))
    return radii


def parse_grid(text):
    '''box:x0,x1,y0,y1:n'''
    match = re.fullmatch(r'\s*box:([^:]+):(\d+)\s*', text)
    try:
        box = tuple(float(v) for v in match.group(1).split(','))
        n = int(match.group(2))
    except (AttributeError, ValueError):
        raise ConfigError('Cannot read the grid {!r}.'.format(text))
    if len(box) != 4 or box[0] >= box[1] or box[2] >= box[3] or n < 1:
        raise ConfigError('Invalid grid {!r}.'.format(text))
    return box, n


def parse_param(text):
    name, sep, value = text.partition('=')
    if not sep or not name.strip():
        raise ConfigError('Parameters are given as name=value, got {!r}.'
                          .format(text))
    return name.strip(), value.strip()


def parse_mutation(text):
    '''A+=x or B+=x for a numeric x.'''
    match = re.fullmatch(r'\s*([AB])\s*\+=\s*(.+)', text)
    if not match:
        raise ConfigError('Mutations are given as A+=x or B+=x, got {!r}.'
                          .format(text))
    value = ex.parse(match.group(2), variables=())
    if not ex.is_const(value):
        raise ConfigError('The mutation {!r} is not a number.'.format(text))
    return match.group(1), value.args[0]


def build_parser():
    parser = argparse.ArgumentParser(
        prog='diffnev',
        description='Numerical verification of (delta f)^2 = A (f f(z+1) - B).')
    parser.add_argument('--version', action='version',
                        version='%(prog)s ' + __version__)
    parser.add_argument('command', choices=COMMANDS)
    parser.add_argument('--config', help='JSON file with RunConfig fields.')
    parser.add_argument('--catalog', help='Catalog entry id.')
    parser.add_argument('--param', action='append', default=None,
                        help='Parameter binding name=value (repeatable).')
    parser.add_argument('--equation', help='Equation definition file.')
    parser.add_argument('--solution', action='append', default=None,
                        dest='solutions', help='Solution file (repeatable).')
    parser.add_argument('--experiment', help='Limit experiment file.')
    parser.add_argument('--grid', help='box:x0,x1,y0,y1:n')
    parser.add_argument('--radii', help='a..b[:n] or a comma list.')
    parser.add_argument('--nodes', type=int, help='Quadrature nodes.')
    parser.add_argument('--eps-start', type=float, dest='eps_start')
    parser.add_argument('--eps-ratio', type=float, dest='eps_ratio')
    parser.add_argument('--eps-steps', type=int, dest='eps_steps')
    parser.add_argument('--out', help='Output directory.')
    parser.add_argument('--tol', type=float, help='Residual tolerance.')
    parser.add_argument('--mutate', action='append', default=None,
                        help='Perturb a coefficient, A+=x or B+=x.')
    parser.add_argument('--inject-corruption', action='store_true',
                        default=None, dest='inject_corruption',
                        help='Corrupt the ledgers checked by report-all.')
    parser.add_argument('--n-jobs', type=int, dest='n_jobs')
    return parser


def _load_config_file(path):
    if not os.path.exists(path):
        raise ConfigError('The config file {} does not exist.'.format(path))
    try:
        with open(path) as f:
            values = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError('{} is not valid JSON: {}'.format(path, e))
    unknown = set(values) - set(RunConfig._fields)
    if unknown:
        raise ConfigError('Unknown config fields {}.'.format(sorted(unknown)))
    return values


def build_config(args):
    '''Defaults, overlaid by the config file, overlaid by flags.'''
    values = dict(DEFAULTS)
    if args.config:
        values.update(_load_config_file(args.config))
    flags = vars(args)
    for field in RunConfig._fields:
        if field in flags and flags[field] is not None:
            values[field] = flags[field]
    if args.param:
        values['params'] = dict(values['params'], **dict(
            parse_param(p) for p in args.param))
    values['command'] = args.command

    for field in ('equation', 'experiment'):
        if values[field] and not os.path.exists(values[field]):
            raise ConfigError('The file {} does not exist.'.format(values[field]))
    for path in values['solutions']:
        if not os.path.exists(path):
            raise ConfigError('The file {} does not exist.'.format(path))
    if isinstance(values['radii'], str):
        values['radii'] = parse_radii(values['radii'])
    elif not len(values['radii']) or np.any(np.diff(values['radii']) <= 0):
        raise ConfigError('Radii must be non-empty and increasing.')
    if isinstance(values['grid'], str):
        values['grid'] = parse_grid(values['grid'])
    values['mutate'] = [parse_mutation(m) for m in values['mutate']]
    if values['nodes'] < 8 or values['eps_steps'] < 2:
        raise ConfigError('At least 8 nodes and 2 eps steps are needed.')
    return RunConfig(**values)


###########
# Sources #
###########

def _entry(config):
    if not config.catalog:
        return None
    return catalog.get(config.catalog, **config.params)


def mutated(eq, mutations):
    '''The equation with constants added to its coefficients.'''
    for name, value in mutations:
        f = getattr(eq, name)
        changed = f._replace(expr=ex.add(f.expr, value),
                             label='{}{:+g}'.format(f.label, value))
        eq = eq._replace(**{name: changed})
    return eq


def equation_and_solutions(config):
    entry = _entry(config)
    if entry is not None:
        eq, solutions = entry.equation, list(entry.solutions)
    elif config.equation:
        eq = load_equation(config.equation)
        solutions = [load_function(path) for path in config.solutions]
    else:
        raise ConfigError('Give either --catalog or --equation.')
    if not solutions:
        raise ConfigError('There is no solution to check.')
    return mutated(eq, config.mutate), solutions


def _grid(config, functions, shifts):
    if config.grid is not None:
        box, n = config.grid
        return regular_grid(functions, box, n, shifts)
    return regular_grid(functions, catalog.SUITE_BOX, 200, shifts)


##########
# Output #
##########

def _prepare(out):
    os.makedirs(out, exist_ok=True)
    return out


def write_csv(table, out, name):
    path = os.path.join(out, name)
    table.to_csv(path, index=False, float_format=CSV_FORMAT)
    return path


def write_json(summary, out, name):
    path = os.path.join(out, name)
    with open(path, 'w') as f:
        json.dump(summary, f, indent=2, sort_keys=True, default=_json_value)
        f.write('\n')
    return path


def _json_value(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (np.integer, np.floating, np.bool_)):
        return value.item()
    if isinstance(value, ex.Expr):
        return ex.to_text(value)
    raise TypeError('Cannot serialize {!r}.'.format(value))


def _complex_columns(name, values):
    values = np.asarray(values, dtype=complex)
    return {name + '_re': values.real, name + '_im': values.imag}


############
# Commands #
############

_RESIDUALS = {EXPANDED: residual_expanded}


def _report(eq, f, grid):
    if eq.form == ODE:
        return sweep(residual_ode, eq.A, eq.B, f, grid=grid)
    if eq.form == LINEAR:
        return sweep(residual_linear, eq.A, f, grid=grid)
    return sweep(_RESIDUALS.get(eq.form, residual_main), eq, f, grid=grid)


def cmd_verify(config):
    eq, solutions = equation_and_solutions(config)
    shifts = {ODE: (0,), LINEAR: (0, 1, 2)}.get(eq.form, (0, 1))
    grid = _grid(config, [eq.A, eq.B] + solutions, shifts)
    out = _prepare(config.out)

    rows = []
    for k, f in enumerate(solutions):
        report = _report(eq, f, grid)
        table = pd.DataFrame({'x': grid.real, 'y': grid.imag})
        table = table.assign(**_complex_columns('residual', report.residuals))
        table['scale'] = report.scale
        table['relative'] = np.abs(report.residuals) / report.scale
        write_csv(table, out, 'residuals-{}.csv'.format(k))
        passed = report.max_relative <= config.tol
        rows.append({'solution': f.label, 'max_relative': report.max_relative,
                     'pass': passed})
        print('{}: max relative residual {:.3e} {}'.format(
            f.label, report.max_relative, 'pass' if passed else 'FAIL'))

    summary = {'entry': config.catalog or config.equation,
               'form': eq.form, 'points': len(grid), 'tol': config.tol,
               'solutions': rows,
               'max_relative': max(r['max_relative'] for r in rows),
               'pass': all(r['pass'] for r in rows)}
    write_json(summary, out, 'verify.json')
    return 0 if summary['pass'] else 1


def _nevanlinna_functions(config):
    entry = _entry(config)
    if entry is not None:
        return list(entry.solutions)
    if config.solutions:
        return [load_function(path) for path in config.solutions]
    raise ConfigError('Give either --catalog or --solution.')


def cmd_nevanlinna(config):
    functions = _nevanlinna_functions(config)
    out = _prepare(config.out)
    tables = []
    for k, f in enumerate(functions):
        table = characteristic_table(f, config.radii, config.nodes,
                                     config.n_jobs)
        write_csv(table, out, 'characteristic-{}.csv'.format(k))
        tables.append(table)
        print('{}: T({:g}) = {:.6g}'.format(f.label, table['r'].iloc[-1],
                                            table['T'].iloc[-1]))
    figures.characteristic_figure(tables, os.path.join(out, 'characteristic.svg'),
                                  [f.label for f in functions])

    summary = {'entry': config.catalog, 'nodes': config.nodes,
               'functions': [f.label for f in functions]}
    if len(functions) >= 2:
        f1, f2 = functions[:2]
        report = growth_ratio(f1, f2, config.radii, config.nodes, config.n_jobs)
        write_csv(report.table, out, 'growth-ratio.csv')
        figures.growth_figure(report.table, os.path.join(out, 'growth-ratio.svg'),
                              (f1.label, f2.label))
        summary.update(final_ratio=report.final_ratio, drift=report.drift,
                       trend=report.trend)
        print('T1/T2 at r={:g}: {:.4f} ({})'.format(
            report.table['r'].iloc[-1], report.final_ratio, report.trend))
    write_json(summary, out, 'nevanlinna.json')
    return 0


def cmd_casoratian(config):
    entry = _entry(config)
    if entry is not None:
        pairs = entry.extras.get('pairs', [(0, 1)])
        eq, solutions = mutated(entry.equation, config.mutate), entry.solutions
        f1, f2 = solutions[pairs[0][0]], solutions[pairs[0][1]]
    else:
        eq, solutions = equation_and_solutions(config)
        if len(solutions) < 2:
            raise ConfigError('The Casoratian needs two solutions.')
        f1, f2 = solutions[:2]
    H = casoratian(f1, f2)
    grid = _grid(config, [eq.A, eq.B, f1, f2], (0, 1, 2))
    out = _prepare(config.out)

    values = ex.evaluate(H, grid)
    quartic = sweep(quartic_relation_defect, eq, f1, f2, H, grid=grid)
    table = pd.DataFrame({'x': grid.real, 'y': grid.imag})
    table = table.assign(**_complex_columns('H', values))
    table['quartic_relative'] = np.abs(quartic.residuals) / quartic.scale
    write_csv(table, out, 'casoratian.csv')

    periodic = periodicity_defect(H, 1, grid, relative=True)
    summary = {'entry': config.catalog, 'pair': [f1.label, f2.label],
               'H_mean': complex(np.mean(values)),
               'H_spread': float(np.max(np.abs(values - np.mean(values)))),
               'periodicity_defect': periodic,
               'quartic_max_relative': quartic.max_relative,
               'pass': bool(periodic <= config.tol
                            and quartic.max_relative <= QUARTIC_TOL)}
    write_json(summary, out, 'casoratian.json')
    print('H = {:.10g} (spread {:.2e}), 1-periodicity defect {:.2e}, '
          'quartic relation {:.2e}'.format(summary['H_mean'], summary['H_spread'],
                                           periodic, quartic.max_relative))
    return 0 if summary['pass'] else 1


def _experiments(config):
    if config.experiment:
        experiments = [load_experiment(config.experiment)]
    else:
        entry = _entry(config)
        if entry is None:
            raise ConfigError('Give either --catalog or --experiment.')
        experiments = [e for _, e in sorted(entry.extras.items())
                       if isinstance(e, LimitExperiment)]
        if not experiments:
            raise ConfigError('{} has no limit experiment.'.format(entry.id))
    schedule = eps_schedule(config.eps_start, config.eps_ratio, config.eps_steps)
    grid = None if config.grid is None else regular_grid([], *config.grid)
    return [e._replace(schedule=schedule,
                       grid=e.grid if grid is None else grid)
            for e in experiments]


def cmd_limit(config):
    out = _prepare(config.out)
    summary = []
    for k, experiment in enumerate(_experiments(config)):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter('always')
            result = convergence_order(experiment, config.n_jobs)
        write_csv(result.table, out, 'limit-{}.csv'.format(k))
        figures.limit_figure(result.table, os.path.join(out, 'limit-{}.svg'.format(k)),
                             experiment.label)
        order = None if np.isnan(result.order) else float(result.order)
        summary.append({'label': experiment.label, 'mode': experiment.mode,
                        'order': order, 'underflow': result.underflow,
                        'warnings': [str(w.message) for w in caught]})
        print('{}: order {} {}'.format(
            experiment.label, 'n/a' if order is None else '{:.3f}'.format(order),
            '(residual underflow)' if result.underflow else ''))
    write_json({'experiments': summary}, out, 'limit.json')
    return 0


def _check_options(config):
    options = {'radii': config.radii, 'nodes': config.nodes}
    if config.grid is not None:
        options['box'], options['points'] = config.grid
    return options


def cmd_report_all(config):
    out = _prepare(config.out)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always')
        table = suite.run_all_checks(config.inject_corruption, config.n_jobs,
                                     **_check_options(config))
    write_csv(table.drop(columns=['duration']), out, 'report.csv')

    failures = table[~table['passed']]
    summary = {
        'pass': bool(table['passed'].all()),
        'criteria': {str(c): bool(group['passed'].all())
                     for c, group in table.groupby('criterion')},
        'failures': failures[['criterion', 'check', 'subject', 'value',
                              'threshold']].to_dict('records'),
        'warnings': sorted({str(w.message) for w in caught}),
    }
    write_json(summary, out, 'report.json')
    for criterion, group in table.groupby('criterion'):
        print('criterion {:2d}: {:3d}/{:3d} checks pass ({:.1f}s)'.format(
            criterion, int(group['passed'].sum()), len(group),
            group['duration'].max()))
    for row in failures.itertuples():
        print('FAIL {} {} {}: {:.3e} (threshold {:.1e})'.format(
            row.criterion, row.check, row.subject, row.value, row.threshold))
    return 0 if summary['pass'] else 1


HANDLERS = {
    'verify': cmd_verify,
    'nevanlinna': cmd_nevanlinna,
    'casoratian': cmd_casoratian,
    'limit': cmd_limit,
    'report-all': cmd_report_all,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = build_config(args)
        return HANDLERS[config.command](config)
    except USAGE_ERRORS as e:
        print('diffnev: error: {}'.format(e), file=sys.stderr)
        return 2
    except DiffnevError as e:
        print('diffnev: {}: {}'.format(type(e).__name__, e), file=sys.stderr)
        return 1
    except (KeyError, ValueError, OSError) as e:
        print('diffnev: error: {}'.format(e), file=sys.stderr)
        return 2


if __name__ == '__main__':
    sys.exit(main())

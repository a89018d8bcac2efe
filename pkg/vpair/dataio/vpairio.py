# -*- coding: utf-8 -*-
"""
Reading and writing of vortex-pair run files

    config.yaml          run configuration (see vstates/pairdefaults.yaml)
    branch.jsonl         one record per converged state
    boundary_<eps>.csv   physical boundaries, columns patch_id,theta,x,y
    report.csv           expansion report, columns name,paper,fitted,rel_err,order
    boundaries.svg       both patches to scale
"""

import os
import json
import logging

import numpy as np
import pandas as pd
import yaml
import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt

from vpair.utils.exceptions import VStateError, ConfigError, FitError
from vpair.vstates.pairproblem import PairConfig, StateVector, validate_config,\
        pairmeta, configkeys
from vpair.vstates.solver import VState, Branch
from vpair.vstates.asymptotics import expansion_report
from vpair.vstates.diagnostics import reconstruct_patches

logger = logging.getLogger(__name__)

FLOATFMT = '%.17g'

BRANCHFILE = 'branch.jsonl'
REPORTFILE = 'report.csv'
PLOTFILE = 'boundaries.svg'

_types = {
    'float':(int, float),
    'int':(int,),
    'str':(str,),
    'list':(list, tuple),
}

###
# Configuration
###
def parse_override(item):
    """
    'key=value' -> (key, value) with the value typed by yaml
    """
    if '=' not in item:
        raise ConfigError('set', 'override "%s" is not of the form key=value'%item)
    key, val = item.split('=', 1)
    key = key.strip()
    try:
        return key, yaml.safe_load(val)
    except yaml.YAMLError as e:
        raise ConfigError(key, 'cannot parse value "%s": %s'%(val, e))


def _check_type(key, val):
    if val is None and 'default' in pairmeta[key] and pairmeta[key]['default'] is None:
        return val

    allowed = _types[pairmeta[key]['type']]
    if isinstance(val, bool) or not isinstance(val, allowed):
        raise ConfigError(key, 'expected %s, got %r'%(pairmeta[key]['type'], val))

    if pairmeta[key]['type'] == 'list':
        for v in val:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigError(key, 'expected a list of numbers, got %r'%(val,))
    return val


def load_settings(path, overrides=()):
    """
    Merge the yaml file at path, the command-line overrides and the
    package defaults into a dict keyed as in pairdefaults.yaml
    """
    with open(path, 'r') as f:
        try:
            user = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError('config', 'cannot parse %s: %s'%(path, e))

    if user is None:
        user = {}
    if not isinstance(user, dict):
        raise ConfigError('config', '%s must hold a mapping of keys to values'%path)

    for item in overrides:
        key, val = parse_override(item)
        user[key] = val

    settings = {}
    for key in user:
        if key not in pairmeta:
            raise ConfigError(key, 'unknown configuration key')

    for key, meta in pairmeta.items():
        if key in user:
            settings[key] = _check_type(key, user[key])
        elif 'default' in meta:
            settings[key] = meta['default']
        else:
            raise ConfigError(key, 'missing from %s and has no default'%path)

    return settings


def config_from_settings(settings):
    attrs = dict((configkeys[key], settings[key]) for key in configkeys)
    return validate_config(PairConfig(**attrs))


def parse_config(path, overrides=()):
    """
    PairConfig from a yaml file plus 'key=value' overrides
    """
    return config_from_settings(load_settings(path, overrides))

###
# Branch files
###
def branch_record(v):
    return {
        'eps':v.eps,
        'scalar1':v.state.s1,
        'scalar2':v.state.s2,
        'coeffs1':[float(a) for a in v.state.f1.coeffs],
        'coeffs2':[float(a) for a in v.state.f2.coeffs],
        'residual_norm':v.residual_norm,
        'newton_iters':v.newton_iters,
    }


def write_branch_jsonl(branch, path):
    """
    One JSON record per state; floats are written with their shortest
    round-trip representation
    """
    with open(path, 'w') as f:
        for v in branch:
            f.write(json.dumps(branch_record(v)) + '\n')
    logger.info('%d states written to %s'%(len(branch), path))
    return path


def read_branch(path, cfg):
    """
    Branch from a branch.jsonl file
    """
    branch = Branch(cfg)
    with open(path, 'r') as f:
        for ii, line in enumerate(f):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                state = StateVector(rec['scalar1'], rec['scalar2'], rec['coeffs1'], rec['coeffs2'])
                v = VState(rec['eps'], state, rec['residual_norm'], rec['newton_iters'])
            except (ValueError, KeyError, TypeError) as e:
                raise IOError('malformed record on line %d of %s: %s'%(ii+1, path, e))
            if state.N != cfg.N:
                raise ConfigError('modes', 'record on line %d has %d modes, config has %d'%(ii+1, state.N, cfg.N))
            branch.append(v)

    logger.info('%d states read from %s'%(len(branch), path))
    return branch

###
# Tables
###
def boundary_filename(eps):
    return 'boundary_%.6g.csv'%eps


def boundary_table(pair):
    frames = []
    for j in (1, 2):
        z = pair.boundary(j)
        frames.append(pd.DataFrame({'patch_id':j, 'theta':pair.theta, 'x':z.real, 'y':z.imag}))
    return pd.concat(frames, ignore_index=True)


def write_boundaries_csv(pair, path):
    boundary_table(pair).to_csv(path, index=False, float_format=FLOATFMT)
    return path


def write_table_csv(rows, path, columns):
    pd.DataFrame(rows, columns=columns).to_csv(path, index=False, float_format=FLOATFMT)
    return path


def write_report_csv(rows, path):
    """
    Expansion report; the closed-form value goes in the 'paper' column
    """
    table = pd.DataFrame(rows, columns=['name', 'closed_form', 'fitted', 'rel_err', 'order'])
    table.rename(columns={'closed_form':'paper'}).to_csv(path, index=False, float_format=FLOATFMT)
    return path

###
# Plotting
###
def plot_boundaries(pairs, path):
    """
    All reconstructed patch pairs to scale, centres marked
    """
    matplotlib.rcParams['svg.hashsalt'] = 'vpair'

    fig = plt.figure(figsize=(9, 4))
    ax = fig.add_subplot(111)
    for pair in pairs:
        for j in (1, 2):
            z = pair.boundary(j)
            z = np.append(z, z[0])
            ax.plot(z.real, z.imag, lw=0.8, label='eps = %g'%pair.eps if j == 1 else None)

    if pairs:
        c = np.array(pairs[0].centers)
        ax.plot(c.real, c.imag, 'k+', ms=8)
        ax.legend(loc='best', fontsize=7)

    ax.set_aspect('equal')
    ax.set_xlabel('x')
    ax.set_ylabel('y')
    fig.savefig(path, format='svg')
    plt.close(fig)
    return path


def emit_outputs(branch, cfg, outdir, M_out=pairmeta['M_out']['default']):
    """
    Write branch.jsonl, boundary_<eps>.csv for every state, report.csv
    (when the branch supports an expansion fit) and boundaries.svg
    """
    if len(branch) == 0:
        raise VStateError('nothing to write: the branch is empty')

    if not os.path.isdir(outdir):
        os.makedirs(outdir)

    out = [write_branch_jsonl(branch, os.path.join(outdir, BRANCHFILE))]

    pairs = []
    for v in branch:
        pair = reconstruct_patches(v, cfg, M_out)
        if v.eps != 0:
            pairs.append(pair)
        out.append(write_boundaries_csv(pair, os.path.join(outdir, boundary_filename(v.eps))))

    try:
        rows = expansion_report(branch, cfg)
        out.append(write_report_csv(rows, os.path.join(outdir, REPORTFILE)))
    except FitError as e:
        logger.warning('no expansion report: %s'%e)

    out.append(plot_boundaries(pairs, os.path.join(outdir, PLOTFILE)))

    logger.info('%d files written to %s'%(len(out), outdir))
    return out

# -*- coding: utf-8 -*-
"""
Command-line driver for vortex-pair V-state computations

    vpair --command continue --config pair.yaml --out run1 --set d=6

Commands
    solve         one Newton solve at the first eps target
    continue      continuation through eps_targets, writes branch.jsonl
    verify        oracle, symmetry, convexity and moment checks of branch.jsonl
    expand-check  expansion report of branch.jsonl (or of a fresh branch)
    emit          boundary csv files, report and plot of branch.jsonl

Exit status: 0 success, 1 configuration error, 2 non-convergence or failed
check, 3 I/O error.
"""

import os
import sys
import getopt
import logging

import numpy as np

from vpair.utils.exceptions import VStateError, ConfigError
from vpair.vstates.pairproblem import pairmeta
from vpair.vstates.solver import Branch, newton_solve, continue_branch
from vpair.vstates.asymptotics import ExpansionCoeffs, expansion_state, expansion_report
from vpair.vstates.functional import symmetry_defect
from vpair.vstates.diagnostics import equilibrium_residual, min_curvature, patch_moments
from vpair.dataio import vpairio

logger = logging.getLogger(__name__)

COMMANDS = ('solve', 'continue', 'verify', 'expand-check', 'emit')

# relative tolerance per expansion order; eps^2 coefficients are fitted tighter
EXPANSION_TOL = {2:5e-3}
EXPANSION_TOL_DEFAULT = 2e-2

class RunSpec(object):
    """
    A parsed command line
    """
    def __init__(self, command, config, outdir='.', overrides=()):
        if command not in COMMANDS:
            raise ConfigError('command', 'unknown command "%s". Must be one of %s'%(command, ', '.join(COMMANDS)))
        if config is None:
            raise ConfigError('config', 'a configuration file is required')
        if not os.path.isfile(config):
            raise IOError('configuration file %s does not exist'%config)

        self.command = command
        self.config = config
        self.outdir = outdir
        self.overrides = list(overrides)

    def __repr__(self):
        return 'RunSpec(%s, config=%s, out=%s, overrides=%s)'%(self.command, self.config, self.outdir, self.overrides)


def verify_branch(branch, cfg, M_fine=pairmeta['M_fine']['default'], probes=pairmeta['probes']['default'],\
        M_scan=pairmeta['M_scan']['default'], oracle_tol=pairmeta['oracle_tol']['default']):
    """
    Independent checks of every state of a branch

    Returns (rows, passed). Each row holds the normalized Biot-Savart
    equilibrium residual, the minimum curvature, the grid symmetry defect,
    the closed-form vs quadrature moment mismatch and the size of the
    boundary perturbations against half their leading-order expansion.
    """
    ex = ExpansionCoeffs(cfg)
    symtol = 1e-10*cfg.gamma_scale()
    rows = []
    passed = True

    for v in branch:
        eq = equilibrium_residual(v, cfg, M_fine, probes)
        kmin = min_curvature(v, cfg, M_scan)
        sym = symmetry_defect(v.eps, v.state, cfg)

        closed = np.array(patch_moments(v, cfg))
        quad = np.array(patch_moments(v, cfg, quadrature=True))
        mom = np.max(np.abs(closed - quad)/np.maximum(1., np.abs(closed)))

        # |a_1^j| against half of |delta_j| (b_j/d)^2 |eps|/b_j
        nondeg = True
        for j in (1, 2):
            lead = 0.5*abs(ex.phimap[j][(1, 2)]*v.eps)/cfg.b(j)
            if v.eps != 0 and not v.state.f(j).max_abs() > lead:
                nondeg = False

        ok = eq <= oracle_tol and kmin > 0 and sym <= symtol and mom <= 1e-12 and nondeg
        passed = passed and ok
        rows.append({'eps':v.eps, 'equilibrium_residual':eq, 'min_curvature':kmin,\
            'symmetry_defect':sym, 'moment_mismatch':mom, 'nondegenerate':nondeg, 'passed':ok})

        if ok:
            logger.info('eps = %g passed all checks'%v.eps)
        else:
            logger.warning('eps = %g failed: equilibrium %.3e, curvature %.4g, symmetry %.3e, moments %.3e, nondegenerate %s'\
                %(v.eps, eq, kmin, sym, mom, nondeg))

    return rows, passed


def expansion_passed(rows):
    """
    True when every report row is within its tolerance
    """
    ok = True
    for row in rows:
        p = int(row['name'].rsplit('eps', 1)[1])
        tol = EXPANSION_TOL.get(p, EXPANSION_TOL_DEFAULT) if row['closed_form'] != 0 else 1e-2
        if not row['rel_err'] <= tol:
            logger.warning('%s: fitted %.6g, closed form %.6g (rel. error %.3e)'\
                %(row['name'], row['fitted'], row['closed_form'], row['rel_err']))
            ok = False
    return ok


class VPairDriver(object):
    """
    Runs one command of the command-line interface
    """
    outdir = '.'

    M_out = pairmeta['M_out']['default']
    M_fine = pairmeta['M_fine']['default']
    probes = pairmeta['probes']['default']
    M_scan = pairmeta['M_scan']['default']
    oracle_tol = pairmeta['oracle_tol']['default']

    VERBOSE = False

    def __init__(self, cfg, **kwargs):
        self.__dict__.update(kwargs)
        self.cfg = cfg

    def __call__(self, command):
        if not os.path.isdir(self.outdir):
            os.makedirs(self.outdir)

        method = {'solve':self.solve, 'continue':self.continue_, 'verify':self.verify,\
            'expand-check':self.expand_check, 'emit':self.emit}[command]
        return method()

    @property
    def branchfile(self):
        return os.path.join(self.outdir, vpairio.BRANCHFILE)

    def solve(self):
        eps = self.cfg.eps_targets[0] if self.cfg.eps_targets else 0.
        v = newton_solve(self.cfg, eps, expansion_state(self.cfg, eps), VERBOSE=self.VERBOSE)
        branch = Branch(self.cfg, [v])
        vpairio.write_branch_jsonl(branch, self.branchfile)
        return 0

    def continue_(self):
        if not self.cfg.eps_targets:
            raise ConfigError('eps_targets', 'continuation needs at least one target')

        branch = continue_branch(self.cfg, VERBOSE=self.VERBOSE)
        vpairio.write_branch_jsonl(branch, self.branchfile)
        if len(branch) < len(self.cfg.eps_targets) or branch.eps_max < self.cfg.eps_targets[-1]:
            logger.error('branch stopped at eps = %g before the last target %g'\
                %(branch.eps_max, self.cfg.eps_targets[-1]))
            return 2
        return 0

    def verify(self):
        branch = vpairio.read_branch(self.branchfile, self.cfg)
        rows, passed = verify_branch(branch, self.cfg, self.M_fine, self.probes, self.M_scan, self.oracle_tol)
        vpairio.write_table_csv(rows, os.path.join(self.outdir, 'verify.csv'),\
            ['eps', 'equilibrium_residual', 'min_curvature', 'symmetry_defect', 'moment_mismatch',\
             'nondegenerate', 'passed'])
        return 0 if passed else 2

    def expand_check(self):
        if os.path.isfile(self.branchfile):
            branch = vpairio.read_branch(self.branchfile, self.cfg)
        else:
            branch = continue_branch(self.cfg, VERBOSE=self.VERBOSE)
        rows = expansion_report(branch, self.cfg)
        vpairio.write_report_csv(rows, os.path.join(self.outdir, vpairio.REPORTFILE))
        return 0 if expansion_passed(rows) else 2

    def emit(self):
        branch = vpairio.read_branch(self.branchfile, self.cfg)
        vpairio.emit_outputs(branch, self.cfg, self.outdir, self.M_out)
        return 0


def run_command(spec):
    """
    Run a RunSpec and return the exit status
    """
    try:
        settings = vpairio.load_settings(spec.config, spec.overrides)
        cfg = vpairio.config_from_settings(settings)
        driver = VPairDriver(cfg, outdir=spec.outdir, M_out=settings['M_out'], M_fine=settings['M_fine'],\
            probes=settings['probes'], M_scan=settings['M_scan'], oracle_tol=settings['oracle_tol'],\
            VERBOSE=logger.isEnabledFor(logging.INFO))
        return driver(spec.command)
    except ConfigError as e:
        logger.error('configuration error: %s'%e)
        return 1
    except VStateError as e:
        logger.error('%s failed: %s'%(spec.command, e))
        return 2
    except (IOError, OSError) as e:
        logger.error('I/O error: %s'%e)
        return 3


def usage():
    print("--------------------------------------------------------------")
    print("vpair -h                        # show this help message")
    print("      -c --config pair.yaml     # run configuration (yaml)")
    print("      -o --out DIR              # output directory (default .)")
    print("      -s --set key=value        # override a configuration key (repeatable)")
    print("         --command NAME         # %s"%' | '.join(COMMANDS))
    print("      -v --verbose              # log progress")
    print("\n Example Usage:")
    print("-----------")
    print(" vpair --command continue --config pair.yaml --out run1 --set eps_targets=[0.1,0.2]")
    print("")


def main(argv=None):
    if argv is None:
        argv = sys.argv[1:]

    try:
        opts, rest = getopt.gnu_getopt(argv, 'hc:o:s:v',\
            ['help', 'config=', 'out=', 'set=', 'command=', 'verbose'])
    except getopt.GetoptError as e:
        print(e)
        print("-"*80)
        usage()
        return 1

    command = None
    config = None
    outdir = '.'
    overrides = []
    verbose = False
    for opt, val in opts:
        if opt in ('-h', '--help'):
            usage()
            return 0
        elif opt in ('-c', '--config'):
            config = val
        elif opt in ('-o', '--out'):
            outdir = val
        elif opt in ('-s', '--set'):
            overrides.append(val)
        elif opt == '--command':
            command = val
        elif opt in ('-v', '--verbose'):
            verbose = True

    if command is None and rest:
        command = rest[0]

    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,\
        format='%(asctime)s %(name)s %(levelname)s: %(message)s')

    try:
        spec = RunSpec(command, config, outdir, overrides)
    except ConfigError as e:
        logger.error('%s'%e)
        usage()
        return 1
    except (IOError, OSError) as e:
        logger.error('%s'%e)
        return 3

    return run_command(spec)


if __name__ == '__main__':
    sys.exit(main())

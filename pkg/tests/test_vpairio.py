"""
Run configuration, branch files, emitted outputs and the command-line driver
"""

import os
import json

import numpy as np
from numpy.testing import assert_allclose
import pandas as pd
import pytest
import yaml

from vpair.utils.exceptions import ConfigError, VStateError
from vpair.vstates.pairproblem import PairConfig, StateVector
from vpair.vstates.solver import VState, Branch, newton_solve
from vpair.vstates.asymptotics import expansion_state
from vpair.dataio import vpairio
from vpair import vpairdriver

MINIMAL = {'mode':'co', 'gamma1':1.0, 'gamma2':2.0, 'b1':1.0, 'b2':1.0, 'd':5.0}

def write_config(tmpdir, name='pair.yaml', **kwargs):
    settings = dict(MINIMAL)
    settings.update(kwargs)
    path = str(tmpdir.join(name))
    with open(path, 'w') as f:
        yaml.safe_dump(settings, f)
    return path


def synthetic_branch(cfg, ladder=(0.5, 0.75, 1.0)):
    return Branch(cfg, [VState(e, expansion_state(cfg, e), 0.) for e in ladder])


def small_config():
    return PairConfig(mode='co', gamma1=1., gamma2=2., b1=1., b2=1., d=5., N=8, M=64)


def test_parse_minimal_config(tmpdir):
    cfg = vpairio.parse_config(write_config(tmpdir))
    assert cfg.mode == 'co'
    assert cfg.N == 32 and cfg.M == 256
    assert cfg.eps_targets == ()

    settings = vpairio.load_settings(write_config(tmpdir))
    assert settings['M_fine'] == 8192
    assert settings['oracle_tol'] == 1e-6


def test_gamma2_defaults_to_gamma1(tmpdir):
    path = str(tmpdir.join('pair.yaml'))
    with open(path, 'w') as f:
        yaml.safe_dump({'mode':'counter', 'gamma1':1.0, 'b1':1.0, 'b2':1.0, 'd':5.0}, f)
    cfg = vpairio.parse_config(path)
    assert cfg.gamma2 == 1.0


def test_parse_rejects_close_pair(tmpdir):
    with pytest.raises(ConfigError) as e:
        vpairio.parse_config(write_config(tmpdir, d=3.0))
    assert e.value.key == 'd'


def test_parse_override(tmpdir):
    cfg = vpairio.parse_config(write_config(tmpdir), ['d=6', 'eps_targets=[0.1, 0.2]'])
    assert cfg.d == 6
    assert cfg.eps_targets == (0.1, 0.2)

    with pytest.raises(ConfigError) as e:
        vpairio.parse_override('d6')
    assert e.value.key == 'set'


def test_parse_missing_key(tmpdir):
    path = write_config(tmpdir)
    settings = dict(MINIMAL)
    del settings['b1']
    with open(path, 'w') as f:
        yaml.safe_dump(settings, f)
    with pytest.raises(ConfigError) as e:
        vpairio.parse_config(path)
    assert e.value.key == 'b1'


@pytest.mark.parametrize('key,val', [('modes', 'many'), ('modes', 8.5), ('tol', 'small'),\
        ('eps_targets', 0.1), ('bogus', 1)])
def test_parse_bad_value(tmpdir, key, val):
    with pytest.raises(ConfigError) as e:
        vpairio.parse_config(write_config(tmpdir, **{key:val}))
    assert e.value.key == key


def test_branch_jsonl_exact(tmpdir):
    cfg = small_config()
    rng = np.random.RandomState(3)
    states = []
    for e in (0.1, 0.2):
        x = rng.randn(2*cfg.N + 2)/3.
        states.append(VState(e, StateVector.from_array(x), 1e-13*rng.rand(), 4))
    branch = Branch(cfg, states)

    path = vpairio.write_branch_jsonl(branch, str(tmpdir.join('branch.jsonl')))
    back = vpairio.read_branch(path, cfg)
    assert len(back) == 2
    for v, w in zip(branch, back):
        assert v.eps == w.eps
        assert v.residual_norm == w.residual_norm
        assert v.newton_iters == w.newton_iters
        assert np.array_equal(v.state.as_array(), w.state.as_array())


def test_read_branch_errors(tmpdir):
    cfg = small_config()
    path = str(tmpdir.join('branch.jsonl'))
    with open(path, 'w') as f:
        f.write('{"eps": 0.1, "scalar1": 0.06}\n')
    with pytest.raises(IOError):
        vpairio.read_branch(path, cfg)

    vpairio.write_branch_jsonl(synthetic_branch(cfg), path)
    with pytest.raises(ConfigError) as e:
        vpairio.read_branch(path, cfg.replace(N=16))
    assert e.value.key == 'modes'


def test_emit_single_state(tmpdir):
    cfg = PairConfig(mode='co', gamma1=1., gamma2=2., b1=1., b2=1., d=5., N=16, M=128)
    v = newton_solve(cfg, 0.1, expansion_state(cfg, 0.1))
    outdir = str(tmpdir.join('run'))
    files = vpairio.emit_outputs(Branch(cfg, [v]), cfg, outdir)

    table = pd.read_csv(os.path.join(outdir, vpairio.boundary_filename(0.1)))
    assert list(table.columns) == ['patch_id', 'theta', 'x', 'y']
    assert len(table) == 256
    assert set(table['patch_id']) == set([1, 2])
    assert os.path.isfile(os.path.join(outdir, vpairio.PLOTFILE))
    assert not os.path.isfile(os.path.join(outdir, vpairio.REPORTFILE))
    assert len(files) == 3


def test_emit_report(tmpdir):
    cfg = small_config()
    outdir = str(tmpdir)
    vpairio.emit_outputs(synthetic_branch(cfg), cfg, outdir)
    report = pd.read_csv(os.path.join(outdir, vpairio.REPORTFILE))
    assert list(report.columns) == ['name', 'paper', 'fitted', 'rel_err', 'order']
    assert len(report) == 14
    omega = report[report['name'] == 'Omega_eps4']
    assert_allclose(omega['paper'].values[0], 9.6e-5, rtol=1e-14)
    for eps in (0.5, 0.75, 1.0):
        assert os.path.isfile(os.path.join(outdir, vpairio.boundary_filename(eps)))


def test_emit_empty_branch(tmpdir):
    cfg = small_config()
    with pytest.raises(VStateError):
        vpairio.emit_outputs(Branch(cfg), cfg, str(tmpdir))

###
# Driver
###
def run(tmpdir, command, **kwargs):
    config = write_config(tmpdir, **kwargs)
    return vpairdriver.main(['--command', command, '--config', config, '--out', str(tmpdir)])


def test_expand_check_synthetic(tmpdir):
    cfg = small_config()
    vpairio.write_branch_jsonl(synthetic_branch(cfg), str(tmpdir.join(vpairio.BRANCHFILE)))
    assert run(tmpdir, 'expand-check', modes=8, grid=64) == 0
    assert len(pd.read_csv(str(tmpdir.join(vpairio.REPORTFILE)))) == 14


def test_solve_then_verify(tmpdir):
    kw = dict(modes=16, grid=128, eps_targets=[0.1])
    assert run(tmpdir, 'solve', **kw) == 0
    branchfile = str(tmpdir.join(vpairio.BRANCHFILE))
    assert os.path.isfile(branchfile)

    assert run(tmpdir, 'verify', **kw) == 0
    table = pd.read_csv(str(tmpdir.join('verify.csv')))
    assert bool(table['passed'][0])

    with open(branchfile, 'r') as f:
        rec = json.loads(f.readline())
    rec['coeffs1'][0] += 1e-3
    with open(branchfile, 'w') as f:
        f.write(json.dumps(rec) + '\n')
    assert run(tmpdir, 'verify', **kw) == 2


def test_verify_after_read_back(tmpdir):
    cfg = PairConfig(mode='counter', gamma1=1., b1=1., b2=1.5, d=5., N=16, M=128)
    v = newton_solve(cfg, 0.1, expansion_state(cfg, 0.1))
    branch = Branch(cfg, [v])
    path = vpairio.write_branch_jsonl(branch, str(tmpdir.join('branch.jsonl')))

    rows, passed = vpairdriver.verify_branch(branch, cfg, M_fine=1024, probes=16)
    back, passed_back = vpairdriver.verify_branch(vpairio.read_branch(path, cfg), cfg, M_fine=1024, probes=16)
    assert rows == back
    assert passed == passed_back


def test_continue_writes_branch(tmpdir):
    assert run(tmpdir, 'continue', modes=8, grid=64, eps_targets=[0.05, 0.1]) == 0
    cfg = small_config()
    branch = vpairio.read_branch(str(tmpdir.join(vpairio.BRANCHFILE)), cfg)
    assert list(branch.eps) == [0.05, 0.1]


def test_continue_needs_targets(tmpdir):
    assert run(tmpdir, 'continue') == 1


def test_main_exit_codes(tmpdir):
    config = write_config(tmpdir)
    assert vpairdriver.main(['--command', 'bogus', '--config', config]) == 1
    assert vpairdriver.main(['--command', 'solve', '--config', str(tmpdir.join('missing.yaml'))]) == 3
    assert vpairdriver.main(['--command', 'solve']) == 1
    assert run(tmpdir, 'solve', d=3.0) == 1
    assert run(tmpdir, 'solve', modes=8, grid=64, eps_targets=[0.1], max_iter=0) == 2
    assert run(tmpdir, 'emit', modes=8, grid=64) == 3


def test_main_positional_command(tmpdir):
    config = write_config(tmpdir, modes=8, grid=64)
    assert vpairdriver.main(['solve', '-c', config, '-o', str(tmpdir)]) == 0
    assert os.path.isfile(str(tmpdir.join(vpairio.BRANCHFILE)))


def test_run_spec():
    with pytest.raises(ConfigError) as e:
        vpairdriver.RunSpec('solve', None)
    assert e.value.key == 'config'
    with pytest.raises(IOError):
        vpairdriver.RunSpec('solve', '/nonexistent/pair.yaml')

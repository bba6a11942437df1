"""
Test suite for coupled runs
"""

from os import path as fp
import os
import shutil
import tempfile
import unittest

import numpy as np

from cpe.diagnostics import (audit_energy_inequality, dissipation,
                             production_bound)
from cpe.domain import Grid, observed_order
from cpe.errors import ConfigError, DegenerateDensityError
from cpe.initial import DEFAULT_INIT
from cpe.snapshot import read_series, snapshot_name
from cpe.trajectory import (DEFAULT_THRESHOLDS, DIAGNOSTICS_CSV,
                            LEVELSETS_CSV, SERIES_DAT, RunParams,
                            check_stability, coupled_rhs,
                            diagnostics_params, mk_stepper, run_trajectory,
                            whole_steps)


def _params(grid=Grid(8, 8, 5), dt=1e-3, T=0.01, interval=0.002,
            **changes):
    "a short run at ε = 0.1"
    init = DEFAULT_INIT._replace(epsilon=0.1, **changes)
    return RunParams(grid=grid, init=init, dt=dt, T=T,
                     snapshot_interval=interval, delta=0.0, rho_floor=0.0,
                     cfl=0.5, thresholds=DEFAULT_THRESHOLDS, c_audit=0.0)


def _slurp(path):
    "file contents as bytes"
    with open(path, 'rb') as ifile:
        return ifile.read()


# pylint: disable=too-many-public-methods, invalid-name
class TrajectoryTest(unittest.TestCase):
    "tests for cpe.trajectory"

    def setUp(self):
        self.tmp = tempfile.mkdtemp(prefix='cpe-test-')

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def rundir(self, name):
        "fresh directory under the scratch area"
        return fp.join(self.tmp, name)

    def test_whole_steps(self):
        "spans must be whole multiples of dt"
        self.assertEqual(3, whole_steps(0.3, 0.1, 'T'))
        self.assertRaises(ConfigError, whole_steps, 0.0105, 1e-3, 'T')
        self.assertRaises(ConfigError, whole_steps, 1e-4, 1e-3, 'T')
        self.assertEqual(10, _params().n_steps)
        self.assertEqual(2, _params().snapshot_every)

    def test_constant_state_rhs(self):
        "uniform η at rest: η grows by the singular source, v stays put"
        params = _params()
        stepper = mk_stepper(params)
        grid = params.grid
        eta = np.full(grid.shape2d, 1.2)
        v = np.zeros((2,) + grid.shape3d)
        deta, dv = coupled_rhs(eta, v, grid, stepper.density,
                               stepper.momentum)
        np.testing.assert_allclose(deta, 0.5 * 0.1 * 1.2 ** -51,
                                   rtol=1e-12)
        self.assertTrue(np.all(dv == 0))

    def test_check_stability(self):
        "dt above either bound is logged"
        params = _params()
        eta = np.ones(params.grid.shape2d)
        self.assertTrue(check_stability(eta, mk_stepper(params)))
        big = mk_stepper(params._replace(dt=0.05))
        with self.assertLogs('cpe.trajectory', level='WARNING'):
            self.assertFalse(check_stability(eta, big))

    def test_run_writes_outputs(self):
        "snapshots, CSV, gnuplot table and level sets"
        outdir = self.rundir('run')
        traj = run_trajectory(_params(), outdir)
        self.assertEqual(6, len(traj.records))
        self.assertEqual(0.0, traj.records[0].t)
        self.assertAlmostEqual(0.01, traj.records[-1].t)
        for name in [DIAGNOSTICS_CSV, SERIES_DAT, LEVELSETS_CSV,
                     snapshot_name(0), snapshot_name(5)]:
            self.assertTrue(fp.exists(fp.join(outdir, name)), name)
        self.assertFalse(fp.exists(fp.join(outdir, snapshot_name(6))))
        snaps = read_series(outdir)
        self.assertEqual([r.t for r in traj.records],
                         [s.t for s in snaps])
        self.assertEqual([], traj.audit.negative_dissipation)
        self.assertEqual(len(DEFAULT_THRESHOLDS),
                         len(traj.profile.measures))
        self.assertGreater(traj.c_audit, 0.0)

    def test_deterministic(self):
        "the same configuration gives byte identical CSVs"
        first, second = self.rundir('a'), self.rundir('b')
        run_trajectory(_params(), first)
        run_trajectory(_params(), second)
        for name in [DIAGNOSTICS_CSV, LEVELSETS_CSV, snapshot_name(5)]:
            self.assertEqual(_slurp(fp.join(first, name)),
                             _slurp(fp.join(second, name)), name)

    def test_floor_abort_keeps_partial_output(self):
        "an aborted run still writes what it reached"
        outdir = self.rundir('abort')
        params = _params()._replace(rho_floor=10.0)
        self.assertRaises(DegenerateDensityError, run_trajectory, params,
                          outdir)
        with open(fp.join(outdir, DIAGNOSTICS_CSV)) as ifile:
            lines = ifile.read().splitlines()
        self.assertEqual(2, len(lines))
        self.assertTrue(lines[1].startswith('0.0,'))
        snaps = [n for n in os.listdir(outdir) if n.endswith('.cpe')]
        self.assertEqual([snapshot_name(0)], snaps)

    def test_mass_residual_order(self):
        "halving dt and the snapshot interval quarters the mass residual"
        grid = Grid(16, 16, 5)
        common = dict(grid=grid, T=0.02, rho_profile='sine', rho_mean=1.0,
                      rho_amp=0.02)
        coarse = run_trajectory(_params(dt=1e-3, interval=4e-3, **common),
                                self.rundir('coarse'))
        fine = run_trajectory(_params(dt=5e-4, interval=2e-3, **common),
                              self.rundir('fine'))
        err_coarse = max(r.mass_residual for r in coarse.records[1:-1])
        err_fine = max(r.mass_residual for r in fine.records[2:-2:2])
        self.assertGreater(err_fine, 0.0)
        self.assertGreaterEqual(observed_order(err_coarse, err_fine), 1.8)

    def test_audit_catches_corrupted_dissipation(self):
        "overstated or negative dissipation on a real run is reported"
        traj = run_trajectory(_params(), self.rundir('run'))
        dparams = diagnostics_params(_params().init)
        recs = traj.records
        step = recs[1].t - recs[0].t
        bump = 100 * (1 + max(abs(r.energy_augmented) for r in recs) / step +
                      max(dissipation(r, dparams) for r in recs) +
                      max(production_bound(r, dparams, traj.c_audit)
                          for r in recs))
        inflated = list(recs)
        inflated[2] = recs[2]._replace(diss_Dv=recs[2].diss_Dv + bump)
        report = audit_energy_inequality(inflated, dparams, traj.c_audit)
        base = set(t for t, _ in traj.audit.violations)
        self.assertEqual(base | set([recs[2].t, recs[3].t]),
                         set(t for t, _ in report.violations))
        negative = list(recs)
        negative[4] = recs[4]._replace(diss_dzv=-1.0)
        report = audit_energy_inequality(negative, dparams, traj.c_audit)
        self.assertEqual([recs[4].t], report.negative_dissipation)
        self.assertFalse(report.ok)

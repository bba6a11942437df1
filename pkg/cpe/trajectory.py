"""
The coupled ε-system stepped on the grid: density and momentum
advanced together, with snapshots and diagnostics along the way
"""

# license: Public domain

from __future__ import print_function
from collections import namedtuple
from os import path as fp
import logging
import os

import numpy as np

from .density import (check_floor, density_rhs, mk_density_params,
                      stable_dt as density_stable_dt)
from .diagnostics import (DiagnosticsParams, audit_energy_inequality,
                          compute_record, level_set_profile,
                          production_constant, with_mass_residuals,
                          write_csv, write_level_sets, write_plot_data)
from .errors import ConfigError, NumericalError
from .initial import approximate_initial_data, build_initial_data
from .momentum import (check_finite, mk_momentum_params, momentum_rhs,
                       stable_dt as momentum_stable_dt)
from .snapshot import Snapshot, snapshot_name, write_snapshot
from .vertical import depth_average, reconstruct_w

_LOG = logging.getLogger(__name__)

DIAGNOSTICS_CSV = 'diagnostics.csv'
SERIES_DAT = 'series.dat'
LEVELSETS_CSV = 'levelsets.csv'

DEFAULT_THRESHOLDS = [0.8, 0.9, 1.0, 1.05, 1.1, 1.2, 1.4, 1.7, 2.0, 3.0]

# ---------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------


class RunParams(namedtuple('RunParams',
                           ['grid', 'init', 'dt', 'T', 'snapshot_interval',
                            'delta', 'rho_floor', 'cfl', 'thresholds',
                            'c_audit'])):
    """
    Everything a single trajectory needs

    :param grid: `Grid`
    :param init: `InitConfig` (its epsilon is the run's ε)
    :param dt: time step
    :param T: final time
    :param snapshot_interval: time between snapshots/diagnostics
    :param delta: δ in the singular density source
    :param rho_floor: abort threshold for min ρ (0 for the default)
    :param cfl: density safety factor
    :param thresholds: σ levels for the level-set profile
    :param c_audit: energy audit constant (0 to derive it from the
                    run's density range)
    """

    @property
    def n_steps(self):
        "total number of steps"
        return whole_steps(self.T, self.dt, 'T')

    @property
    def snapshot_every(self):
        "steps between snapshots"
        return whole_steps(self.snapshot_interval, self.dt,
                           'snapshot_interval')


def whole_steps(span, dt, what):
    """
    span / dt as an int, insisting that it is one (to 1e-9 relative)
    """
    steps = int(round(span / dt))
    if steps < 1 or abs(steps * dt - span) > 1e-9 * max(span, dt):
        raise ConfigError("{} = {} is not a whole number of steps of "
                          "dt = {}".format(what, span, dt))
    return steps


class Trajectory(namedtuple('Trajectory',
                            ['records', 'profile', 'audit', 'c_audit',
                             'outdir'])):
    """
    What a finished run leaves behind (besides its files)

    :param records: `DiagnosticsRecord` per snapshot, mass residuals in
    :param profile: `LevelSetProfile` over the stored states
    :param audit: `AuditReport` of the augmented energy inequality
    :param c_audit: audit constant actually used
    :param outdir: run directory
    """

# ---------------------------------------------------------------------
# stepping
# ---------------------------------------------------------------------


class CoupledStepper(namedtuple('CoupledStepper', 'grid density momentum')):
    """
    :param density: `DensityStepParams`
    :param momentum: `MomentumStepParams`
    """

    def rhs(self, eta, v):
        "see `coupled_rhs`"
        return coupled_rhs(eta, v, self.grid, self.density, self.momentum)

    def step(self, eta, v):
        "see `step_coupled`"
        return step_coupled(eta, v, self.grid, self.density, self.momentum)


def mk_stepper(params):
    """
    Density and momentum parameters for a run ::

        RunParams -> CoupledStepper
    """
    cfg = params.init
    dens = mk_density_params(cfg.epsilon, cfg.p0, params.dt,
                             delta=params.delta,
                             rho_floor=params.rho_floor, cfl=params.cfl)
    mom = mk_momentum_params(cfg.epsilon, cfg.p0, cfg.gamma, params.dt)
    return CoupledStepper(grid=params.grid, density=dens, momentum=mom)


def coupled_rhs(eta, v, grid, dparams, mparams):
    """
    (∂_t η, ∂_t v) at one state: w from (η, v) first, then the density
    layer driven by v̄, then momentum ::

        (Field2D, Vector3D, Grid, DensityStepParams, MomentumStepParams)
        -> (Field2D, Vector3D)
    """
    w = reconstruct_w(eta, v, grid)
    deta = density_rhs(eta, depth_average(v, grid), grid, dparams)
    dv = momentum_rhs(eta, v, w, grid, mparams)
    return deta, dv


def step_coupled(eta, v, grid, dparams, mparams):
    """
    One Heun step of the coupled system; aborts on a non-finite
    velocity or once ρ falls under the floor
    """
    dt = dparams.dt
    k1_eta, k1_v = coupled_rhs(eta, v, grid, dparams, mparams)
    eta1 = eta + dt * k1_eta
    v1 = v + dt * k1_v
    check_floor(eta1, dparams)
    k2_eta, k2_v = coupled_rhs(eta1, v1, grid, dparams, mparams)
    eta_new = eta + 0.5 * dt * (k1_eta + k2_eta)
    v_new = v + 0.5 * dt * (k1_v + k2_v)
    check_floor(eta_new, dparams)
    check_finite(v_new)
    return eta_new, v_new


def check_stability(eta, stepper):
    """
    Log (once per call) if dt is above either stability bound;
    returns True if it is within both
    """
    dt = stepper.density.dt
    bound_d = density_stable_dt(eta, stepper.grid, stepper.density)
    bound_m = momentum_stable_dt(stepper.grid, stepper.momentum)
    if dt > min(bound_d, bound_m):
        _LOG.warning("dt = %g exceeds the stability bound (density %g, "
                     "momentum %g)", dt, bound_d, bound_m)
        return False
    return True

# ---------------------------------------------------------------------
# runs
# ---------------------------------------------------------------------


def initial_state(params):
    """
    The ε-approximating data (η, v) of a run
    """
    cfg = params.init
    data = build_initial_data(cfg, params.grid)
    return approximate_initial_data(data, cfg.epsilon, cfg, params.grid)


def diagnostics_params(cfg):
    "InitConfig -> DiagnosticsParams"
    return DiagnosticsParams(epsilon=cfg.epsilon, p0=cfg.p0,
                             gamma=cfg.gamma)


def auto_c_audit(cfg, etas):
    """
    Pointwise production constant over the density range of the
    stored states
    """
    rho_min = min(float(np.min(e)) for e in etas) ** 2
    rho_max = max(float(np.max(e)) for e in etas) ** 2
    return production_constant(cfg.gamma, cfg.p0, rho_min, rho_max)


def finish_run(outdir, records, etas, params):
    """
    Mass residuals, audit, CSV, gnuplot table and level sets for the
    records of a run (complete or not)
    """
    cfg = params.init
    dparams = diagnostics_params(cfg)
    records = with_mass_residuals(records, cfg.epsilon)
    write_csv(fp.join(outdir, DIAGNOSTICS_CSV), records)
    write_plot_data(fp.join(outdir, SERIES_DAT), records)
    profile = level_set_profile(etas, [r.t for r in records],
                                params.thresholds)
    write_level_sets(fp.join(outdir, LEVELSETS_CSV), profile)
    c_audit = params.c_audit or auto_c_audit(cfg, etas)
    audit = audit_energy_inequality(records, dparams, c_audit)
    if not audit.ok:
        _LOG.warning("energy audit: %d violation(s), max excess %g "
                     "(C_audit = %g)", len(audit.violations),
                     audit.max_excess, c_audit)
    return Trajectory(records=records, profile=profile, audit=audit,
                      c_audit=c_audit, outdir=outdir)


def run_trajectory(params, outdir):
    """
    Evolve from the approximating data to T, writing a snapshot and a
    diagnostics record every `snapshot_interval` ::

        (RunParams, FilePath) -> Trajectory

    A numerical abort still leaves the files for the states reached so
    far before the error propagates.
    """
    cfg = params.init
    grid = params.grid
    n_steps, every = params.n_steps, params.snapshot_every
    stepper = mk_stepper(params)
    dparams = diagnostics_params(cfg)
    if not fp.exists(outdir):
        os.makedirs(outdir)
    eta, v = initial_state(params)
    check_stability(eta, stepper)
    warned = False
    records = []
    etas = []

    def store(index, t):
        "snapshot and diagnostics of the current state"
        write_snapshot(fp.join(outdir, snapshot_name(index)),
                       Snapshot(t=t, gamma=cfg.gamma, epsilon=cfg.epsilon,
                                p0=cfg.p0, eta=eta, v=v))
        records.append(compute_record(eta, v, grid, dparams, t))
        etas.append(eta.copy())

    store(0, 0.0)
    try:
        for step in range(1, n_steps + 1):
            eta, v = stepper.step(eta, v)
            if not warned and step % every == 0:
                warned = not check_stability(eta, stepper)
            if step % every == 0:
                store(step // every, step * params.dt)
    except NumericalError:
        _LOG.error("run aborted at t = %g; keeping %d record(s)",
                   step * params.dt, len(records))
        finish_run(outdir, records, etas, params)
        raise
    return finish_run(outdir, records, etas, params)

"""
ε-continuation study: one trajectory per ε on a ladder, then
uniformity of the a priori functionals and Cauchy distances between
neighbouring runs
"""

# license: Public domain

from __future__ import print_function
from collections import OrderedDict, namedtuple
from concurrent.futures import ProcessPoolExecutor
from os import path as fp
import logging
import os

import numpy as np

from .config import check_ladder, run_params
from .domain import integral_omega, integral_omega_h
from .errors import CpeError, GridMismatchError
from .snapshot import read_series
from .torpor import Torpor
from .trajectory import run_trajectory

_LOG = logging.getLogger(__name__)

REPORT_TXT = 'report.txt'
UNIFORMITY_DAT = 'uniformity.dat'

# functionals whose time maxima should not depend on ε
MAXIMA_KEYS = ['energy_physical',
               'energy_augmented',
               'bd_grad',
               'bd_grad4',
               'mv']

DISTANCE_KEYS = ['rho_l1', 'momentum_l2']

# inversions tolerated in the decreasing-distance trend
ALLOWED_INVERSIONS = 1

# ---------------------------------------------------------------------
# records
# ---------------------------------------------------------------------


class SweepPlan(namedtuple('SweepPlan',
                           'config epsilons outdir jobs uniformity_factor')):
    """
    :param config: `RunConfig` shared by every member (same base data)
    :param epsilons: strictly decreasing ladder in (0, 1)
    :param outdir: one ``eps-<value>`` directory per member goes here
    :param jobs: worker processes (1 runs in this process)
    :param uniformity_factor: max/min ratio allowed across the ladder
    """


def mk_sweep_plan(cfg, outdir, epsilons=None, jobs=None):
    """
    Sweep plan from a config, optionally overriding the ladder and the
    number of jobs
    """
    epsilons = list(cfg.epsilons if epsilons is None else epsilons)
    check_ladder(epsilons)
    return SweepPlan(config=cfg, epsilons=epsilons, outdir=outdir,
                     jobs=cfg.jobs if jobs is None else jobs,
                     uniformity_factor=cfg.uniformity_factor)


class MemberResult(namedtuple('MemberResult',
                              'epsilon rundir maxima error')):
    """
    :param maxima: {key: time maximum} for `MAXIMA_KEYS` (None on
                   failure)
    :param error: message of the exception that stopped the run
    """

    @property
    def ok(self):
        "did the run reach T"
        return self.error is None


class Distances(namedtuple('Distances', DISTANCE_KEYS)):
    """
    :param rho_l1: ‖ρ_i - ρ_j‖ in L¹(Ω×(0,T))
    :param momentum_l2: ‖ρ_i^{1/2}v_i - ρ_j^{1/2}v_j‖ in L²(Ω×(0,T))
    """


class Verdict(namedtuple('Verdict', 'value ok')):
    """
    :param value: the measured quantity (ratio or inversion count)
    :param ok: whether it passes
    """


class SweepReport(namedtuple('SweepReport',
                             ['epsilons', 'members', 'distances',
                              'uniformity', 'trends'])):
    """
    :param members: `MemberResult` per ε, in ladder order
    :param distances: [(ε_i, ε_j, Distances)] for adjacent good runs
    :param uniformity: {key: Verdict(max/min ratio)}
    :param trends: {distance key: Verdict(inversions)}
    """

    @property
    def failures(self):
        "members that did not finish"
        return [m for m in self.members if not m.ok]

# ---------------------------------------------------------------------
# series and distances
# ---------------------------------------------------------------------


class Series(namedtuple('Series', 'times etas vs')):
    """
    Stored states of one run

    :param times: snapshot times
    :param etas: η per snapshot
    :param vs: v per snapshot
    """


def load_series(rundir):
    """
    Snapshot series of a run directory ::

        FilePath -> Series
    """
    snaps = read_series(rundir)
    return Series(times=np.array([s.t for s in snaps]),
                  etas=[s.eta for s in snaps],
                  vs=[s.v for s in snaps])


def _time_integral(times, values):
    "trapezoid in time"
    values = np.asarray(values, dtype=float)
    if len(times) < 2:
        return 0.0
    gaps = np.diff(times)
    return float(np.sum(0.5 * gaps * (values[1:] + values[:-1])))


def cauchy_in_eps(series_i, series_j):
    """
    Space-time distances between two runs stored at the same times on
    the same grid ::

        (Series, Series) -> Distances
    """
    if len(series_i.times) != len(series_j.times) or \
            not np.allclose(series_i.times, series_j.times, rtol=0,
                            atol=1e-12):
        raise GridMismatchError("output times differ ({} vs {} snapshots)"
                                .format(len(series_i.times),
                                        len(series_j.times)))
    if series_i.vs and series_i.vs[0].shape != series_j.vs[0].shape:
        raise GridMismatchError("grids differ: {} vs {}"
                                .format(series_i.vs[0].shape,
                                        series_j.vs[0].shape))
    rho_gaps = [integral_omega_h(np.abs(e1 ** 2 - e2 ** 2))
                for e1, e2 in zip(series_i.etas, series_j.etas)]
    mom_gaps = [integral_omega(np.sum((e1 * v1 - e2 * v2) ** 2, axis=0))
                for e1, v1, e2, v2 in zip(series_i.etas, series_i.vs,
                                          series_j.etas, series_j.vs)]
    return Distances(rho_l1=_time_integral(series_i.times, rho_gaps),
                     momentum_l2=np.sqrt(_time_integral(series_i.times,
                                                        mom_gaps)))

# ---------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------


def uniformity_verdicts(maxima, factor):
    """
    max/min ratio across the ladder for each functional ::

        ([Dict String Float], Float) -> Dict String Verdict
    """
    out = OrderedDict()
    for key in MAXIMA_KEYS:
        vals = [m[key] for m in maxima]
        if not vals:
            continue
        top, low = max(vals), min(vals)
        if top == low:
            ratio = 1.0
        elif low > 0:
            ratio = top / low
        else:
            ratio = float('inf')
        out[key] = Verdict(value=ratio, ok=ratio <= factor)
    return out


def cauchy_trend(distances, allowed=ALLOWED_INVERSIONS):
    """
    Distances should shrink down the ladder; count the steps where
    they grow instead ::

        [Float] -> Verdict
    """
    inversions = sum(1 for a, b in zip(distances, distances[1:]) if b > a)
    return Verdict(value=inversions, ok=inversions <= allowed)

# ---------------------------------------------------------------------
# running
# ---------------------------------------------------------------------


def member_dir(outdir, epsilon):
    "directory for one member of the ladder"
    return fp.join(outdir, 'eps-{!r}'.format(float(epsilon)))


def _failed(epsilon, rundir, err):
    "result for a member that did not finish"
    return MemberResult(epsilon=epsilon, rundir=rundir, maxima=None,
                        error=str(err) or type(err).__name__)


def run_member(cfg, epsilon, rundir, quiet=False):
    """
    One trajectory of the ladder; failures are reported, not raised
    ::

        (RunConfig, Float, FilePath) -> MemberResult
    """
    try:
        with Torpor("epsilon = {:g}".format(epsilon), quiet=quiet):
            traj = run_trajectory(run_params(cfg, epsilon), rundir)
    except CpeError as err:
        _LOG.error("sweep member epsilon = %g failed: %s", epsilon, err)
        return _failed(epsilon, rundir, err)
    except Exception as err:  # pylint: disable=broad-except
        _LOG.exception("sweep member epsilon = %g crashed", epsilon)
        return _failed(epsilon, rundir, err)
    maxima = OrderedDict((k, max(getattr(r, k) for r in traj.records))
                         for k in MAXIMA_KEYS)
    return MemberResult(epsilon=epsilon, rundir=rundir, maxima=maxima,
                        error=None)


def _collect(future, epsilon, rundir):
    "a worker's result, or a failed member if the worker itself died"
    try:
        return future.result()
    except Exception as err:  # pylint: disable=broad-except
        _LOG.exception("sweep worker for epsilon = %g died", epsilon)
        return _failed(epsilon, rundir, err)


def _run_members(plan):
    "members in ladder order, concurrently if asked"
    dirs = [member_dir(plan.outdir, e) for e in plan.epsilons]
    if plan.jobs > 1 and len(plan.epsilons) > 1:
        with ProcessPoolExecutor(max_workers=plan.jobs) as pool:
            futures = [pool.submit(run_member, plan.config, e, d, True)
                       for e, d in zip(plan.epsilons, dirs)]
            return [_collect(f, e, d)
                    for f, e, d in zip(futures, plan.epsilons, dirs)]
    return [run_member(plan.config, e, d)
            for e, d in zip(plan.epsilons, dirs)]


def run_sweep(plan):
    """
    Run the ladder, then compare neighbouring runs and write the
    report files ::

        SweepPlan -> SweepReport
    """
    if not fp.exists(plan.outdir):
        os.makedirs(plan.outdir)
    members = _run_members(plan)
    good = [m for m in members if m.ok]
    distances = []
    for before, after in zip(good, good[1:]):
        dist = cauchy_in_eps(load_series(before.rundir),
                             load_series(after.rundir))
        distances.append((before.epsilon, after.epsilon, dist))
    uniformity = uniformity_verdicts([m.maxima for m in good],
                                     plan.uniformity_factor)
    trends = OrderedDict((k, cauchy_trend([getattr(d, k)
                                           for _, _, d in distances]))
                         for k in DISTANCE_KEYS)
    report = SweepReport(epsilons=list(plan.epsilons), members=members,
                         distances=distances, uniformity=uniformity,
                         trends=trends)
    write_report(fp.join(plan.outdir, REPORT_TXT), report)
    write_uniformity(fp.join(plan.outdir, UNIFORMITY_DAT), report)
    return report

# ---------------------------------------------------------------------
# output
# ---------------------------------------------------------------------


def _verdict_str(verdict):
    "value and pass/fail"
    return "{} ({})".format(verdict.value, "ok" if verdict.ok else "FAIL")


def report_lines(report):
    """
    ``key: value`` lines summarising a sweep
    """
    lines = []

    def put(key, val):
        "one aligned line"
        lines.append(u"{: <28}: {}".format(key, val))

    put("epsilons", ", ".join(repr(e) for e in report.epsilons))
    for mem in report.members:
        tag = "eps={!r}".format(mem.epsilon)
        if mem.ok:
            for key, val in mem.maxima.items():
                put("{} max {}".format(tag, key), repr(val))
        else:
            put("{} FAILED".format(tag), mem.error)
    for eps_i, eps_j, dist in report.distances:
        for key in DISTANCE_KEYS:
            put("{} {!r}->{!r}".format(key, eps_i, eps_j),
                repr(getattr(dist, key)))
    for key, verdict in report.uniformity.items():
        put("uniform {}".format(key), _verdict_str(verdict))
    for key, verdict in report.trends.items():
        put("trend {}".format(key), _verdict_str(verdict))
    put("trend note", "decreasing distances with up to {} inversion(s) "
        "stand in for subsequence convergence".format(ALLOWED_INVERSIONS))
    put("failures", len(report.failures))
    return lines


def write_report(path, report):
    "report.txt"
    with open(path, 'w') as ofile:
        for line in report_lines(report):
            print(line, file=ofile)


def write_uniformity(path, report):
    """
    gnuplot table: ε then the maxima, one row per finished run
    """
    with open(path, 'w') as ofile:
        print('# epsilon ' + ' '.join(MAXIMA_KEYS), file=ofile)
        for mem in report.members:
            if mem.ok:
                print(' '.join([repr(mem.epsilon)] +
                               [repr(float(mem.maxima[k]))
                                for k in MAXIMA_KEYS]), file=ofile)

"""
Energy, Bresch-Desjardins and Mellet-Vasseur functionals, the mass
balance, level-set measures, and the audits built on them
"""

# license: Public domain

from __future__ import print_function
from collections import namedtuple
import csv

import numpy as np

from .domain import (d_z, grad_h, integral_omega, integral_omega_h,
                     norm2_h)
from .density import check_positive
from .vertical import reconstruct_w

# ---------------------------------------------------------------------
# records
# ---------------------------------------------------------------------

CSV_COLUMNS = ['t',
               'energy_physical',
               'energy_augmented',
               'diss_Dv',
               'diss_dzv',
               'bd_grad',
               'bd_grad4',
               'bd_diss_hv',
               'bd_diss_dzw',
               'bd_pressure',
               'mv',
               'mass',
               'mass_residual']

# recomputable from the same state, but not part of the CSV contract
_EXTRA_COLUMNS = ['singular', 'mass_diss']


class DiagnosticsRecord(namedtuple('DiagnosticsRecord',
                                   CSV_COLUMNS + _EXTRA_COLUMNS)):
    """
    Functionals of one state

    :param t: time
    :param energy_physical: ½∫ρ|v|² + (γ-1)⁻¹∫ρ^γ
    :param energy_augmented: physical + ∫ρ + ε/(4(1+p0))∫ρ^{-p0}
    :param diss_Dv: ∫ρ|𝒟(v)|²
    :param diss_dzv: ∫ρ|∂_z v|²
    :param bd_grad: ∫|∇_h ρ^{1/2}|²
    :param bd_grad4: ε∫|∇_h ρ^{1/2}|⁴
    :param bd_diss_hv: ∫ρ|∇_h v|² (√ε times this is the extra dissipation)
    :param bd_diss_dzw: ∫ρ|∂_z w|²
    :param bd_pressure: ∫ρ^{γ-2}|∇_h ρ|²
    :param mv: ∫ρ(e+|v|²)log(e+|v|²)
    :param mass: ∫ρ
    :param mass_residual: mass balance defect (filled from neighbours)
    :param singular: ∫ρ^{-p0}
    :param mass_diss: ε∫(|∇η|² + |∇η|⁴)
    """

    def csv_row(self):
        "values in CSV column order"
        return [getattr(self, k) for k in CSV_COLUMNS]


class LevelSetProfile(namedtuple('LevelSetProfile', 'thresholds measures')):
    """
    :param thresholds: increasing k_i
    :param measures: space-time measure a_i of {σ > k_i}, σ = ρ^{-1/2}
    """


class DiagnosticsParams(namedtuple('DiagnosticsParams',
                                   'epsilon p0 gamma')):
    """
    What the functionals depend on besides the state
    """


def compute_record(eta, v, grid, params, t):
    """
    All functionals of the state (η, v) at time t ::

        (Field2D, Vector3D, Grid, DiagnosticsParams, Float)
        -> DiagnosticsRecord
    """
    check_positive(eta, "diagnostics")
    eps, p0, gamma = params.epsilon, params.p0, params.gamma
    rho = eta ** 2
    speed2 = norm2_h(v)
    dv = grad_h(v, grid)
    strain = 0.5 * (dv + dv.swapaxes(0, 1))
    grad_eta2 = norm2_h(grad_h(eta, grid))
    grad_rho2 = norm2_h(grad_h(rho, grid))
    w = reconstruct_w(eta, v, grid)
    kinetic = 0.5 * integral_omega(rho * speed2)
    internal = integral_omega_h(rho ** gamma) / (gamma - 1)
    mass = integral_omega_h(rho)
    singular = integral_omega_h(rho ** -p0)
    physical = kinetic + internal
    log_arg = np.e + speed2
    return DiagnosticsRecord(
        t=t,
        energy_physical=physical,
        energy_augmented=(physical + mass +
                          eps / (4 * (1 + p0)) * singular),
        diss_Dv=integral_omega(rho * np.sum(strain ** 2, axis=(0, 1))),
        diss_dzv=integral_omega(rho * norm2_h(d_z(v, grid))),
        bd_grad=integral_omega_h(grad_eta2),
        bd_grad4=eps * integral_omega_h(grad_eta2 ** 2),
        bd_diss_hv=integral_omega(rho * np.sum(dv ** 2, axis=(0, 1))),
        bd_diss_dzw=integral_omega(rho * d_z(w, grid, neumann=False) ** 2),
        bd_pressure=integral_omega_h(rho ** (gamma - 2) * grad_rho2),
        mv=integral_omega(rho * log_arg * np.log(log_arg)),
        mass=mass,
        mass_residual=0.0,
        singular=singular,
        # ε/16 ∫ρ⁻²(4ρ+|∇ρ|²)|∇ρ|² with ∇ρ = 2η∇η
        mass_diss=eps * integral_omega_h(grad_eta2 + grad_eta2 ** 2))

# ---------------------------------------------------------------------
# mass balance
# ---------------------------------------------------------------------


def mass_balance_residual(window, epsilon):
    """
    |d/dt∫ρ + ε∫(|∇η|²+|∇η|⁴) - ε∫ρ^{-p0}| at the middle of three
    equally spaced records ::

        ([DiagnosticsRecord], Float) -> Float
    """
    if len(window) < 3:
        raise ValueError("mass balance needs three consecutive records")
    before, mid, after = window[:3]
    rate = (after.mass - before.mass) / (after.t - before.t)
    return abs(rate + mid.mass_diss - epsilon * mid.singular)


def with_mass_residuals(records, epsilon):
    """
    Fill in ``mass_residual`` everywhere: centered in the interior,
    one-sided second order at the two ends. With fewer than three
    records the residuals stay at 0.
    """
    records = list(records)
    if len(records) < 3:
        return records
    out = []
    last = len(records) - 1
    for i, rec in enumerate(records):
        if 0 < i < last:
            res = mass_balance_residual(records[i - 1:i + 2], epsilon)
        else:
            sgn = 1 if i == 0 else -1
            r0, r1, r2 = records[i], records[i + sgn], records[i + 2 * sgn]
            step = r1.t - r0.t
            rate = (-3 * r0.mass + 4 * r1.mass - r2.mass) / (2 * step)
            res = abs(rate + rec.mass_diss - epsilon * rec.singular)
        out.append(rec._replace(mass_residual=res))
    return out

# ---------------------------------------------------------------------
# energy audit
# ---------------------------------------------------------------------


class AuditReport(namedtuple('AuditReport',
                             'violations max_excess n_checked '
                             'negative_dissipation')):
    """
    :param violations: [(t, excess)] where the inequality failed by
                       more than the tolerance
    :param max_excess: largest lhs - rhs seen (may be negative)
    :param n_checked: number of steps examined
    :param negative_dissipation: times at which some dissipation
                                 functional was negative
    """

    @property
    def ok(self):
        "no violations of either kind"
        return not self.violations and not self.negative_dissipation


def dissipation(rec, params):
    """
    The dissipation we credit against the augmented energy
    """
    eps, p0 = params.epsilon, params.p0
    return ((1 - (p0 + 1) / (4.0 * p0)) * rec.diss_Dv + rec.diss_dzv +
            (np.sqrt(eps) - eps) * rec.bd_diss_hv)


def production_bound(rec, params, c_audit):
    "ε(2∫ρ^{-p0} + C∫ρ)"
    return params.epsilon * (2 * rec.singular + c_audit * rec.mass)


def _energy_excess(before, after, params, c_audit):
    "lhs - rhs of the per-step augmented energy inequality"
    step = after.t - before.t
    rate = (after.energy_augmented - before.energy_augmented) / step
    diss = 0.5 * (dissipation(before, params) + dissipation(after, params))
    bound = 0.5 * (production_bound(before, params, c_audit) +
                   production_bound(after, params, c_audit))
    return rate + diss - bound


def audit_energy_inequality(records, params, c_audit, tol=0.0):
    """
    Check ΔE/Δt + dissipation <= ε(2∫ρ^{-p0} + C_audit∫ρ) + tol step
    by step (endpoint averages) ::

        ([DiagnosticsRecord], DiagnosticsParams, Float, Float)
        -> AuditReport
    """
    violations = []
    negative = []
    excesses = []
    for rec in records:
        if min(rec.diss_Dv, rec.diss_dzv, rec.bd_diss_hv,
               rec.bd_diss_dzw) < 0:
            negative.append(rec.t)
    for before, after in zip(records, records[1:]):
        excess = _energy_excess(before, after, params, c_audit)
        excesses.append(excess)
        if excess > tol:
            violations.append((after.t, excess))
    return AuditReport(violations=violations,
                       max_excess=max(excesses) if excesses else 0.0,
                       n_checked=len(excesses),
                       negative_dissipation=negative)


def calibrate_c_audit(records, params):
    """
    Smallest C making every step of the audit pass with zero tolerance
    (0 if nothing needs it)
    """
    need = 0.0
    for before, after in zip(records, records[1:]):
        excess = _energy_excess(before, after, params, 0.0)
        mass = 0.5 * (before.mass + after.mass)
        need = max(need, excess / (params.epsilon * mass))
    return need


def production_constant(gamma, p0, rho_min, rho_max, samples=2001):
    """
    Pointwise C with γ/(γ-1)ρ^{γ-p0-1} + ρ^{-p0} <= 2ρ^{-p0} + Cρ
    over [rho_min, rho_max] (sampled geometrically)
    """
    rho = np.geomspace(rho_min, rho_max, samples)
    need = (gamma / (gamma - 1) * rho ** (gamma - p0 - 1) - rho ** -p0) / rho
    return max(0.0, float(np.max(need)))

# ---------------------------------------------------------------------
# level sets
# ---------------------------------------------------------------------


def level_set_profile(etas, times, thresholds):
    """
    Space-time measure of {σ > k} for each threshold, trapezoid in
    time over the stored states ::

        ([Field2D], [Float], [Float]) -> LevelSetProfile
    """
    thresholds = [float(k) for k in thresholds]
    if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
        raise ValueError("thresholds must be strictly increasing")
    times = np.asarray(times, dtype=float)
    sigmas = [1.0 / eta for eta in etas]
    wts = np.zeros(len(times))
    if len(times) > 1:
        gaps = np.diff(times)
        wts[:-1] += 0.5 * gaps
        wts[1:] += 0.5 * gaps
    measures = []
    for k in thresholds:
        fractions = np.array([np.count_nonzero(s > k) / float(s.size)
                              for s in sigmas])
        measures.append(float(np.sum(wts * fractions)))
    return LevelSetProfile(thresholds=thresholds, measures=measures)

# ---------------------------------------------------------------------
# output
# ---------------------------------------------------------------------


def write_csv(path, records):
    """
    Diagnostics CSV with the frozen header; floats via repr so that a
    recomputation can be compared byte for byte
    """
    with open(path, 'w') as ofile:
        writer = csv.writer(ofile, lineterminator='\n')
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            writer.writerow([repr(float(x)) for x in rec.csv_row()])


def read_csv(path):
    """
    Read back a diagnostics CSV as a list of dicts of floats
    """
    with open(path) as ifile:
        reader = csv.DictReader(ifile)
        return [{k: float(v) for k, v in row.items()} for row in reader]


def write_plot_data(path, records):
    """
    The same columns as the CSV, whitespace separated for gnuplot
    """
    with open(path, 'w') as ofile:
        print('# ' + ' '.join(CSV_COLUMNS), file=ofile)
        for rec in records:
            print(' '.join(repr(float(x)) for x in rec.csv_row()),
                  file=ofile)


def write_level_sets(path, profile):
    """
    k,a_k rows, the input format of the `degiorgi` subcommand
    """
    with open(path, 'w') as ofile:
        writer = csv.writer(ofile, lineterminator='\n')
        writer.writerow(['k', 'a_k'])
        for k, a_k in zip(profile.thresholds, profile.measures):
            writer.writerow([repr(k), repr(a_k)])

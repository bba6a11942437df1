"""
A few-mode Galerkin replica of the existence construction

Velocities live in the span of the first n eigenfunctions of -Δ on
T² × (0,1) with Neumann walls; the density root lives in the span of
the first m horizontal ones. The density layer is an ODE for its
coefficients (integrated with RK4), and the velocity coefficients are
the fixed point of ::

    Q(a)(t) = M[η(t)]⁻¹ (M[η(0)] a(0) + ∫₀ᵗ F(η, a) ds)

found by Picard iteration on a uniform inner time grid.
"""

# license: Public domain

from collections import namedtuple
import logging
import math

import numpy as np
import scipy.linalg

from .domain import Grid, trapezoid_weights
from .errors import (ConfigError, DegenerateDensityError,
                     NoContractionError, NotSPDError, QuadratureError)
from .vertical import depth_average

_LOG = logging.getLogger(__name__)

_ORTHO_TOL = 1e-10

MAX_MODES = 16

# ---------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------


class GalerkinParams(namedtuple('GalerkinParams',
                                ['epsilon', 'p0', 'gamma', 'delta',
                                 'T_n', 'tol', 'max_iter', 'inner_steps',
                                 'rk4_substeps', 'max_halvings',
                                 'oversample'])):
    """
    :param epsilon: regularisation strength (1 in the construction)
    :param p0: drag exponent
    :param gamma: adiabatic exponent
    :param delta: δ > 0 in the singular density term
    :param T_n: initial fixed point window
    :param tol: sup-in-time coefficient residual to stop at
    :param max_iter: Picard iterations per window attempt
    :param inner_steps: intervals on the inner time grid
    :param rk4_substeps: RK4 steps per inner interval (density layer)
    :param max_halvings: how often T_n may be halved
    :param oversample: quadrature points per Nyquist point
    """


DEFAULT_PARAMS = GalerkinParams(epsilon=1.0, p0=25.0, gamma=2.0,
                                delta=1e-6, T_n=0.01, tol=1e-8,
                                max_iter=60, inner_steps=20,
                                rk4_substeps=2, max_halvings=8,
                                oversample=4)

# ---------------------------------------------------------------------
# bases
# ---------------------------------------------------------------------


class Mode(namedtuple('Mode', 'k1 k2 m parity')):
    """
    trig(2π(k1 x + k2 y)) cos(mπz), with trig = cos or sin
    (parity 'c' or 's')
    """

    @property
    def eigenvalue(self):
        "(2π)²|k|² + (mπ)²"
        return ((2 * math.pi) ** 2 * (self.k1 ** 2 + self.k2 ** 2) +
                (self.m * math.pi) ** 2)

    def sort_key(self):
        "eigenvalue first, ties broken deterministically"
        return (round(self.eigenvalue, 9), self.m, abs(self.k1) +
                abs(self.k2), self.k1, self.k2, self.parity)


class Basis(namedtuple('Basis', 'modes')):
    """
    Ordered eigenmodes (the first is the constant)
    """

    def __len__(self):
        return len(self.modes)

    @property
    def kmax(self):
        "largest horizontal wavenumber per axis"
        return max(max(abs(md.k1), abs(md.k2)) for md in self.modes)

    @property
    def mmax(self):
        "largest vertical wavenumber"
        return max(md.m for md in self.modes)


def _wavevectors(kmax):
    "(0,0) and one representative of each ±k pair"
    out = [(0, 0)]
    for k1 in range(0, kmax + 1):
        for k2 in range(-kmax, kmax + 1):
            if k1 > 0 or (k1 == 0 and k2 > 0):
                out.append((k1, k2))
    return out


def _modes(count, vertical):
    "first `count` modes by eigenvalue"
    reach = int(math.ceil(math.sqrt(count))) + 1
    modes = []
    for k1, k2 in _wavevectors(reach):
        for m in range(reach + 1 if vertical else 1):
            parities = ['c'] if (k1, k2) == (0, 0) else ['c', 's']
            modes.extend(Mode(k1, k2, m, p) for p in parities)
    modes.sort(key=Mode.sort_key)
    return Basis(tuple(modes[:count]))


def mk_basis3d(n):
    """
    The first n velocity eigenmodes ::

        Int -> Basis
    """
    if n < 1:
        raise ValueError("need at least one mode")
    return _modes(n, vertical=True)


def mk_basis2d(m):
    """
    The first m horizontal (density) eigenmodes
    """
    if m < 1:
        raise ValueError("need at least one mode")
    return _modes(m, vertical=False)

# ---------------------------------------------------------------------
# tabulation
# ---------------------------------------------------------------------


class Table(namedtuple('Table', 'H Hx Hy Hlap Zv Zd Zi')):
    """
    Separable values of a basis on a grid: e_i = H_i(x,y) Z_i(z)

    :param H: horizontal factors, shape (n, ny, nx); also Hx, Hy, Hlap
    :param Zv: vertical factors, shape (n, nz)
    :param Zd: their z derivatives
    :param Zi: their antiderivatives from 0 (zero for m = 0)
    """

    def values(self):
        ":: (n, nz, ny, nx)"
        return self.H[:, np.newaxis] * self.Zv[:, :, np.newaxis, np.newaxis]

    def dx(self):
        "∂_x e_i"
        return self.Hx[:, np.newaxis] * self.Zv[:, :, np.newaxis, np.newaxis]

    def dy(self):
        "∂_y e_i"
        return self.Hy[:, np.newaxis] * self.Zv[:, :, np.newaxis, np.newaxis]

    def dz(self):
        "∂_z e_i"
        return self.H[:, np.newaxis] * self.Zd[:, :, np.newaxis, np.newaxis]


def tabulate(basis, grid):
    """
    Evaluate a basis (and derivatives) on the nodes of a grid ::

        (Basis, Grid) -> Table
    """
    x, y, z = grid.coords()
    yy, xx = np.meshgrid(y, x, indexing='ij')
    hs, hxs, hys, laps, zvs, zds, zis = [], [], [], [], [], [], []
    for md in basis.modes:
        kk = (2 * math.pi) ** 2 * (md.k1 ** 2 + md.k2 ** 2)
        hnorm = 1.0 if (md.k1, md.k2) == (0, 0) else math.sqrt(2)
        phase = 2 * math.pi * (md.k1 * xx + md.k2 * yy)
        if md.parity == 'c':
            val = hnorm * np.cos(phase)
            dval = -hnorm * np.sin(phase)
        else:
            val = hnorm * np.sin(phase)
            dval = hnorm * np.cos(phase)
        hs.append(val)
        hxs.append(2 * math.pi * md.k1 * dval)
        hys.append(2 * math.pi * md.k2 * dval)
        laps.append(-kk * val)
        if md.m == 0:
            zvs.append(np.ones_like(z))
            zds.append(np.zeros_like(z))
            zis.append(np.zeros_like(z))
        else:
            freq = md.m * math.pi
            zvs.append(math.sqrt(2) * np.cos(freq * z))
            slope = -math.sqrt(2) * freq * np.sin(freq * z)
            # Neumann walls
            slope[0] = slope[-1] = 0.0
            zds.append(slope)
            zis.append(math.sqrt(2) * np.sin(freq * z) / freq)
    return Table(H=np.array(hs), Hx=np.array(hxs), Hy=np.array(hys),
                 Hlap=np.array(laps), Zv=np.array(zvs), Zd=np.array(zds),
                 Zi=np.array(zis))


def quadrature_weights(grid):
    """
    Weights of `integral_omega` as an array of shape (nz, ny, nx)
    """
    wz = trapezoid_weights(grid.nz) / (grid.nz - 1)
    return np.broadcast_to(wz[:, np.newaxis, np.newaxis] /
                           (grid.nx * grid.ny), grid.shape3d)


def horizontal_weights(grid):
    "weights of `integral_omega_h`, shape (ny, nx)"
    return np.full(grid.shape2d, 1.0 / (grid.nx * grid.ny))


def quadrature_grid(basis3d, basis2d, oversample):
    """
    Tensor grid resolving the highest modes `oversample` times over
    """
    kmax = max(basis3d.kmax, basis2d.kmax)
    nq = max(8, oversample * (2 * kmax + 1))
    nq += nq % 2
    nzq = max(3, oversample * (basis3d.mmax + 1) + 1)
    return Grid(nq, nq, nzq)


class GalerkinSystem(namedtuple('GalerkinSystem',
                                ['basis3d', 'basis2d', 'grid', 'table3d',
                                 'table2d', 'weights', 'params'])):
    """
    Everything the sandbox needs, precomputed

    :param basis3d: velocity basis X_n
    :param basis2d: density basis X̄_m
    :param grid: quadrature grid
    :param table3d: `Table` of basis3d on the grid
    :param table2d: `Table` of basis2d on the grid
    :param weights: 3D quadrature weights
    :param params: `GalerkinParams`
    """


def gram_matrix(table, weights):
    "∫ e_i e_j by quadrature"
    vals = table.values()
    return np.einsum('izyx,jzyx->ij', vals * weights, vals)


def mk_system(n_modes, m_modes, params=DEFAULT_PARAMS):
    """
    Bases, quadrature and tables for at most `MAX_MODES` modes each;
    refuses quadratures under which the bases drift from orthonormality
    """
    for what, count in [('velocity', n_modes), ('density', m_modes)]:
        if count > MAX_MODES:
            raise ConfigError("{} basis: at most {} modes (got {})"
                              .format(what, MAX_MODES, count))
    basis3d = mk_basis3d(n_modes)
    basis2d = mk_basis2d(m_modes)
    grid = quadrature_grid(basis3d, basis2d, params.oversample)
    table3d = tabulate(basis3d, grid)
    table2d = tabulate(basis2d, grid)
    weights = quadrature_weights(grid)
    for what, table in [('velocity', table3d), ('density', table2d)]:
        drift = np.max(np.abs(gram_matrix(table, weights) -
                              np.eye(len(table.H))))
        if drift > _ORTHO_TOL:
            raise QuadratureError("{} basis loses orthonormality on a {} "
                                  "quadrature grid (drift {:g})"
                                  .format(what, grid, drift))
    return GalerkinSystem(basis3d=basis3d, basis2d=basis2d, grid=grid,
                          table3d=table3d, table2d=table2d,
                          weights=np.ascontiguousarray(weights),
                          params=params)

# ---------------------------------------------------------------------
# fields from coefficients
# ---------------------------------------------------------------------


def expand(coeffs, table):
    """
    Σ c_i e_i on the grid; vector coefficients of shape (n, 2) give a
    field of shape (2, nz, ny, nx)
    """
    coeffs = np.asarray(coeffs, dtype=float)
    vals = table.values()
    if coeffs.ndim == 1:
        return np.tensordot(coeffs, vals, axes=1)
    return np.tensordot(coeffs.T, vals, axes=1)


def project(field, table, weights):
    """
    ⟨f, e_i⟩ by quadrature; the inverse of `expand` on the span
    """
    vals = table.values()
    if field.ndim == 3:
        return np.einsum('izyx,zyx->i', vals, field * weights)
    return np.einsum('izyx,czyx->ic', vals, field * weights)


class DensityState(namedtuple('DensityState', 'eta grad lap')):
    """
    η on the horizontal quadrature grid with its gradient and
    Laplacian, all shape (ny, nx) (gradient (2, ny, nx))
    """


def density_state(b, table2d):
    "η from its coefficients"
    b = np.asarray(b, dtype=float)
    # the density basis is z-independent: take its z = 0 level
    H = table2d.H * table2d.Zv[:, 0, np.newaxis, np.newaxis]
    eta = np.tensordot(b, H, axes=1)
    grad = np.stack([np.tensordot(b, table2d.Hx, axes=1),
                     np.tensordot(b, table2d.Hy, axes=1)])
    lap = np.tensordot(b, table2d.Hlap, axes=1)
    if not np.all(eta > 0):
        raise DegenerateDensityError("Galerkin density root lost positivity "
                                     "(min {:g})".format(float(np.min(eta))))
    return DensityState(eta=eta, grad=grad, lap=lap)


class VelocityState(namedtuple('VelocityState', 'v dv dz')):
    """
    v on the 3D quadrature grid, ``dv[j, c] = ∂_j v_c`` and ∂_z v
    """


def velocity_state(a, table3d):
    "v from its coefficients"
    a = np.asarray(a, dtype=float)
    ex, ey = table3d.dx(), table3d.dy()
    v = expand(a, table3d)
    dv = np.stack([np.tensordot(a.T, ex, axes=1),
                   np.tensordot(a.T, ey, axes=1)])
    dz = np.tensordot(a.T, table3d.dz(), axes=1)
    return VelocityState(v=v, dv=dv, dz=dz)


def vertical_velocity(a, dens, table3d):
    """
    w = -ρ⁻¹∫₀^z div_h(ρṽ) = -(div_h Ṽ + 2Ṽ·∇η/η), Ṽ = ∫₀^z ṽ,
    evaluated in closed form from the modes
    """
    a = np.asarray(a, dtype=float)
    zi = table3d.Zi[:, :, np.newaxis, np.newaxis]
    prim = np.stack([np.tensordot(a[:, c], table3d.H[:, np.newaxis] * zi,
                                  axes=1) for c in range(2)])
    div_prim = (np.tensordot(a[:, 0], table3d.Hx[:, np.newaxis] * zi,
                             axes=1) +
                np.tensordot(a[:, 1], table3d.Hy[:, np.newaxis] * zi,
                             axes=1))
    glog = 2 * dens.grad / dens.eta
    return -(div_prim + prim[0] * glog[0] + prim[1] * glog[1])

# ---------------------------------------------------------------------
# density layer
# ---------------------------------------------------------------------


def eta_galerkin_rhs(b, vbar, system):
    """
    Coefficient derivative of the density root ::

        ∂_t η = ½ P̄_m(ε div((1+|∇η|²)∇η) - div(η v̄) - v̄·∇η
                      + ε(η²+δ)^{-p0-1/2})

    with divergences moved onto the test functions. ``vbar`` is the
    depth average on the horizontal quadrature grid, shape (2, ny, nx).
    """
    prm = system.params
    tab = system.table2d
    dens = density_state(b, tab)
    eta, grad = dens.eta, dens.grad
    wts = horizontal_weights(system.grid)
    flux = (-prm.epsilon * (1 + grad[0] ** 2 + grad[1] ** 2) * grad +
            eta * vbar)
    scalar = (-(vbar[0] * grad[0] + vbar[1] * grad[1]) +
              prm.epsilon * (eta ** 2 + prm.delta) ** (-prm.p0 - 0.5))
    out = (np.tensordot(tab.Hx, flux[0] * wts, axes=2) +
           np.tensordot(tab.Hy, flux[1] * wts, axes=2) +
           np.tensordot(tab.H, scalar * wts, axes=2))
    return 0.5 * out


def depth_mean_velocity(a, system):
    "v̄ on the horizontal quadrature grid"
    return depth_average(expand(a, system.table3d), system.grid)


def _rk4(b, vbar0, vbar1, dt, substeps, system):
    "RK4 across one inner interval, v̄ linear in time"
    def vb(theta):
        "v̄ at fraction theta of the interval"
        return (1 - theta) * vbar0 + theta * vbar1

    h = dt / substeps
    for j in range(substeps):
        th0 = float(j) / substeps
        th1 = float(j + 1) / substeps
        thm = 0.5 * (th0 + th1)
        k1 = eta_galerkin_rhs(b, vb(th0), system)
        k2 = eta_galerkin_rhs(b + 0.5 * h * k1, vb(thm), system)
        k3 = eta_galerkin_rhs(b + 0.5 * h * k2, vb(thm), system)
        k4 = eta_galerkin_rhs(b + h * k3, vb(th1), system)
        b = b + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return b


def solve_map_S(a_traj, times, b0, system):
    """
    The solution map v_n ↦ (η_n, w_n) on the inner grid ::

        (ndarray (K+1, n, 2), ndarray (K+1,), ndarray (m,),
         GalerkinSystem)
        -> (ndarray (K+1, m), ndarray (K+1, nz, ny, nx))
    """
    vbars = [depth_mean_velocity(a, system) for a in a_traj]
    bs = [np.asarray(b0, dtype=float)]
    for k in range(len(times) - 1):
        bs.append(_rk4(bs[-1], vbars[k], vbars[k + 1],
                       times[k + 1] - times[k],
                       system.params.rk4_substeps, system))
    ws = [vertical_velocity(a, density_state(b, system.table2d),
                            system.table3d)
          for a, b in zip(a_traj, bs)]
    return np.array(bs), np.array(ws)

# ---------------------------------------------------------------------
# momentum layer
# ---------------------------------------------------------------------


def mass_matrix(b, system):
    """
    m_ij = ∫η² e_i e_j, symmetrised and checked by Cholesky ::

        (ndarray (m,), GalerkinSystem) -> (ndarray (n, n), cho factor)
    """
    eta = density_state(b, system.table2d).eta
    vals = system.table3d.values()
    mat = np.einsum('izyx,jzyx->ij', vals * (system.weights * eta ** 2),
                    vals)
    mat = 0.5 * (mat + mat.T)
    try:
        factor = scipy.linalg.cho_factor(mat)
    except np.linalg.LinAlgError:
        raise NotSPDError("mass matrix is not positive definite "
                          "(min eta {:g})".format(float(np.min(eta))))
    return mat, factor


class WeakTerms(namedtuple('WeakTerms', 'inviscid viscous')):
    """
    Right hand side of the coefficient ODE, split so the viscous part
    paired with the coefficients is minus the dissipation; both have
    shape (n, 2)
    """

    def total(self):
        "inviscid + viscous"
        return self.inviscid + self.viscous


def _pair(tensor, scalar, zterm, system):
    """
    ∫ Σ_j tensor[j, c] ∂_j e_i + scalar[c] e_i + zterm[c] ∂_z e_i
    """
    tab = system.table3d
    wts = system.weights
    ex, ey, ez, ev = tab.dx(), tab.dy(), tab.dz(), tab.values()
    out = np.zeros((len(tab.H), 2))
    for c in range(2):
        acc = np.einsum('izyx,zyx->i', ex, tensor[0, c] * wts)
        acc = acc + np.einsum('izyx,zyx->i', ey, tensor[1, c] * wts)
        if scalar is not None:
            acc = acc + np.einsum('izyx,zyx->i', ev, scalar[c] * wts)
        acc = acc + np.einsum('izyx,zyx->i', ez, zterm[c] * wts)
        out[:, c] = acc
    return out


def weak_momentum(a, b, w, system):
    """
    The weak momentum forces F_i at one instant ::

        ∫ρv⊗v:∇e + ρwv·∂_z e + ρ^γ div e - ρ𝒟v:∇e - ρ∂_z v·∂_z e
          - √ε ρ∇v:∇e + εηΔη v·e - ε(η|∇η|²∇η⊗v):∇e
          - ε|∇η|⁴ v·e - ερ|v|³ v·e
    """
    prm = system.params
    eps = prm.epsilon
    dens = density_state(b, system.table2d)
    vel = velocity_state(a, system.table3d)
    eta, grad = dens.eta, dens.grad
    rho = eta ** 2
    v, dv = vel.v, vel.dv
    grad2 = grad[0] ** 2 + grad[1] ** 2
    speed2 = v[0] ** 2 + v[1] ** 2
    strain = 0.5 * (dv + dv.swapaxes(0, 1))
    # inviscid: tensor[j, c]
    tensor = rho * v[:, np.newaxis] * v[np.newaxis]
    tensor = tensor - eps * (eta * grad2 * grad)[:, np.newaxis,
                                                 np.newaxis] * v[np.newaxis]
    pressure = rho ** prm.gamma
    tensor[0, 0] += pressure
    tensor[1, 1] += pressure
    scalar = (eps * eta * dens.lap - eps * grad2 ** 2 -
              eps * rho * speed2 ** 1.5) * v
    inviscid = _pair(tensor, scalar, rho * w * v, system)
    viscous = _pair(-rho * (strain + math.sqrt(eps) * dv), None,
                    -rho * vel.dz, system)
    return WeakTerms(inviscid=inviscid, viscous=viscous)

# ---------------------------------------------------------------------
# fixed point
# ---------------------------------------------------------------------


class GalerkinState(namedtuple('GalerkinState',
                               ['times', 'a', 'eta_coeffs', 'M', 'trace',
                                'contraction', 'T_n', 'weak_residual'])):
    """
    Converged window of the fixed point iteration

    :param times: inner time grid, shape (K+1,)
    :param a: velocity coefficients, shape (K+1, n, 2)
    :param eta_coeffs: density coefficients, shape (K+1, m)
    :param M: mass matrix at the final time
    :param trace: [(iteration, residual, ratio, T_n)] over all attempts
    :param contraction: largest residual ratio after the first iterate
    :param T_n: window length actually used
    :param weak_residual: sup over the grid of |M a - M a(0) - ∫F|
    """


def _cumulative_trapezoid(values, times):
    "∫₀^{t_k} on a (K+1, ...) stack"
    out = np.zeros_like(values)
    steps = np.diff(times)
    for k in range(1, len(times)):
        out[k] = out[k - 1] + 0.5 * steps[k - 1] * (values[k - 1] +
                                                    values[k])
    return out


def _apply_q(a_traj, times, b0, system):
    """
    One application of Q; also returns what it was computed from
    """
    bs, ws = solve_map_S(a_traj, times, b0, system)
    forces = np.array([weak_momentum(a, b, w, system).total()
                       for a, b, w in zip(a_traj, bs, ws)])
    mats = [mass_matrix(b, system) for b in bs]
    start = np.dot(mats[0][0], a_traj[0])
    integral = _cumulative_trapezoid(forces, times)
    new = np.array([scipy.linalg.cho_solve(fac, start + integral[k])
                    for k, (_, fac) in enumerate(mats)])
    new[0] = a_traj[0]
    return new, bs, mats, forces


def weak_residual(a_traj, times, b0, system):
    """
    sup_k |M_k a_k - M_0 a_0 - ∫₀^{t_k} F| for a given trajectory, with
    the density and forces recomputed from it
    """
    bs, ws = solve_map_S(a_traj, times, b0, system)
    forces = np.array([weak_momentum(a, b, w, system).total()
                       for a, b, w in zip(a_traj, bs, ws)])
    mats = [mass_matrix(b, system)[0] for b in bs]
    integral = _cumulative_trapezoid(forces, times)
    start = np.dot(mats[0], a_traj[0])
    return max(float(np.max(np.abs(np.dot(mat, a) - start - integral[k])))
               for k, (mat, a) in enumerate(zip(mats, a_traj)))


def _attempt(a0, b0, T_n, system, trace):
    """
    Picard iteration on one window; returns the converged trajectory
    or None if it stopped contracting
    """
    prm = system.params
    times = np.linspace(0.0, T_n, prm.inner_steps + 1)
    a_traj = np.repeat(np.asarray(a0, dtype=float)[np.newaxis],
                       len(times), axis=0)
    previous = None
    for it in range(1, prm.max_iter + 1):
        new, _, _, _ = _apply_q(a_traj, times, b0, system)
        residual = float(np.max(np.abs(new - a_traj)))
        ratio = residual / previous if previous else 0.0
        trace.append((it, residual, ratio, T_n))
        a_traj = new
        if residual < prm.tol:
            return times, a_traj
        if it > 2 and ratio >= 1:
            _LOG.info("no contraction at T_n = %g (ratio %g)", T_n, ratio)
            return None
        previous = residual
    _LOG.info("no convergence within %d iterations at T_n = %g",
              prm.max_iter, T_n)
    return None


def fixed_point_iterate(a0, b0, system, T_n=None):
    """
    Converged fixed point of Q from initial coefficients, halving the
    window until Picard iteration contracts ::

        (ndarray (n, 2), ndarray (m,), GalerkinSystem, Maybe Float)
        -> GalerkinState
    """
    prm = system.params
    T_n = prm.T_n if T_n is None else T_n
    trace = []
    for _ in range(prm.max_halvings + 1):
        found = _attempt(a0, b0, T_n, system, trace)
        if found is not None:
            times, a_traj = found
            bs, _ = solve_map_S(a_traj, times, b0, system)
            ratios = [r for i, _, r, tn in trace if tn == T_n and i > 1]
            return GalerkinState(
                times=times, a=a_traj, eta_coeffs=bs,
                M=mass_matrix(bs[-1], system)[0], trace=trace,
                contraction=max(ratios) if ratios else 0.0, T_n=T_n,
                weak_residual=weak_residual(a_traj, times, b0, system))
        T_n *= 0.5
        _LOG.warning("halving the fixed point window to T_n = %g", T_n)
    raise NoContractionError("fixed point iteration does not contract "
                             "even with T_n = {:g}".format(T_n * 2))


class GalerkinTrajectory(namedtuple('GalerkinTrajectory',
                                    'times a eta_coeffs windows')):
    """
    Fixed point windows chained over [0, T]

    :param windows: the `GalerkinState` of each window
    """


def run_galerkin(a0, b0, T, system):
    """
    Continue window by window until T is reached
    """
    times, coeffs, etas, windows = [0.0], [np.asarray(a0, dtype=float)], \
        [np.asarray(b0, dtype=float)], []
    t_now = 0.0
    while T - t_now > 1e-12 * max(1.0, T):
        span = min(system.params.T_n, T - t_now)
        state = fixed_point_iterate(coeffs[-1], etas[-1], system, T_n=span)
        windows.append(state)
        times.extend(t_now + state.times[1:])
        coeffs.extend(state.a[1:])
        etas.extend(state.eta_coeffs[1:])
        t_now += state.T_n
    return GalerkinTrajectory(times=np.array(times), a=np.array(coeffs),
                              eta_coeffs=np.array(etas), windows=windows)

# ---------------------------------------------------------------------
# energy
# ---------------------------------------------------------------------


class EnergyBudget(namedtuple('EnergyBudget',
                              'kinetic power dissipation exchange')):
    """
    Terms of d/dt(½∫η²|v|²) = power - dissipation - exchange

    :param kinetic: ½∫η²|v|²
    :param power: inviscid forces paired with v
    :param dissipation: ∫η²(|𝒟v|² + |∂_z v|² + √ε|∇_h v|²)
    :param exchange: ∫η ∂_tη |v|²
    """


class EnergyAudit(namedtuple('EnergyAudit', 'times residuals flagged tol')):
    """
    :param times: midpoints of the audited steps
    :param residuals: per-step defect of the energy identity
    :param flagged: [(t, residual)] above tolerance
    """

    @property
    def max_residual(self):
        "largest |residual|"
        return float(np.max(np.abs(self.residuals))) if \
            len(self.residuals) else 0.0


def energy_budgets(traj, system):
    """
    One `EnergyBudget` per stored time of a trajectory
    """
    out = []
    wts2d = horizontal_weights(system.grid)
    for a, b in zip(traj.a, traj.eta_coeffs):
        dens = density_state(b, system.table2d)
        w = vertical_velocity(a, dens, system.table3d)
        terms = weak_momentum(a, b, w, system)
        mat = mass_matrix(b, system)[0]
        rate = eta_galerkin_rhs(b, depth_mean_velocity(a, system), system)
        deta = density_state_rate(rate, system.table2d)
        speed2 = expand(a, system.table3d)
        speed2 = speed2[0] ** 2 + speed2[1] ** 2
        vint = depth_average(speed2, system.grid)
        out.append(EnergyBudget(
            kinetic=0.5 * float(np.sum(a * np.dot(mat, a))),
            power=float(np.sum(a * terms.inviscid)),
            dissipation=-float(np.sum(a * terms.viscous)),
            exchange=float(np.sum(dens.eta * deta * vint * wts2d))))
    return out


def density_state_rate(rate, table2d):
    "∂_tη on the grid from coefficient rates"
    H = table2d.H * table2d.Zv[:, 0, np.newaxis, np.newaxis]
    return np.tensordot(rate, H, axes=1)


def galerkin_energy_audit(times, budgets, tol=1e-3):
    """
    Per-step defect of the discrete energy identity (trapezoid in
    time); steps with |defect| > tol·(1 + scale) are flagged ::

        ([Float], [EnergyBudget], Float) -> EnergyAudit
    """
    times = np.asarray(times, dtype=float)
    rates = np.array([bg.power - bg.dissipation - bg.exchange
                      for bg in budgets])
    kinetic = np.array([bg.kinetic for bg in budgets])
    steps = np.diff(times)
    residuals = np.diff(kinetic) / steps - 0.5 * (rates[1:] + rates[:-1])
    scale = max([1.0] + [abs(bg.power) + abs(bg.dissipation) +
                         abs(bg.exchange) for bg in budgets])
    mids = 0.5 * (times[1:] + times[:-1])
    flagged = [(float(t), float(r)) for t, r in zip(mids, residuals)
               if abs(r) > tol * scale]
    return EnergyAudit(times=mids, residuals=residuals, flagged=flagged,
                       tol=tol)

# ---------------------------------------------------------------------
# demo data and comparison with the grid solver
# ---------------------------------------------------------------------


def demo_coefficients(system, amplitude):
    """
    Deterministic small data: alternating velocity coefficients
    decaying with the mode index, density root 1 plus a small wobble
    """
    n, m = len(system.basis3d), len(system.basis2d)
    a0 = np.array([[amplitude * (-1) ** (i + c) / (1.0 + i)
                    for c in range(2)] for i in range(n)])
    b0 = np.zeros(m)
    b0[0] = 1.0
    for i in range(1, m):
        b0[i] = 0.2 * amplitude / i
    return a0, b0


def project_onto(field, basis, grid):
    """
    Coefficients of a grid field (scalar 2D density root or 3D vector
    velocity) against a basis, using the grid's own quadrature
    """
    table = tabulate(basis, grid)
    weights = quadrature_weights(grid)
    if field.ndim == 2:
        return project(np.broadcast_to(field, grid.shape3d), table, weights)
    return project(field, table, weights)


def expand_onto(coeffs, basis, grid):
    """
    Grid field from coefficients (2D for density bases)
    """
    out = expand(coeffs, tabulate(basis, grid))
    if np.asarray(coeffs).ndim == 1:
        return out[0]
    return out

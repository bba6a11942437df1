"""
Admissible initial data, their ε-approximations and the bound 𝔈₀
"""

# license: Public domain

from collections import namedtuple
import logging

import numpy as np

from .domain import grad_h, integral_omega, integral_omega_h, norm2_h
from .errors import ConfigError, InadmissibleDataError

_LOG = logging.getLogger(__name__)

RHO_PROFILES = ['constant', 'sine', 'bump', 'patch']
V_PROFILES = ['zero', 'uniform', 'shear', 'swirl']

# strict-bound gap for the approximating data
_MARGIN = 1e-6

# ---------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------


class InitConfig(namedtuple('InitConfig',
                            ['gamma', 'p0', 'varpi', 'epsilon',
                             'rho_profile', 'rho_mean', 'rho_amp',
                             'v_profile', 'v_amp'])):
    """
    Parameters of the ε-system and the shape of the initial data

    :param gamma: adiabatic exponent γ > 1
    :param p0: drag exponent, p0 > max(24, γ-1)
    :param varpi: the ϖ > 0 of the initial integrability condition
    :param epsilon: regularisation strength in (0, 1)
    :param rho_profile: one of `RHO_PROFILES`
    :param rho_mean: mean level of ρ₀
    :param rho_amp: amplitude of the ρ₀ perturbation
    :param v_profile: one of `V_PROFILES`
    :param v_amp: amplitude of v₀
    """

    def validate(self):
        """
        Raise `ConfigError` unless the parameters are admissible;
        return self otherwise
        """
        if not self.gamma > 1:
            raise ConfigError("gamma must exceed 1 (got {})"
                              .format(self.gamma))
        if not self.varpi > 0:
            raise ConfigError("varpi must be positive (got {})"
                              .format(self.varpi))
        p0_min = max(24.0, self.gamma - 1)
        if not self.p0 > p0_min:
            raise ConfigError("p0 must exceed max(24, gamma - 1) = {} "
                              "(got {})".format(p0_min, self.p0))
        if not 0 < self.epsilon < 1:
            raise ConfigError("epsilon must lie in (0, 1) (got {})"
                              .format(self.epsilon))
        if self.rho_profile not in RHO_PROFILES:
            raise ConfigError("unknown rho_profile {!r} (expected one of {})"
                              .format(self.rho_profile,
                                      ", ".join(RHO_PROFILES)))
        if self.v_profile not in V_PROFILES:
            raise ConfigError("unknown v_profile {!r} (expected one of {})"
                              .format(self.v_profile,
                                      ", ".join(V_PROFILES)))
        return self


DEFAULT_INIT = InitConfig(gamma=2.0, p0=25.0, varpi=1.0, epsilon=1e-2,
                          rho_profile='sine', rho_mean=1.0, rho_amp=0.1,
                          v_profile='swirl', v_amp=0.2)


class InitData(namedtuple('InitData', 'rho0 v0 m0 e0_bound')):
    """
    :param rho0: ρ₀ ≥ 0, shape (ny, nx)
    :param v0: v₀, shape (2, nz, ny, nx)
    :param m0: ρ₀v₀ (zero on vacuum)
    :param e0_bound: 𝔈₀
    """

# ---------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------


def _rho_profile(cfg, grid):
    "ρ₀ on the torus"
    xx, yy = grid.mesh2d()
    if cfg.rho_profile == 'constant':
        return np.full(grid.shape2d, float(cfg.rho_mean))
    elif cfg.rho_profile == 'sine':
        return cfg.rho_mean + cfg.rho_amp * np.sin(2 * np.pi * xx)
    elif cfg.rho_profile == 'bump':
        return cfg.rho_mean + cfg.rho_amp * (np.cos(2 * np.pi * xx) *
                                             np.cos(2 * np.pi * yy))
    else:
        # vacuum wherever the sine dips below zero
        return np.maximum(cfg.rho_mean + cfg.rho_amp * np.sin(2 * np.pi * xx),
                          0.0)


def _v_profile(cfg, grid):
    "v₀ on the channel; cosine in z so ∂_z v₀ = 0 at the walls"
    xx, yy, zz = grid.mesh3d()
    amp = cfg.v_amp
    zero = np.zeros(grid.shape3d)
    if cfg.v_profile == 'zero':
        return np.stack([zero, zero])
    elif cfg.v_profile == 'uniform':
        return np.stack([zero + amp, zero])
    elif cfg.v_profile == 'shear':
        return np.stack([amp * np.cos(np.pi * zz) * np.sin(2 * np.pi * yy),
                         zero])
    else:
        vert = 0.5 + np.cos(np.pi * zz)
        return np.stack([-amp * vert * np.sin(2 * np.pi * yy),
                         amp * vert * np.sin(2 * np.pi * xx)])


def _speed(v):
    "|v| pointwise"
    return np.sqrt(norm2_h(v))

# ---------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------


def e0_bound(rho0, v0, gamma, varpi, grid):
    """
    𝔈₀ = ‖ρ₀⁻¹m₀²‖₁ + ‖ρ₀^{-1-ϖ}|m₀|^{2+ϖ}‖₁ + ‖∇ρ₀^{1/2}‖₂
         + ‖ρ₀‖₁ + ‖ρ₀‖_γ^γ

    Vacuum contributes nothing to the velocity terms (we write them
    as ρ₀|v₀|² and ρ₀|v₀|^{2+ϖ}).
    """
    speed = _speed(v0)
    kinetic = integral_omega(rho0 * speed ** 2)
    higher = integral_omega(rho0 * speed ** (2 + varpi))
    grad_root = np.sqrt(integral_omega_h(norm2_h(grad_h(np.sqrt(rho0),
                                                         grid))))
    return (kinetic + higher + grad_root + integral_omega_h(rho0) +
            integral_omega_h(rho0 ** gamma))


def build_initial_data(cfg, grid):
    """
    Smooth trigonometric initial data for the given configuration ::

        (InitConfig, Grid) -> InitData
    """
    cfg.validate()
    rho0 = _rho_profile(cfg, grid)
    if np.any(rho0 < 0) or not np.all(np.isfinite(rho0)):
        raise InadmissibleDataError("initial density must be finite and "
                                    "non-negative (min = {:g})"
                                    .format(float(np.min(rho0))))
    v0 = _v_profile(cfg, grid)
    vacuum = rho0 == 0
    if np.any(vacuum) and np.any(_speed(v0)[:, vacuum] > 0):
        raise InadmissibleDataError("initial velocity must vanish on the "
                                    "vacuum set {rho0 = 0}")
    m0 = rho0 * v0
    e0 = e0_bound(rho0, v0, cfg.gamma, cfg.varpi, grid)
    if not np.isfinite(e0):
        raise InadmissibleDataError("initial energy bound is not finite")
    return InitData(rho0=rho0, v0=v0, m0=m0, e0_bound=e0)


def density_bounds(eps, p0):
    """
    The open interval (ε^{1/p0+1}, ε^{-1/p0-1}) that approximating
    densities must sit in ::

        (Float, Float) -> (Float, Float)
    """
    expo = 1.0 / p0 + 1.0
    return eps ** expo, eps ** -expo


def c0_bound(data, cfg, grid):
    """
    C₀: twice the initial quantities the approximating data must stay
    below
    """
    return 2 * e0_bound(data.rho0, data.v0, cfg.gamma, cfg.varpi, grid)


def approximation_functional(rho, v, eps, cfg, grid):
    """
    Left-hand side of the C₀ inequality for approximating data
    """
    speed = _speed(v)
    grad_root = norm2_h(grad_h(np.sqrt(rho), grid))
    return (integral_omega(rho * speed ** 2) +
            integral_omega_h(rho ** cfg.gamma) +
            integral_omega_h(rho) +
            integral_omega_h(grad_root) +
            integral_omega(rho * speed ** (2 + cfg.varpi)) +
            eps * integral_omega_h(rho ** -cfg.p0) +
            eps * integral_omega_h(grad_root ** 2))


def approximate_rho(rho0, eps, p0):
    """
    Lift by 2ε^{1/p0+1} then clamp strictly inside the admissible
    interval
    """
    lower, upper = density_bounds(eps, p0)
    return np.clip(rho0 + 2 * lower,
                   lower * (1 + _MARGIN),
                   upper * (1 - _MARGIN))


def approximate_initial_data(data, eps, cfg, grid):
    """
    The ε-approximating initial data ::

        (InitData, Float, InitConfig, Grid) -> (Field2D, Vector3D)

    Returns η = ρ_{ε,0}^{1/2} and v_{ε,0} = v₀.
    """
    if not 0 < eps < 1:
        raise ConfigError("epsilon must lie in (0, 1) (got {})".format(eps))
    lower, upper = density_bounds(eps, cfg.p0)
    rho = approximate_rho(data.rho0, eps, cfg.p0)
    if not (np.all(rho > lower) and np.all(rho < upper)):
        raise InadmissibleDataError("approximating density escapes "
                                    "({:g}, {:g})".format(lower, upper))
    lhs = approximation_functional(rho, data.v0, eps, cfg, grid)
    rhs = c0_bound(data, cfg, grid)
    if not lhs < rhs:
        raise InadmissibleDataError(
            "approximating data violate the C0 bound: {:g} >= {:g} "
            "(profile inadmissible at epsilon = {:g})".format(lhs, rhs, eps))
    _LOG.debug("approximating data: C0 functional %g < %g", lhs, rhs)
    return np.sqrt(rho), data.v0.copy()


def approximation_gap(data, eps, p0):
    """
    ‖ρ_{ε,0} - ρ₀‖_{L¹}, which should vanish with ε
    """
    return integral_omega_h(np.abs(approximate_rho(data.rho0, eps, p0) -
                                   data.rho0))

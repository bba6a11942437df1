"""
The horizontal velocity equation in non-conservative form

::

    ∂_t v = (½+√ε)Δ_h v + ∂_zz v + ½∇_h div_h v + g

with g gathering transport, pressure and the ε drags. The conservative
momentum form is kept alongside as a cross-check.
"""

# license: Public domain

from collections import namedtuple
import logging

import numpy as np

from .domain import (d_z, d_zz, div_h, grad_h, integral_omega, lap_h,
                     norm2_h)
from .density import check_positive
from .errors import NumericalError
from .vertical import reconstruct_w

_LOG = logging.getLogger(__name__)

DEFAULT_CFL = 0.9


class MomentumStepParams(namedtuple('MomentumStepParams',
                                    ['epsilon', 'p0', 'gamma', 'dt',
                                     'cfl'])):
    """
    :param epsilon: ε > 0
    :param p0: drag exponent
    :param gamma: adiabatic exponent
    :param dt: time step
    :param cfl: safety factor for `stable_dt`
    """


def mk_momentum_params(epsilon, p0, gamma, dt, cfl=DEFAULT_CFL):
    "validated momentum parameters"
    if not dt > 0:
        raise ValueError("dt must be positive (got {})".format(dt))
    return MomentumStepParams(epsilon=epsilon, p0=p0, gamma=gamma, dt=dt,
                              cfl=cfl)


def _contract(a, dv):
    """
    Σ_j a_j ∂_j v_i for a two-component a and ``dv = grad_h(v)``
    """
    return a[0] * dv[0] + a[1] * dv[1]


def _contract_transposed(a, dv):
    "Σ_j ∂_i v_j a_j"
    return dv[:, 0] * a[0] + dv[:, 1] * a[1]


def _speed(v):
    "|v|"
    return np.sqrt(norm2_h(v))


def pressure_term(eta, grid, gamma):
    """
    ρ⁻¹∇_h ρ^γ on the torus
    """
    rho = eta ** 2
    return grad_h(rho ** gamma, grid) / rho


def momentum_source(eta, v, w, grid, params):
    """
    The source g ::

        (Field2D, Vector3D, Field3D, Grid, MomentumStepParams) -> Vector3D
    """
    check_positive(eta, "momentum source")
    eps = params.epsilon
    geta = grad_h(eta, grid)
    glog = 2 * geta / eta
    dv = grad_h(v, grid)
    out = (0.5 + np.sqrt(eps)) * _contract(glog, dv)
    out += 0.5 * _contract_transposed(glog, dv)
    out -= _contract(v, dv)
    out -= w * d_z(v, grid)
    out -= pressure_term(eta, grid, params.gamma)[:, np.newaxis]
    out += eps * (norm2_h(geta) / eta) * _contract(geta, dv)
    out -= eps * eta ** (-2 * params.p0 - 2) * v
    out -= eps * _speed(v) ** 3 * v
    return out


def viscous_part(v, grid, eps):
    "(½+√ε)Δ_h v + ∂_zz v + ½∇_h div_h v"
    return ((0.5 + np.sqrt(eps)) * lap_h(v, grid) + d_zz(v, grid) +
            0.5 * grad_h(div_h(v, grid), grid))


def momentum_rhs(eta, v, w, grid, params):
    """
    ∂_t v
    """
    return viscous_part(v, grid, params.epsilon) + \
        momentum_source(eta, v, w, grid, params)


def drag_pairing(eta, v, params):
    """
    ∫(-ερ^{-p0-1}v - ε|v|³v)·ρv, never positive
    """
    eps = params.epsilon
    rho = eta ** 2
    speed2 = norm2_h(v)
    return integral_omega(-eps * rho ** (-params.p0) * speed2 -
                          eps * rho * speed2 ** 2.5)


def momentum_flux_rhs(eta, v, w, grid, params):
    """
    ∂_t(ρv) from the conservative momentum equation; to O(h²) this is
    ``ρ·momentum_rhs + v·∂_tρ`` on smooth states
    """
    check_positive(eta, "momentum flux")
    eps = params.epsilon
    rho = eta ** 2
    geta = grad_h(eta, grid)
    dv = grad_h(v, grid)  # dv[j, i] = ∂_j v_i
    strain = 0.5 * (dv + dv.swapaxes(0, 1))
    grad4 = norm2_h(geta)
    # tensors T[j, i] whose horizontal divergence Σ_j ∂_j T[j, i] we need
    advective = rho * v[np.newaxis] * v[:, np.newaxis]
    viscous = rho * (strain + np.sqrt(eps) * dv)
    regular = eps * (eta * grad4 * geta)[:, np.newaxis, np.newaxis] * \
        v[np.newaxis]
    tensor = viscous + regular - advective
    out = np.stack([div_h(tensor[:, 0], grid), div_h(tensor[:, 1], grid)])
    out -= d_z(rho * w * v, grid, neumann=False)
    out -= grad_h(rho ** params.gamma, grid)[:, np.newaxis]
    out += rho * d_zz(v, grid)
    out += eps * eta * lap_h(eta, grid) * v
    out -= eps * grad4 ** 2 * v
    out -= eps * rho * _speed(v) ** 3 * v
    return out

# ---------------------------------------------------------------------
# stepping
# ---------------------------------------------------------------------


def stable_dt(grid, params):
    """
    Linear viscous bound for Heun: 2/λ_max times the safety factor,
    with λ_max from the horizontal stencils and the ∂_zz term
    """
    lam_h = (2 * (0.5 + np.sqrt(params.epsilon)) + 1) / grid.h ** 2
    lam_z = 4 / grid.hz ** 2
    return params.cfl * 2 / (lam_h + lam_z)


def check_finite(v, what="velocity"):
    "NaN guard"
    if not np.all(np.isfinite(v)):
        raise NumericalError("{}: non-finite values".format(what))


def step_momentum(eta, v, grid, params, w=None, check_cfl=True):
    """
    One Heun step with η frozen; w is reconstructed from each stage's
    (η, v) unless supplied for the first stage
    """
    if check_cfl and params.dt > stable_dt(grid, params):
        _LOG.warning("momentum step dt = %g exceeds stability bound %g",
                     params.dt, stable_dt(grid, params))
    dt = params.dt
    if w is None:
        w = reconstruct_w(eta, v, grid)
    k1 = momentum_rhs(eta, v, w, grid, params)
    v1 = v + dt * k1
    k2 = momentum_rhs(eta, v1, reconstruct_w(eta, v1, grid), grid, params)
    out = v + 0.5 * dt * (k1 + k2)
    check_finite(out)
    return out

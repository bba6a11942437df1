"""
The density layer: the regulariser G(ρ) and the η = ρ^{1/2} equation

::

    2∂_t η = ε div_h((1+|∇η|²)∇η) - div_h(η v̄) - v̄·∇η
             + ε (η² + δ)^{-p0-1/2}
"""

# license: Public domain

from collections import namedtuple
import logging

import numpy as np

from .domain import (div_h, dot_h, grad_h, integral_omega_h, lap_h,
                     norm2_h)
from .errors import DegenerateDensityError

_LOG = logging.getLogger(__name__)

DEFAULT_CFL = 0.5


class DensityStepParams(namedtuple('DensityStepParams',
                                   ['epsilon', 'p0', 'delta', 'dt',
                                    'rho_floor', 'cfl'])):
    """
    :param epsilon: ε > 0
    :param p0: drag exponent
    :param delta: δ ≥ 0 (0 for the unregularised singular term)
    :param dt: time step
    :param rho_floor: abort once min ρ drops below this
    :param cfl: safety factor for `stable_dt`
    """


def mk_density_params(epsilon, p0, dt, delta=0.0, rho_floor=None,
                      cfl=DEFAULT_CFL):
    """
    Density parameters, with the floor defaulting to
    `default_rho_floor`
    """
    if rho_floor is None or rho_floor <= 0:
        rho_floor = default_rho_floor(epsilon, p0)
    if not dt > 0:
        raise ValueError("dt must be positive (got {})".format(dt))
    if delta < 0:
        raise ValueError("delta must be non-negative (got {})".format(delta))
    return DensityStepParams(epsilon=epsilon, p0=p0, delta=delta, dt=dt,
                             rho_floor=rho_floor, cfl=cfl)


def default_rho_floor(eps, p0):
    "ε^{2/p0+2}/10"
    return eps ** (2.0 / p0 + 2.0) / 10.0


def check_positive(eta, what="density"):
    """
    Raise `DegenerateDensityError` unless η is finite and positive
    """
    if not np.all(np.isfinite(eta)):
        raise DegenerateDensityError("{}: non-finite eta".format(what))
    low = float(np.min(eta))
    if low <= 0:
        raise DegenerateDensityError("{}: min eta = {:g} <= 0"
                                     .format(what, low))

# ---------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------


def p_laplacian(eta, grid):
    "div_h(|∇η|²∇η)"
    geta = grad_h(eta, grid)
    return div_h(norm2_h(geta) * geta, grid)


def monotonicity_pairing(eta1, eta2, grid):
    """
    -∫(Δ₄η₁ - Δ₄η₂)(η₁ - η₂), non-negative for any pair
    """
    diff = p_laplacian(eta1, grid) - p_laplacian(eta2, grid)
    return -integral_omega_h(diff * (eta1 - eta2))


def g_regularizer(eta, grid, eps, p0):
    """
    G(ρ) = ε η Δ_h η + ε η div_h(|∇η|²∇η) + ε η^{-2p0}, written in η
    """
    check_positive(eta, "G(rho)")
    return eps * (eta * lap_h(eta, grid) + eta * p_laplacian(eta, grid) +
                  eta ** (-2 * p0))


def singular_source(eta, eps, p0, delta):
    """
    ε (η² + δ)^{-p0-1/2}, guarded against overflow
    """
    base = eta ** 2 + delta
    if not np.all(base > 0):
        raise DegenerateDensityError("singular term: eta^2 + delta <= 0")
    with np.errstate(over='ignore'):
        out = eps * base ** (-p0 - 0.5)
    if not np.all(np.isfinite(out)):
        raise DegenerateDensityError("singular term overflows (min eta = "
                                     "{:g})".format(float(np.min(eta))))
    return out


def density_rhs(eta, vbar, grid, params):
    """
    ∂_t η (the right hand side above, halved) ::

        (Field2D, Vector2D, Grid, DensityStepParams) -> Field2D
    """
    check_positive(eta, "density_rhs")
    eps = params.epsilon
    geta = grad_h(eta, grid)
    diffusion = div_h((1 + norm2_h(geta)) * geta, grid)
    transport = div_h(eta * vbar, grid) + dot_h(vbar, geta)
    return 0.5 * (eps * diffusion - transport +
                  singular_source(eta, eps, params.p0, params.delta))

# ---------------------------------------------------------------------
# stepping
# ---------------------------------------------------------------------


def stable_dt(eta, grid, params):
    """
    c_cfl · min(h², h²/(ε max(1+|∇η|²)))
    """
    h2 = grid.h ** 2
    stiff = params.epsilon * float(np.max(1 + norm2_h(grad_h(eta, grid))))
    return params.cfl * min(h2, h2 / stiff)


def check_floor(eta, params):
    "abort once ρ = η² dips under the floor"
    check_positive(eta, "density step")
    low = float(np.min(eta)) ** 2
    if low < params.rho_floor:
        raise DegenerateDensityError("min rho = {:g} fell below rho_floor "
                                     "= {:g}".format(low, params.rho_floor))


def step_density(eta, vbar, grid, params, check_cfl=True):
    """
    One Heun (RK2) step with v̄ frozen
    """
    if check_cfl:
        bound = stable_dt(eta, grid, params)
        if params.dt > bound:
            _LOG.warning("density step dt = %g exceeds stability bound %g",
                         params.dt, bound)
    dt = params.dt
    k1 = density_rhs(eta, vbar, grid, params)
    k2 = density_rhs(eta + dt * k1, vbar, grid, params)
    out = eta + 0.5 * dt * (k1 + k2)
    check_floor(out, params)
    return out

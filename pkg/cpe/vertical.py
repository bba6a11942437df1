"""
Depth averages, fluctuations and the diagnostic vertical velocity

The depth average and the cumulative integral behind w share the same
trapezoid sums, so w vanishes at the lid up to rounding.
"""

# license: Public domain

from collections import namedtuple

import numpy as np

from .domain import div_h, d_z
from .errors import DegenerateDensityError


class VerticalDecomposition(namedtuple('VerticalDecomposition',
                                       'vbar vtilde')):
    """
    v = vbar + vtilde

    :param vbar: depth average, shape (2, ny, nx)
    :param vtilde: fluctuation, shape (2, nz, ny, nx), zero mean in z
    """


def cumulative_trapezoid(f, grid):
    """
    C_k = ∫₀^{z_k} f dz on the nodes (axis -3), with C_0 = 0 exactly
    """
    halves = 0.5 * (f[..., 1:, :, :] + f[..., :-1, :, :])
    out = np.zeros_like(f)
    out[..., 1:, :, :] = np.cumsum(halves, axis=-3) * grid.hz
    return out


def depth_average(f, grid):
    """
    ∫₀¹ f dz, taken as the top value of the cumulative trapezoid ::

        (..., nz, ny, nx) -> (..., ny, nx)
    """
    return cumulative_trapezoid(f, grid)[..., -1, :, :]


def decompose(v, grid):
    """
    Split v into depth average and fluctuation
    """
    vbar = depth_average(v, grid)
    return VerticalDecomposition(vbar, v - np.expand_dims(vbar, -3))


def _check_positive(eta):
    "raise unless η > 0 everywhere"
    if not np.all(eta > 0):
        raise DegenerateDensityError(
            "vertical velocity needs eta > 0 (min eta = {:g})"
            .format(float(np.min(eta))))


def reconstruct_w(eta, v, grid):
    """
    w = -ρ⁻¹ ∫₀^z div_h(ρ ṽ) dz' with ρ = η²

    ::

        (Field2D, Vector3D, Grid) -> Field3D
    """
    _check_positive(eta)
    rho = eta ** 2
    vtilde = decompose(v, grid).vtilde
    flux = div_h(rho * vtilde, grid)
    return -cumulative_trapezoid(flux, grid) / rho


def continuity_residual(eta, v, w, grid):
    """
    ∂_z(ρw) + div_h(ρṽ), which should be O(h²) for the w we
    reconstruct
    """
    rho = eta ** 2
    vtilde = decompose(v, grid).vtilde
    return d_z(rho * w, grid, neumann=False) + div_h(rho * vtilde, grid)

"""
The periodic channel T² × (0,1) and its difference calculus

Conventions (all fields are plain numpy arrays)::

    type Field2D  = ndarray (ny, nx)        -- z-independent
    type Field3D  = ndarray (nz, ny, nx)
    type Vector   = ndarray (2, ...)        -- component index first

Horizontal operators act on the last two axes, so they work level by
level on 3D fields and componentwise on vectors. Vertical operators act
on axis -3.
"""

# license: Public domain

from collections import namedtuple

import numpy as np

from .errors import GridError

# ---------------------------------------------------------------------
# grid
# ---------------------------------------------------------------------


class Grid(namedtuple('Grid', 'nx ny nz')):
    """
    Uniform mesh of the unit torus (cells) times [0,1] (nodes,
    boundaries included)

    :param nx: horizontal cells in x
    :param ny: horizontal cells in y
    :param nz: vertical nodes, counting z=0 and z=1
    """

    @property
    def hx(self):
        "x spacing"
        return 1.0 / self.nx

    @property
    def hy(self):
        "y spacing"
        return 1.0 / self.ny

    @property
    def hz(self):
        "z spacing"
        return 1.0 / (self.nz - 1)

    @property
    def h(self):
        "smallest horizontal spacing"
        return min(self.hx, self.hy)

    @property
    def shape2d(self):
        ":: (Int, Int)"
        return (self.ny, self.nx)

    @property
    def shape3d(self):
        ":: (Int, Int, Int)"
        return (self.nz, self.ny, self.nx)

    def coords(self):
        """
        1D coordinate vectors ::

            Grid -> (ndarray, ndarray, ndarray)  -- x, y, z
        """
        return (np.arange(self.nx) * self.hx,
                np.arange(self.ny) * self.hy,
                np.arange(self.nz) * self.hz)

    def mesh2d(self):
        """
        X, Y arrays of shape (ny, nx)
        """
        x, y, _ = self.coords()
        yy, xx = np.meshgrid(y, x, indexing='ij')
        return xx, yy

    def mesh3d(self):
        """
        X, Y, Z arrays of shape (nz, ny, nx)
        """
        x, y, z = self.coords()
        zz, yy, xx = np.meshgrid(z, y, x, indexing='ij')
        return xx, yy, zz


def mk_grid(nx, ny, nz):
    """
    Validated grid
    """
    nx, ny, nz = int(nx), int(ny), int(nz)
    for name, val in [('nx', nx), ('ny', ny)]:
        if val < 8 or val % 2:
            raise GridError("{} must be even and at least 8 (got {})"
                            .format(name, val))
    if nz < 3:
        raise GridError("nz must be at least 3 (got {})".format(nz))
    return Grid(nx, ny, nz)


# ---------------------------------------------------------------------
# horizontal operators
# ---------------------------------------------------------------------


def ddx(f, grid):
    "centered periodic x difference"
    return (np.roll(f, -1, axis=-1) - np.roll(f, 1, axis=-1)) / (2 * grid.hx)


def ddy(f, grid):
    "centered periodic y difference"
    return (np.roll(f, -1, axis=-2) - np.roll(f, 1, axis=-2)) / (2 * grid.hy)


def grad_h(f, grid):
    """
    Horizontal gradient; the derivative index comes first, so for a
    vector v, ``grad_h(v)[j, i]`` is ∂_j v_i
    """
    return np.stack([ddx(f, grid), ddy(f, grid)])


def div_h(g, grid):
    """
    Horizontal divergence of a two-component field (component index
    first)
    """
    return ddx(g[0], grid) + ddy(g[1], grid)


def lap_h(f, grid):
    """
    Horizontal Laplacian, literally div_h∘grad_h; this is the wide
    (2h) five point stencil per direction
    """
    return div_h(grad_h(f, grid), grid)


def dot_h(a, b):
    "pointwise dot product of two-component fields"
    return a[0] * b[0] + a[1] * b[1]


def norm2_h(a):
    "pointwise squared length of a two-component field"
    return a[0] ** 2 + a[1] ** 2

# ---------------------------------------------------------------------
# vertical operators
# ---------------------------------------------------------------------


def d_z(f, grid, neumann=True):
    """
    Centered z difference on axis -3.

    At the boundaries we either reflect evenly (``neumann``, which
    makes the boundary derivative exactly 0) or fall back to one-sided
    second-order differences.
    """
    out = np.empty_like(f)
    hz = grid.hz
    out[..., 1:-1, :, :] = (f[..., 2:, :, :] - f[..., :-2, :, :]) / (2 * hz)
    if neumann:
        out[..., 0, :, :] = 0.0
        out[..., -1, :, :] = 0.0
    else:
        out[..., 0, :, :] = (-3 * f[..., 0, :, :] + 4 * f[..., 1, :, :]
                             - f[..., 2, :, :]) / (2 * hz)
        out[..., -1, :, :] = (3 * f[..., -1, :, :] - 4 * f[..., -2, :, :]
                              + f[..., -3, :, :]) / (2 * hz)
    return out


def d_zz(f, grid):
    """
    Compact second z difference with even reflection at both walls
    """
    out = np.empty_like(f)
    hz2 = grid.hz ** 2
    out[..., 1:-1, :, :] = (f[..., 2:, :, :] - 2 * f[..., 1:-1, :, :]
                            + f[..., :-2, :, :]) / hz2
    out[..., 0, :, :] = 2 * (f[..., 1, :, :] - f[..., 0, :, :]) / hz2
    out[..., -1, :, :] = 2 * (f[..., -2, :, :] - f[..., -1, :, :]) / hz2
    return out

# ---------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------


def trapezoid_weights(nz):
    """
    Unnormalised trapezoid weights (½, 1, ..., 1, ½); divide the
    weighted sum by nz-1
    """
    wts = np.ones(nz)
    wts[0] = wts[-1] = 0.5
    return wts


def integral_omega_h(f):
    """
    ∫ over the unit torus (periodic midpoint rule); works on the last
    two axes and sums away everything
    """
    ny, nx = f.shape[-2:]
    return float(np.sum(f)) / (nx * ny)


def horizontal_mean(f):
    "per-level (or per-leading-index) torus average"
    ny, nx = f.shape[-2:]
    return np.sum(f, axis=(-2, -1)) / (nx * ny)


def integral_omega(f):
    """
    ∫ over T² × (0,1): torus mean per level, then trapezoid in z.
    ``integral_omega(1) == 1`` holds exactly.
    """
    nz = f.shape[-3]
    levels = horizontal_mean(f)
    wts = trapezoid_weights(nz)
    return float(np.sum(levels * wts)) / (nz - 1)


def lift(f2d, grid):
    """
    Broadcast a z-independent field onto the 3D grid
    """
    return np.broadcast_to(f2d, f2d.shape[:-2] + grid.shape3d)

# ---------------------------------------------------------------------
# convergence helpers
# ---------------------------------------------------------------------


def observed_order(err_coarse, err_fine, ratio=2.0):
    """
    Richardson estimate of the convergence order from the errors at two
    resolutions ::

        (Float, Float, Float) -> Float
    """
    return float(np.log(err_coarse / err_fine) / np.log(ratio))

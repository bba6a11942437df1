"""
Test suite for the few-mode Galerkin sandbox
"""

import unittest
from unittest import mock

import numpy as np

from cpe.density import mk_density_params
from cpe.domain import Grid, observed_order
from cpe.errors import (ConfigError, DegenerateDensityError,
                        NoContractionError, QuadratureError)
from cpe.galerkin import (DEFAULT_PARAMS, Mode, demo_coefficients,
                          density_state, depth_mean_velocity,
                          energy_budgets, eta_galerkin_rhs,
                          expand, expand_onto, fixed_point_iterate,
                          galerkin_energy_audit, gram_matrix, mass_matrix,
                          mk_basis2d, mk_basis3d, mk_system, project,
                          project_onto, quadrature_weights, run_galerkin,
                          tabulate, vertical_velocity)
from cpe.momentum import mk_momentum_params
from cpe.trajectory import step_coupled
from cpe.vertical import reconstruct_w


def _system(**changes):
    "8 velocity modes, 5 density modes"
    return mk_system(8, 5, DEFAULT_PARAMS._replace(**changes))


# pylint: disable=too-many-public-methods, invalid-name
class GalerkinTest(unittest.TestCase):
    "tests for cpe.galerkin"

    @classmethod
    def setUpClass(cls):
        cls.system = _system()
        cls.a0, cls.b0 = demo_coefficients(cls.system, 0.05)

    def assertIdentity(self, mat, tol=1e-10):
        "mat is the identity up to tol"
        self.assertLess(np.max(np.abs(mat - np.eye(len(mat)))), tol)

    def test_basis_order(self):
        "constant first, eigenvalues non-decreasing"
        basis = mk_basis3d(8)
        self.assertEqual(8, len(basis))
        self.assertEqual(Mode(0, 0, 0, 'c'), basis.modes[0])
        self.assertEqual(Mode(0, 0, 1, 'c'), basis.modes[1])
        eigs = [md.eigenvalue for md in basis.modes]
        self.assertEqual(sorted(eigs), eigs)
        flat = mk_basis2d(5)
        self.assertEqual(Mode(0, 0, 0, 'c'), flat.modes[0])
        self.assertTrue(all(md.m == 0 for md in flat.modes))
        self.assertEqual(1, flat.kmax)
        self.assertRaises(ValueError, mk_basis3d, 0)

    def test_orthonormal(self):
        "both bases are orthonormal on the quadrature grid"
        sys_ = self.system
        self.assertIdentity(gram_matrix(sys_.table3d, sys_.weights))
        self.assertIdentity(gram_matrix(sys_.table2d, sys_.weights))

    def test_coarse_quadrature(self):
        "cos(2πz) aliases on three vertical nodes"
        grid = Grid(8, 8, 3)
        table = tabulate(mk_basis3d(8), grid)
        drift = np.max(np.abs(gram_matrix(table, quadrature_weights(grid)) -
                              np.eye(8)))
        self.assertGreater(drift, 1e-10)
        with mock.patch('cpe.galerkin.quadrature_grid',
                        return_value=grid):
            self.assertRaises(QuadratureError, mk_system, 8, 5)

    def test_project_expand(self):
        "projection inverts expansion on the span"
        sys_ = self.system
        field = expand(self.a0, sys_.table3d)
        self.assertEqual((2,) + sys_.grid.shape3d, field.shape)
        back = project(field, sys_.table3d, sys_.weights)
        np.testing.assert_allclose(back, self.a0, atol=1e-12)

    def test_mass_matrix_unit_density(self):
        "η = 1 gives the Gram matrix"
        b = np.zeros(5)
        b[0] = 1.0
        mat, _ = mass_matrix(b, self.system)
        self.assertIdentity(mat)

    def test_negative_density(self):
        "a non-positive root is degenerate"
        b = np.zeros(5)
        b[0] = -1.0
        self.assertRaises(DegenerateDensityError, density_state, b,
                          self.system.table2d)
        self.assertRaises(DegenerateDensityError, mass_matrix, b,
                          self.system)

    def test_w_walls(self):
        "w vanishes on both walls"
        sys_ = self.system
        dens = density_state(self.b0, sys_.table2d)
        w = vertical_velocity(self.a0, dens, sys_.table3d)
        self.assertTrue(np.all(w[0] == 0))
        self.assertLess(np.max(np.abs(w[-1])), 1e-12)
        self.assertGreater(np.max(np.abs(w)), 1e-4)

    def test_constant_density_rhs(self):
        "η = 1 at rest only feels the singular source"
        sys_ = self.system
        b = np.zeros(5)
        b[0] = 1.0
        vbar = np.zeros((2,) + sys_.grid.shape2d)
        rate = eta_galerkin_rhs(b, vbar, sys_)
        prm = sys_.params
        self.assertAlmostEqual(0.5 * prm.epsilon *
                               (1 + prm.delta) ** (-prm.p0 - 0.5), rate[0],
                               places=12)
        self.assertLess(np.max(np.abs(rate[1:])), 1e-12)

    def test_fixed_point(self):
        "Picard iteration contracts to a weak solution"
        state = fixed_point_iterate(self.a0, self.b0, self.system)
        self.assertEqual(DEFAULT_PARAMS.T_n, state.T_n)
        self.assertLess(state.contraction, 1.0)
        self.assertLessEqual(state.weak_residual, 1e-6)
        np.testing.assert_array_equal(self.a0, state.a[0])
        self.assertEqual(len(state.times), len(state.eta_coeffs))
        self.assertLess(state.trace[-1][1], DEFAULT_PARAMS.tol)

    def test_no_contraction(self):
        "two iterations and no halving are not enough"
        system = _system(max_iter=2, max_halvings=0)
        self.assertRaises(NoContractionError, fixed_point_iterate, self.a0,
                          self.b0, system)

    def test_energy_audit(self):
        "the discrete energy identity holds step by step"
        traj = run_galerkin(self.a0, self.b0, 0.01, self.system)
        self.assertAlmostEqual(0.01, traj.times[-1])
        audit = galerkin_energy_audit(traj.times,
                                      energy_budgets(traj, self.system))
        self.assertEqual([], audit.flagged)
        self.assertLess(audit.max_residual, 1e-3)

    def test_agrees_with_grid_solver(self):
        "projected grid solution tracks the Galerkin coefficients"
        sys_ = self.system
        grid = Grid(32, 32, 9)
        dt, steps = 2.5e-4, 40
        prm = sys_.params
        dparams = mk_density_params(prm.epsilon, prm.p0, dt,
                                    delta=prm.delta, rho_floor=1e-3)
        mparams = mk_momentum_params(prm.epsilon, prm.p0, prm.gamma, dt)
        eta = expand_onto(self.b0, sys_.basis2d, grid)
        v = expand_onto(self.a0, sys_.basis3d, grid)
        for _ in range(steps):
            eta, v = step_coupled(eta, v, grid, dparams, mparams)
        traj = run_galerkin(self.a0, self.b0, dt * steps, sys_)
        grid_coeffs = project_onto(v, sys_.basis3d, grid)
        scale = float(np.max(np.abs(self.a0)))
        self.assertLess(np.max(np.abs(grid_coeffs - traj.a[-1])),
                        0.05 * scale)

    def test_mode_cap(self):
        "bases stop at 16 modes"
        self.assertRaises(ConfigError, mk_system, 17, 5)
        self.assertRaises(ConfigError, mk_system, 8, 17)

    def test_mass_matrix_quadratic_in_eta(self):
        "scaling η by c scales the mass matrix by c²"
        mat, _ = mass_matrix(self.b0, self.system)
        scaled, _ = mass_matrix(1.7 * self.b0, self.system)
        np.testing.assert_allclose(scaled, 1.7 ** 2 * mat, rtol=1e-12,
                                   atol=1e-14)

    def test_eta_rhs_quadrature_converged(self):
        "doubling the quadrature leaves the projected density rhs alone"
        rates = []
        for sys_ in [self.system, _system(oversample=8)]:
            a0, b0 = demo_coefficients(sys_, 0.005)
            rates.append(eta_galerkin_rhs(
                b0, depth_mean_velocity(a0, sys_), sys_))
        np.testing.assert_allclose(rates[1], rates[0], rtol=0, atol=1e-10)

    def test_w_matches_grid_reconstruction(self):
        "modal w is the continuity integral the grid solver takes"
        sys_ = self.system
        errors = []
        for grid in [Grid(32, 32, 17), Grid(64, 64, 33)]:
            dens = density_state(self.b0, tabulate(sys_.basis2d, grid))
            table = tabulate(sys_.basis3d, grid)
            modal = vertical_velocity(self.a0, dens, table)
            gridded = reconstruct_w(dens.eta, expand(self.a0, table), grid)
            errors.append(float(np.max(np.abs(gridded - modal)) /
                                np.max(np.abs(modal))))
        self.assertLess(errors[1], 1e-2)
        self.assertGreaterEqual(observed_order(errors[0], errors[1]), 1.8)

    def test_energy_audit_flags_wrong_power(self):
        "reversing the sign of the power breaks the energy identity"
        traj = run_galerkin(self.a0, self.b0, 0.005, self.system)
        budgets = energy_budgets(traj, self.system)
        self.assertEqual([], galerkin_energy_audit(traj.times,
                                                   budgets).flagged)
        flipped = [bg._replace(power=-bg.power) for bg in budgets]
        audit = galerkin_energy_audit(traj.times, flipped)
        self.assertNotEqual([], audit.flagged)

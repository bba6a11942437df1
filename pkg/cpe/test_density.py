"""
Test suite for the density layer
"""

import unittest

import numpy as np
from scipy.integrate import solve_ivp

from cpe.density import (check_positive, default_rho_floor, density_rhs,
                         g_regularizer, mk_density_params,
                         monotonicity_pairing, p_laplacian, singular_source,
                         stable_dt, step_density)
from cpe.domain import (Grid, grad_h, integral_omega_h, norm2_h,
                        observed_order)
from cpe.errors import DegenerateDensityError

GRID = Grid(16, 16, 3)


def _eta(grid, amp=0.2):
    "smooth positive density root"
    xx, yy = grid.mesh2d()
    return 1.0 + amp * np.sin(2 * np.pi * xx) * np.cos(4 * np.pi * yy)


# pylint: disable=too-many-public-methods, invalid-name
class DensityTest(unittest.TestCase):
    "tests for cpe.density"

    def test_default_floor(self):
        "ε^{2/p0+2}/10"
        self.assertAlmostEqual(0.01 ** 2.08 / 10, default_rho_floor(0.01, 25))
        params = mk_density_params(0.01, 25.0, 1e-4)
        self.assertAlmostEqual(default_rho_floor(0.01, 25),
                               params.rho_floor)

    def test_params_validation(self):
        "dt must be positive, δ non-negative"
        self.assertRaises(ValueError, mk_density_params, 0.1, 25.0, 0.0)
        self.assertRaises(ValueError, mk_density_params, 0.1, 25.0, 1e-3,
                          delta=-1.0)

    def test_check_positive(self):
        "zeros and NaNs are degenerate"
        eta = _eta(GRID)
        check_positive(eta)
        eta[0, 0] = 0.0
        self.assertRaises(DegenerateDensityError, check_positive, eta)
        eta[0, 0] = np.nan
        self.assertRaises(DegenerateDensityError, check_positive, eta)

    def test_singular_source_overflow(self):
        "a tiny η with δ = 0 overflows into an error, not an inf"
        eta = np.full(GRID.shape2d, 1e-8)
        self.assertRaises(DegenerateDensityError, singular_source, eta, 0.1,
                          25.0, 0.0)
        out = singular_source(eta, 0.1, 25.0, 1.0)
        self.assertTrue(np.all(np.isfinite(out)))

    def test_monotonicity(self):
        "the p-Laplacian pairing is non-negative on random positive pairs"
        rng = np.random.RandomState(7)
        grid = Grid(8, 8, 3)
        for _ in range(100):
            eta1 = 0.5 + rng.random_sample(grid.shape2d)
            eta2 = 0.5 + rng.random_sample(grid.shape2d)
            self.assertGreaterEqual(monotonicity_pairing(eta1, eta2, grid),
                                    -1e-12)

    def test_p_laplacian_of_constant(self):
        "constants are in the kernel"
        self.assertTrue(np.all(p_laplacian(np.full(GRID.shape2d, 2.0),
                                           GRID) == 0))

    def test_transport_conserves_mass(self):
        "without ε, ∫η ∂_t η = 0 by discrete adjointness"
        params = mk_density_params(0.0, 25.0, 1e-3, rho_floor=1e-3)
        xx, yy = GRID.mesh2d()
        vbar = np.stack([np.sin(2 * np.pi * yy), np.cos(2 * np.pi * xx)])
        rate = density_rhs(_eta(GRID), vbar, GRID, params)
        self.assertLess(abs(integral_omega_h(_eta(GRID) * rate)), 1e-12)

    def test_constant_state_ode(self):
        "constant η at rest follows 2η' = ε η^{-2p0-1}"
        eps, p0, dt, steps = 0.1, 25.0, 1e-3, 100
        params = mk_density_params(eps, p0, dt, rho_floor=1e-3)
        eta = np.full(GRID.shape2d, 1.0)
        vbar = np.zeros((2,) + GRID.shape2d)
        for _ in range(steps):
            eta = step_density(eta, vbar, GRID, params)
        self.assertLess(float(np.ptp(eta)), 1e-14)
        oracle = solve_ivp(lambda t, y: 0.5 * eps * y ** (-2 * p0 - 1),
                           (0.0, dt * steps), [1.0], rtol=1e-12,
                           atol=1e-14)
        self.assertAlmostEqual(oracle.y[0, -1], float(eta[0, 0]), places=6)

    def test_stable_dt(self):
        "constant η: c·min(h², h²/ε)"
        params = mk_density_params(0.5, 25.0, 1e-3)
        eta = np.ones(GRID.shape2d)
        self.assertAlmostEqual(0.5 * GRID.h ** 2, stable_dt(eta, GRID, params))
        params = mk_density_params(2.0, 25.0, 1e-3)
        self.assertAlmostEqual(0.5 * GRID.h ** 2 / 2,
                               stable_dt(eta, GRID, params))

    def test_floor_abort(self):
        "a step that leaves ρ under the floor aborts"
        params = mk_density_params(0.1, 25.0, 1e-4, rho_floor=10.0)
        vbar = np.zeros((2,) + GRID.shape2d)
        self.assertRaises(DegenerateDensityError, step_density, _eta(GRID),
                          vbar, GRID, params)

    def test_cfl_warning(self):
        "an over-large dt is logged, not refused"
        params = mk_density_params(0.1, 25.0, 1.0, rho_floor=1e-3)
        vbar = np.zeros((2,) + GRID.shape2d)
        with self.assertLogs('cpe.density', level='WARNING'):
            step_density(np.ones(GRID.shape2d), vbar, GRID, params)

    def test_g_regularizer(self):
        "constants only feel ε η^{-2p0}; the diffusions integrate by parts"
        eta = np.full(GRID.shape2d, 1.1)
        np.testing.assert_allclose(g_regularizer(eta, GRID, 0.1, 25.0),
                                   0.1 * 1.1 ** -50, rtol=1e-14)
        eta = _eta(GRID, amp=0.05)
        grad2 = norm2_h(grad_h(eta, GRID))
        expected = 0.1 * integral_omega_h(eta ** -50 - grad2 - grad2 ** 2)
        total = integral_omega_h(g_regularizer(eta, GRID, 0.1, 25.0))
        self.assertAlmostEqual(expected, total, places=12)

    def test_step_second_order_in_time(self):
        "halving dt quarters the Heun error"
        xx, yy = GRID.mesh2d()
        vbar = 0.3 * np.stack([np.sin(2 * np.pi * yy),
                               np.cos(2 * np.pi * xx)])
        finals = []
        for dt in [1e-3, 5e-4, 2.5e-4]:
            params = mk_density_params(0.1, 25.0, dt, rho_floor=1e-3)
            eta = 0.2 + _eta(GRID, amp=0.1)
            for _ in range(int(round(8e-3 / dt))):
                eta = step_density(eta, vbar, GRID, params)
            finals.append(eta)
        coarse = float(np.max(np.abs(finals[0] - finals[1])))
        fine = float(np.max(np.abs(finals[1] - finals[2])))
        self.assertGreater(fine, 0.0)
        self.assertGreaterEqual(observed_order(coarse, fine), 1.8)

    def test_delta_vanishes_away_from_vacuum(self):
        "with ρ ≥ 0.64 the rhs is linear in a tiny δ and tends to δ = 0"
        eta = _eta(GRID)
        xx, yy = GRID.mesh2d()
        vbar = np.stack([np.sin(2 * np.pi * yy), np.cos(2 * np.pi * xx)])

        def rhs(delta):
            "density rhs at the given δ"
            params = mk_density_params(0.1, 25.0, 1e-4, delta=delta,
                                       rho_floor=1e-3)
            return density_rhs(eta, vbar, GRID, params)

        exact = rhs(0.0)
        np.testing.assert_allclose(rhs(1e-12), exact, rtol=1e-9, atol=1e-9)
        big = float(np.max(np.abs(rhs(1e-8) - exact)))
        small = float(np.max(np.abs(rhs(1e-10) - exact)))
        self.assertGreater(small, 0.0)
        self.assertTrue(90 < big / small < 110, big / small)

    def test_p_laplacian_flow_dissipates(self):
        "∫η Δ₄η = -∫|∇η|⁴, so ∫η² never grows under small Euler steps"
        eta = _eta(GRID)
        grad2 = norm2_h(grad_h(eta, GRID))
        self.assertAlmostEqual(-integral_omega_h(grad2 ** 2),
                               integral_omega_h(eta * p_laplacian(eta, GRID)),
                               places=10)
        norms = [integral_omega_h(eta ** 2)]
        for _ in range(50):
            eta = eta + 1e-5 * p_laplacian(eta, GRID)
            norms.append(integral_omega_h(eta ** 2))
        for before, after in zip(norms, norms[1:]):
            self.assertLess(after, before)

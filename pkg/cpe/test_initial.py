"""
Test suite for initial data and their ε-approximations
"""

import unittest

import numpy as np

from cpe.domain import Grid
from cpe.errors import ConfigError, InadmissibleDataError
from cpe.initial import (DEFAULT_INIT, approximate_initial_data,
                         approximate_rho, approximation_gap,
                         build_initial_data, density_bounds, e0_bound)

GRID = Grid(16, 16, 5)


# pylint: disable=too-many-public-methods, invalid-name
class InitialTest(unittest.TestCase):
    "tests for cpe.initial"

    def assertConfigRejected(self, fragment, **changes):
        "the changed config fails validation with a message naming fragment"
        with self.assertRaises(ConfigError) as ctx:
            DEFAULT_INIT._replace(**changes).validate()
        self.assertIn(fragment, str(ctx.exception))

    def test_default_is_valid(self):
        "shipped defaults pass"
        self.assertEqual(DEFAULT_INIT, DEFAULT_INIT.validate())

    def test_p0_constraint(self):
        "p0 = 20 is below max(24, γ-1)"
        self.assertConfigRejected("max(24, gamma - 1)", p0=20.0)
        self.assertConfigRejected("max(24, gamma - 1) = 29", gamma=30.0,
                                  p0=28.0)

    def test_other_constraints(self):
        "γ, ϖ, ε and the profile names"
        self.assertConfigRejected("gamma", gamma=1.0)
        self.assertConfigRejected("varpi", varpi=0.0)
        self.assertConfigRejected("epsilon", epsilon=1.0)
        self.assertConfigRejected("epsilon", epsilon=0.0)
        self.assertConfigRejected("rho_profile", rho_profile='lumpy')
        self.assertConfigRejected("v_profile", v_profile='vortex')

    def test_e0_constant_state(self):
        "ρ₀ = 1 at rest: 𝔈₀ = ‖ρ₀‖₁ + ‖ρ₀‖_γ^γ = 2"
        cfg = DEFAULT_INIT._replace(rho_profile='constant', v_profile='zero')
        data = build_initial_data(cfg, GRID)
        self.assertAlmostEqual(2.0, data.e0_bound, places=12)
        self.assertAlmostEqual(2.0, e0_bound(data.rho0, data.v0, cfg.gamma,
                                             cfg.varpi, GRID), places=12)

    def test_shapes(self):
        "ρ₀ is 2D, v₀ and m₀ are 3D vectors"
        data = build_initial_data(DEFAULT_INIT, GRID)
        self.assertEqual(GRID.shape2d, data.rho0.shape)
        self.assertEqual((2,) + GRID.shape3d, data.v0.shape)
        np.testing.assert_allclose(data.m0, data.rho0 * data.v0)

    def test_vacuum_rejection(self):
        "moving vacuum is inadmissible, resting vacuum is fine"
        moving = DEFAULT_INIT._replace(rho_profile='patch', rho_mean=0.2,
                                       rho_amp=1.0, v_profile='uniform')
        self.assertRaises(InadmissibleDataError, build_initial_data, moving,
                          GRID)
        resting = moving._replace(v_profile='zero')
        data = build_initial_data(resting, GRID)
        self.assertEqual(0.0, float(np.min(data.rho0)))

    def test_density_bounds(self):
        "(ε^{1/p0+1}, ε^{-1/p0-1})"
        lower, upper = density_bounds(0.01, 25.0)
        self.assertAlmostEqual(0.01 ** 1.04, lower)
        self.assertAlmostEqual(0.01 ** -1.04, upper)

    def test_approximation_in_bounds(self):
        "approximating density sits strictly inside the interval"
        data = build_initial_data(DEFAULT_INIT, GRID)
        for eps in [0.1, 0.01, 0.001]:
            eta, v = approximate_initial_data(data, eps, DEFAULT_INIT, GRID)
            lower, upper = density_bounds(eps, DEFAULT_INIT.p0)
            self.assertGreater(float(np.min(eta ** 2)), lower)
            self.assertLess(float(np.max(eta ** 2)), upper)
            np.testing.assert_array_equal(v, data.v0)
            self.assertIsNot(v, data.v0)

    def test_approximation_lifts_vacuum(self):
        "vacuum is lifted above the lower bound"
        cfg = DEFAULT_INIT._replace(rho_profile='patch', rho_mean=0.2,
                                    rho_amp=1.0, v_profile='zero')
        data = build_initial_data(cfg, GRID)
        rho = approximate_rho(data.rho0, 0.01, cfg.p0)
        self.assertGreater(float(np.min(rho)), density_bounds(0.01,
                                                              cfg.p0)[0])

    def test_approximation_gap_shrinks(self):
        "‖ρ_{ε,0} - ρ₀‖₁ decreases with ε"
        data = build_initial_data(DEFAULT_INIT, GRID)
        gaps = [approximation_gap(data, eps, DEFAULT_INIT.p0)
                for eps in [0.1, 0.01, 0.001]]
        self.assertGreater(gaps[0], gaps[1])
        self.assertGreater(gaps[1], gaps[2])

    def test_bad_epsilon(self):
        "ε outside (0, 1) is a config error"
        data = build_initial_data(DEFAULT_INIT, GRID)
        self.assertRaises(ConfigError, approximate_initial_data, data, 1.5,
                          DEFAULT_INIT, GRID)

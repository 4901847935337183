import numpy as np
from django.test import SimpleTestCase
from scipy.linalg import expm

from lab_services.exceptions import ArgumentError, ConfigurationError
from lab_services.lattice_spinor import MOMENTUM, dirac_algebra, energy, h_matrix, shell_mass, to_momentum
from lab_services.spectral_evolution import (
    EvolutionPlan,
    evolve,
    evolve_by_energy,
    evolve_many,
    evolve_nw,
    evolve_symmetric_pair,
    mode_exponential,
    sinc,
    validate_horizon,
)
from lab_services.state_factory import random_state

from .helpers import RHO, bump, coarse_grid

TIMES = (0.1, -0.1, 0.5, -0.5, 1.0, -1.0)


class SincTests(SimpleTestCase):

    def test_value_at_zero(self):
        self.assertEqual(float(sinc(0.0)), 1.0)

    def test_series_branch_is_continuous(self):
        w = np.array([0.99e-4, 1.01e-4])
        np.testing.assert_allclose(sinc(w), np.sin(w) / w, rtol=1e-14)

    def test_even(self):
        w = np.linspace(-20, 20, 101)
        np.testing.assert_allclose(sinc(w), sinc(-w), rtol=1e-15)


class ModeExponentialTests(SimpleTestCase):

    def test_matches_matrix_exponential(self):
        rng = np.random.default_rng(7)
        for dim in (1, 3):
            alg = dirac_algebra('weyl', dim)
            for _ in range(10):
                p = rng.normal(scale=3.0, size=dim)
                t = rng.uniform(-2, 2)
                expected = expm(1j * t * h_matrix(p, 1.3, alg))
                np.testing.assert_allclose(mode_exponential(p, t, 1.3, alg), expected, atol=1e-12)

    def test_mode_spectrum_is_plus_minus_energy(self):
        alg = dirac_algebra('dirac', 3)
        p = np.array([0.3, -1.2, 2.0])
        eigenvalues = np.linalg.eigvalsh(h_matrix(p, 0.7, alg))
        eps = energy(p, 0.7)
        np.testing.assert_allclose(eigenvalues, [-eps, -eps, eps, eps], atol=1e-12)

    def test_mass_must_be_positive(self):
        with self.assertRaises(ArgumentError):
            mode_exponential([0.0], 1.0, 0.0, dirac_algebra('weyl', 1))


class EvolveTests(SimpleTestCase):

    def test_unitarity_and_group_law_over_random_states(self):
        grid = coarse_grid()
        for seed in range(20):
            psi = random_state(grid, seed)
            for t in TIMES:
                psi_t = evolve(psi, t)
                self.assertLessEqual(abs(psi_t.norm() - 1.0), 1e-12)
                composed = evolve(evolve(psi, t), 0.3)
                direct = evolve(psi, t + 0.3)
                self.assertLessEqual(np.max(np.abs(composed.values - direct.values)), 1e-10)

    def test_three_dimensional_unitarity(self):
        psi = random_state(coarse_grid(3), 11)
        for t in (0.5, -1.0):
            self.assertAlmostEqual(evolve(psi, t).norm(), 1.0, places=12)

    def test_zero_time_is_identity(self):
        psi = bump(coarse_grid(), radius=1.0)
        np.testing.assert_allclose(evolve(psi, 0.0).values, psi.values, atol=1e-12)

    def test_keeps_space_tag(self):
        phi = to_momentum(bump(coarse_grid(), radius=1.0))
        self.assertEqual(evolve(phi, 0.5).space, MOMENTUM)

    def test_forward_then_backward_returns(self):
        psi = bump(coarse_grid(3), radius=1.5, seed=5)
        np.testing.assert_allclose(evolve(evolve(psi, 0.7), -0.7).values, psi.values, atol=1e-12)

    def test_evolve_many_follows_input_order(self):
        psi = bump(coarse_grid(), radius=1.0)
        times = [0.4, -0.2, 0.0, 1.0]
        for t, psi_t in zip(times, evolve_many(psi, times)):
            np.testing.assert_array_equal(psi_t.values, evolve(psi, t).values)

    def test_symmetric_pair(self):
        psi = bump(coarse_grid(), radius=1.0, seed=3)
        total, difference = evolve_symmetric_pair(psi, 0.6)
        forward, backward = evolve(psi, 0.6), evolve(psi, -0.6)
        np.testing.assert_allclose(total.values, (forward + backward).values, atol=1e-12)
        np.testing.assert_allclose(difference.values, (forward - backward).values, atol=1e-12)

    def test_bump_stays_in_doubled_ball(self):
        psi = bump(radius=RHO)
        psi_t = evolve(psi, RHO)
        outside = shell_mass(psi_t, 2 * RHO + 2 * psi.grid.dx, np.inf)
        self.assertLessEqual(outside, 1e-5)


class EnergySplitTests(SimpleTestCase):

    def test_energy_resolved_evolution_agrees(self):
        for grid in (coarse_grid(), coarse_grid(3)):
            psi = bump(grid, radius=1.5, seed=9)
            for t in (0.3, -1.1):
                np.testing.assert_allclose(evolve_by_energy(psi, t).values, evolve(psi, t).values, atol=1e-12)

    def test_newton_wigner_preserves_norm(self):
        psi = bump(coarse_grid(), radius=1.0)
        self.assertAlmostEqual(evolve_nw(psi, 2.0, -1).norm(), 1.0, places=12)

    def test_newton_wigner_sign_is_validated(self):
        with self.assertRaises(ArgumentError):
            evolve_nw(bump(coarse_grid(), radius=1.0), 1.0, 2)


class PlanTests(SimpleTestCase):

    def test_unitarity_defect_is_tiny(self):
        plan = EvolutionPlan.build(coarse_grid(3), 1.0, 2.5)
        self.assertLess(plan.unitarity_defect(), 1e-12)

    def test_factors_are_read_only(self):
        plan = EvolutionPlan.build(coarse_grid(), 1.0, 1.0)
        with self.assertRaises(ValueError):
            plan.cos_factor[0] = 0.0

    def test_rejects_nonpositive_mass(self):
        with self.assertRaises(ArgumentError):
            EvolutionPlan.build(coarse_grid(), -1.0, 1.0)


class HorizonTests(SimpleTestCase):

    def test_horizon_satisfied(self):
        validate_horizon(coarse_grid(), 1.0, 2.5)

    def test_horizon_violated(self):
        with self.assertRaises(ConfigurationError):
            validate_horizon(coarse_grid(), 1.0, 3.0)

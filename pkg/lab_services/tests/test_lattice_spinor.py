import numpy as np
from django.test import SimpleTestCase, override_settings

from lab_services.exceptions import ArgumentError, ConfigurationError, UndefinedStateError
from lab_services.lattice_spinor import (
    MOMENTUM,
    POSITION,
    SpinorField,
    as_vector,
    axis_directions,
    carrier_radius,
    density,
    directional_quantile,
    dirac_algebra,
    energy,
    energy_projector,
    h_matrix,
    half_space_mass,
    inner_product,
    make_grid,
    mass_profile,
    project_energy,
    shell_mass,
    spectral_floor,
    spectral_momenta,
    to_momentum,
    to_position,
)
from lab_services.parallel import leased_executor, ordered_map, worker_count
from lab_services.state_factory import momentum_bump_state

from .helpers import RHO, bump, coarse_grid, fine_grid


class GridTests(SimpleTestCase):

    def test_rejects_invalid_grids(self):
        with self.assertRaises(ConfigurationError):
            make_grid(2, 64, 8.0)
        with self.assertRaises(ConfigurationError):
            make_grid(1, 100, 8.0)
        with self.assertRaises(ConfigurationError):
            make_grid(1, 4, 8.0)
        with self.assertRaises(ConfigurationError):
            make_grid(3, 64, 0.0)

    def test_axis_is_centered_lattice(self):
        grid = make_grid(1, 64, 8.0)
        self.assertEqual(grid.dx, 0.125)
        self.assertEqual(grid.axis[32], 0.0)
        self.assertEqual(grid.axis[0], -4.0)

    def test_nyquist_maps_to_zero_in_spectral_axis(self):
        grid = make_grid(1, 64, 8.0)
        self.assertEqual(grid.spectral_axis[32], 0.0)
        self.assertNotEqual(grid.momentum_axis[32], 0.0)
        (mesh,) = spectral_momenta(grid)
        np.testing.assert_array_equal(mesh, grid.spectral_axis)

    def test_spectral_axis_is_closed_under_negation(self):
        grid = make_grid(1, 64, 8.0)
        axis = np.sort(grid.spectral_axis)
        np.testing.assert_allclose(np.sort(-axis), axis, atol=1e-12)

    def test_axis_directions_order(self):
        directions = axis_directions(3)
        self.assertEqual(len(directions), 6)
        np.testing.assert_array_equal(directions[0], [1, 0, 0])
        np.testing.assert_array_equal(directions[1], [-1, 0, 0])

    def test_as_vector_checks_length(self):
        with self.assertRaises(ArgumentError):
            as_vector([1.0, 2.0], 3)


class DiracAlgebraTests(SimpleTestCase):

    def test_clifford_relations(self):
        for representation in ('weyl', 'dirac'):
            for dim in (1, 3):
                alg = dirac_algebra(representation, dim)
                identity = alg.identity
                np.testing.assert_allclose(alg.beta @ alg.beta, identity)
                for j, a in enumerate(alg.alpha):
                    np.testing.assert_allclose(a @ alg.beta + alg.beta @ a, 0 * identity)
                    for k, b in enumerate(alg.alpha):
                        expected = 2 * identity if j == k else 0 * identity
                        np.testing.assert_allclose(a @ b + b @ a, expected)

    def test_time_reversal_matrix_relations(self):
        for dim in (1, 3):
            alg = dirac_algebra('weyl', dim)
            omega_inv = np.linalg.inv(alg.omega)
            for a in alg.alpha:
                np.testing.assert_allclose(omega_inv @ a @ alg.omega, -np.conj(a), atol=1e-15)
            np.testing.assert_allclose(omega_inv @ alg.beta @ alg.omega, np.conj(alg.beta), atol=1e-15)

    def test_three_dimensional_weyl_reversal_squares_to_minus_one(self):
        alg = dirac_algebra('weyl', 3)
        np.testing.assert_allclose(alg.omega @ np.conj(alg.omega), -alg.identity)

    def test_dirac_representation_has_no_reversal_matrix(self):
        self.assertIsNone(dirac_algebra('dirac', 3).omega)

    def test_matrices_are_read_only(self):
        alg = dirac_algebra('weyl', 3)
        with self.assertRaises(ValueError):
            alg.beta[0, 0] = 2.0

    def test_unknown_representation(self):
        with self.assertRaises(ConfigurationError):
            dirac_algebra('majorana', 3)

    def test_one_dimensional_pairs(self):
        sigma1 = np.array([[0, 1], [1, 0]])
        sigma3 = np.array([[1, 0], [0, -1]])
        dirac = dirac_algebra('dirac', 1)
        np.testing.assert_array_equal(dirac.alpha[0], sigma1)
        np.testing.assert_array_equal(dirac.beta, sigma3)
        weyl = dirac_algebra('weyl', 1)
        np.testing.assert_array_equal(weyl.alpha[0], sigma3)
        np.testing.assert_array_equal(weyl.beta, sigma1)
        np.testing.assert_allclose(weyl.omega @ np.conj(weyl.omega), weyl.identity)


class SpinorFieldTests(SimpleTestCase):

    def test_shape_is_validated(self):
        grid = coarse_grid()
        with self.assertRaises(ArgumentError):
            SpinorField(grid=grid, values=np.zeros((4, 64)))

    def test_values_are_read_only(self):
        psi = bump(coarse_grid(), radius=1.0)
        with self.assertRaises(ValueError):
            psi.values[0, 0] = 1.0

    def test_round_trip_and_parseval(self):
        psi = bump(coarse_grid(), radius=1.0, seed=4)
        phi = to_momentum(psi)
        self.assertEqual(phi.space, MOMENTUM)
        back = to_position(phi)
        self.assertEqual(back.space, POSITION)
        np.testing.assert_allclose(back.values, psi.values, atol=1e-12)
        self.assertAlmostEqual(phi.norm(), psi.norm(), places=12)

    def test_round_trip_three_dimensional(self):
        psi = bump(coarse_grid(3), radius=1.5, seed=4)
        np.testing.assert_allclose(to_position(to_momentum(psi)).values, psi.values, atol=1e-12)

    def test_inner_product_matches_norm(self):
        psi = bump(coarse_grid(), radius=1.0)
        self.assertAlmostEqual(inner_product(psi, psi).real, psi.norm() ** 2, places=12)
        self.assertAlmostEqual(inner_product(psi, to_momentum(psi)).real, 1.0, places=12)

    def test_density_sums_to_norm(self):
        psi = bump(coarse_grid(), radius=1.0)
        self.assertAlmostEqual(density(psi).sum() * psi.grid.cell_volume, 1.0, places=12)

    def test_arithmetic_mixes_space_tags(self):
        psi = bump(coarse_grid(), radius=1.0)
        total = psi + to_momentum(psi)
        np.testing.assert_allclose(total.values, 2 * psi.values, atol=1e-12)
        np.testing.assert_allclose((total - psi).values, psi.values, atol=1e-12)

    def test_zero_field_cannot_be_normalized(self):
        grid = coarse_grid()
        zero = SpinorField(grid=grid, values=np.zeros((2, 64)))
        with self.assertRaises(UndefinedStateError):
            zero.normalized()
        with self.assertRaises(UndefinedStateError):
            directional_quantile(zero, [1.0], 0.1)


class EnergyProjectionTests(SimpleTestCase):

    def test_mode_projectors(self):
        rng = np.random.default_rng(4)
        for dim in (1, 3):
            alg = dirac_algebra('weyl', dim)
            p = rng.normal(size=dim)
            plus, minus = energy_projector(p, 1.0, 1, alg), energy_projector(p, 1.0, -1, alg)
            np.testing.assert_allclose(plus + minus, alg.identity, atol=1e-14)
            np.testing.assert_allclose(plus @ plus, plus, atol=1e-12)
            np.testing.assert_allclose(plus @ minus, 0.0, atol=1e-12)
            np.testing.assert_allclose(h_matrix(p, 1.0, alg) @ plus, energy(p, 1.0) * plus, atol=1e-12)
        with self.assertRaises(ArgumentError):
            energy_projector([0.0], 1.0, 0, dirac_algebra('weyl', 1))

    def test_projectors_split_and_are_idempotent(self):
        for grid in (coarse_grid(), coarse_grid(3)):
            psi = bump(grid, radius=1.5, seed=2)
            plus, minus = project_energy(psi, 1), project_energy(psi, -1)
            np.testing.assert_allclose((plus + minus).values, psi.values, atol=1e-12)
            np.testing.assert_allclose(project_energy(plus, 1).values, plus.values, atol=1e-12)
            self.assertLess(abs(inner_product(plus, minus)), 1e-12)

    def test_projection_keeps_space_tag(self):
        psi = bump(coarse_grid(), radius=1.0)
        self.assertEqual(project_energy(psi, 1).space, POSITION)
        self.assertEqual(project_energy(to_momentum(psi), 1).space, MOMENTUM)

    def test_rejects_bad_sign(self):
        with self.assertRaises(ArgumentError):
            project_energy(bump(coarse_grid(), radius=1.0), 0)


class MassFunctionalTests(SimpleTestCase):

    def setUp(self):
        self.psi = bump()

    def test_half_space_mass_extremes(self):
        self.assertEqual(half_space_mass(self.psi, [1.0], -10.0), 0.0)
        self.assertEqual(half_space_mass(self.psi, [1.0], 10.0), 1.0)
        self.assertAlmostEqual(half_space_mass(self.psi, [1.0], 1.0), 1.0, places=12)

    def test_half_space_mass_is_monotone(self):
        alphas = np.linspace(-1, 1, 41)
        masses = [half_space_mass(self.psi, [1.0], a) for a in alphas]
        self.assertTrue(np.all(np.diff(masses) >= 0))

    def test_quantile_lies_inside_support(self):
        border = directional_quantile(self.psi, [1.0], 1e-6)
        self.assertGreaterEqual(border, -RHO)
        self.assertLess(border, -0.85 * RHO)

    def test_quantile_threshold_domain(self):
        for delta in (0.0, 1.0, -0.1):
            with self.assertRaises(ArgumentError):
                directional_quantile(self.psi, [1.0], delta)

    def test_profile_of_axis_and_general_direction_agree(self):
        grid = coarse_grid(3)
        psi = bump(grid, radius=1.5, seed=3)
        levels, cumulative = mass_profile(psi, [0.0, 0.0, 1.0])
        self.assertEqual(len(levels), grid.n)
        self.assertAlmostEqual(cumulative[-1], 1.0, places=12)
        axis_quantile = directional_quantile(psi, [0.0, 0.0, 1.0], 1e-3)
        tilted_quantile = directional_quantile(psi, [0.0, 1e-9, 1.0], 1e-3)
        self.assertAlmostEqual(axis_quantile, tilted_quantile, places=6)

    def test_shell_mass_is_half_open(self):
        inner = shell_mass(self.psi, 0.0, 0.25)
        outer = shell_mass(self.psi, 0.25, np.inf)
        self.assertAlmostEqual(inner + outer, 1.0, places=12)

    def test_shell_boundary_voxel_belongs_to_the_outer_shell(self):
        grid = coarse_grid()
        values = np.zeros((2, grid.n), dtype=complex)
        values[0, grid.n // 2] = 1.0
        values[0, grid.n // 2 + 2] = 1.0
        psi = SpinorField(grid=grid, values=values)
        self.assertEqual(grid.axis[grid.n // 2 + 2], 2 * grid.dx)
        self.assertEqual(shell_mass(psi, 0.0, 2 * grid.dx), 0.5)
        self.assertEqual(shell_mass(psi, 2 * grid.dx, np.inf), 0.5)
        self.assertEqual(shell_mass(psi, 2 * grid.dx, 3 * grid.dx), 0.5)

    def test_shell_radii_are_validated(self):
        with self.assertRaises(ArgumentError):
            shell_mass(self.psi, 1.0, 0.5)
        with self.assertRaises(ArgumentError):
            shell_mass(self.psi, -1.0, 0.5)

    def test_carrier_radius_of_centered_bump(self):
        radius = carrier_radius(self.psi, 1e-6)
        self.assertLessEqual(radius, RHO)
        self.assertGreater(radius, 0.85 * RHO)


class SpectralFloorTests(SimpleTestCase):

    def test_resolved_bump_has_negligible_edge_mass(self):
        self.assertLess(spectral_floor(bump()), 1e-7)

    def test_coarse_bump_rings(self):
        self.assertGreater(spectral_floor(bump(coarse_grid(), radius=RHO)), 1e-6)
        self.assertGreater(spectral_floor(bump(coarse_grid(3), radius=1.5)), 1e-6)

    def test_momentum_bump_has_no_edge_mass(self):
        state = momentum_bump_state(fine_grid(), [1.5], 0.5, [1.0, 0.0])
        self.assertLess(spectral_floor(state.field), 1e-20)

    def test_zero_field(self):
        with self.assertRaises(UndefinedStateError):
            spectral_floor(SpinorField(grid=coarse_grid(), values=np.zeros((2, 64))))


class ParallelTests(SimpleTestCase):

    @override_settings(DIRAC_FRONT={'THREADS': 3})
    def test_worker_count_follows_settings(self):
        self.assertEqual(worker_count(), 3)

    @override_settings(DIRAC_FRONT={'THREADS': 0})
    def test_worker_count_is_at_least_one(self):
        self.assertEqual(worker_count(), 1)

    @override_settings(DIRAC_FRONT={'THREADS': 4})
    def test_ordered_map_keeps_input_order(self):
        self.assertEqual(ordered_map(lambda x: x * x, range(20)), [x * x for x in range(20)])

    def test_resize_keeps_a_leased_pool_usable(self):
        with override_settings(DIRAC_FRONT={'THREADS': 2}):
            with leased_executor() as pool:
                with override_settings(DIRAC_FRONT={'THREADS': 3}):
                    self.assertEqual(ordered_map(lambda x: x + 1, range(6)), [1, 2, 3, 4, 5, 6])
                self.assertEqual(list(pool.map(lambda x: 2 * x, range(4))), [0, 2, 4, 6])
        with self.assertRaises(RuntimeError):
            pool.submit(abs, -1)

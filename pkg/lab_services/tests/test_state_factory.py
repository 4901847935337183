import numpy as np
from django.test import SimpleTestCase, tag

from lab_services.carrier_border import border, check_turning_budget, measure_turning_times, width
from lab_services.exceptions import (
    ArgumentError,
    ConfigurationError,
    EmptyCutError,
    PreconditionError,
    ResolutionError,
)
from lab_services.lattice_spinor import density, make_grid
from lab_services.spectral_evolution import evolve
from lab_services.state_factory import (
    bump_state,
    dsabtp_state,
    far_face_cut_state,
    lattice_ceiling,
    momentum_bump_state,
    nise_state,
    prescribed_turning_state,
    random_state,
    slab_cut,
    soft_edge,
    time_reverse,
    translate,
)

from .helpers import RHO, bump, coarse_grid, fine_grid, symmetric_times

STEP = 0.05
PARENT_WINDOW = symmetric_times(2 * RHO + 2 * STEP)
WIDE_WINDOW = symmetric_times(2.0)


class BumpStateTests(SimpleTestCase):

    def test_radius_must_be_resolved(self):
        grid = coarse_grid()
        with self.assertRaises(ResolutionError):
            bump_state(grid, [0.0], 2 * grid.dx, [1.0, 0.0])

    def test_normalized(self):
        psi = bump(coarse_grid(3), radius=1.5)
        self.assertAlmostEqual(psi.norm(), 1.0, places=12)

    def test_single_component_weights(self):
        psi = bump(coarse_grid(), radius=1.0, spinor=np.array([0.0, 1.0]))
        self.assertFalse(np.any(psi.values[0]))
        self.assertTrue(np.any(psi.values[1]))

    def test_spinor_weights_are_validated(self):
        with self.assertRaises(ArgumentError):
            bump_state(coarse_grid(), [0.0], 1.0, [1.0, 0.0, 0.0])
        with self.assertRaises(ArgumentError):
            bump_state(coarse_grid(), [0.0], 1.0, [0.0, 0.0])

    def test_random_state_is_seeded(self):
        grid = coarse_grid()
        np.testing.assert_array_equal(random_state(grid, 5).values, random_state(grid, 5).values)
        self.assertAlmostEqual(random_state(grid, 6).norm(), 1.0, places=12)


class MomentumBumpTests(SimpleTestCase):

    def test_speed_is_reported(self):
        state = momentum_bump_state(fine_grid(), [1.5], 0.5, [1.0, 0.0])
        self.assertGreater(state.metadata['v'], 0.7)
        self.assertFalse(state.metadata['v_flagged'])
        self.assertAlmostEqual(state.field.norm(), 1.0, places=12)

    def test_zero_momentum_is_flagged(self):
        state = momentum_bump_state(fine_grid(), [0.0], 0.5, [1.0, 0.0])
        self.assertEqual(state.metadata['v'], 0.0)
        self.assertTrue(state.metadata['v_flagged'])

    def test_radial_shell(self):
        state = momentum_bump_state(coarse_grid(3), [0.0, 0.0, 2.0], 0.8, [1, 0, 0, 0], radial=True)
        self.assertTrue(state.metadata['radial'])
        self.assertGreater(state.metadata['v'], 0.0)

    def test_empty_support(self):
        with self.assertRaises(ResolutionError):
            momentum_bump_state(fine_grid(), [0.2], 0.1, [1.0, 0.0])


class SymmetryTests(SimpleTestCase):

    def test_translation_moves_border_by_shift(self):
        psi = bump(coarse_grid(), radius=1.0)
        moved = translate(psi, [0.25])
        self.assertEqual(border(moved, [1.0]) - border(psi, [1.0]), 0.25)
        self.assertAlmostEqual(moved.norm(), 1.0, places=12)

    def test_translation_needs_lattice_multiple(self):
        with self.assertRaises(ArgumentError):
            translate(bump(coarse_grid(), radius=1.0), [0.1])

    def test_reversal_squares(self):
        psi1 = bump(coarse_grid(), radius=1.0, seed=2)
        np.testing.assert_allclose(time_reverse(time_reverse(psi1)).values, psi1.values, atol=1e-15)
        psi3 = bump(coarse_grid(3), radius=1.5, seed=2)
        np.testing.assert_allclose(time_reverse(time_reverse(psi3)).values, -psi3.values, atol=1e-15)

    def test_reversal_preserves_density(self):
        psi = bump(coarse_grid(3), radius=1.5, seed=8)
        np.testing.assert_allclose(density(time_reverse(psi)), density(psi), atol=1e-15)

    def test_reversal_intertwines_evolution(self):
        for grid, radius in ((coarse_grid(), 1.0), (coarse_grid(3), 1.5)):
            psi = bump(grid, radius=radius, seed=4)
            for t in (0.5, -1.25):
                lhs = evolve(time_reverse(psi), t)
                rhs = time_reverse(evolve(psi, -t))
                np.testing.assert_allclose(lhs.values, rhs.values, atol=1e-10)

    def test_reversal_needs_weyl_representation(self):
        psi = bump(coarse_grid(3), radius=1.5, representation='dirac')
        with self.assertRaises(ConfigurationError):
            time_reverse(psi)

    def test_lattice_ceiling(self):
        grid = coarse_grid()
        self.assertEqual(lattice_ceiling(grid, 0.3), 0.375)
        self.assertEqual(lattice_ceiling(grid, 0.25), 0.25)
        self.assertEqual(lattice_ceiling(grid, 0.0), 0.0)


class ShiftedCopyTests(SimpleTestCase):

    def setUp(self):
        self.psi1 = bump()
        self.parent = measure_turning_times(self.psi1, [1.0], PARENT_WINDOW)

    def test_needs_tau_within_shift(self):
        with self.assertRaises(PreconditionError):
            nise_state(self.psi1, [1.0], 0.5, 0.25, turning_times=(0.0, 0.0))

    def test_needs_lattice_shift(self):
        with self.assertRaises(ArgumentError):
            nise_state(self.psi1, [1.0], 0.0, 0.01, turning_times=(0.0, 0.0))

    def test_needs_turning_times_or_window(self):
        with self.assertRaises(ArgumentError):
            nise_state(self.psi1, [1.0], 0.1, 0.25)

    def test_zero_tau_keeps_parent_turning_times(self):
        state = nise_state(self.psi1, [1.0], 0.0, 0.25, turning_times=(self.parent.t_e, self.parent.t_ebar))
        self.assertEqual(state.metadata['predicted_t_e'], self.parent.t_e)
        self.assertEqual(state.metadata['predicted_t_ebar'], self.parent.t_ebar)
        self.assertAlmostEqual(state.field.norm(), 1.0, places=12)

    def test_turning_times_follow_prediction(self):
        for tau in (-0.2, 0.2):
            state = nise_state(self.psi1, [1.0], tau, 0.25, turning_times=(self.parent.t_e, self.parent.t_ebar))
            measured = measure_turning_times(state.field, [1.0], WIDE_WINDOW)
            self.assertAlmostEqual(measured.t_e, state.metadata['predicted_t_e'], delta=2 * STEP)
            self.assertAlmostEqual(measured.t_ebar, state.metadata['predicted_t_ebar'], delta=2 * STEP)

    def test_turning_budget_holds(self):
        state = nise_state(self.psi1, [1.0], 0.2, 0.25, turning_times=(self.parent.t_e, self.parent.t_ebar))
        report = check_turning_budget(state.field, [1.0], WIDE_WINDOW)
        self.assertTrue(report.passed, report.entries)

    def test_prescribed_turning_times(self):
        state = prescribed_turning_state(self.psi1, [1.0], 0.0, 0.3,
                                         turning_times=(self.parent.t_e, self.parent.t_ebar))
        self.assertEqual(state.metadata['kind'], 'prescribed')
        measured = measure_turning_times(state.field, [1.0], WIDE_WINDOW)
        self.assertAlmostEqual(measured.t_e, 0.0, delta=2 * STEP)
        self.assertAlmostEqual(measured.t_ebar, 0.3, delta=2 * STEP)


class SlabStateTests(SimpleTestCase):

    def test_symmetric_turning_times(self):
        grid = fine_grid()
        state = dsabtp_state(grid, [1.0], -1.0, 1.0, 0.4, seed=3)
        self.assertEqual(state.metadata['predicted_t_e'], 0.4)
        self.assertAlmostEqual(state.metadata['rho'], 0.6)
        psi = state.field
        self.assertGreaterEqual(border(psi, [1.0]), -1.0 - 2 * grid.dx)
        self.assertLessEqual(-border(psi, [-1.0]), 1.0 + 2 * grid.dx)
        times = np.linspace(-1.2, 2.0, 65)
        measured = measure_turning_times(psi, [1.0], times)
        self.assertAlmostEqual(measured.t_e, 0.4, delta=2 * STEP)
        self.assertAlmostEqual(measured.t_ebar, 0.4, delta=2 * STEP)

    def test_zero_tau(self):
        state = dsabtp_state(fine_grid(), [1.0], -1.0, 1.0, 0.0, seed=3)
        measured = measure_turning_times(state.field, [1.0], symmetric_times(1.6))
        self.assertAlmostEqual(measured.t_e, 0.0, delta=2 * STEP)
        self.assertAlmostEqual(measured.t_ebar, 0.0, delta=2 * STEP)

    def test_zero_turning_width_is_recorded(self):
        state = dsabtp_state(fine_grid(), [1.0], -1.0, 1.0, 0.4, seed=3)
        self.assertIs(state.metadata['eta_width_ok'], True)
        self.assertLessEqual(state.metadata['eta_width'], 2 * state.metadata['rho'] + 2 * fine_grid().dx)

    def test_preconditions(self):
        grid = coarse_grid()
        with self.assertRaises(ArgumentError):
            dsabtp_state(grid, [1.0], 1.0, -1.0, 0.1)
        with self.assertRaises(ArgumentError):
            dsabtp_state(grid, [1.0], -1.0, 1.0, 1.0)


class SlabCutTests(SimpleTestCase):

    def setUp(self):
        self.psi = bump(coarse_grid(), radius=1.0, seed=6)

    def test_whole_line_cut_is_identity(self):
        np.testing.assert_array_equal(slab_cut(self.psi, [1.0], -4.0, 4.0).values, self.psi.values)

    def test_cut_and_complement_partition(self):
        left = slab_cut(self.psi, [1.0], -4.0, 0.0)
        right = slab_cut(self.psi, [1.0], 0.5 * self.psi.grid.dx, 4.0)
        np.testing.assert_array_equal((left + right).values, self.psi.values)
        self.assertLess(left.norm(), 1.0)

    def test_normalized_cut(self):
        self.assertAlmostEqual(slab_cut(self.psi, [1.0], -4.0, 0.0, normalize=True).norm(), 1.0, places=12)

    def test_empty_cut(self):
        with self.assertRaises(EmptyCutError):
            slab_cut(self.psi, [1.0], 2.0, 3.0)

    def test_bounds_are_ordered(self):
        with self.assertRaises(ArgumentError):
            slab_cut(self.psi, [1.0], 0.5, 0.5)

    def test_soft_edges(self):
        np.testing.assert_array_equal(soft_edge([-0.1, 0.0, 0.1]), [0.0, 1.0, 1.0])
        edge = soft_edge(np.array([-0.01, 0.0, 0.5, 1.0, 2.0]), ramp=1.0)
        self.assertEqual(edge[0], 0.0)
        self.assertLess(edge[1], 1e-6)
        self.assertAlmostEqual(edge[2], 0.5, places=12)
        self.assertGreater(edge[3], 1.0 - 1e-6)
        self.assertTrue(np.all(np.diff(edge) >= 0))

    def test_ramped_cut_is_open_above(self):
        grid = self.psi.grid
        cut = slab_cut(self.psi, [1.0], 0.0, np.inf, ramp=4 * grid.dx)
        values = np.abs(cut.values[0])
        below = grid.axis < 0.0
        self.assertFalse(np.any(values[below]))
        deep = grid.axis >= 4 * grid.dx
        np.testing.assert_allclose(values[deep], np.abs(self.psi.values[0][deep]), rtol=1e-6)

    def test_negative_ramp(self):
        with self.assertRaises(ArgumentError):
            slab_cut(self.psi, [1.0], 0.0, 1.0, ramp=-0.1)

    def test_far_face_cut(self):
        grid = make_grid(1, 4096, 16.0)
        state = far_face_cut_state(grid, [1.0], -1.0, 1.0, -0.4, 0.3, seed=3)
        self.assertEqual(state.metadata['sign'], -1.0)
        self.assertEqual(state.metadata['kind'], 'slab_cut')
        self.assertEqual(state.metadata['ramp'], 16 * grid.dx)
        self.assertAlmostEqual(state.field.norm(), 1.0, places=12)

    def test_thin_cut_shortens_its_ramp(self):
        state = far_face_cut_state(fine_grid(), [1.0], -1.0, 1.0, 0.4, 0.1, seed=3)
        self.assertEqual(state.metadata['ramp'], 0.05)

    def test_far_face_depth_bound(self):
        with self.assertRaises(ArgumentError):
            far_face_cut_state(fine_grid(), [1.0], -1.0, 1.0, 0.4, 0.5)

    def test_ramp_must_be_shorter_than_depth(self):
        with self.assertRaises(ArgumentError):
            far_face_cut_state(fine_grid(), [1.0], -1.0, 1.0, 0.4, 0.2, ramp=0.2)


@tag('slow')
class ThreeDimensionalStateTests(SimpleTestCase):

    def test_bump_turning_budget_along_axes(self):
        grid = make_grid(3, 128, 8.0)
        psi = bump(grid, radius=1.5, seed=1)
        for e in ([1.0, 0.0, 0.0], [0.0, 0.0, 1.0]):
            report = check_turning_budget(psi, e, symmetric_times(2.0, 0.1))
            self.assertTrue(report.passed, report.entries)


@tag('slow')
class FarFaceTurningTests(SimpleTestCase):

    def test_far_face_turning_bound(self):
        grid = make_grid(1, 4096, 16.0)
        tol = 3 * grid.dx
        times = np.linspace(-1.5, 1.5, 61)
        for tau, depth in ((0.4, 0.1), (0.4, 0.2), (0.4, 0.3), (-0.4, 0.2)):
            with self.subTest(tau=tau, depth=depth):
                state = far_face_cut_state(grid, [1.0], -1.0, 1.0, tau, depth, seed=23)
                measured = measure_turning_times(state.field, [1.0], times, max_residual=0.05)
                carrier_width = width(state.field, [1.0])
                signed = state.metadata['sign'] * measured.t_ebar
                self.assertGreaterEqual(signed, 0.5 * (carrier_width - state.metadata['ramp']) - tol)
                self.assertLessEqual(abs(measured.t_e) + abs(measured.t_ebar), carrier_width + tol)

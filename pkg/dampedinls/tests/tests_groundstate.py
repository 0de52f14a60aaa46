#  ***************************************************************************
#  This file is part of DampedINLS:
#  A numerical laboratory for the damped inhomogeneous NLS equation with an
#  inverse-square potential
#  Copyright (C) <2026>  <DampedINLS contributors>
#
#  This program is free software: you can redistribute it and/or modify
#  it under the terms of the GNU General Public License as published by
#  the Free Software Foundation, either version 3 of the License, or
#  (at your option) any later version.
#
#  This program is distributed in the hope that it will be useful,
#  but WITHOUT ANY WARRANTY; without even the implied warranty of
#  MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
#  GNU General Public License for more details.
#
#  You should have received a copy of the GNU General Public License
#  along with this program.  If not, see <http://www.gnu.org/licenses/>.
#
#  ***************************************************************************

from tempfile import TemporaryDirectory
from unittest import TestCase

import numpy as np

from dampedinls.errors import ConvergenceError
from dampedinls.groundstate import dilate, euler_lagrange_residual, gn_check, \
    load_ground_state, minimize, rescale_to_euler_lagrange, save_ground_state, \
    sharp_constant, threshold_norms, weinstein_quotient
from dampedinls.params import ModelParams
from dampedinls.radial import RadialGrid, build_operator, gaussian, mass, \
    random_smooth_field
from dampedinls.tests.constants import SMALL_N, SMALL_R

# ||Q||^2 of the cubic ground state in R^3
CUBIC_MASS = 18.94


class TestCubic(TestCase):

    @classmethod
    def setUpClass(cls):
        cls.params = ModelParams(3, 0.0, 3.0, 0.0, -1)
        cls.op = build_operator(RadialGrid(SMALL_R, 512), 3, 0.0)
        cls.gs = minimize(cls.params, cls.op)

    def test_certified(self):
        self.assertLess(self.gs.el_residual, 1e-8)
        self.assertLess(max(self.gs.pohozaev_residuals), 1e-2)
        self.assertLess(self.gs.quotient_gap, 1e-2)
        self.assertTrue(self.gs.certified())
        self.assertFalse(self.gs.certified(tolerance=1e-12))

    def test_grid_refinement(self):
        # the Pohozaev defect is a grid error and shrinks like h^2
        fine_op = build_operator(RadialGrid(SMALL_R, 1024), 3, 0.0)
        fine = minimize(self.params, fine_op, init=gaussian(fine_op.grid, 3))
        self.assertLess(max(fine.pohozaev_residuals),
                        max(self.gs.pohozaev_residuals) / 2)
        self.assertLess(abs(fine.mass_q / self.gs.mass_q - 1), 1e-2)

    def test_mass(self):
        self.assertLess(abs(self.gs.mass_q / CUBIC_MASS - 1), 0.01)
        self.assertAlmostEqual(self.gs.norm_q ** 2, self.gs.mass_q)
        self.assertTrue(np.all(self.gs.Q.w >= -1e-10))

    def test_history(self):
        history = self.gs.history
        self.assertEqual(len(history), self.gs.iterations + 1)
        slack = 1e-12 * np.maximum(1.0, np.abs(history[:-1]))
        self.assertTrue(np.all(np.diff(history) <= slack))

    def test_sharp_constant_identity(self):
        quotient = weinstein_quotient(self.gs.Q, self.params, self.op)
        self.assertEqual(quotient, self.gs.min_quotient)
        self.assertAlmostEqual(abs(self.gs.k_opt * quotient - 1), self.gs.quotient_gap,
                               places=14)
        self.assertLess(self.gs.quotient_gap, 1e-2)

    def test_restart(self):
        with self.assertLogs('dampedinls.groundstate', 'INFO'):
            again = minimize(self.params, self.op, init=self.gs.Q)
        self.assertLessEqual(again.iterations, 3)
        self.assertLess(again.el_residual, 1e-8)
        self.assertAlmostEqual(again.mass_q / self.gs.mass_q, 1.0, places=8)

    def test_gn_check(self):
        rng = np.random.default_rng(3)
        samples = [random_smooth_field(self.op.grid, 3, rng) for _ in range(20)]
        report = gn_check(samples + [self.gs.Q.scaled(2.0)], self.gs, self.op)
        self.assertTrue(report.passed)
        self.assertEqual(len(report.ratios), 21)
        # J is amplitude invariant, so 2Q sits exactly at 1 / (K_opt J(Q))
        self.assertAlmostEqual(report.ratios[-1] * self.gs.k_opt * self.gs.min_quotient,
                               1.0, places=12)
        self.assertLess(max(report.ratios[:-1]), report.ratios[-1])
        self.assertEqual(report.max_ratio, max(report.ratios))
        self.assertEqual(report.ratios[report.argmax], report.max_ratio)

    def test_threshold_norms_needs_mass_critical(self):
        self.assertRaises(ValueError, threshold_norms, self.gs)

    def test_to_dict(self):
        payload = self.gs.to_dict()
        self.assertEqual(payload['params'], self.params.as_dict())
        self.assertEqual(payload['grid'], {'R': SMALL_R, 'n': 512})
        self.assertIn('global optimality assumed', payload['optimality'])

    def test_save_load(self):
        with TemporaryDirectory() as directory:
            path = save_ground_state(self.gs, directory, {'seed': 7})
            loaded = load_ground_state(path)
        np.testing.assert_array_equal(loaded.Q.w, self.gs.Q.w)
        self.assertEqual(loaded.params, self.params)
        self.assertEqual(loaded.k_opt, self.gs.k_opt)
        self.assertEqual(loaded.quotient_gap, self.gs.quotient_gap)
        self.assertEqual(loaded.Q.grid, self.op.grid)


class TestMassCritical(TestCase):

    @classmethod
    def setUpClass(cls):
        cls.params = ModelParams(3, 0.5, 2.0, 0.0, -1)
        cls.op = build_operator(RadialGrid(SMALL_R, SMALL_N), 3, 0.0)
        cls.gs = minimize(cls.params, cls.op)

    def test_sharp_constant(self):
        # nu = 2 leaves (p + 1)/2 ||Q||^(1 - p)
        self.assertAlmostEqual(self.gs.k_opt, 1.5 / self.gs.norm_q)
        self.assertAlmostEqual(sharp_constant(self.params, 4.0), 0.75)

    def test_pohozaev(self):
        self.assertLess(self.gs.el_residual, 1e-8)
        self.assertLess(max(self.gs.pohozaev_residuals), 1e-2)
        self.assertLess(self.gs.quotient_gap, 1e-2)
        # <K Q, Q> = 2 ||Q||^2 and P(Q) = 3/2 <K Q, Q>
        self.assertLess(abs(self.gs.quadform_q / self.gs.mass_q - 2.0), 2e-2)
        self.assertLess(abs(self.gs.potential_q / self.gs.quadform_q - 1.5), 1.5e-2)
        self.assertTrue(self.gs.certified())

    def test_threshold_norms(self):
        self.assertAlmostEqual(threshold_norms(self.gs), 2 / 3 * self.gs.norm_q)

    def test_inverse_square_term(self):
        shifted = self.params.replace(lam=0.5)
        op = build_operator(self.op.grid, 3, 0.5)
        gs = minimize(shifted, op, init=self.gs.Q)
        self.assertLess(gs.el_residual, 1e-8)
        self.assertLess(max(gs.pohozaev_residuals), 1e-2)
        # a repulsive potential raises the threshold
        self.assertGreater(gs.mass_q, self.gs.mass_q)


class TestScaling(TestCase):

    def setUp(self):
        self.grid = RadialGrid(SMALL_R, 512)

    def test_dilate_identity(self):
        field = gaussian(self.grid, 3)
        np.testing.assert_allclose(dilate(field, 1.0).w, field.w, atol=1e-12)

    def test_dilate_gaussian(self):
        dilated = dilate(gaussian(self.grid, 3), 2.0)
        np.testing.assert_allclose(dilated.w, gaussian(self.grid, 3, 0.5).w,
                                   atol=1e-5)
        # u(2x) in R^3 has an eighth of the mass
        self.assertAlmostEqual(mass(dilated) / mass(gaussian(self.grid, 3)),
                               1 / 8, places=5)

    def test_rescale(self):
        params = ModelParams(3, 0.5, 2.0)
        op = build_operator(self.grid, 3, 0.0)
        phi = gaussian(self.grid, 3)
        field = rescale_to_euler_lagrange(phi, params, op)
        # a Gaussian is not a solution, but the fit can only lower the residual
        residual = euler_lagrange_residual(field, params, op)
        self.assertGreater(residual, 1e-3)
        self.assertLessEqual(residual, euler_lagrange_residual(phi, params, op))

    def test_rescale_recovers_dilation(self):
        params = ModelParams(3, 0.5, 2.0)
        op = build_operator(self.grid, 3, 0.0)
        gs = minimize(params, op)
        field = rescale_to_euler_lagrange(dilate(gs.Q, 1.5), params, op)
        self.assertLess(euler_lagrange_residual(field, params, op), 1e-3)
        self.assertLess(abs(mass(field) / gs.mass_q - 1), 1e-2)
        np.testing.assert_allclose(field.w, gs.Q.w, atol=1e-2 * np.abs(gs.Q.w).max())

    def test_invalid(self):
        field = gaussian(self.grid, 3)
        self.assertRaises(ValueError, dilate, field, 0)
        self.assertRaises(ValueError, dilate, field, -1.0)


class TestInvalidInputs(TestCase):

    def setUp(self):
        self.op = build_operator(RadialGrid(SMALL_R, SMALL_N), 3, 0.0)

    def test_outside_gn_range(self):
        params = ModelParams(3, 0.0, 6.0)
        self.assertRaises(ValueError, minimize, params, self.op)
        self.assertRaises(ValueError, weinstein_quotient,
                          gaussian(self.op.grid, 3), params, self.op)

    def test_mismatched_operator(self):
        params = ModelParams(3, 0.5, 2.0, 0.5)
        self.assertRaises(ValueError, minimize, params, self.op)

    def test_zero_field(self):
        zero = gaussian(self.op.grid, 3).scaled(0)
        self.assertRaises(ValueError, weinstein_quotient, zero, ModelParams(),
                          self.op)

    def test_not_converged(self):
        with self.assertRaises(ConvergenceError) as caught:
            minimize(ModelParams(), self.op, tol=0, max_iter=1)
        self.assertIn('el_residual', caught.exception.residuals)
        self.assertGreater(caught.exception.residuals['el_residual'], 0)

    def test_gn_check_empty(self):
        gs = minimize(ModelParams(), self.op)
        self.assertRaises(ValueError, gn_check, [], gs, self.op)

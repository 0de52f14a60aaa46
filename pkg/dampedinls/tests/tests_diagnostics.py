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

from math import exp, log
from unittest import TestCase

import numpy as np

from dampedinls.damping import Constant, ScaledLog, Zero
from dampedinls.diagnostics import DispersiveFit, RunVerdict, \
    a_star_search, convergence_order, decay_fit, dispersive_fit, \
    dispersive_scan, gauge_consistency, gronwall_bound_check, hardy_check, \
    hardy_family, identity_study, identity_suite, mass_subcritical_prediction, \
    norm_equivalence, reversibility_error, run_points, run_verdict, \
    scattering_detector, threshold_scan
from dampedinls.evolution import BlowUp, ObservableRecord, Trajectory, evolve
from dampedinls.groundstate import minimize
from dampedinls.params import ModelParams
from dampedinls.radial import RadialGrid, ReducedField, build_operator, \
    gaussian, h1_lambda_norm, hardy_ratio
from dampedinls.tests.constants import SMALL_N, SMALL_R

MASS_CRITICAL = ModelParams(3, 0.5, 2.0, 0.0, -1)


def synthetic(rate: float, flagged_after: float = np.inf) -> Trajectory:
    traj = Trajectory(MASS_CRITICAL, Constant(rate / 2), 0.5, 10.0)
    for t in np.arange(0, 10.5, 0.5):
        flagged = t > flagged_after
        quadform = 1e3 if flagged else 2 * exp(-rate * t)
        traj.append(ObservableRecord(float(t), 1.0, quadform, 0.0, quadform,
                                     quadform, rate / 2 * t, flagged))
    return traj


class TestConvergenceOrder(TestCase):

    def test_exact_power(self):
        steps = [0.1, 0.05, 0.025]
        estimate = convergence_order(steps, [3 * dt ** 2 for dt in steps])
        self.assertAlmostEqual(estimate.order, 2.0)
        self.assertEqual(estimate.levels, 3)
        self.assertTrue(estimate.within(2, 1e-9))
        self.assertFalse(estimate.within(1, 0.5))

    def test_invalid(self):
        self.assertRaises(ValueError, convergence_order, [0.1, 0.05], [1, 2])
        self.assertRaises(ValueError, convergence_order, [0.1, 0.05, 0.02],
                          [1, 0, 2])
        self.assertRaises(ValueError, convergence_order, [0.1, 0.05, 0.02],
                          [1, 2])


class TestDecayFit(TestCase):

    def test_exponential(self):
        fit = decay_fit(synthetic(0.6), 'sqrtK_norm_sq', (1, 9), predicted=0.6)
        self.assertAlmostEqual(fit.rate, 0.6)
        self.assertAlmostEqual(fit.intercept, log(2))
        self.assertAlmostEqual(fit.r_squared, 1.0)
        self.assertAlmostEqual(fit.margin, 0.0)
        self.assertEqual(fit.samples, 17)
        self.assertEqual(fit.as_dict()['window'], (1.0, 9.0))

    def test_skips_flagged_samples(self):
        fit = decay_fit(synthetic(0.6, flagged_after=5), 'sqrtK_norm_sq', (1, 9))
        self.assertAlmostEqual(fit.rate, 0.6)
        self.assertEqual(fit.samples, 9)
        self.assertIsNone(fit.margin)

    def test_other_observables(self):
        self.assertAlmostEqual(decay_fit(synthetic(0.6), 'mass', (0, 10)).rate, 0)
        self.assertGreater(decay_fit(synthetic(0.6), 'h1_norm', (0, 10)).rate, 0)

    def test_invalid(self):
        traj = synthetic(0.6)
        self.assertRaises(ValueError, decay_fit, traj, 'sqrtK_norm_sq', (5, 1))
        self.assertRaises(ValueError, decay_fit, traj, 'momentum', (1, 5))
        self.assertRaises(ValueError, decay_fit, traj, 'sqrtK_norm_sq', (1, 1.5))
        self.assertEqual(mass_subcritical_prediction(Constant(0.3), 10), 0.6)
        self.assertEqual(mass_subcritical_prediction(ScaledLog(1.0), 10), 0.0)


class TestIdentities(TestCase):

    @classmethod
    def setUpClass(cls):
        # radial cubic with lambda = 0 and b = 0 keeps every substep smooth
        cls.params = ModelParams(3, 0.0, 3.0, 0.0, -1)
        cls.op = build_operator(RadialGrid(SMALL_R, SMALL_N), 3, 0.0)
        cls.u0 = gaussian(cls.op.grid, 3)

    def test_suite(self):
        traj = evolve(self.u0, 1.0, 0.01, Constant(0.3), self.params, self.op)
        report = identity_suite(traj)
        self.assertLess(report.mass_law, 1e-10)
        self.assertLess(report.energy_law, 1e-2)
        self.assertLess(report.hamiltonian, 1e-2)
        self.assertLess(report.v_hamiltonian, 1e-2)
        self.assertEqual(report.samples, 101)

    def test_second_order(self):
        report = identity_study(self.u0, 1.0, (0.01, 0.02, 0.005), Constant(0.3),
                                self.params, self.op)
        self.assertEqual(set(report.orders),
                         {'energy_law', 'hamiltonian', 'v_hamiltonian'})
        for name, estimate in report.orders.items():
            self.assertTrue(estimate.within(2, 0.4), f'{name}: {estimate}')
        self.assertEqual(report.samples, 201)
        self.assertIn('orders', report.as_dict())

    def test_mass_law_with_singular_weight(self):
        params = ModelParams(3, 0.5, 2.0, 1.0, -1)
        op = build_operator(RadialGrid(SMALL_R, SMALL_N), 3, 1.0)
        traj = evolve(gaussian(op.grid, 3), 1.0, 0.01, Constant(0.3), params, op)
        self.assertLess(identity_suite(traj).mass_law, 1e-10)

    def test_gauge_consistency(self):
        coarse = gauge_consistency(self.u0, 1.0, 0.02, Constant(0.3), self.params,
                                   self.op)
        fine = gauge_consistency(self.u0, 1.0, 0.01, Constant(0.3), self.params,
                                 self.op)
        self.assertLess(fine, 1e-2)
        # the orderings differ, so the gap is a true O(dt^2) and not round-off
        self.assertGreater(fine, 1e-10)
        self.assertTrue(3 < coarse / fine < 5.5)

    def test_reversibility(self):
        self.assertLess(reversibility_error(self.u0, 1.0, 0.01, self.params,
                                            self.op), 1e-10)

    def test_too_few_samples(self):
        traj = evolve(self.u0, 0.1, 0.02, Zero(), self.params, self.op)
        self.assertRaises(ValueError, identity_suite, traj)


class TestScattering(TestCase):

    @classmethod
    def setUpClass(cls):
        cls.op = build_operator(RadialGrid(SMALL_R, SMALL_N), 3, 0.0)
        cls.free = gaussian(cls.op.grid, 3).w
        cls.extra = gaussian(cls.op.grid, 3, width=2.0).w

    def snapshots(self, profile):
        times = np.linspace(0, 20, 41)
        return [ReducedField(self.op.grid, 3,
                             self.op.evolve_samples(self.free + profile(t) * self.extra,
                                                    t), t)
                for t in times]

    def test_converging_profile(self):
        report = scattering_detector(self.snapshots(lambda t: exp(-t)), self.op)
        self.assertTrue(report.monotone)
        self.assertTrue(report.scatters)
        self.assertEqual(len(report.tail), 41)
        self.assertEqual(report.tail[-1], 0.0)

    def test_bump_in_tail(self):
        snapshots = self.snapshots(lambda t: exp(-t))
        late = snapshots[:-3] + [snapshots[-3].scaled(1.5)] + snapshots[-2:]
        self.assertFalse(scattering_detector(late, self.op).monotone)
        early = snapshots[:10] + [snapshots[10].scaled(1.5)] + snapshots[11:]
        self.assertFalse(scattering_detector(early, self.op).scatters)
        report = scattering_detector(early, self.op, window=0.5)
        self.assertTrue(report.monotone)
        self.assertTrue(report.scatters)

    def test_oscillating_profile(self):
        report = scattering_detector(self.snapshots(np.sin), self.op)
        self.assertFalse(report.scatters)

    def test_standing_wave_is_bounded(self):
        params = ModelParams(3, 0.5, 1.5, 0.0, -1)
        gs = minimize(params, self.op)
        traj = evolve(gs.Q, 5.0, 0.01, Zero(), params, self.op,
                      snapshot_every=0.5)
        self.assertEqual(run_verdict(traj, self.op), RunVerdict.BOUNDED)

    def test_mass_subcritical_scatters(self):
        params = ModelParams(3, 0.5, 1.5, 0.0, -1)
        op = build_operator(RadialGrid(), 3, 0.0)
        profile = Constant(0.5)
        traj = evolve(gaussian(op.grid, 3), 40.0, 0.02, profile, params, op,
                      sample_every=5, snapshot_every=0.5)
        # only the late tail has to decrease
        self.assertEqual(run_verdict(traj, op, window=0.5), RunVerdict.SCATTERS)
        predicted = mass_subcritical_prediction(profile, 40.0)
        fit = decay_fit(traj, 'sqrtK_norm_sq', (1, 6), predicted)
        self.assertGreaterEqual(fit.rate, 0.85 * predicted)

    def test_blowup_verdict(self):
        traj = Trajectory(MASS_CRITICAL, Zero(), 0.1, 1.0)
        traj.blowup = BlowUp(0.5, 'test')
        self.assertEqual(run_verdict(traj, self.op), RunVerdict.BLOWUP)

    def test_invalid(self):
        snapshots = self.snapshots(np.sin)
        self.assertRaises(ValueError, scattering_detector, snapshots[:2], self.op)
        self.assertRaises(ValueError, scattering_detector, snapshots[::-1], self.op)
        self.assertRaises(ValueError, scattering_detector, snapshots, self.op,
                          window=0)
        self.assertRaises(ValueError, scattering_detector, snapshots, self.op,
                          window=1.5)


class TestGronwall(TestCase):

    @classmethod
    def setUpClass(cls):
        cls.op = build_operator(RadialGrid(SMALL_R, SMALL_N), 3, 0.0)
        cls.gs = minimize(MASS_CRITICAL, cls.op)

    def test_bound_holds(self):
        traj = evolve(self.gs.Q.scaled(1 / 3), 5.0, 0.01, Constant(0.2),
                      MASS_CRITICAL, self.op, sample_every=10)
        report = gronwall_bound_check(traj, self.gs)
        self.assertAlmostEqual(report.rho, 1 / 3)
        # (2 - rho/(1 - rho)) a
        self.assertAlmostEqual(report.rate, 0.3)
        self.assertTrue(report.condition_holds)
        self.assertTrue(report.below_threshold)
        self.assertTrue(report.passed)
        self.assertLessEqual(report.max_ratio, 1.05)

    def test_hypothesis_not_met(self):
        traj = evolve(self.gs.Q.scaled(0.8), 1.0, 0.01, Constant(0.2),
                      MASS_CRITICAL, self.op, sample_every=10)
        with self.assertLogs('dampedinls.diagnostics', 'WARNING'):
            report = gronwall_bound_check(traj, self.gs)
        self.assertFalse(report.condition_holds)
        self.assertFalse(report.below_threshold)
        self.assertIsNone(report.passed)
        self.assertIsNone(report.rate)

    def test_invalid(self):
        params = ModelParams(3, 0.5, 3.0)
        traj = Trajectory(params, Zero(), 0.1, 1.0)
        self.assertRaises(ValueError, gronwall_bound_check, traj, self.gs)
        other = Trajectory(MASS_CRITICAL.replace(mu=1), Zero(), 0.1, 1.0)
        self.assertRaises(ValueError, gronwall_bound_check, other, self.gs)

    def test_threshold_scan(self):
        rows = threshold_scan(self.gs, Constant(0.3), [0.5], 1.0, 0.01,
                              window=(0.2, 1.0))
        self.assertEqual(len(rows), 1)
        row = rows[0]
        self.assertIn(row.verdict, (RunVerdict.SCATTERS, RunVerdict.BOUNDED))
        self.assertAlmostEqual(row.norm_u0, 0.5 * 2 / 3 * self.gs.norm_q)
        self.assertAlmostEqual(row.end_time, 1.0)
        self.assertRaises(ValueError, threshold_scan, self.gs, Constant(0.3), [],
                          1.0, 0.01)


class TestScans(TestCase):

    @classmethod
    def setUpClass(cls):
        cls.grid = RadialGrid(SMALL_R, SMALL_N)

    def test_parallel_matches_serial(self):
        params = ModelParams(3, 0.5, 3.0)
        w = gaussian(self.grid, 3, amplitude=0.3).w
        jobs = [(gamma, params, self.grid, w, Constant(gamma), 0.5, 0.01, 0.1,
                 1e-4, None, 1.0) for gamma in (0.1, 0.5)]
        self.assertEqual(run_points(jobs, workers=2), run_points(jobs, workers=1))

    def test_a_star_intercritical(self):
        params = ModelParams(3, 0.5, 3.0)
        u0 = gaussian(self.grid, 3, amplitude=0.3)
        report = a_star_search(params, u0, [0.5, 2.0], 1.0, 0.01)
        self.assertEqual([row.value for row in report.rows], [0.5, 2.0])
        op = build_operator(self.grid, 3, 0.0)
        self.assertAlmostEqual(report.h1_norm, h1_lambda_norm(op, u0))
        self.assertGreater(report.heuristic, 0)
        self.assertIsNone(report.a_double_star)
        if report.empirical is None:
            self.assertIsNone(report.bootstrap_closes)
        else:
            self.assertIsInstance(report.bootstrap_closes, bool)

    def test_a_star_energy_critical(self):
        params = ModelParams(3, 0.5, 4.0)
        u0 = gaussian(self.grid, 3, amplitude=0.3)
        report = a_star_search(params, u0, [1.0], 0.5, 0.01, c0=1.0)
        self.assertIsNone(report.heuristic)
        self.assertGreaterEqual(report.a_double_star, 0)

    def test_a_star_invalid(self):
        u0 = gaussian(self.grid, 3)
        self.assertRaises(ValueError, a_star_search, MASS_CRITICAL, u0, [1.0],
                          1.0, 0.1)
        params = ModelParams(3, 0.5, 3.0)
        self.assertRaises(ValueError, a_star_search, params, u0, [], 1.0, 0.1)
        self.assertRaises(ValueError, a_star_search, params, u0, [0.0, 1.0],
                          1.0, 0.1)
        self.assertRaises(ValueError, a_star_search, params, u0, [2.0, 1.0],
                          1.0, 0.1)


class TestDispersive(TestCase):

    def test_slopes(self):
        # wide enough that nothing reaches the wall before t = 50
        grid = RadialGrid(250.0, 2048)
        fits = dispersive_scan(ModelParams(), grid, (2, 4, 6), (5, 50))
        np.testing.assert_allclose([fit.predicted_slope for fit in fits],
                                   [0.0, -0.75, -1.0], atol=1e-12)
        for fit in fits:
            self.assertLess(fit.relative_error, 0.1, fit)

    def test_relative_error(self):
        fit = DispersiveFit(2.0, -0.01, 0.0, (1.0, 2.0), 1.0, 0.0)
        self.assertEqual(fit.relative_error, 0.01)
        fit = DispersiveFit(4.0, -0.6, -0.75, (1.0, 2.0), 1.0, 0.0)
        self.assertAlmostEqual(fit.relative_error, 0.2)
        self.assertAlmostEqual(fit.as_dict()['relative_error'], 0.2)

    def test_invalid(self):
        op = build_operator(RadialGrid(SMALL_R, SMALL_N), 3, -0.1875)
        phi = gaussian(op.grid, 3)
        self.assertRaises(ValueError, dispersive_fit, op, phi, 1.5, (1, 2))
        # N/kappa_+ = 12 is excluded
        self.assertRaises(ValueError, dispersive_fit, op, phi, 12, (1, 2))
        self.assertRaises(ValueError, dispersive_fit, op, phi, 4, (0, 2))
        self.assertRaises(ValueError, dispersive_scan, ModelParams(), op.grid, (),
                          (1, 2))


class TestHardy(TestCase):

    def setUp(self):
        self.grid = RadialGrid(SMALL_R, SMALL_N)

    def test_check(self):
        report = hardy_check(self.grid, 3, 10, np.random.default_rng(11))
        self.assertTrue(report.passed)
        self.assertEqual(report.lambda_n, 0.25)
        self.assertGreaterEqual(report.min_ratio, 0.25 * 0.95)
        self.assertEqual(len(report.family), 3)

    def test_family_approaches_constant(self):
        op = build_operator(self.grid, 5, 0.0)
        ratios = [hardy_ratio(op, f) for f in hardy_family(self.grid, 5, (0.4, 0.1))]
        self.assertGreater(ratios[0], ratios[1])
        self.assertGreater(ratios[1], 2.25 * 0.95)

    def test_norm_equivalence(self):
        results = norm_equivalence(self.grid, 3, (0.0, 1.0, -0.2), 5,
                                   np.random.default_rng(5))
        self.assertEqual([result.lam for result in results], [0.0, 1.0, -0.2])
        self.assertAlmostEqual(results[0].c1, 1.0)
        self.assertAlmostEqual(results[0].c2, 1.0)
        self.assertGreater(results[1].c1, 1.0)
        self.assertLess(results[2].c2, 1.0)
        self.assertGreater(results[2].c1, 0.0)

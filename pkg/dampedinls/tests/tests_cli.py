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

import argparse
import os
from pathlib import Path
from tempfile import TemporaryDirectory
from unittest import TestCase, mock

import numpy as np

from dampedinls.artifacts import read_csv, read_json, write_csv
from dampedinls.cli import EXIT_CONFIG, EXIT_FAILED, EXIT_OK, _seed, \
    build_parser, main
from dampedinls.evolution import Trajectory
from dampedinls.radial import RadialGrid

SMALL_RUN = """
[grid]
R = 20
n = 256

[time]
T = 0.5
dt = 0.01
snapshot_every = 0.1

[verify]
samples = 5
gn_samples = 5

[scan]
window = 0.5, 2
"""


def columns_index(name: str) -> int:
    return Trajectory.COLUMNS.index(name)


class CliTestCase(TestCase):

    def setUp(self):
        self.directory = TemporaryDirectory()
        self.root = Path(self.directory.name)
        self.out = self.root / 'out'
        self.config = self.root / 'run.ini'
        self.config.write_text(SMALL_RUN)

    def tearDown(self):
        self.directory.cleanup()

    def run_command(self, *argv: str) -> int:
        with self.assertLogs('dampedinls', 'INFO'):
            return main(list(argv) + ['--config', str(self.config),
                                      '--out', str(self.out)])


class TestSeed(TestCase):

    def test_valid(self):
        self.assertEqual(_seed('42'), 42)
        self.assertEqual(_seed('0'), 0)
        seed = _seed('random')
        self.assertTrue(0 <= seed < 2 ** 32)

    def test_invalid(self):
        self.assertRaises(argparse.ArgumentTypeError, _seed, '-1')
        self.assertRaises(argparse.ArgumentTypeError, _seed, 'seven')


class TestParser(TestCase):

    def test_commands(self):
        args = build_parser().parse_args(['verify', '--suite', 'hardy', '--seed', '3'])
        self.assertEqual((args.command, args.suite, args.seed), ('verify', 'hardy', 3))
        args = build_parser().parse_args(['scan', '--kind', 'threshold'])
        self.assertEqual((args.kind, args.workers, args.config), ('threshold', 1, None))
        self.assertEqual(build_parser().parse_args(['verify']).suite, 'all')
        args = build_parser().parse_args(['simulate', '--snapshot-every', '0.5'])
        self.assertEqual(args.snapshot_every, 0.5)
        self.assertIsNone(build_parser().parse_args(['simulate']).snapshot_every)

    def test_invalid(self):
        parser = build_parser()
        with mock.patch('sys.stderr'):
            self.assertRaises(SystemExit, parser.parse_args, [])
            self.assertRaises(SystemExit, parser.parse_args, ['scan'])
            self.assertRaises(SystemExit, parser.parse_args,
                              ['verify', '--suite', 'everything'])
            self.assertRaises(SystemExit, parser.parse_args,
                              ['simulate', '--snapshot-every', '0'])
            self.assertRaises(SystemExit, parser.parse_args,
                              ['groundstate', '--snapshot-every', '0.5'])


class TestSimulate(CliTestCase):

    def test_outputs(self):
        self.assertEqual(self.run_command('simulate'), EXIT_OK)
        columns, table = read_csv(self.out / 'trajectory.csv')
        self.assertEqual(columns, Trajectory.COLUMNS)
        self.assertEqual(table.shape, (51, len(Trajectory.COLUMNS)))
        summary = read_json(self.out / 'summary.json')
        self.assertEqual(summary['config']['grid'], {'R': 20.0, 'n': 256})
        self.assertEqual(summary['seed'], 0)
        self.assertIn(summary['verdict'], ('scatters', 'bounded'))
        self.assertIsNone(summary['blowup'])
        identities = read_json(self.out / 'identities.json')
        self.assertLess(identities['mass_law'], 1e-10)
        metadata = read_json(self.out / 'metadata.json')
        self.assertEqual(metadata['command'], 'simulate')

    def test_reproducible(self):
        self.run_command('simulate')
        first = (self.out / 'summary.json').read_text()
        self.run_command('simulate')
        self.assertEqual((self.out / 'summary.json').read_text(), first)

    def test_initial_file(self):
        grid = RadialGrid(20, 256)
        u = np.exp(-grid.r ** 2)
        write_csv(self.root / 'u0.csv', ('r', 're_u', 'im_u'),
                  np.column_stack((grid.r, u, 0 * u)))
        self.config.write_text(SMALL_RUN + '\n[initial]\nkind = file\npath = u0.csv\n')
        self.assertEqual(self.run_command('simulate'), EXIT_OK)

    def test_snapshots(self):
        self.assertEqual(self.run_command('simulate', '--snapshot-every', '0.25'),
                         EXIT_OK)
        summary = read_json(self.out / 'summary.json')
        self.assertEqual([item['file'] for item in summary['snapshots']],
                         [f'snapshots/snapshot_{i:04d}.csv' for i in range(3)])
        np.testing.assert_allclose([item['t'] for item in summary['snapshots']],
                                   [0, 0.25, 0.5], atol=1e-12)
        columns, table = read_csv(self.out / 'snapshots' / 'snapshot_0002.csv')
        self.assertEqual(columns, ('r', 're_u', 'im_u', 'abs_u_sq'))
        self.assertEqual(table.shape, (256, 4))
        np.testing.assert_allclose(table[:, 3], table[:, 1] ** 2 + table[:, 2] ** 2,
                                   rtol=1e-12)
        mass = read_csv(self.out / 'trajectory.csv')[1][0, columns_index('mass')]

        self.config.write_text(
            SMALL_RUN + '\n[initial]\nkind = file\n'
            f'path = {self.out / "snapshots" / "snapshot_0000.csv"}\n')
        self.assertEqual(self.run_command('simulate'), EXIT_OK)
        restarted = read_csv(self.out / 'trajectory.csv')[1][0, columns_index('mass')]
        self.assertAlmostEqual(restarted / mass, 1.0, places=12)
        self.assertEqual(read_json(self.out / 'summary.json')['snapshots'], [])

    def test_missing_initial_file(self):
        self.config.write_text(SMALL_RUN + '\n[initial]\nkind = file\npath = u0.csv\n')
        self.assertEqual(self.run_command('simulate'), EXIT_CONFIG)

    def test_output_from_environment(self):
        with mock.patch.dict(os.environ, {'DAMPEDINLS_OUT': str(self.out)}):
            with self.assertLogs('dampedinls', 'INFO'):
                status = main(['simulate', '--config', str(self.config)])
        self.assertEqual(status, EXIT_OK)
        self.assertTrue((self.out / 'trajectory.csv').exists())


class TestInvalidConfig(CliTestCase):

    def test_bad_value(self):
        self.config.write_text('[model]\nb = 2.5\n')
        with self.assertLogs('dampedinls.cli', 'ERROR') as logs:
            status = main(['simulate', '--config', str(self.config),
                           '--out', str(self.out)])
        self.assertEqual(status, EXIT_CONFIG)
        self.assertIn('model.b', logs.output[0])
        self.assertFalse(self.out.exists())

    def test_missing_config(self):
        with self.assertLogs('dampedinls.cli', 'ERROR'):
            status = main(['simulate', '--config', str(self.root / 'none.ini')])
        self.assertEqual(status, EXIT_CONFIG)


class TestGroundState(CliTestCase):

    def test_outputs(self):
        status = self.run_command('groundstate')
        self.assertIn(status, (EXIT_OK, EXIT_FAILED))
        payload = read_json(self.out / 'groundstate.json')
        self.assertEqual(status == EXIT_OK, payload['certified'])
        self.assertLess(payload['el_residual'], 1e-8)
        self.assertEqual(payload['profile'], 'groundstate.csv')
        self.assertEqual(payload['config']['model']['p'], 2.0)
        columns, table = read_csv(self.out / 'groundstate.csv')
        self.assertEqual(columns, ('r', 'Q', 'w'))
        self.assertEqual(table.shape, (256, 3))

    def test_scaled_ground_state(self):
        self.run_command('groundstate')
        self.config.write_text(
            SMALL_RUN + '\n[initial]\nkind = groundstate\nscale = 0.5\n'
            f'path = {self.out / "groundstate.json"}\n')
        self.assertEqual(self.run_command('simulate'), EXIT_OK)
        columns, table = read_csv(self.out / 'trajectory.csv')
        gs = read_json(self.out / 'groundstate.json')
        mass = table[0, columns.index('mass')]
        self.assertAlmostEqual(mass / gs['mass_q'], 0.25)


class TestVerify(CliTestCase):

    def test_hardy(self):
        self.assertEqual(self.run_command('verify', '--suite', 'hardy'), EXIT_OK)
        report = read_json(self.out / 'verify.json')
        self.assertEqual(list(report['suites']), ['hardy'])
        self.assertEqual(report['failed'], [])
        self.assertEqual([item['dim'] for item in report['suites']['hardy']['dims']],
                         [3, 4, 5])

    def test_gronwall_skipped(self):
        self.config.write_text(SMALL_RUN + '\n[model]\np = 3\n')
        self.assertEqual(self.run_command('verify', '--suite', 'gronwall'), EXIT_OK)
        report = read_json(self.out / 'verify.json')
        self.assertIsNone(report['suites']['gronwall']['passed'])


class TestScan(CliTestCase):

    def test_dispersive_exponents(self):
        self.assertEqual(self.run_command('scan', '--kind', 'dispersive-exponents'),
                         EXIT_OK)
        columns, table = read_csv(self.out / 'scan.csv')
        self.assertEqual(columns[0], 'r')
        np.testing.assert_allclose(table[:, 0], [2, 4, 6])

    def test_damping_needs_intercritical(self):
        self.assertEqual(self.run_command('scan', '--kind', 'damping'), EXIT_CONFIG)

    def test_damping(self):
        text = SMALL_RUN.replace('window = 0.5, 2', 'window = 0.5, 2\ngammas = 0.5, 1')
        self.config.write_text(text + '\n[model]\np = 3\n[initial]\namplitude = 0.3\n')
        self.assertEqual(self.run_command('scan', '--kind', 'damping'), EXIT_OK)
        payload = read_json(self.out / 'scan.json')
        self.assertEqual([row['value'] for row in payload['rows']], [0.5, 1.0])
        self.assertIn('heuristic', payload)
        self.assertEqual(payload['verdict_codes'],
                         {'scatters': 0, 'bounded': 1, 'blow-up': 2})

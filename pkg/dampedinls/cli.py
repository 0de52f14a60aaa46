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

"""Command line front end: ``dampedinls {simulate,groundstate,verify,scan}``.

Exit status: 0 done (blow-up and non-scattering are results, not
failures), 1 a selected check failed, 2 invalid configuration or
hypotheses, 3 internal error.
"""

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
from passphrase.random import randint

from . import __version__
from .artifacts import read_csv, write_csv, write_json, write_metadata
from .config import ExperimentConfig, default_output_dir, load_config
from .damping import gauge_factor
from .diagnostics import (MIN_SAMPLES, RunVerdict, a_star_search, dispersive_scan,
                          gronwall_bound_check, hardy_check, identity_study,
                          identity_suite, mass_subcritical_prediction,
                          norm_equivalence, run_verdict, threshold_scan)
from .errors import ConfigError, ConvergenceError
from .evolution import Trajectory, evolve
from .groundstate import (GroundState, gn_check, load_ground_state, minimize,
                          save_ground_state)
from .params import Regime, classify_regime, derived_exponents
from .radial import (ReducedField, SpectralOperator, gaussian, operator_for,
                     random_smooth_field, snapshot_table)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_INTERNAL = 3

SUITES = ('identities', 'hardy', 'gn', 'dispersive', 'gronwall')
SCAN_KINDS = ('threshold', 'damping', 'dispersive-exponents')
VERDICT_CODES = {RunVerdict.SCATTERS: 0, RunVerdict.BOUNDED: 1, RunVerdict.BLOWUP: 2}
SEED_BITS = 32
ORDER = 2.0
ORDER_TOLERANCE = 0.3
MASS_LAW_TOLERANCE = 1e-10
DISPERSIVE_TOLERANCE = 0.1
SNAPSHOT_COLUMNS = ('r', 're_u', 'im_u', 'abs_u_sq')


def _seed(text: str) -> int:
    if text == 'random':
        return randint(SEED_BITS)
    try:
        seed = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError('seed must be an integer or "random"')
    if seed < 0:
        raise argparse.ArgumentTypeError('seed must be >= 0')
    return seed


def _positive_time(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f'{text!r} is not a number')
    if not value > 0:
        raise argparse.ArgumentTypeError('must be > 0')
    return value


def build_parser() -> argparse.ArgumentParser:
    """Get the argument parser."""
    parser = argparse.ArgumentParser(
        prog='dampedinls',
        description='Numerical laboratory for the damped inhomogeneous NLS '
                    'with an inverse-square potential.')
    parser.add_argument('--version', action='version', version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=Path, default=None,
                        help='INI experiment file (defaults when omitted)')
    common.add_argument('--out', type=Path, default=None,
                        help='output directory (default $DAMPEDINLS_OUT or ./out)')
    common.add_argument('--seed', type=_seed, default=0,
                        help='seed for random test fields, or "random"')
    common.add_argument('--workers', type=int, default=1,
                        help='worker processes for scans')
    common.add_argument('-v', '--verbose', action='store_true',
                        help='log at DEBUG level')
    commands = parser.add_subparsers(dest='command', required=True)
    simulate = commands.add_parser('simulate', parents=[common],
                                   help='evolve the initial data and record observables')
    simulate.add_argument('--snapshot-every', type=_positive_time, default=None,
                          help='write u every this much time to snapshots/')
    commands.add_parser('groundstate', parents=[common],
                        help='compute and certify the ground state Q')
    verify = commands.add_parser('verify', parents=[common],
                                 help='run diagnostic suites')
    verify.add_argument('--suite', choices=SUITES + ('all',), default='all')
    scan = commands.add_parser('scan', parents=[common],
                               help='run a parameter scan')
    scan.add_argument('--kind', choices=SCAN_KINDS, required=True)
    return parser


def configure_logging(verbose: bool) -> None:
    """Send log records to stderr, DEBUG when verbose."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO, stream=sys.stderr,
        format='%(asctime)s %(levelname)s %(name)s: %(message)s')


def _field_from_file(path: str, config: ExperimentConfig) -> ReducedField:
    try:
        columns, table = read_csv(path)
    except OSError as error:
        raise ValueError(f'can not read {path}: {error.strerror or error}')
    grid = config.grid
    if 'r' not in columns or table.shape[0] != grid.n:
        raise ValueError(f'{path} must hold column r with {grid.n} rows')
    if not np.allclose(table[:, columns.index('r')], grid.r, rtol=1e-12, atol=0):
        raise ValueError(f'{path} was sampled on a different grid')
    if 're_u' in columns and 'im_u' in columns:
        u = table[:, columns.index('re_u')] + 1j * table[:, columns.index('im_u')]
    elif 'Q' in columns:
        u = table[:, columns.index('Q')]
    else:
        raise ValueError(f'{path} has neither re_u, im_u nor Q columns')
    return ReducedField.from_u(grid, config.params.N, u)


class Session:
    """Objects shared by the commands of one invocation, built on demand."""

    def __init__(self, config: ExperimentConfig, out: Path, seed: int,
                 workers: int):
        """Keep the configuration and the output directory."""
        self.config = config
        self.out = out
        self.seed = seed
        self.workers = workers
        self._op: Optional[SpectralOperator] = None
        self._gs: Optional[GroundState] = None

    @property
    def op(self) -> SpectralOperator:
        """Get the operator of the configured model and grid."""
        if self._op is None:
            self._op = operator_for(self.config.params, self.config.grid)
        return self._op

    @property
    def ground_state(self) -> GroundState:
        """Get Q: loaded from initial.path when it names one, else computed."""
        if self._gs is None:
            config = self.config
            path = config.initial.path
            if config.initial.kind == 'groundstate' and path:
                try:
                    gs = load_ground_state(path)
                except (OSError, KeyError) as error:
                    raise ValueError(f'can not load a ground state from {path}: '
                                     f'{error}')
                if gs.params != config.params or gs.Q.grid != config.grid:
                    raise ValueError(f'{path} holds a ground state of another '
                                     f'model or grid')
            else:
                gs = minimize(config.params, self.op,
                              tol=config.option('groundstate', 'tol'),
                              max_iter=config.option('groundstate', 'max_iter'))
            self._gs = gs
        return self._gs

    def initial_field(self) -> ReducedField:
        """Get u0 as configured in the initial section."""
        initial = self.config.initial
        if initial.kind == 'groundstate':
            return self.ground_state.Q.scaled(initial.scale)
        if initial.kind == 'file':
            return _field_from_file(initial.path, self.config)
        return gaussian(self.config.grid, self.config.params.N, initial.width,
                        initial.amplitude)

    def rng(self) -> np.random.Generator:
        """Get a fresh generator from the session seed."""
        return np.random.default_rng(self.seed)

    def evolve(self, u0: ReducedField) -> Trajectory:
        """Run the configured time evolution from u0."""
        config = self.config
        diagnostics = config.options['diagnostics']
        return evolve(u0, config.T, config.dt, config.damping, config.params,
                      self.op, sample_every=config.sample_every,
                      snapshot_every=config.snapshot_every,
                      blowup_factor=diagnostics['blowup_factor'],
                      resolution_limit=diagnostics['resolution_limit'],
                      gradient_limit=diagnostics['gradient_limit'],
                      boundary_fraction=diagnostics['boundary_fraction'])

    def payload(self, **values: Any) -> Dict[str, Any]:
        """Get a JSON payload that embeds the resolved configuration."""
        return dict(values, config=self.config.as_dict(), seed=self.seed)


def _write_snapshots(session: Session, traj: Trajectory) -> List[Dict[str, Any]]:
    written = []
    for index, v in enumerate(traj.snapshots):
        u = v.scaled(gauge_factor(traj.profile, v.t, 1))
        name = f'snapshot_{index:04d}.csv'
        write_csv(session.out / 'snapshots' / name, SNAPSHOT_COLUMNS,
                  snapshot_table(u))
        written.append({'file': f'snapshots/{name}', 't': v.t})
    logger.info('wrote %d snapshots', len(written))
    return written


def cmd_simulate(session: Session, snapshots: bool = False) -> int:
    """Evolve u0; write trajectory.csv, summary.json and identities.json.

    With snapshots, u at every snapshot time also goes to
    snapshots/snapshot_NNNN.csv, which initial.kind = file can read back.
    """
    config = session.config
    traj = session.evolve(session.initial_field())
    write_csv(session.out / 'trajectory.csv', Trajectory.COLUMNS, traj.table())
    written = _write_snapshots(session, traj) if snapshots else []

    try:
        verdict = run_verdict(traj, session.op,
                              config.option('diagnostics', 'scatter_tol'),
                              config.option('diagnostics', 'monotone_window'))
    except ValueError as error:
        logger.warning('no scattering verdict: %s', error)
        verdict = RunVerdict.BLOWUP if traj.blowup else None
    last = traj.records[-1]
    write_json(session.out / 'summary.json', session.payload(
        derived=derived_exponents(config.params)._asdict(),
        verdict=verdict,
        blowup=traj.blowup._asdict() if traj.blowup else None,
        samples=len(traj.records),
        final=last._asdict(),
        snapshots=written,
    ))

    if len(traj.records) >= MIN_SAMPLES:
        identities = identity_suite(traj).as_dict()
    else:
        identities = {'error': f'fewer than {MIN_SAMPLES} samples'}
    write_json(session.out / 'identities.json', session.payload(**identities))
    logger.info('simulation finished: verdict %s', verdict)
    return EXIT_OK


def _certified(session: Session, gs: GroundState) -> bool:
    config = session.config
    return gs.certified(config.option('groundstate', 'identity_tol'),
                        config.option('groundstate', 'el_tol'))


def cmd_groundstate(session: Session) -> int:
    """Compute Q; write groundstate.json and groundstate.csv."""
    gs = session.ground_state
    certified = _certified(session, gs)
    save_ground_state(gs, session.out, extra=session.payload(certified=certified))
    if not certified:
        logger.warning('ground state not certified: quotient gap %.3e, '
                       'Pohozaev residual %.3e, Euler-Lagrange residual %.3e',
                       gs.quotient_gap, max(gs.pohozaev_residuals), gs.el_residual)
        return EXIT_FAILED
    logger.info('ground state certified: K_opt=%.12g, ||Q||=%.12g', gs.k_opt,
                gs.norm_q)
    return EXIT_OK


def _suite_identities(session: Session) -> Dict[str, Any]:
    config = session.config
    steps = (4 * config.dt, 2 * config.dt, config.dt)
    report = identity_study(session.initial_field(), config.T, steps,
                            config.damping, config.params, session.op)
    names = ('energy_law', 'hamiltonian', 'v_hamiltonian')
    passed = (report.mass_law <= MASS_LAW_TOLERANCE
              and all(name in report.orders
                      and report.orders[name].within(ORDER, ORDER_TOLERANCE)
                      for name in names))
    return dict(report.as_dict(), steps=steps, passed=passed)


def _suite_hardy(session: Session) -> Dict[str, Any]:
    config = session.config
    rng = session.rng()
    dims = sorted({3, 4, 5, config.params.N})
    samples = config.option('verify', 'samples')
    reports = [hardy_check(config.grid, dim, samples, rng) for dim in dims]
    lams = sorted({0.5, -0.5 * derived_exponents(config.params).lambda_n,
                   config.params.lam})
    equivalence = norm_equivalence(config.grid, config.params.N, lams, samples, rng)
    return {'dims': [report.as_dict() for report in reports],
            'norm_equivalence': [item.as_dict() for item in equivalence],
            'passed': all(report.passed for report in reports)}


def _suite_gn(session: Session) -> Dict[str, Any]:
    config = session.config
    gs = session.ground_state
    rng = session.rng()
    samples = [random_smooth_field(config.grid, config.params.N, rng)
               for _ in range(config.option('verify', 'gn_samples'))]
    report = gn_check(samples, gs, session.op)
    return {'ground_state': gs.to_dict(), 'max_ratio': report.max_ratio,
            'argmax': report.argmax,
            'passed': report.passed and _certified(session, gs)}


def _suite_dispersive(session: Session) -> Dict[str, Any]:
    config = session.config
    fits = dispersive_scan(config.params, config.grid,
                           config.option('verify', 'r_values'),
                           config.option('scan', 'window'))
    return {'fits': [fit.as_dict() for fit in fits],
            'passed': all(fit.relative_error <= DISPERSIVE_TOLERANCE
                          for fit in fits)}


def _suite_gronwall(session: Session) -> Dict[str, Any]:
    config = session.config
    if classify_regime(config.params) is not Regime.MASS_CRITICAL:
        return {'passed': None, 'message': 'skipped: needs mass-critical params'}
    gs = session.ground_state
    traj = session.evolve(session.initial_field())
    report = gronwall_bound_check(traj, gs)
    return report.as_dict()


SUITE_RUNNERS: Dict[str, Callable[[Session], Dict[str, Any]]] = {
    'identities': _suite_identities,
    'hardy': _suite_hardy,
    'gn': _suite_gn,
    'dispersive': _suite_dispersive,
    'gronwall': _suite_gronwall,
}


def cmd_verify(session: Session, suite: str) -> int:
    """Run the selected suites; write verify.json; fail if any check fails."""
    names = SUITES if suite == 'all' else (suite,)
    results = {}
    for name in names:
        logger.info('running suite %s', name)
        try:
            results[name] = SUITE_RUNNERS[name](session)
        except (ValueError, ConvergenceError) as error:
            logger.error('suite %s failed: %s', name, error)
            results[name] = {'passed': False, 'error': str(error)}
        logger.info('suite %s: passed=%s', name, results[name]['passed'])
    failed = [name for name, result in results.items() if result['passed'] is False]
    write_json(session.out / 'verify.json',
               session.payload(suites=results, failed=failed))
    return EXIT_FAILED if failed else EXIT_OK


def _scan_rows_table(rows: Sequence[Any]) -> np.ndarray:
    return np.array([[row.value, row.norm_u0, VERDICT_CODES[row.verdict],
                      np.nan if row.rate is None else row.rate, row.end_time]
                     for row in rows], dtype=float)


def cmd_scan(session: Session, kind: str) -> int:
    """Run a scan; write scan.csv and scan.json."""
    config = session.config
    scan = config.options['scan']
    diagnostics = config.options['diagnostics']
    if kind == 'dispersive-exponents':
        fits = dispersive_scan(config.params, config.grid, scan['r_values'],
                               scan['window'])
        columns = ('r', 'slope', 'predicted_slope', 'relative_error', 'r_squared')
        table = np.array([[fit.r_exponent, fit.slope, fit.predicted_slope,
                           fit.relative_error, fit.r_squared] for fit in fits])
        write_csv(session.out / 'scan.csv', columns, table)
        write_json(session.out / 'scan.json', session.payload(
            kind=kind, fits=[fit.as_dict() for fit in fits]))
        return EXIT_OK

    columns = ('value', 'norm_u0', 'verdict', 'rate', 'end_time')
    if kind == 'threshold':
        rows = threshold_scan(session.ground_state, config.damping, scan['scales'],
                              config.T, config.dt, config.snapshot_every,
                              diagnostics['scatter_tol'], scan['window'],
                              monotone_window=diagnostics['monotone_window'],
                              workers=session.workers)
        extra: Dict[str, Any] = {
            'predicted_rate': mass_subcritical_prediction(config.damping, config.T)}
    else:
        report = a_star_search(config.params, session.initial_field(),
                               scan['gammas'], config.T, config.dt,
                               config.snapshot_every, diagnostics['scatter_tol'],
                               diagnostics['c0'],
                               monotone_window=diagnostics['monotone_window'],
                               workers=session.workers)
        rows = list(report.rows)
        extra = {key: value for key, value in report.as_dict().items()
                 if key != 'rows'}
    write_csv(session.out / 'scan.csv', columns, _scan_rows_table(rows))
    write_json(session.out / 'scan.json', session.payload(
        kind=kind, rows=[row.as_dict() for row in rows],
        verdict_codes={verdict.value: code for verdict, code in VERDICT_CODES.items()},
        **extra))
    return EXIT_OK


def run(args: argparse.Namespace) -> int:
    """Run a parsed command line and get its exit status."""
    try:
        config = load_config(args.config)
    except ConfigError as error:
        logger.error('%s', error)
        return EXIT_CONFIG
    if getattr(args, 'snapshot_every', None) is not None:
        config = replace(config, snapshot_every=args.snapshot_every)
    out = args.out or default_output_dir()
    session = Session(config, out, args.seed, max(1, args.workers))
    try:
        if args.command == 'simulate':
            status = cmd_simulate(session, args.snapshot_every is not None)
        elif args.command == 'groundstate':
            status = cmd_groundstate(session)
        elif args.command == 'verify':
            status = cmd_verify(session, args.suite)
        else:
            status = cmd_scan(session, args.kind)
    except ValueError as error:
        logger.error('%s', error)
        return EXIT_CONFIG
    except ConvergenceError as error:
        logger.error('%s', error)
        return EXIT_FAILED
    except Exception:
        logger.exception('internal error')
        return EXIT_INTERNAL
    write_metadata(out, args.command, __version__)
    return status


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point of the dampedinls command."""
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    return run(args)

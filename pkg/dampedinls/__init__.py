"""Numerical laboratory for the damped inhomogeneous NLS equation.

Simulates i u_t + Delta u - lambda |x|^-2 u + i a(t) u = mu |x|^-b |u|^(p-1) u
in radial symmetry and checks its conservation laws, ground states,
scattering thresholds and decay rates.
"""

from .damping import Constant, ScaledLog, Table, Zero
from .errors import BlowUpDetected, ConfigError, ConvergenceError
from .evolution import Trajectory, evolve
from .groundstate import GroundState, minimize
from .params import ModelParams, Regime, classify_regime
from .radial import RadialGrid, ReducedField, build_operator

__version__ = '0.1.0'

__all__ = (
    'BlowUpDetected', 'ConfigError', 'Constant', 'ConvergenceError',
    'GroundState', 'ModelParams', 'RadialGrid', 'ReducedField', 'Regime',
    'ScaledLog', 'Table', 'Trajectory', 'Zero', 'build_operator',
    'classify_regime', 'evolve', 'minimize', '__version__',
)

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

"""Radial discretization of K_lambda = -Laplacian + lambda |x|^-2.

A radial u in R^N is stored through w(r) = r^((N-1)/2) u(r), which turns
K_lambda into the half-line operator -d^2/dr^2 + c_eff/r^2 with
c_eff = lambda + (N-1)(N-3)/4. The grid is cell centered,
r_j = (j + 1/2) h with h = R/n, so no weight is ever evaluated at r = 0.

Both ends carry an antisymmetric ghost cell (w_-1 = -w_0, w_n = -w_n-1),
which is the Dirichlet condition w = 0 at r = 0 and at r = R. With it the
discrete free operator has sin(k r) as exact eigenvectors and
(4/h^2) sin^2(k h/2) as eigenvalues, second order accurate in h. Imposing
w = 0 at the origin selects the Friedrichs extension.
"""

import logging
from numbers import Integral, Real
from typing import Any, Optional, Tuple

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import calc
from .base import AbstractRepr
from .params import ModelParams

logger = logging.getLogger(__name__)

# Relative size of the outer shell watched for mass hitting the wall.
BOUNDARY_SHELL = 0.1


class RadialGrid(AbstractRepr):
    """Cell-centered grid on (0, R) with n cells."""

    __slots__ = ('_R', '_n')

    def __init__(self, R: float = 40.0, n: int = 512):
        """Set the radius and the number of cells."""
        self.R = R
        self.n = n

    def __eq__(self, other: Any) -> bool:
        """Compare by value."""
        if not isinstance(other, RadialGrid):
            return NotImplemented
        return (self.R, self.n) == (other.R, other.n)

    def __hash__(self) -> int:
        """Hash by value."""
        return hash((self.R, self.n))

    def __getstate__(self) -> Tuple[float, int]:
        """Get the state to pickle."""
        return self.R, self.n

    def __setstate__(self, state: Tuple[float, int]) -> None:
        """Restore a pickled instance."""
        self.__init__(*state)

    @property
    def R(self) -> float:
        """Get the domain radius."""
        return self._R

    @R.setter
    def R(self, value: float) -> None:
        """Set the domain radius (> 0)."""
        if not isinstance(value, Real) or isinstance(value, bool):
            raise TypeError('R must be a real number')
        if not 0 < value < np.inf:
            raise ValueError('R must be finite and > 0')
        self._R = float(value)

    @property
    def n(self) -> int:
        """Get the number of cells."""
        return self._n

    @n.setter
    def n(self, value: int) -> None:
        """Set the number of cells (>= 8)."""
        if not isinstance(value, Integral) or isinstance(value, bool):
            raise TypeError('n must be integer')
        if value < 8:
            raise ValueError('n must be >= 8')
        self._n = int(value)

    @property
    def h(self) -> float:
        """Get the cell width R/n."""
        return self.R / self.n

    @property
    def r(self) -> np.ndarray:
        """Get the nodes (j + 1/2) h."""
        return (np.arange(self.n) + 0.5) * self.h

    def as_dict(self) -> dict:
        """Get the grid keyed as in the configuration file."""
        return {'R': self.R, 'n': self.n}


class ReducedField(AbstractRepr):
    """Samples w_j of w = r^((N-1)/2) u at the grid nodes, at time t."""

    __slots__ = ('_grid', '_dim', '_w', '_t')

    def __init__(self, grid: RadialGrid, dim: int, w: np.ndarray, t: float = 0.0):
        """Store the samples (copied, made read-only)."""
        if not isinstance(grid, RadialGrid):
            raise TypeError('grid must be a RadialGrid')
        if not isinstance(dim, Integral) or isinstance(dim, bool):
            raise TypeError('dim must be integer')
        if dim < 3:
            raise ValueError('dim must be >= 3')
        values = np.array(w)
        if values.shape != (grid.n,):
            raise ValueError(f'w must have shape ({grid.n},), got {values.shape}')
        if not np.issubdtype(values.dtype, np.number):
            raise TypeError('w must be numeric')
        values = values.astype(np.complex128 if np.iscomplexobj(values) else float)
        values.setflags(write=False)
        self._grid = grid
        self._dim = int(dim)
        self._w = values
        self._t = float(t)

    @classmethod
    def from_u(cls, grid: RadialGrid, dim: int, u: np.ndarray,
               t: float = 0.0) -> 'ReducedField':
        """Build the field from samples of u at the nodes."""
        return cls(grid, dim, np.asarray(u) * grid.r ** ((dim - 1) / 2), t)

    @property
    def grid(self) -> RadialGrid:
        """Get the grid."""
        return self._grid

    @property
    def dim(self) -> int:
        """Get the space dimension N."""
        return self._dim

    @property
    def w(self) -> np.ndarray:
        """Get the (read-only) reduced samples."""
        return self._w

    @property
    def t(self) -> float:
        """Get the time label."""
        return self._t

    @property
    def u(self) -> np.ndarray:
        """Get the samples of u = r^(-(N-1)/2) w."""
        return self._w * self._grid.r ** (-(self._dim - 1) / 2)

    def replace(self, w: Optional[np.ndarray] = None,
                t: Optional[float] = None) -> 'ReducedField':
        """Get a field on the same grid with new samples and/or time."""
        return ReducedField(self._grid, self._dim,
                            self._w if w is None else w,
                            self._t if t is None else t)

    def scaled(self, factor: complex) -> 'ReducedField':
        """Get factor times this field."""
        return self.replace(w=factor * self._w)

    def conjugate(self) -> 'ReducedField':
        """Get the complex conjugate field."""
        return self.replace(w=np.conj(self._w))


class SpectralOperator(AbstractRepr):
    """Tridiagonal reduced operator with its full eigen-decomposition.

    Build it with build_operator; instances are never mutated.
    """

    __slots__ = ('_grid', '_dim', '_lam', '_c_eff', '_diag', '_offdiag',
                 '_eigvals', '_eigvecs')

    def __init__(self, grid: RadialGrid, dim: int, lam: float, c_eff: float,
                 diag: np.ndarray, offdiag: np.ndarray, eigvals: np.ndarray,
                 eigvecs: np.ndarray):
        """Store an already computed decomposition."""
        for array in (diag, offdiag, eigvals, eigvecs):
            array.setflags(write=False)
        self._grid = grid
        self._dim = dim
        self._lam = lam
        self._c_eff = c_eff
        self._diag = diag
        self._offdiag = offdiag
        self._eigvals = eigvals
        self._eigvecs = eigvecs

    @property
    def grid(self) -> RadialGrid:
        """Get the grid."""
        return self._grid

    @property
    def dim(self) -> int:
        """Get the space dimension N."""
        return self._dim

    @property
    def lam(self) -> float:
        """Get lambda."""
        return self._lam

    @property
    def c_eff(self) -> float:
        """Get the reduced coefficient lambda + lambda_N - 1/4."""
        return self._c_eff

    @property
    def diag(self) -> np.ndarray:
        """Get the main diagonal."""
        return self._diag

    @property
    def offdiag(self) -> np.ndarray:
        """Get the off diagonal."""
        return self._offdiag

    @property
    def eigvals(self) -> np.ndarray:
        """Get the eigenvalues in ascending order."""
        return self._eigvals

    @property
    def eigvecs(self) -> np.ndarray:
        """Get the orthonormal eigenvectors, one per column."""
        return self._eigvecs

    @property
    def weight(self) -> float:
        """Get the quadrature weight omega_N h."""
        return calc.unit_sphere_area(self._dim) * self._grid.h

    def apply(self, w: np.ndarray) -> np.ndarray:
        """Get T w."""
        result = self._diag * w
        result[:-1] += self._offdiag * w[1:]
        result[1:] += self._offdiag * w[:-1]
        return result

    def to_modes(self, w: np.ndarray) -> np.ndarray:
        """Get the coefficients of w in the eigenbasis."""
        return self._eigvecs.T @ w

    def from_modes(self, coefficients: np.ndarray) -> np.ndarray:
        """Get the samples with the given eigenbasis coefficients."""
        return self._eigvecs @ coefficients

    def evolve_samples(self, w: np.ndarray, dt: float) -> np.ndarray:
        """Get exp(-i T dt) w."""
        phases = np.exp(-1j * self._eigvals * dt)
        return self.from_modes(phases * self.to_modes(w))

    def check_field(self, field: ReducedField) -> None:
        """Check that a field lives on this operator's grid and dimension.

        :raises ValueError: It does not.
        """
        if not isinstance(field, ReducedField):
            raise TypeError('field must be a ReducedField')
        if field.grid != self._grid or field.dim != self._dim:
            raise ValueError(f'field on {field.grid!r} in dimension {field.dim} '
                             f'does not match operator on {self._grid!r} in '
                             f'dimension {self._dim}')


def effective_coefficient(dim: int, lam: float) -> float:
    """Get c_eff = lambda + (N - 1)(N - 3)/4."""
    return lam + (dim - 1) * (dim - 3) / 4


def build_operator(grid: RadialGrid, dim: int, lam: float) -> SpectralOperator:
    """Assemble and diagonalize the reduced operator on the grid.

    :raises ValueError: lambda <= -lambda_N, or the discrete operator is not
                        positive.
    """
    if not isinstance(grid, RadialGrid):
        raise TypeError('grid must be a RadialGrid')
    if not isinstance(lam, Real) or isinstance(lam, bool):
        raise TypeError('lam must be a real number')
    floor = -calc.lambda_n(dim)
    if lam <= floor:
        raise ValueError(f'lam must be > -lambda_N = {floor}; K_lambda is not '
                         f'bounded below otherwise')
    h = grid.h
    c_eff = effective_coefficient(dim, lam)
    diag = 2 / h ** 2 + c_eff / grid.r ** 2
    diag[0] += 1 / h ** 2
    diag[-1] += 1 / h ** 2
    offdiag = np.full(grid.n - 1, -1 / h ** 2)
    logger.debug('diagonalizing reduced operator: n=%d, h=%.4g, c_eff=%.6g',
                 grid.n, h, c_eff)
    eigvals, eigvecs = eigh_tridiagonal(diag, offdiag)
    if eigvals[0] <= 0:
        raise ValueError(f'discrete operator is not positive (lowest eigenvalue '
                         f'{eigvals[0]:.6g}); refine the grid')
    return SpectralOperator(grid, int(dim), float(lam), c_eff, diag, offdiag,
                            eigvals, eigvecs)


def operator_for(params: ModelParams, grid: RadialGrid) -> SpectralOperator:
    """Build the operator for the model constants of params."""
    return build_operator(grid, params.N, params.lam)


def field_weight(field: ReducedField) -> float:
    """Get the quadrature weight omega_N h of the field's grid."""
    return calc.unit_sphere_area(field.dim) * field.grid.h


def quadratic_form(op: SpectralOperator, field: ReducedField) -> float:
    """Get <K_lambda u, u> = omega_N h Re(w* T w)."""
    op.check_field(field)
    w = field.w
    return op.weight * float(np.real(np.vdot(w, op.apply(w))))


def propagate_linear(op: SpectralOperator, field: ReducedField,
                     dt: float) -> ReducedField:
    """Apply U_lambda(dt) = exp(-i dt K_lambda) exactly in the eigenbasis."""
    op.check_field(field)
    return field.replace(w=op.evolve_samples(field.w, dt), t=field.t + dt)


def mass(field: ReducedField) -> float:
    """Get M(u) = ||u||^2 = omega_N h sum |w_j|^2."""
    return field_weight(field) * float(np.sum(np.abs(field.w) ** 2))


def h1_lambda_norm(op: SpectralOperator, field: ReducedField) -> float:
    """Get ||u||_{H^1_lambda} = sqrt(M(u) + <K_lambda u, u>)."""
    return float(np.sqrt(mass(field) + quadratic_form(op, field)))


def potential_weights(grid: RadialGrid, dim: int, b: float, p: float) -> np.ndarray:
    """Get r^(-b - (N-1)(p-1)/2), the nonlinear weight in w-coordinates."""
    return grid.r ** (-b - (dim - 1) * (p - 1) / 2)


def potential_term(field: ReducedField, b: float, p: float) -> float:
    """Get the integral of |x|^-b |u|^(p+1)."""
    if not 0 <= b < 2:
        raise ValueError('b must satisfy 0 <= b < 2')
    weights = potential_weights(field.grid, field.dim, b, p)
    return field_weight(field) * float(np.sum(weights * np.abs(field.w) ** (p + 1)))


def energy(op: SpectralOperator, field: ReducedField, params: ModelParams) -> float:
    """Get E(u) = <K_lambda u, u> + mu 2/(p+1) P(u)."""
    potential = potential_term(field, params.b, params.p)
    return quadratic_form(op, field) + params.mu * 2 / (params.p + 1) * potential


def action_i(op: SpectralOperator, field: ReducedField, params: ModelParams) -> float:
    """Get I(u) = <K_lambda u, u> + mu P(u)."""
    potential = potential_term(field, params.b, params.p)
    return quadratic_form(op, field) + params.mu * potential


def hardy_ratio(op: SpectralOperator, field: ReducedField) -> float:
    """Get ||grad u||^2 / || |x|^-1 u ||^2, bounded below by lambda_N.

    :raises ValueError: The operator has lambda != 0 or the field is zero.
    """
    if op.lam != 0:
        raise ValueError('hardy_ratio needs the operator built with lambda = 0')
    op.check_field(field)
    weighted = op.weight * float(np.sum(np.abs(field.w) ** 2 / field.grid.r ** 2))
    if weighted == 0:
        raise ValueError('hardy_ratio is undefined for the zero field')
    return quadratic_form(op, field) / weighted


def lr_norm(field: ReducedField, r: float) -> float:
    """Get ||u||_{L^r} by radial quadrature; r may be inf."""
    if r < 1:
        raise ValueError('r must be >= 1')
    modulus = np.abs(field.u)
    if np.isinf(r):
        return float(modulus.max())
    nodes = field.grid.r
    total = field_weight(field) * float(np.sum(nodes ** (field.dim - 1) * modulus ** r))
    return total ** (1 / r)


def boundary_mass_fraction(field: ReducedField,
                           shell: float = BOUNDARY_SHELL) -> float:
    """Get the share of mass in the outer shell of the grid."""
    density = np.abs(field.w) ** 2
    total = float(density.sum())
    if total == 0:
        return 0.0
    return float(density[field.grid.r > (1 - shell) * field.grid.R].sum()) / total


def resolution_proxy(field: ReducedField) -> float:
    """Get max_j |w_j+1 - w_j| / max_j |w_j|, about h times the wavenumber."""
    peak = float(np.abs(field.w).max())
    if peak == 0:
        return 0.0
    return float(np.abs(np.diff(field.w)).max()) / peak


def gradient_proxy(field: ReducedField) -> float:
    """Get h max_j |grad u|, the largest jump of u between neighbouring cells."""
    return float(np.abs(np.diff(field.u)).max())


def gaussian(grid: RadialGrid, dim: int, width: float = 1.0,
             amplitude: float = 1.0) -> ReducedField:
    """Get u(r) = amplitude exp(-(r/width)^2)."""
    if width <= 0:
        raise ValueError('width must be > 0')
    return ReducedField.from_u(grid, dim, amplitude * np.exp(-(grid.r / width) ** 2))


def random_smooth_field(grid: RadialGrid, dim: int, rng: np.random.Generator,
                        bumps: int = 3) -> ReducedField:
    """Get a real radial field made of a few random Gaussian bumps.

    Centers and widths scale with R/8, so the field decays well inside the
    domain and is resolved whenever the grid resolves a unit Gaussian.
    """
    scale = grid.R / 8
    centers = rng.uniform(0, scale, bumps)
    widths = rng.uniform(0.3 * scale, scale, bumps)
    heights = rng.uniform(-1, 1, bumps)
    heights[0] = rng.uniform(0.5, 1)
    r = grid.r[:, None]
    u = np.sum(heights * np.exp(-((r - centers) / widths) ** 2), axis=1)
    return ReducedField.from_u(grid, dim, u)


def normalized(field: ReducedField, target_mass: float = 1.0) -> ReducedField:
    """Get the field scaled to the given mass."""
    current = mass(field)
    if current == 0:
        raise ValueError('can not normalize the zero field')
    return field.scaled(np.sqrt(target_mass / current))


def snapshot_table(field: ReducedField) -> np.ndarray:
    """Get the columns r, Re u, Im u, |u|^2 of a field snapshot."""
    u = field.u
    return np.column_stack((field.grid.r, u.real, u.imag, np.abs(u) ** 2))

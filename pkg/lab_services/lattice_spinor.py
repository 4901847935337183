"""
Lattice spinor service: periodic grids, spinor fields, Dirac matrices,
energy projectors and mass functionals.
"""

import logging
from dataclasses import dataclass, replace
from functools import cached_property, lru_cache
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import fft as sp_fft

from .exceptions import ArgumentError, ConfigurationError, UndefinedStateError
from .parallel import worker_count

logger = logging.getLogger(__name__)

POSITION = 'position'
MOMENTUM = 'momentum'
SPACE_TAGS = (POSITION, MOMENTUM)

REPRESENTATION_CHOICES = ['weyl', 'dirac']
DIMENSION_CHOICES = [1, 3]
NYQUIST_BAND = 0.9

SIGMA_0 = np.eye(2, dtype=np.complex128)
SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULI = (SIGMA_1, SIGMA_2, SIGMA_3)


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic position lattice centered at 0 and its dual momentum lattice."""

    dim: int
    n: int
    extent: float

    @property
    def dx(self) -> float:
        return self.extent / self.n

    @property
    def cell_volume(self) -> float:
        return self.dx ** self.dim

    @property
    def momentum_step(self) -> float:
        return 2.0 * np.pi / self.extent

    @property
    def momentum_cell_volume(self) -> float:
        return self.momentum_step ** self.dim

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def n_components(self) -> int:
        return 4 if self.dim == 3 else 2

    @property
    def spatial_axes(self) -> Tuple[int, ...]:
        """Array axes of a field's values that carry the lattice."""
        return tuple(range(1, self.dim + 1))

    @cached_property
    def axis(self) -> np.ndarray:
        """Coordinates x_j = (j - N/2)·Δx of one axis, in storage order."""
        return (np.arange(self.n) - self.n // 2) * self.dx

    @cached_property
    def momentum_axis(self) -> np.ndarray:
        """Momenta 2π/L·k of one axis in FFT storage order."""
        return 2.0 * np.pi * sp_fft.fftfreq(self.n, d=self.dx)

    @cached_property
    def spectral_axis(self) -> np.ndarray:
        """Momentum axis used by mode-wise operators; the Nyquist entry is its own mirror and maps to 0."""
        axis = self.momentum_axis.copy()
        axis[self.n // 2] = 0.0
        return axis

    @cached_property
    def position_mesh(self) -> Tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*([self.axis] * self.dim), indexing='ij', sparse=True))

    @cached_property
    def spectral_mesh(self) -> Tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*([self.spectral_axis] * self.dim), indexing='ij', sparse=True))

    @cached_property
    def momentum_mesh(self) -> Tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*([self.momentum_axis] * self.dim), indexing='ij', sparse=True))

    def project(self, e: np.ndarray) -> np.ndarray:
        """Projections x·e of all voxel centers, shape ``self.shape``."""
        out = np.zeros(self.shape)
        for k, component in enumerate(e):
            if component != 0.0:
                out = out + component * self.position_mesh[k]
        return out

    def radius(self, center: Optional[Sequence[float]] = None) -> np.ndarray:
        """Distances |x - center| of all voxel centers."""
        center = np.zeros(self.dim) if center is None else as_vector(center, self.dim)
        squared = np.zeros(self.shape)
        for k in range(self.dim):
            squared = squared + (self.position_mesh[k] - center[k]) ** 2
        return np.sqrt(squared)

    def is_lattice_multiple(self, length: float, atol: float = 1e-9) -> bool:
        cells = length / self.dx
        return abs(cells - round(cells)) <= atol

    def as_dict(self) -> dict:
        return {'dim': self.dim, 'n': self.n, 'extent': self.extent, 'dx': self.dx}


def make_grid(dim: int, n: int, extent: float) -> GridSpec:
    """
    Build a validated grid.

    Args:
        dim: Spatial dimension, 1 or 3
        n: Points per axis, a power of two not below 8
        extent: Period L per axis

    Returns:
        GridSpec with Δx = L/N
    """
    if dim not in DIMENSION_CHOICES:
        raise ConfigurationError(f"Unsupported dimension {dim}; expected one of {DIMENSION_CHOICES}")
    if isinstance(n, bool) or int(n) != n or n < 8 or (int(n) & (int(n) - 1)) != 0:
        raise ConfigurationError(f"Points per axis must be a power of two >= 8, got {n}")
    if not np.isfinite(extent) or extent <= 0:
        raise ConfigurationError(f"Extent must be positive, got {extent}")
    return GridSpec(dim=int(dim), n=int(n), extent=float(extent))


def as_vector(value, dim: int) -> np.ndarray:
    """Coerce a scalar (dim 1) or sequence into a real vector of length ``dim``."""
    vector = np.atleast_1d(np.asarray(value, dtype=np.float64))
    if vector.shape != (dim,):
        raise ArgumentError(f"Expected a vector of length {dim}, got shape {vector.shape}")
    return vector


def unit_vector(e, dim: int) -> np.ndarray:
    vector = as_vector(e, dim)
    length = np.linalg.norm(vector)
    if length == 0.0:
        raise ArgumentError("Direction must be nonzero")
    return vector / length


def axis_directions(dim: int) -> list:
    """The 2·dim signed coordinate directions, +e_k before -e_k."""
    directions = []
    for k in range(dim):
        for sign in (1.0, -1.0):
            e = np.zeros(dim)
            e[k] = sign
            directions.append(e)
    return directions


@dataclass(frozen=True, eq=False)
class DiracAlgebra:
    """Dirac matrices α_k, β and the time-reversal matrix ω of one representation."""

    representation: str
    dim: int
    alpha: Tuple[np.ndarray, ...]
    beta: np.ndarray
    omega: Optional[np.ndarray]

    @property
    def n_components(self) -> int:
        return self.beta.shape[0]

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.n_components, dtype=np.complex128)


def _frozen(matrix: np.ndarray) -> np.ndarray:
    matrix = np.array(matrix, dtype=np.complex128)
    matrix.flags.writeable = False
    return matrix


@lru_cache(maxsize=None)
def dirac_algebra(representation: str = 'weyl', dim: int = 3) -> DiracAlgebra:
    """
    Dirac matrices for a representation and dimension.

    In dim 3 the Weyl representation uses α_k = diag(-σ_k, σ_k), β the
    off-diagonal identity and ω = -diag(σ₂, σ₂).

    Dim 1 keeps the same two names. ('dirac', 1) is the standard 2×2 pair
    α = σ₁, β = σ₃. ('weyl', 1) is its chiral rotation α = σ₃, β = σ₁, which
    makes h(p) = pσ₃ + mσ₁ and gives ω = σ₁ with ω·ω̄ = I, so 𝒯² = +1 there.
    Both pairs anticommute and square to I, so every border statement holds
    in either; only the component layout differs.
    """
    if representation not in REPRESENTATION_CHOICES or dim not in DIMENSION_CHOICES:
        raise ConfigurationError(f"Unsupported representation/dimension: ({representation}, {dim})")

    zero = np.zeros((2, 2), dtype=np.complex128)
    if dim == 3 and representation == 'weyl':
        alpha = tuple(np.block([[-s, zero], [zero, s]]) for s in PAULI)
        beta = np.block([[zero, SIGMA_0], [SIGMA_0, zero]])
        omega = -np.block([[SIGMA_2, zero], [zero, SIGMA_2]])
    elif dim == 3:
        alpha = tuple(np.block([[zero, s], [s, zero]]) for s in PAULI)
        beta = np.block([[SIGMA_0, zero], [zero, -SIGMA_0]])
        omega = None
    elif representation == 'weyl':
        alpha = (SIGMA_3,)
        beta = SIGMA_1
        omega = SIGMA_1
    else:
        alpha = (SIGMA_1,)
        beta = SIGMA_3
        omega = None

    return DiracAlgebra(
        representation=representation,
        dim=dim,
        alpha=tuple(_frozen(a) for a in alpha),
        beta=_frozen(beta),
        omega=None if omega is None else _frozen(omega),
    )


def energy(p, m: float) -> float:
    """ε(p) = √(p² + m²)."""
    p = np.atleast_1d(np.asarray(p, dtype=np.float64))
    return float(np.sqrt(p @ p + m * m))


def h_matrix(p, m: float, alg: DiracAlgebra) -> np.ndarray:
    """h(p) = Σ α_k p_k + βm for one momentum vector."""
    if m <= 0:
        raise ArgumentError(f"Mass must be positive, got {m}")
    p = as_vector(p, alg.dim)
    out = m * alg.beta
    for k in range(alg.dim):
        out = out + p[k] * alg.alpha[k]
    return np.asarray(out)


def energy_projector(p, m: float, eta: int, alg: DiracAlgebra) -> np.ndarray:
    """π^η(p) = ½(I + (η/ε(p)) h(p))."""
    if eta not in (1, -1):
        raise ArgumentError(f"Energy sign must be +1 or -1, got {eta}")
    return 0.5 * (alg.identity + (eta / energy(p, m)) * h_matrix(p, m, alg))


def apply_h(values: np.ndarray, mesh: Tuple[np.ndarray, ...], m: float, alg: DiracAlgebra) -> np.ndarray:
    """Apply h(p) mode-wise to momentum-space component arrays."""
    out = m * np.einsum('ab,b...->a...', alg.beta, values)
    for k in range(alg.dim):
        out += np.einsum('ab,b...->a...', alg.alpha[k], values * mesh[k])
    return out


def mesh_energy(mesh: Tuple[np.ndarray, ...], m: float) -> np.ndarray:
    squared = m * m
    for component in mesh:
        squared = squared + component ** 2
    return np.sqrt(squared)


def spectral_momenta(grid: GridSpec) -> Tuple[np.ndarray, ...]:
    """Momentum mesh of the mode-wise operators (Nyquist entries mapped to 0)."""
    return grid.spectral_mesh


@dataclass(frozen=True, eq=False)
class SpinorField:
    """
    Spinor samples on a grid.

    ``values`` has shape (n_c, N, ..., N); ``space`` tags whether the samples
    are ψ(x) or φ(p) = 𝓕ψ(p). Fields are immutable after construction.
    """

    grid: GridSpec
    values: np.ndarray
    space: str = POSITION
    representation: str = 'weyl'
    mass: float = 1.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.complex128)
        expected = (self.grid.n_components,) + self.grid.shape
        if values.shape != expected:
            raise ArgumentError(f"Field values must have shape {expected}, got {values.shape}")
        if self.space not in SPACE_TAGS:
            raise ArgumentError(f"Unknown space tag {self.space!r}")
        if self.representation not in REPRESENTATION_CHOICES:
            raise ConfigurationError(f"Unknown representation {self.representation!r}")
        if not self.mass > 0:
            raise ArgumentError(f"Mass must be positive, got {self.mass}")
        values.flags.writeable = False
        object.__setattr__(self, 'values', values)

    @property
    def algebra(self) -> DiracAlgebra:
        return dirac_algebra(self.representation, self.grid.dim)

    @property
    def n_components(self) -> int:
        return self.grid.n_components

    def with_values(self, values: np.ndarray, space: Optional[str] = None) -> 'SpinorField':
        return replace(self, values=values, space=self.space if space is None else space)

    def norm(self) -> float:
        cell = self.grid.cell_volume if self.space == POSITION else self.grid.momentum_cell_volume
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * cell))

    def normalized(self) -> 'SpinorField':
        size = self.norm()
        if size == 0.0:
            raise UndefinedStateError("Cannot normalize a zero field")
        return self.with_values(self.values / size)

    def position(self) -> 'SpinorField':
        return to_position(self)

    def momentum(self) -> 'SpinorField':
        return to_momentum(self)

    def __add__(self, other: 'SpinorField') -> 'SpinorField':
        _check_compatible(self, other)
        return self.with_values(self.values + other.in_space_of(self).values)

    def __sub__(self, other: 'SpinorField') -> 'SpinorField':
        _check_compatible(self, other)
        return self.with_values(self.values - other.in_space_of(self).values)

    def __mul__(self, scalar: complex) -> 'SpinorField':
        return self.with_values(self.values * scalar)

    __rmul__ = __mul__

    def in_space_of(self, other: 'SpinorField') -> 'SpinorField':
        """This field expressed in the space tag of ``other``."""
        return to_position(self) if other.space == POSITION else to_momentum(self)


def _check_compatible(a: SpinorField, b: SpinorField):
    if a.grid != b.grid or a.representation != b.representation or a.mass != b.mass:
        raise ArgumentError("Fields live on different grids, representations or masses")


def to_momentum(psi: SpinorField) -> SpinorField:
    """𝓕ψ(p) = (2π)^{-d/2} Σ_x e^{-ip·x} ψ(x) Δx^d on the momentum lattice."""
    if psi.space == MOMENTUM:
        return psi
    grid = psi.grid
    axes = grid.spatial_axes
    shifted = sp_fft.ifftshift(psi.values, axes=axes)
    phi = sp_fft.fftn(shifted, axes=axes, workers=worker_count())
    phi *= grid.cell_volume / (2.0 * np.pi) ** (grid.dim / 2.0)
    return psi.with_values(phi, space=MOMENTUM)


def to_position(psi: SpinorField) -> SpinorField:
    """Inverse of :func:`to_momentum`."""
    if psi.space == POSITION:
        return psi
    grid = psi.grid
    axes = grid.spatial_axes
    values = sp_fft.ifftn(psi.values, axes=axes, workers=worker_count())
    values = sp_fft.fftshift(values, axes=axes)
    values *= (2.0 * np.pi) ** (grid.dim / 2.0) / grid.cell_volume
    return psi.with_values(values, space=POSITION)


def norm(psi: SpinorField) -> float:
    return psi.norm()


def normalize(psi: SpinorField) -> SpinorField:
    return psi.normalized()


def inner_product(psi: SpinorField, chi: SpinorField) -> complex:
    """⟨ψ, χ⟩ computed in position space."""
    _check_compatible(psi, chi)
    a, b = to_position(psi), to_position(chi)
    return complex(np.vdot(a.values, b.values) * psi.grid.cell_volume)


def density(psi: SpinorField) -> np.ndarray:
    """Position density Σ_c |ψ_c(x)|² per voxel."""
    values = to_position(psi).values
    return np.sum(values.real ** 2 + values.imag ** 2, axis=0)


def spectral_floor(psi: SpinorField, band: float = NYQUIST_BAND) -> float:
    """
    Relative momentum mass in the edge band max_k |p_k| ≥ band·π/Δx.

    Free evolution keeps this number fixed. Mass this close to the Nyquist
    edge is what the periodic lattice smears across the whole box, so it
    bounds how small a border threshold δ stays meaningful after evolution.
    """
    grid = psi.grid
    weights = np.sum(np.abs(to_momentum(psi).values) ** 2, axis=0)
    total = weights.sum()
    if not total > 0.0:
        raise UndefinedStateError("Relative masses are undefined for a zero field")
    cutoff = band * np.pi / grid.dx
    edge = np.zeros(grid.shape, dtype=bool)
    for momenta in grid.momentum_mesh:
        edge = edge | (np.abs(momenta) >= cutoff)
    return float(weights[edge].sum() / total)


def project_energy(psi: SpinorField, eta: int) -> SpinorField:
    """Apply π^η mode-wise in momentum space; the result keeps ψ's space tag."""
    if eta not in (1, -1):
        raise ArgumentError(f"Energy sign must be +1 or -1, got {eta}")
    phi = to_momentum(psi)
    mesh = spectral_momenta(psi.grid)
    h_phi = apply_h(phi.values, mesh, psi.mass, psi.algebra)
    projected = 0.5 * (phi.values + (eta / mesh_energy(mesh, psi.mass)) * h_phi)
    result = phi.with_values(projected)
    return result if psi.space == MOMENTUM else to_position(result)


def _axis_direction(e: np.ndarray) -> Optional[Tuple[int, float]]:
    nonzero = np.flatnonzero(e)
    if len(nonzero) == 1 and abs(e[nonzero[0]]) == 1.0:
        k = int(nonzero[0])
        return k, float(np.sign(e[k]))
    return None


def mass_profile(psi: SpinorField, e) -> Tuple[np.ndarray, np.ndarray]:
    """
    Sorted projection levels x·e and the cumulative relative mass up to each level.

    Axis directions use the marginal density along that axis; other directions
    sort every voxel projection.
    """
    grid = psi.grid
    e = unit_vector(e, grid.dim)
    rho = density(psi)
    total = rho.sum()
    if not total > 0.0:
        raise UndefinedStateError("Relative masses are undefined for a zero field")

    axis = _axis_direction(e)
    if axis is not None:
        k, sign = axis
        others = tuple(i for i in range(grid.dim) if i != k)
        marginal = rho.sum(axis=others) if others else rho
        levels = sign * grid.axis
        if sign < 0:
            levels = levels[::-1]
            marginal = marginal[::-1]
    else:
        projections = grid.project(e).ravel()
        order = np.argsort(projections, kind='stable')
        levels = projections[order]
        marginal = rho.ravel()[order]
    return levels, np.cumsum(marginal) / total


def half_space_mass(psi: SpinorField, e, alpha: float) -> float:
    """
    Relative mass of the half-space {x·e ≤ α}, classifying voxel centers.

    Args:
        psi: Nonzero field in either space tag
        e: Direction (normalized internally)
        alpha: Plane offset

    Returns:
        Fraction in [0, 1], nondecreasing and right-continuous in α
    """
    levels, cumulative = mass_profile(psi, e)
    count = int(np.searchsorted(levels, alpha, side='right'))
    if count == 0:
        return 0.0
    if count == len(levels):
        return 1.0
    return float(min(cumulative[count - 1], 1.0))


def directional_quantile(psi: SpinorField, e, delta: float) -> float:
    """sup{α : half_space_mass(ψ, e, α) ≤ δ}, the lowest level whose cumulative mass exceeds δ."""
    if not 0.0 < delta < 1.0:
        raise ArgumentError(f"Threshold must lie in (0, 1), got {delta}")
    levels, cumulative = mass_profile(psi, e)
    k = int(np.searchsorted(cumulative, delta, side='right'))
    return float(levels[min(k, len(levels) - 1)])


def shell_mass(psi: SpinorField, r_in: float, r_out: float, center=None) -> float:
    """
    Relative mass of the half-open shell {r_in ≤ |x - center| < r_out}.

    The outer sphere is excluded so that adjacent shells partition the
    lattice; the closed shell differs only by voxel centers lying exactly on
    |x - center| = r_out. Pass r_out = inf for the exterior of a ball.
    """
    if r_in < 0 or r_in > r_out:
        raise ArgumentError(f"Shell radii must satisfy 0 <= r_in <= r_out, got ({r_in}, {r_out})")
    rho = density(psi)
    total = rho.sum()
    if not total > 0.0:
        raise UndefinedStateError("Relative masses are undefined for a zero field")
    radius = psi.grid.radius(center)
    inside = (radius >= r_in) & (radius < r_out)
    return float(rho[inside].sum() / total)


def carrier_radius(psi: SpinorField, delta: float) -> float:
    """Smallest centered radius containing every axis-direction δ-border."""
    extents = [abs(directional_quantile(psi, e, delta)) for e in axis_directions(psi.grid.dim)]
    return float(max(extents))

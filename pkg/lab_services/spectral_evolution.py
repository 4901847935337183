"""
Spectral evolution service: exact free Dirac propagation mode by mode.

Every momentum mode evolves with U(p, t) = cos(tε)I + i·t·sinc(tε)·h(p),
so no time stepping is involved and any t is reached in one application.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, List, Sequence, Tuple

import numpy as np

from .exceptions import ArgumentError, ConfigurationError
from .lattice_spinor import (
    MOMENTUM,
    DiracAlgebra,
    GridSpec,
    SpinorField,
    apply_h,
    dirac_algebra,
    energy,
    h_matrix,
    mesh_energy,
    project_energy,
    spectral_momenta,
    to_momentum,
    to_position,
)
from .parallel import ordered_map

logger = logging.getLogger(__name__)

SINC_SERIES_CUTOFF = 1e-4

Evolver = Callable[[SpinorField, float], SpinorField]


def sinc(w):
    """sin(w)/w with sinc(0) = 1; a Taylor branch covers |w| < 1e-4."""
    w = np.asarray(w)
    small = np.abs(w) < SINC_SERIES_CUTOFF
    safe = np.where(small, 1.0, w)
    w2 = w * w
    return np.where(small, 1.0 - w2 / 6.0 + w2 * w2 / 120.0, np.sin(safe) / safe)


@dataclass(frozen=True, eq=False)
class EvolutionPlan:
    """Cached per-mode factors cos(tε(p)) and t·sinc(tε(p)) for one (grid, m, t)."""

    grid: GridSpec
    mass: float
    t: float
    representation: str
    cos_factor: np.ndarray
    tsinc_factor: np.ndarray

    @classmethod
    def build(cls, grid: GridSpec, mass: float, t: float, representation: str = 'weyl') -> 'EvolutionPlan':
        if not mass > 0:
            raise ArgumentError(f"Mass must be positive, got {mass}")
        eps = mesh_energy(spectral_momenta(grid), mass)
        cos_factor = np.cos(t * eps)
        tsinc_factor = t * sinc(t * eps)
        cos_factor.flags.writeable = False
        tsinc_factor.flags.writeable = False
        return cls(
            grid=grid,
            mass=mass,
            t=t,
            representation=representation,
            cos_factor=cos_factor,
            tsinc_factor=tsinc_factor,
        )

    @property
    def algebra(self) -> DiracAlgebra:
        return dirac_algebra(self.representation, self.grid.dim)

    def unitarity_defect(self) -> float:
        """max |cos² + (tε·sinc)² - 1| over the lattice."""
        eps = mesh_energy(spectral_momenta(self.grid), self.mass)
        return float(np.max(np.abs(self.cos_factor ** 2 + (self.tsinc_factor * eps) ** 2 - 1.0)))

    def apply(self, phi_values: np.ndarray) -> np.ndarray:
        h_phi = apply_h(phi_values, spectral_momenta(self.grid), self.mass, self.algebra)
        return self.cos_factor * phi_values + 1j * self.tsinc_factor * h_phi


@lru_cache(maxsize=8)
def plan_for(grid: GridSpec, mass: float, t: float, representation: str = 'weyl') -> EvolutionPlan:
    logger.debug(f"Building evolution plan: n={grid.n} dim={grid.dim} m={mass} t={t}")
    return EvolutionPlan.build(grid, mass, t, representation)


def _restore_space(result: SpinorField, like: SpinorField) -> SpinorField:
    return result if like.space == MOMENTUM else to_position(result)


def mode_exponential(p, t: float, m: float, alg: DiracAlgebra) -> np.ndarray:
    """e^{ith(p)} = cos(tε(p))I + i·t·sinc(tε(p))·h(p)."""
    eps = energy(p, m)
    return np.cos(t * eps) * alg.identity + 1j * t * float(sinc(t * eps)) * h_matrix(p, m, alg)


def evolve(psi: SpinorField, t: float) -> SpinorField:
    """
    Free Dirac evolution ψ ↦ ψ_t.

    Args:
        psi: Field in either space tag
        t: Time, any sign; t = 0 returns the field after one FFT round trip

    Returns:
        Evolved field in the same space tag as ``psi``
    """
    plan = plan_for(psi.grid, psi.mass, float(t), psi.representation)
    phi = to_momentum(psi)
    return _restore_space(phi.with_values(plan.apply(phi.values)), psi)


def evolve_many(psi: SpinorField, times: Sequence[float], evolver: Evolver = evolve) -> List[SpinorField]:
    """Evolve one field to several times concurrently; output follows ``times`` order."""
    return ordered_map(lambda t: evolver(psi, t), list(times))


def evolve_symmetric_pair(psi: SpinorField, t: float) -> Tuple[SpinorField, SpinorField]:
    """(ψ_t + ψ_{-t}, ψ_t - ψ_{-t}) from 2cos(tε)φ and 2i·t·sinc(tε)·hφ."""
    plan = plan_for(psi.grid, psi.mass, float(t), psi.representation)
    phi = to_momentum(psi)
    total = 2.0 * plan.cos_factor * phi.values
    h_phi = apply_h(phi.values, spectral_momenta(psi.grid), psi.mass, psi.algebra)
    difference = 2j * plan.tsinc_factor * h_phi
    return (
        _restore_space(phi.with_values(total), psi),
        _restore_space(phi.with_values(difference), psi),
    )


def evolve_nw(psi: SpinorField, t: float, eta: int) -> SpinorField:
    """Newton–Wigner evolution: every component gains the phase e^{itηε(p)}, no spinor mixing."""
    if eta not in (1, -1):
        raise ArgumentError(f"Energy sign must be +1 or -1, got {eta}")
    phi = to_momentum(psi)
    phase = np.exp(1j * eta * t * mesh_energy(spectral_momenta(psi.grid), psi.mass))
    return _restore_space(phi.with_values(phase * phi.values), psi)


def split_energy(psi: SpinorField) -> Tuple[SpinorField, SpinorField]:
    """Positive- and negative-energy parts (π⁺ψ, π⁻ψ)."""
    return project_energy(psi, 1), project_energy(psi, -1)


def evolve_by_energy(psi: SpinorField, t: float) -> SpinorField:
    """Σ_η evolve_nw(π^η ψ, t, η); agrees with :func:`evolve`."""
    positive, negative = split_energy(psi)
    return evolve_nw(positive, t, 1) + evolve_nw(negative, t, -1)


def nw_evolver(eta: int) -> Evolver:
    def _evolve(psi: SpinorField, t: float) -> SpinorField:
        return evolve_nw(psi, t, eta)
    return _evolve


def required_extent(grid: GridSpec, carrier_radius: float, t_max: float) -> float:
    return 2.0 * (carrier_radius + abs(t_max)) + 4.0 * grid.dx


def validate_horizon(grid: GridSpec, carrier_radius: float, t_max: float):
    """Raise ConfigurationError unless L ≥ 2(R₀ + T_max) + 4Δx."""
    required = required_extent(grid, carrier_radius, t_max)
    if grid.extent < required - 1e-12:
        raise ConfigurationError(
            f"Wrap-around horizon violated: extent {grid.extent:.6g} < "
            f"2(R0 + T_max) + 4dx = {required:.6g} (R0={carrier_radius:.6g}, T_max={abs(t_max):.6g})"
        )

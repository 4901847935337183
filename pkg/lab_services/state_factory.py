"""
State factory: smooth bumps, momentum bumps, lattice translations, time
reversal and the turning-time constructions (superposed shifted copies,
symmetric slab states and far-face slab cuts).
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import special

from .carrier_border import DEFAULT_DELTA, border, measure_turning_times
from .exceptions import (
    ArgumentError,
    ConfigurationError,
    EmptyCutError,
    PreconditionError,
    ResolutionError,
)
from .lattice_spinor import (
    MOMENTUM,
    GridSpec,
    SpinorField,
    as_vector,
    mesh_energy,
    to_position,
    unit_vector,
)
from .spectral_evolution import evolve

logger = logging.getLogger(__name__)

RAMP_CELLS = 16


@dataclass
class ConstructedState:
    """A constructed field together with its construction parameters and predictions."""

    field: SpinorField
    metadata: Dict[str, Any] = field(default_factory=dict)


def bump_profile(s: np.ndarray) -> np.ndarray:
    """f(s) = exp(-1/(1 - s²)) for s < 1, else 0."""
    s = np.asarray(s, dtype=float)
    profile = np.zeros_like(s)
    inside = s < 1.0
    profile[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    return profile


def _spinor(weights, n_components: int) -> np.ndarray:
    u = np.asarray(weights, dtype=np.complex128).ravel()
    if u.shape != (n_components,):
        raise ArgumentError(f"Spinor weights must have {n_components} entries, got {u.shape[0]}")
    if not np.any(u):
        raise ArgumentError("Spinor weights must not all vanish")
    return u


def random_spinor(n_components: int, seed: int) -> np.ndarray:
    """Seeded complex unit spinor."""
    rng = np.random.default_rng(seed)
    u = rng.normal(size=n_components) + 1j * rng.normal(size=n_components)
    return u / np.linalg.norm(u)


def bump_state(
    grid: GridSpec,
    center,
    radius: float,
    spinor,
    mass: float = 1.0,
    representation: str = 'weyl',
) -> SpinorField:
    """
    Normalized smooth bump ψ(x) = f(|x - center|/ρ)·u.

    Raises:
        ResolutionError: ρ ≤ 2Δx
    """
    if radius <= 2.0 * grid.dx:
        raise ResolutionError(f"Bump radius {radius} must exceed 2dx = {2.0 * grid.dx}")
    u = _spinor(spinor, grid.n_components)
    profile = bump_profile(grid.radius(as_vector(center, grid.dim)) / radius)
    psi = SpinorField(grid=grid, values=np.multiply.outer(u, profile),
                      representation=representation, mass=mass)
    return psi.normalized()


def random_state(
    grid: GridSpec,
    seed: int,
    mass: float = 1.0,
    representation: str = 'weyl',
    n_bumps: int = 3,
) -> SpinorField:
    """Seeded sum of randomly placed, randomly weighted bumps."""
    rng = np.random.default_rng(seed)
    values = np.zeros((grid.n_components,) + grid.shape, dtype=np.complex128)
    for _ in range(n_bumps):
        radius = rng.uniform(4.0 * grid.dx, max(5.0 * grid.dx, grid.extent / 8.0))
        center = rng.uniform(-grid.extent / 4.0, grid.extent / 4.0, size=grid.dim)
        u = random_spinor(grid.n_components, int(rng.integers(0, 2 ** 31)))
        values += np.multiply.outer(u, bump_profile(grid.radius(center) / radius))
    return SpinorField(grid=grid, values=values, representation=representation, mass=mass).normalized()


def momentum_bump_state(
    grid: GridSpec,
    p_center,
    p_radius: float,
    spinor,
    mass: float = 1.0,
    representation: str = 'weyl',
    radial: bool = False,
) -> ConstructedState:
    """
    State whose momentum amplitude is a smooth bump.

    With ``radial`` the profile is g((|p| - |p_center|)/p_radius), a shell in
    momentum space. The metadata reports v = min |p|/ε(p) over the support;
    v = 0 is flagged.
    """
    u = _spinor(spinor, grid.n_components)
    mesh = grid.momentum_mesh
    squared = np.zeros(grid.shape)
    if radial:
        center_size = float(np.linalg.norm(np.atleast_1d(p_center)))
        for component in mesh:
            squared = squared + component ** 2
        s = np.abs(np.sqrt(squared) - center_size) / p_radius
    else:
        p_center = as_vector(p_center, grid.dim)
        for k, component in enumerate(mesh):
            squared = squared + (component - p_center[k]) ** 2
        s = np.sqrt(squared) / p_radius
    profile = bump_profile(s)
    support = profile > 0
    if not np.any(support):
        raise ResolutionError(f"Momentum bump of radius {p_radius} holds no lattice momentum "
                              f"(momentum step {grid.momentum_step:.6g})")

    p_size = np.zeros(grid.shape)
    for component in mesh:
        p_size = p_size + component ** 2
    p_size = np.sqrt(p_size)
    speed = float(np.min((p_size / mesh_energy(mesh, mass))[support]))
    if speed == 0.0:
        logger.warning("Momentum support contains p = 0; cone speed v = 0")

    phi = SpinorField(grid=grid, values=np.multiply.outer(u, profile), space=MOMENTUM,
                      representation=representation, mass=mass)
    psi = to_position(phi).normalized()
    return ConstructedState(field=psi, metadata={
        'kind': 'momentum_bump',
        'v': speed,
        'v_flagged': speed == 0.0,
        'p_center': np.atleast_1d(p_center).astype(float).tolist(),
        'p_radius': float(p_radius),
        'radial': bool(radial),
    })


def lattice_cells(grid: GridSpec, b) -> np.ndarray:
    """Integer cell counts of a lattice-multiple shift vector."""
    b = as_vector(b, grid.dim)
    cells = b / grid.dx
    rounded = np.round(cells)
    if np.any(np.abs(cells - rounded) > 1e-9):
        raise ArgumentError(f"Shift {b.tolist()} is not a lattice multiple of dx = {grid.dx}")
    return rounded.astype(int)


def translate(psi: SpinorField, b) -> SpinorField:
    """(W(b)ψ)(x) = ψ(x - b) as a circular shift by whole cells."""
    cells = lattice_cells(psi.grid, b)
    position = to_position(psi)
    shifted = np.roll(position.values, tuple(cells), axis=psi.grid.spatial_axes)
    return position.with_values(shifted)


def time_reverse(psi: SpinorField) -> SpinorField:
    """𝒯ψ = ωψ̄ (Weyl representation only)."""
    omega = psi.algebra.omega
    if omega is None:
        raise ConfigurationError(f"Time reversal requires the Weyl representation, got {psi.representation!r}")
    position = to_position(psi)
    return position.with_values(np.einsum('ab,b...->a...', omega, np.conj(position.values)))


def lattice_ceiling(grid: GridSpec, length: float) -> float:
    """Smallest lattice multiple ≥ length."""
    cells = np.ceil(length / grid.dx - 1e-9)
    return float(max(cells, 0.0) * grid.dx)


def _turning_times(
    psi: SpinorField,
    e: np.ndarray,
    turning_times: Optional[Tuple[float, float]],
    times: Optional[Sequence[float]],
    delta: float,
) -> Tuple[float, float]:
    if turning_times is not None:
        return float(turning_times[0]), float(turning_times[1])
    if times is None:
        raise ArgumentError("Either turning_times or a time sampling to measure them is required")
    measured = measure_turning_times(psi, e, times, delta)
    return measured.t_e, measured.t_ebar


def nise_state(
    psi1: SpinorField,
    e,
    tau: float,
    shift: float,
    turning_times: Optional[Tuple[float, float]] = None,
    times: Optional[Sequence[float]] = None,
    delta: float = DEFAULT_DELTA,
) -> ConstructedState:
    """
    ψ = ψ1 + W(δ·e)ψ1_τ with predicted t_e = t_e¹ and t_ē = t_ē¹ - τ.

    Args:
        psi1: Base state
        e: Direction; δ·e must be a lattice vector
        tau: Evolution time of the shifted copy, |τ| ≤ δ
        shift: Shift length δ
        turning_times: Known (t_e¹, t_ē¹) of ψ1; measured over ``times`` when omitted

    Raises:
        PreconditionError: |τ| > δ
    """
    e = unit_vector(e, psi1.grid.dim)
    if abs(tau) > shift + 1e-12:
        raise PreconditionError(f"Construction needs |tau| <= shift, got tau={tau}, shift={shift}")
    if not psi1.grid.is_lattice_multiple(shift):
        raise ArgumentError(f"Shift {shift} is not a lattice multiple of dx = {psi1.grid.dx}")
    t_e1, t_ebar1 = _turning_times(psi1, e, turning_times, times, delta)

    copy = translate(evolve(psi1, tau), shift * e)
    psi = (to_position(psi1) + copy).normalized()
    logger.info(f"Shifted-copy state: tau={tau:.6g}, shift={shift:.6g}, "
                f"predicted (t_e, t_ebar)=({t_e1:.6g}, {t_ebar1 - tau:.6g})")
    return ConstructedState(field=psi, metadata={
        'kind': 'nise',
        'tau': float(tau),
        'shift': float(shift),
        'parent_t_e': t_e1,
        'parent_t_ebar': t_ebar1,
        'predicted_t_e': t_e1,
        'predicted_t_ebar': t_ebar1 - tau,
    })


def prescribed_turning_state(
    psi1: SpinorField,
    e,
    t1: float,
    t2: float,
    turning_times: Optional[Tuple[float, float]] = None,
    times: Optional[Sequence[float]] = None,
    delta: float = DEFAULT_DELTA,
    shift: Optional[float] = None,
) -> ConstructedState:
    """
    State with t_e = t1 and t_ē = t2.

    Chooses τ = (t_ē¹ - t_e¹) - (t2 - t1), superposes the shifted copy and
    then time-translates by t_e¹ - t1.
    """
    e = unit_vector(e, psi1.grid.dim)
    t_e1, t_ebar1 = _turning_times(psi1, e, turning_times, times, delta)
    tau = (t_ebar1 - t_e1) - (t2 - t1)
    shift = lattice_ceiling(psi1.grid, abs(tau)) if shift is None else shift
    superposed = nise_state(psi1, e, tau, shift, turning_times=(t_e1, t_ebar1), delta=delta)
    offset = t_e1 - t1
    psi = evolve(superposed.field, offset)
    metadata = dict(superposed.metadata)
    metadata.update({
        'kind': 'prescribed',
        'time_offset': float(offset),
        'predicted_t_e': float(t1),
        'predicted_t_ebar': float(t2),
    })
    return ConstructedState(field=psi, metadata=metadata)


def dsabtp_state(
    grid: GridSpec,
    e,
    a: float,
    b: float,
    tau: float,
    mass: float = 1.0,
    spinor=None,
    seed: int = 0,
    delta: float = DEFAULT_DELTA,
    time_step: float = 0.05,
    representation: str = 'weyl',
) -> ConstructedState:
    """
    State localized in {a ≤ x·e ≤ b} with t_e = t_ē = τ.

    An η with t_e(η) = t_ē(η) = 0 and width at most 2ρ, ρ = ½(b - a) - |τ|,
    is built from a bump (shifted-copy superposition plus time translation),
    centered on the slab and evolved by -τ.
    """
    e = unit_vector(e, grid.dim)
    if not a < b:
        raise ArgumentError(f"Slab bounds must satisfy a < b, got ({a}, {b})")
    half = 0.5 * (b - a)
    if not abs(tau) < half:
        raise ArgumentError(f"Need |tau| < (b - a)/2 = {half}, got {tau}")
    rho = half - abs(tau)
    middle = 0.5 * (a + b)
    u = random_spinor(grid.n_components, seed) if spinor is None else spinor
    psi1 = bump_state(grid, middle * e, rho, u, mass, representation)

    reach = 2.0 * rho + 2.0 * time_step
    steps = int(np.ceil(2.0 * reach / time_step)) + 1
    measured = measure_turning_times(psi1, e, np.linspace(-reach, reach, steps), delta)
    gap = measured.t_ebar - measured.t_e

    if abs(gap) > 1e-12:
        superposed = nise_state(psi1, e, gap, lattice_ceiling(grid, abs(gap)),
                                turning_times=(measured.t_e, measured.t_ebar), delta=delta)
        candidate = superposed.field
    else:
        candidate = psi1
    eta = evolve(candidate, measured.t_e)

    low, high = border(eta, e, delta), -border(eta, -e, delta)
    recenter = round((middle - 0.5 * (low + high)) / grid.dx) * grid.dx
    if recenter:
        eta = translate(eta, recenter * e)
    eta_ok = high - low <= 2.0 * rho + 2.0 * grid.dx
    if not eta_ok:
        logger.warning(f"Zero-turning state width {high - low:.6g} exceeds 2*rho = {2.0 * rho:.6g}")

    psi = evolve(eta, -tau).normalized()
    return ConstructedState(field=psi, metadata={
        'kind': 'dsabtp',
        'a': float(a),
        'b': float(b),
        'tau': float(tau),
        'rho': float(rho),
        'seed': int(seed),
        'parent_t_e': measured.t_e,
        'parent_t_ebar': measured.t_ebar,
        'eta_width': float(high - low),
        'eta_width_ok': bool(eta_ok),
        'predicted_t_e': float(tau),
        'predicted_t_ebar': float(tau),
    })


def soft_edge(s, ramp: float = 0.0) -> np.ndarray:
    """
    Cut-off profile rising from 0 at s = 0 to 1 over a ramp of the given length.

    The rise is an error-function step centred at ramp/2 with width ramp/10,
    so it vanishes for s < 0 and differs from 1 by under 1e-6 past s = ramp.
    ramp = 0 gives the sharp indicator of s ≥ 0.
    """
    s = np.asarray(s, dtype=float)
    if ramp <= 0.0:
        return (s >= 0.0).astype(float)
    width = 0.1 * ramp
    rise = 0.5 * (1.0 + special.erf((s - 0.5 * ramp) / (np.sqrt(2.0) * width)))
    return np.where(s >= 0.0, rise, 0.0)


def slab_cut(
    psi: SpinorField,
    e,
    alpha1: float,
    alpha2: float,
    normalize: bool = False,
    ramp: float = 0.0,
) -> SpinorField:
    """
    Cut of ψ to the slab α₁ ≤ x·e ≤ α₂ in position space.

    With ramp = 0 this is the sharp cut 1_{α₁ ≤ x·e ≤ α₂}ψ and, not being
    renormalized unless asked, cut and complement partition ψ. A positive ramp
    mollifies both faces inward (see soft_edge). α₂ may be +inf.
    """
    if not alpha1 < alpha2:
        raise ArgumentError(f"Slab bounds must satisfy alpha1 < alpha2, got ({alpha1}, {alpha2})")
    if ramp < 0.0:
        raise ArgumentError(f"Ramp length must be non-negative, got {ramp}")
    e = unit_vector(e, psi.grid.dim)
    position = to_position(psi)
    projections = psi.grid.project(e)
    mask = soft_edge(projections - alpha1, ramp) * soft_edge(alpha2 - projections, ramp)
    values = position.values * mask
    if not np.any(values):
        raise EmptyCutError(f"Slab [{alpha1}, {alpha2}] along {e.tolist()} contains no mass")
    result = position.with_values(values)
    return result.normalized() if normalize else result


def far_face_cut_state(
    grid: GridSpec,
    e,
    a: float,
    b: float,
    tau: float,
    depth: float,
    mass: float = 1.0,
    seed: int = 0,
    delta: float = DEFAULT_DELTA,
    time_step: float = 0.05,
    ramp: Optional[float] = None,
) -> ConstructedState:
    """
    Thin slab of depth δ cut at the far face -ē(η) of a symmetric slab state η.

    The cut keeps everything beyond top - depth, top = -ē(η), and its inner
    face rises over ``ramp`` (default: 16 cells, at most half the depth) so
    that the cut adds no lattice ringing. For τ > 0 the prediction is
    t_ē ≥ ½·(width - ramp); τ < 0 is handled by time reversal of the τ > 0
    construction, flipping the sign of t_ē. A sharp cut (ramp = 0) gives the
    ½·width bound in the continuum but rings at δ-level thresholds on any grid.

    Raises:
        ArgumentError: depth outside (0, |τ|) or ramp outside [0, depth)
    """
    if not 0.0 < depth < abs(tau):
        raise ArgumentError(f"Cut depth must satisfy 0 < depth < |tau|, got depth={depth}, tau={tau}")
    ramp = min(RAMP_CELLS * grid.dx, 0.5 * depth) if ramp is None else float(ramp)
    if not 0.0 <= ramp < depth:
        raise ArgumentError(f"Cut ramp must satisfy 0 <= ramp < depth, got ramp={ramp}, depth={depth}")
    e = unit_vector(e, grid.dim)
    eta = dsabtp_state(grid, e, a, b, abs(tau), mass, seed=seed, delta=delta, time_step=time_step)
    top = -border(eta.field, -e, delta)
    psi = slab_cut(eta.field, e, top - depth, np.inf, normalize=True, ramp=ramp)
    sign = 1.0 if tau > 0 else -1.0
    if sign < 0:
        psi = time_reverse(psi)
    metadata = dict(eta.metadata)
    metadata.update({'kind': 'slab_cut', 'depth': float(depth), 'ramp': ramp, 'sign': sign, 'face': top})
    return ConstructedState(field=psi, metadata=metadata)

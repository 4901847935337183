"""
Exponential-type service: log-domain evaluation of cos(tε(z)) and sinc(tε(z))
on complex points, Fourier–Laplace transforms of localized states, P-indicator
estimation, support functions and the explicit cos/sinc growth sandwich.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np
import pandas as pd

from .carrier_border import DEFAULT_DELTA, CheckReport, make_report
from .exceptions import ArgumentError
from .lattice_spinor import SpinorField, as_vector, directional_quantile, to_position

logger = logging.getLogger(__name__)

LOG2 = float(np.log(2.0))
DIRECT_CUTOFF = 20.0
SINC_LOG_CUTOFF = 1e-4

LogMagnitude = float


@dataclass(frozen=True)
class ComplexPoint:
    """z = x + iλr with real x, λ and scale r ≥ 0."""

    x: tuple
    lam: tuple
    r: float = 1.0

    @classmethod
    def build(cls, x, lam, r: float = 1.0) -> 'ComplexPoint':
        x = np.atleast_1d(np.asarray(x, dtype=float))
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        if x.shape != lam.shape:
            raise ArgumentError(f"x and lambda must have equal length, got {x.shape} and {lam.shape}")
        if r < 0:
            raise ArgumentError(f"Scale r must be non-negative, got {r}")
        return cls(x=tuple(x.tolist()), lam=tuple(lam.tolist()), r=float(r))

    @property
    def z(self) -> np.ndarray:
        return np.asarray(self.x) + 1j * np.asarray(self.lam) * self.r

    @property
    def squared_modulus(self) -> float:
        """|z|² = Σ|z_j|²."""
        return float(np.sum(np.abs(self.z) ** 2))


def _coordinates(z: Union[ComplexPoint, Sequence[complex], complex]) -> np.ndarray:
    if isinstance(z, ComplexPoint):
        return z.z
    return np.atleast_1d(np.asarray(z, dtype=np.complex128))


def log_abs_cos(w):
    """ln|cos w| for complex w, overflow-free for any imaginary part."""
    w = np.asarray(w, dtype=np.complex128)
    a, b = w.real, np.abs(w.imag)
    with np.errstate(divide='ignore', over='ignore', invalid='ignore'):
        direct = np.log(np.abs(np.cos(np.where(b <= DIRECT_CUTOFF, w, 0.0))))
        decay = np.exp(-2.0 * b)
        asymptotic = b - LOG2 + 0.5 * np.log1p(2.0 * decay * np.cos(2.0 * a) + decay * decay)
    return np.where(b <= DIRECT_CUTOFF, direct, asymptotic)


def log_abs_sin(w):
    """ln|sin w| for complex w, overflow-free for any imaginary part."""
    w = np.asarray(w, dtype=np.complex128)
    a, b = w.real, np.abs(w.imag)
    with np.errstate(divide='ignore', over='ignore', invalid='ignore'):
        direct = np.log(np.abs(np.sin(np.where(b <= DIRECT_CUTOFF, w, 0.0))))
        decay = np.exp(-2.0 * b)
        asymptotic = b - LOG2 + 0.5 * np.log1p(-2.0 * decay * np.cos(2.0 * a) + decay * decay)
    return np.where(b <= DIRECT_CUTOFF, direct, asymptotic)


def log_abs_sinc(w):
    """ln|sin(w)/w| with sinc(0) = 1."""
    w = np.asarray(w, dtype=np.complex128)
    small = np.abs(w) < SINC_LOG_CUTOFF
    w2 = w * w
    with np.errstate(divide='ignore', invalid='ignore'):
        series = np.log(np.abs(1.0 - w2 / 6.0 + w2 * w2 / 120.0))
        general = log_abs_sin(np.where(small, 1.0, w)) - np.log(np.abs(np.where(small, 1.0, w)))
    return np.where(small, series, general)


def _scaled_energy(t: float, z, m: float) -> complex:
    """w = t·√(z·z + m²), any branch."""
    coordinates = _coordinates(z)
    return complex(t * np.sqrt(np.sum(coordinates * coordinates) + m * m))


def entire_cos_log(t: float, z, m: float) -> LogMagnitude:
    """ln|cos(tε(z))| with ε(z)² = z·z + m²."""
    return float(log_abs_cos(_scaled_energy(t, z, m)))


def entire_sinc_log(t: float, z, m: float) -> LogMagnitude:
    """ln|sinc(tε(z))| with ε(z)² = z·z + m²."""
    return float(log_abs_sinc(_scaled_energy(t, z, m)))


@dataclass
class EfsincConstants:
    t: float
    mu: float

    @property
    def threshold(self) -> float:
        """C_t = √2μ + ln2/(2|t|)."""
        return np.sqrt(2.0) * self.mu + LOG2 / (2.0 * abs(self.t))

    @property
    def log_cos_lower(self) -> float:
        return -np.log(4.0) - abs(self.t) * self.mu

    @property
    def log_cos_upper(self) -> float:
        return abs(self.t) * self.mu

    @property
    def log_sinc_lower(self) -> float:
        return 0.5 * np.log(1.0 / 24.0) - np.log(abs(self.t)) - abs(self.t) * self.mu

    @property
    def log_sinc_upper(self) -> float:
        return 0.5 * np.log(2.0) - np.log(abs(self.t)) + abs(self.t) * self.mu


@dataclass
class EfsincReport:
    cos_report: CheckReport
    sinc_report: CheckReport
    constants: EfsincConstants

    @property
    def passed(self) -> bool:
        return self.cos_report.passed and self.sinc_report.passed


def efsinc_check(t: float, mu: float, u_values: Sequence[float], v_values: Sequence[float]) -> EfsincReport:
    """
    Log-domain sandwich for |v| > C_t:

        ln A_t + |tv| ≤ ln|cos(t√(μ² + (u+iv)²))| ≤ ln B_t + |tv|

    and the sinc analogue carrying an extra -ln|u+iv|.

    Raises:
        ArgumentError: t = 0, or a sampled |v| ≤ C_t
    """
    if t == 0:
        raise ArgumentError("The cos/sinc sandwich needs t != 0")
    constants = EfsincConstants(t=float(t), mu=float(mu))
    u_values = np.asarray(u_values, dtype=float)
    v_values = np.asarray(v_values, dtype=float)
    if np.any(np.abs(v_values) <= constants.threshold):
        raise ArgumentError(f"All |v| must exceed C_t = {constants.threshold:.6g}")

    u, v = np.meshgrid(u_values, v_values, indexing='ij')
    s = u + 1j * v
    w = t * np.sqrt(mu * mu + s * s)
    growth = np.abs(t * v)
    log_modulus = np.log(np.abs(s))

    frames = {}
    for name, value, lower, upper in (
        ('efsinc_cos', log_abs_cos(w), constants.log_cos_lower + growth, constants.log_cos_upper + growth),
        ('efsinc_sinc', log_abs_sinc(w),
         constants.log_sinc_lower + growth - log_modulus, constants.log_sinc_upper + growth - log_modulus),
    ):
        frames[name] = pd.DataFrame({
            'u': u.ravel(),
            'v': v.ravel(),
            'log_lower': lower.ravel(),
            'log_value': value.ravel(),
            'log_upper': upper.ravel(),
            'margin': np.minimum(value - lower, upper - value).ravel(),
        })
    notes = [f't={t}', f'mu={mu}', f'C_t={constants.threshold:.17g}']
    return EfsincReport(
        cos_report=make_report('efsinc_cos', frames['efsinc_cos'], notes),
        sinc_report=make_report('efsinc_sinc', frames['efsinc_sinc'], notes),
        constants=constants,
    )


def _carrier_samples(psi: SpinorField, component: int, amplitude_floor: float):
    position = to_position(psi)
    values = position.values[component]
    magnitude = np.abs(values)
    peak = magnitude.max()
    mask = magnitude > amplitude_floor * peak if peak > 0 else np.zeros_like(magnitude, dtype=bool)
    coordinates = np.stack([np.broadcast_to(axis, psi.grid.shape)[mask] for axis in psi.grid.position_mesh], axis=-1)
    return values[mask], coordinates


def _quadrature_scale(psi: SpinorField) -> float:
    return psi.grid.cell_volume / (2.0 * np.pi) ** (psi.grid.dim / 2.0)


def fourier_laplace(psi: SpinorField, z, component: int = 0, amplitude_floor: float = 0.0) -> complex:
    """
    (2π)^{-d/2} Σ_q e^{-iq·z} ψ_l(q) Δx^d over the carrier voxels.

    Voxels with |ψ_l| ≤ amplitude_floor·max|ψ_l| are excluded; the default
    keeps every nonzero sample.
    """
    values, q = _carrier_samples(psi, component, amplitude_floor)
    coordinates = _coordinates(z)
    exponent = -1j * (q @ coordinates)
    return complex(np.sum(values * np.exp(exponent)) * _quadrature_scale(psi))


def fourier_laplace_log(psi: SpinorField, z, component: int = 0, amplitude_floor: float = 0.0) -> LogMagnitude:
    """ln|fourier_laplace(ψ, z, l)| via a log-sum-exp shift, finite far beyond double range."""
    values, q = _carrier_samples(psi, component, amplitude_floor)
    if len(values) == 0:
        return float('-inf')
    coordinates = _coordinates(z)
    exponent = -1j * (q @ coordinates)
    peak = float(np.max(exponent.real))
    total = np.sum(values * np.exp(exponent - peak))
    with np.errstate(divide='ignore'):
        return float(peak + np.log(np.abs(total)) + np.log(_quadrature_scale(psi)))


@dataclass
class IndicatorEstimate:
    """Finite-r estimates (1/r)·ln|f(x + iλr)| with a first-order extrapolation."""

    frame: pd.DataFrame
    estimate: float
    extrapolated: float
    correction: float
    log_corrected: bool = False


def p_indicator_estimate(
    f: Callable[[np.ndarray], float],
    lam,
    x,
    r_schedule: Sequence[float],
    log_correction: bool = False,
) -> IndicatorEstimate:
    """
    Estimate the P-indicator h_f(λ, x) = limsup (1/r) ln|f(x + iλr)|.

    Args:
        f: Log-magnitude evaluator taking a complex coordinate vector
        lam: Direction λ (magnitude kept)
        x: Real base point
        r_schedule: Increasing scales, e.g. (1e2, 1e3, 1e4)
        log_correction: Add ln(|λ|r)/r, the known correction for sinc-like factors

    Returns:
        IndicatorEstimate whose ``estimate`` is the value at the last r and
        ``extrapolated`` the slope of ln|f| between the last two scales
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    radii = np.asarray(r_schedule, dtype=float)
    if len(radii) == 0 or np.any(radii <= 0) or np.any(np.diff(radii) <= 0):
        raise ArgumentError("r_schedule must be a non-empty increasing list of positive scales")
    lam_size = float(np.linalg.norm(lam))

    logs = np.array([f(x + 1j * lam * r) for r in radii], dtype=float)
    if log_correction and lam_size > 0:
        logs = logs + np.log(lam_size * radii)
    estimates = logs / radii

    if len(radii) >= 2:
        extrapolated = float((logs[-1] - logs[-2]) / (radii[-1] - radii[-2]))
    else:
        extrapolated = float(estimates[-1])
    correction = float((estimates[-1] - extrapolated) * radii[-1])
    frame = pd.DataFrame({'r': radii, 'estimate': estimates})
    return IndicatorEstimate(frame=frame, estimate=float(estimates[-1]), extrapolated=extrapolated,
                             correction=correction, log_corrected=log_correction)


def support_function(psi: SpinorField, lam, delta: float = DEFAULT_DELTA) -> float:
    """
    H(λ) over the δ-carrier: |λ|·(-border(ψ, -λ/|λ|, δ)).

    Shares the quantile with the border, so H(-e) = -border(ψ, e, δ) exactly.
    """
    lam = as_vector(lam, psi.grid.dim)
    size = float(np.linalg.norm(lam))
    if size == 0.0:
        return 0.0
    return size * -directional_quantile(psi, -lam / size, delta)


def product_indicator_check(
    psi: SpinorField,
    t: float,
    directions: Sequence,
    r_schedule: Sequence[float],
    component: int = 0,
    delta: float = DEFAULT_DELTA,
    rel_tol: float = 0.05,
) -> CheckReport:
    """
    Indicator additivity h_{cos(tε)·f} = |t||λ| + H(λ) for f the Fourier–Laplace
    transform of a localized state, within a relative tolerance.
    """
    rows = []
    origin = np.zeros(psi.grid.dim)
    for lam in directions:
        lam = as_vector(lam, psi.grid.dim)

        def product(z, _t=t):
            return entire_cos_log(_t, z, psi.mass) + fourier_laplace_log(psi, z, component)

        estimate = p_indicator_estimate(product, lam, origin, r_schedule)
        expected = abs(t) * np.linalg.norm(lam) + support_function(psi, lam, delta)
        rows.append({
            **{f'lambda_{k + 1}': float(c) for k, c in enumerate(lam)},
            'estimate': estimate.estimate,
            'expected': float(expected),
            'margin': rel_tol * abs(expected) - abs(estimate.estimate - expected),
        })
    return make_report('indicator_additivity', pd.DataFrame(rows))


def exponential_type_check(
    psi: SpinorField,
    t: float,
    directions: Sequence,
    r_schedule: Sequence[float],
    delta: float = DEFAULT_DELTA,
    rel_tol: float = 0.05,
) -> CheckReport:
    """
    Growth rate of the entire extension of φ_t = cos(tε)φ + i·t·sinc(tε)·hφ.

    Uses the log envelope max(ln|cos|+ln max_l|φ_l|, ln|t·sinc|+ln(Σ|z_k|+m)+ln max_l|φ_l|)
    and compares its rate per r with (H(λ̂) + |t|)·|λ|.
    """
    rows = []
    origin = np.zeros(psi.grid.dim)
    for lam in directions:
        lam = as_vector(lam, psi.grid.dim)
        lam_size = float(np.linalg.norm(lam))

        def envelope(z, _t=t):
            field_log = max(fourier_laplace_log(psi, z, l) for l in range(psi.n_components))
            cos_term = entire_cos_log(_t, z, psi.mass)
            if _t == 0:
                return cos_term + field_log
            h_log = np.log(np.sum(np.abs(z)) + psi.mass)
            sinc_term = np.log(abs(_t)) + entire_sinc_log(_t, z, psi.mass) + h_log
            return max(cos_term, sinc_term) + field_log

        estimate = p_indicator_estimate(envelope, lam, origin, r_schedule)
        radius = support_function(psi, lam, delta) / lam_size if lam_size else 0.0
        bound = (radius + abs(t)) * lam_size
        rows.append({
            **{f'lambda_{k + 1}': float(c) for k, c in enumerate(lam)},
            'rate': estimate.estimate,
            'bound': bound,
            'margin': bound * (1.0 + rel_tol) - estimate.estimate,
        })
    return make_report('exponential_type', pd.DataFrame(rows))

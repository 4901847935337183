"""
Carrier-border service: the border functional e_δ(ψ), border traces over time,
tent fitting for turning times and report-producing theorem checkers.

Checkers never raise on a violated inequality; they return a CheckReport whose
``entries`` frame carries a ``margin`` column (negative margin = violation).
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from scipy import optimize

from .exceptions import (
    ApexNotBracketedError,
    ArgumentError,
    InsufficientSamplesError,
    PoorFitError,
    ResolutionError,
)
from .lattice_spinor import (
    GridSpec,
    SpinorField,
    axis_directions,
    carrier_radius,
    directional_quantile,
    mass_profile,
    shell_mass,
    spectral_floor,
    unit_vector,
)
from .parallel import ordered_map
from .spectral_evolution import Evolver, evolve, validate_horizon

logger = logging.getLogger(__name__)

DEFAULT_DELTA = 1e-6
SINGLE_TOL_CELLS = 2
COMPOUND_TOL_CELLS = 3
MIN_TENT_SAMPLES = 5


def single_tolerance(grid: GridSpec) -> float:
    return SINGLE_TOL_CELLS * grid.dx


def compound_tolerance(grid: GridSpec) -> float:
    return COMPOUND_TOL_CELLS * grid.dx


@dataclass
class CheckReport:
    """Outcome of one theorem check."""

    name: str
    passed: bool
    worst_margin: float
    violations: int
    entries: pd.DataFrame
    notes: List[str] = field(default_factory=list)

    def summary(self) -> Dict:
        return {
            'name': self.name,
            'passed': bool(self.passed),
            'worst_margin': float(self.worst_margin),
            'violations': int(self.violations),
            'notes': list(self.notes),
        }


def make_report(name: str, entries: pd.DataFrame, notes: Optional[List[str]] = None) -> CheckReport:
    margins = entries['margin'].to_numpy(dtype=float) if len(entries) else np.array([np.inf])
    violations = int(np.sum(margins < 0))
    report = CheckReport(
        name=name,
        passed=violations == 0,
        worst_margin=float(np.min(margins)),
        violations=violations,
        entries=entries.reset_index(drop=True),
        notes=notes or [],
    )
    logger.info(f"{name}: {'passed' if report.passed else 'FAILED'} "
                f"(violations={violations}, worst margin={report.worst_margin:.3e})")
    return report


def border(psi: SpinorField, e, delta: float = DEFAULT_DELTA) -> float:
    """
    Numerical border e_δ(ψ) = sup{α : half_space_mass(ψ, e, α) ≤ δ}.

    Args:
        psi: Nonzero field
        e: Direction, normalized internally
        delta: Relative-mass threshold in (0, 1)

    Returns:
        The border along e
    """
    return directional_quantile(psi, e, delta)


def width(psi: SpinorField, e, delta: float = DEFAULT_DELTA) -> float:
    """Carrier width -ē_δ(ψ) - e_δ(ψ) in direction e."""
    e = unit_vector(e, psi.grid.dim)
    return -border(psi, -e, delta) - border(psi, e, delta)


def component_borders(psi: SpinorField, e, delta: float = DEFAULT_DELTA) -> List[float]:
    """
    Border of each spinor component, thresholded against the total mass.

    A component carrying at most δ of the total mass has no border (+inf).
    """
    total_mass = psi.norm() ** 2
    borders = []
    for component in range(psi.n_components):
        values = np.zeros_like(psi.values)
        values[component] = psi.values[component]
        part = psi.with_values(values)
        share = part.norm() ** 2 / total_mass if total_mass > 0 else 0.0
        if share <= delta:
            borders.append(float('inf'))
            continue
        levels, cumulative = mass_profile(part, e)
        k = int(np.searchsorted(cumulative * share, delta, side='right'))
        borders.append(float(levels[min(k, len(levels) - 1)]))
    return borders


def _state_at(psi: SpinorField, t: float, evolver: Evolver) -> SpinorField:
    return psi if t == 0 else evolver(psi, t)


def require_resolved(psi: SpinorField, delta: float = DEFAULT_DELTA) -> float:
    """
    Check that evolved δ-borders of ψ are above the lattice noise floor.

    Returns:
        The spectral floor of ψ

    Raises:
        ResolutionError: the momentum mass next to the Nyquist edge exceeds δ
    """
    floor = spectral_floor(psi)
    if floor > delta:
        raise ResolutionError(
            f"Spectral mass {floor:.3e} next to the Nyquist edge exceeds delta={delta:g}: "
            f"evolved borders would track lattice ringing. Refine the grid (dx={psi.grid.dx:.6g}) "
            f"or use a wider state"
        )
    return floor


def sample_borders(
    psi: SpinorField,
    times: Sequence[float],
    directions: Sequence,
    delta: float = DEFAULT_DELTA,
    evolver: Evolver = evolve,
) -> np.ndarray:
    """
    Borders of ψ_t for every (time, direction) pair, one evolution per time.

    Raises ResolutionError when some t ≠ 0 and ψ is not resolved at δ.
    """
    directions = [unit_vector(e, psi.grid.dim) for e in directions]
    if any(float(t) != 0.0 for t in times):
        require_resolved(psi, delta)

    def _sample(t: float) -> List[float]:
        state = _state_at(psi, t, evolver)
        return [border(state, e, delta) for e in directions]

    rows = ordered_map(_sample, [float(t) for t in times])
    return np.asarray(rows, dtype=float).reshape(len(times), len(directions))


def _validated_times(times: Sequence[float]) -> np.ndarray:
    times = np.asarray(times, dtype=float).ravel()
    if len(times) == 0:
        raise ArgumentError("At least one sample time is required")
    if len(times) > 1 and np.any(np.diff(times) <= 0):
        raise ArgumentError("Sample times must be strictly increasing")
    return times


def enforce_horizon(psi: SpinorField, times: Sequence[float], delta: float = DEFAULT_DELTA):
    t_max = float(np.max(np.abs(times))) if len(times) else 0.0
    validate_horizon(psi.grid, carrier_radius(psi, delta), t_max)


@dataclass
class BorderTrace:
    """Sampled series (t, e_δ(ψ_t)) along one direction."""

    direction: np.ndarray
    delta: float
    times: np.ndarray
    borders: np.ndarray
    grid: GridSpec

    @property
    def time_step(self) -> float:
        return float(np.min(np.diff(self.times))) if len(self.times) > 1 else 0.0

    def lipschitz_excess(self) -> np.ndarray:
        """|Δborder| - |Δt| - 2Δx per consecutive pair; positive entries break the light-speed bound."""
        return np.abs(np.diff(self.borders)) - np.abs(np.diff(self.times)) - 2.0 * self.grid.dx

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame({'t': self.times, 'border': self.borders})
        for k, component in enumerate(self.direction):
            frame[f'e_{k + 1}'] = float(component)
        return frame


def border_trace(
    psi: SpinorField,
    e,
    times: Sequence[float],
    delta: float = DEFAULT_DELTA,
    evolver: Evolver = evolve,
    check_horizon: bool = True,
) -> BorderTrace:
    """
    Evolve once per sample time and record the border along e.

    Raises ConfigurationError when the times leave the wrap-around-safe horizon.
    """
    times = _validated_times(times)
    if check_horizon:
        enforce_horizon(psi, times, delta)
    e = unit_vector(e, psi.grid.dim)
    borders = sample_borders(psi, times, [e], delta, evolver)[:, 0]
    logger.info(f"Border trace: {len(times)} samples along {np.round(e, 6).tolist()}")
    return BorderTrace(direction=e, delta=delta, times=times, borders=borders, grid=psi.grid)


@dataclass
class TentFit:
    """Fitted tent b(t) = apex - |t - t_e| (or free slopes in diagnostic mode)."""

    t_e: float
    apex: float
    slope_pre: float
    slope_post: float
    residual_rms: float
    mode: str = 'unit'

    def predict(self, times) -> np.ndarray:
        offset = np.asarray(times, dtype=float) - self.t_e
        return np.where(offset < 0, self.apex + self.slope_pre * offset, self.apex - self.slope_post * offset)

    def as_dict(self) -> Dict:
        return {
            't_e': float(self.t_e),
            'apex': float(self.apex),
            'residual': float(self.residual_rms),
            'slope_pre': float(self.slope_pre),
            'slope_post': float(self.slope_post),
            'mode': self.mode,
        }


def _unit_slope_sse(times: np.ndarray, borders: np.ndarray, t_e: float):
    lifted = borders + np.abs(times - t_e)
    apex = float(np.mean(lifted))
    return float(np.sum((lifted - apex) ** 2)), apex


def _unit_slope_breakpoint(times: np.ndarray, borders: np.ndarray) -> float:
    """Exact least-squares breakpoint: the objective is quadratic between neighboring samples."""
    best_t, best_sse = times[0], np.inf
    for k in range(len(times) - 1):
        sigma = np.where(np.arange(len(times)) <= k, 1.0, -1.0)
        a = borders - sigma * times
        da, ds = a - a.mean(), sigma - sigma.mean()
        candidate = float(np.clip(-np.dot(da, ds) / np.dot(ds, ds), times[k], times[k + 1]))
        sse, _ = _unit_slope_sse(times, borders, candidate)
        if sse < best_sse:
            best_t, best_sse = candidate, sse
    return best_t


def _free_slope_fit(times: np.ndarray, borders: np.ndarray, t_e: float):
    offset = times - t_e
    design = np.column_stack([np.ones_like(times), np.minimum(offset, 0.0), -np.maximum(offset, 0.0)])
    coefficients, *_ = np.linalg.lstsq(design, borders, rcond=None)
    residual = borders - design @ coefficients
    return float(np.sum(residual ** 2)), coefficients


def fit_tent(trace: BorderTrace, free_slope: bool = False, max_residual: Optional[float] = None) -> TentFit:
    return fit_tent_samples(trace.times, trace.borders, free_slope=free_slope, max_residual=max_residual)


def _accepted(fit: TentFit, max_residual: Optional[float]) -> TentFit:
    if max_residual is not None and fit.residual_rms > max_residual:
        raise PoorFitError(fit.residual_rms, max_residual)
    return fit


def fit_tent_samples(times, borders, free_slope: bool = False, max_residual: Optional[float] = None) -> TentFit:
    """
    Least-squares tent fit over (c, t_e).

    The unit-slope fit solves each inter-sample interval in closed form; the
    free-slope diagnostic refines the breakpoint by golden-section search
    between the neighbors of the unit-slope apex.

    Raises:
        InsufficientSamplesError: fewer than five samples
        ApexNotBracketedError: fewer than two samples on either side of t_e
        PoorFitError: ``max_residual`` is given and the RMS residual exceeds it
    """
    times = _validated_times(times)
    borders = np.asarray(borders, dtype=float).ravel()
    if len(times) < MIN_TENT_SAMPLES:
        raise InsufficientSamplesError(f"Tent fit needs at least {MIN_TENT_SAMPLES} samples, got {len(times)}")

    t_e = _unit_slope_breakpoint(times, borders)
    if np.sum(times < t_e) < 2 or np.sum(times > t_e) < 2:
        raise ApexNotBracketedError(t_e, float(times[0]), float(times[-1]))

    if not free_slope:
        sse, apex = _unit_slope_sse(times, borders, t_e)
        return _accepted(TentFit(t_e=t_e, apex=apex, slope_pre=1.0, slope_post=1.0,
                                 residual_rms=float(np.sqrt(sse / len(times))), mode='unit'), max_residual)

    below = times[times < t_e][-1]
    above = times[times > t_e][0]

    def objective(candidate: float) -> float:
        return _free_slope_fit(times, borders, candidate)[0]

    if objective(t_e) < min(objective(below), objective(above)):
        refined = float(optimize.golden(objective, brack=(below, t_e, above), tol=1e-10))
    else:
        refined = min((below, t_e, above), key=objective)
    sse, (apex, slope_pre, slope_post) = _free_slope_fit(times, borders, refined)
    return _accepted(TentFit(t_e=refined, apex=float(apex), slope_pre=float(slope_pre),
                             slope_post=float(slope_post), residual_rms=float(np.sqrt(sse / len(times))),
                             mode='free'), max_residual)


@dataclass
class TurningTimes:
    """Measured turning times along e and ē = -e with their traces and fits."""

    t_e: float
    t_ebar: float
    fit_e: TentFit
    fit_ebar: TentFit
    trace_e: BorderTrace
    trace_ebar: BorderTrace

    @property
    def time_step(self) -> float:
        return self.trace_e.time_step

    def reversed(self) -> 'TurningTimes':
        """The same measurement seen from direction ē."""
        return TurningTimes(
            t_e=self.t_ebar, t_ebar=self.t_e, fit_e=self.fit_ebar, fit_ebar=self.fit_e,
            trace_e=self.trace_ebar, trace_ebar=self.trace_e,
        )


def measure_turning_times(
    psi: SpinorField,
    e,
    times: Sequence[float],
    delta: float = DEFAULT_DELTA,
    evolver: Evolver = evolve,
    check_horizon: bool = True,
    max_residual: Optional[float] = None,
) -> TurningTimes:
    """
    Fit tents to the e and ē traces, sharing one evolution per sample time.

    With ``max_residual`` a trace that is not a tent raises PoorFitError
    instead of yielding a turning time.
    """
    times = _validated_times(times)
    if check_horizon:
        enforce_horizon(psi, times, delta)
    e = unit_vector(e, psi.grid.dim)
    borders = sample_borders(psi, times, [e, -e], delta, evolver)
    trace_e = BorderTrace(direction=e, delta=delta, times=times, borders=borders[:, 0], grid=psi.grid)
    trace_ebar = BorderTrace(direction=-e, delta=delta, times=times, borders=borders[:, 1], grid=psi.grid)
    fit_e = fit_tent(trace_e, max_residual=max_residual)
    fit_ebar = fit_tent(trace_ebar, max_residual=max_residual)
    logger.info(f"Turning times: t_e={fit_e.t_e:.6g}, t_ebar={fit_ebar.t_e:.6g}")
    return TurningTimes(
        t_e=fit_e.t_e, t_ebar=fit_ebar.t_e, fit_e=fit_e, fit_ebar=fit_ebar,
        trace_e=trace_e, trace_ebar=trace_ebar,
    )


def _direction_columns(e: np.ndarray) -> Dict[str, float]:
    return {f'e_{k + 1}': float(c) for k, c in enumerate(e)}


def check_causality(
    psi: SpinorField,
    times: Sequence[float],
    delta: float = DEFAULT_DELTA,
    tol: Optional[float] = None,
    directions: Optional[Sequence] = None,
    evolver: Evolver = evolve,
) -> CheckReport:
    """border(ψ_t, e) ≥ border(ψ, e) - |t| - tol for every sampled t and direction."""
    tol = single_tolerance(psi.grid) if tol is None else tol
    directions = [unit_vector(e, psi.grid.dim) for e in (directions or axis_directions(psi.grid.dim))]
    times = np.asarray(times, dtype=float).ravel()
    initial = [border(psi, e, delta) for e in directions]
    sampled = sample_borders(psi, times, directions, delta, evolver)

    rows = []
    for i, t in enumerate(times):
        for j, e in enumerate(directions):
            bound = initial[j] - abs(t)
            rows.append({'t': t, **_direction_columns(e), 'border': sampled[i, j],
                         'bound': bound, 'margin': sampled[i, j] - bound + tol})
    return make_report('causality', pd.DataFrame(rows))


def check_upper_bound(
    psi: SpinorField,
    e,
    times: Sequence[float],
    delta: float = DEFAULT_DELTA,
    tol: Optional[float] = None,
    turning: Optional[TurningTimes] = None,
    evolver: Evolver = evolve,
) -> CheckReport:
    """
    e_δ(ψ_t) ≤ -2ē_δ(ψ) - e_δ(ψ) - |t| + tol.

    With measured turning times the sharpened bound -ē(ψ) - |t - t_e| and the
    improved bound -2ē(ψ) - e(ψ) - |t_ē| - |t| are checked as well.
    """
    tol = compound_tolerance(psi.grid) if tol is None else tol
    e = unit_vector(e, psi.grid.dim)
    times = np.asarray(times, dtype=float).ravel()
    e0, ebar0 = border(psi, e, delta), border(psi, -e, delta)
    sampled = sample_borders(psi, times, [e], delta, evolver)[:, 0]

    frame = pd.DataFrame({'t': times, 'border': sampled})
    frame['bound'] = -2.0 * ebar0 - e0 - np.abs(times)
    frame['margin_bound'] = frame['bound'] + tol - frame['border']
    margin_columns = ['margin_bound']
    if turning is not None:
        frame['bound_sharp'] = -ebar0 - np.abs(times - turning.t_e)
        frame['margin_sharp'] = frame['bound_sharp'] + tol - frame['border']
        frame['bound_improved'] = frame['bound'] - abs(turning.t_ebar)
        frame['margin_improved'] = frame['bound_improved'] + tol - frame['border']
        margin_columns += ['margin_sharp', 'margin_improved']
    frame['margin'] = frame[margin_columns].min(axis=1)
    return make_report('upper_bound', frame)


def check_turning_budget(
    psi: SpinorField,
    e,
    times: Sequence[float],
    delta: float = DEFAULT_DELTA,
    tol: Optional[float] = None,
    turning: Optional[TurningTimes] = None,
) -> CheckReport:
    """|t_e| + |t_ē| ≤ width + tol, and 2|t_e| < width + tol when t_e = t_ē within two time steps."""
    tol = compound_tolerance(psi.grid) if tol is None else tol
    turning = turning or measure_turning_times(psi, e, times, delta)
    carrier_width = width(psi, e, delta)
    rows = [{
        'clause': 'sum',
        't_e': turning.t_e,
        't_ebar': turning.t_ebar,
        'width': carrier_width,
        'margin': carrier_width + tol - (abs(turning.t_e) + abs(turning.t_ebar)),
    }]
    notes = []
    if abs(turning.t_e - turning.t_ebar) <= 2.0 * turning.time_step:
        notes.append('equal turning times: strict 2|t_e| < width checked as non-strict at grid tolerance')
        rows.append({
            'clause': 'equal',
            't_e': turning.t_e,
            't_ebar': turning.t_ebar,
            'width': carrier_width,
            'margin': carrier_width + tol - 2.0 * abs(turning.t_e),
        })
    return make_report('turning_budget', pd.DataFrame(rows), notes=notes)


def check_min_law(
    psi: SpinorField,
    e,
    t: Union[float, Sequence[float]],
    delta: float = DEFAULT_DELTA,
    tol: Optional[float] = None,
    evolver: Evolver = evolve,
) -> CheckReport:
    """|min(e(ψ_t), e(ψ_{-t})) - (e(ψ) - |t|)| ≤ tol, along e and -e."""
    tol = compound_tolerance(psi.grid) if tol is None else tol
    e = unit_vector(e, psi.grid.dim)
    magnitudes = np.abs(np.atleast_1d(np.asarray(t, dtype=float)))
    signed = np.concatenate([magnitudes, -magnitudes])
    directions = [e, -e]
    initial = [border(psi, d, delta) for d in directions]
    sampled = sample_borders(psi, signed, directions, delta, evolver)

    rows = []
    n = len(magnitudes)
    for i, magnitude in enumerate(magnitudes):
        for j, d in enumerate(directions):
            observed = min(sampled[i, j], sampled[n + i, j])
            predicted = initial[j] - magnitude
            rows.append({'t': magnitude, **_direction_columns(d), 'border_forward': sampled[i, j],
                         'border_backward': sampled[n + i, j], 'predicted': predicted,
                         'margin': tol - abs(observed - predicted)})
    return make_report('min_law', pd.DataFrame(rows))


def check_long_term(
    psi: SpinorField,
    R: Optional[float] = None,
    delta: float = DEFAULT_DELTA,
    tol: Optional[float] = None,
    span: float = 1.0,
    steps: int = 11,
    directions: Optional[Sequence] = None,
    evolver: Evolver = evolve,
) -> CheckReport:
    """
    Linear recession with slope -1 after |t| = 2R.

    For t ≥ 2R: e(ψ_t) = e(ψ_{2R}) + 2R - t; for t ≤ -2R: e(ψ_t) = e(ψ_{-2R}) + 2R + t.
    R defaults to the carrier radius of ψ.
    """
    tol = compound_tolerance(psi.grid) if tol is None else tol
    R = carrier_radius(psi, delta) if R is None else R
    directions = [unit_vector(e, psi.grid.dim) for e in (directions or axis_directions(psi.grid.dim))]
    forward = np.linspace(2.0 * R, 2.0 * R + span, steps)
    times = np.concatenate([-forward[::-1], forward])
    sampled = sample_borders(psi, times, directions, delta, evolver)
    anchor_backward, anchor_forward = sampled[steps - 1], sampled[steps]

    rows = []
    for i, t in enumerate(times):
        anchor = anchor_forward if t > 0 else anchor_backward
        for j, e in enumerate(directions):
            predicted = anchor[j] + 2.0 * R - abs(t)
            rows.append({'t': t, **_direction_columns(e), 'border': sampled[i, j], 'predicted': predicted,
                         'margin': tol - abs(sampled[i, j] - predicted)})
    return make_report('long_term', pd.DataFrame(rows), notes=[f'R={R:.17g}'])


def check_translation_covariance(
    psi: SpinorField,
    shifted: SpinorField,
    e,
    shift: float,
    times: Sequence[float],
    delta: float = DEFAULT_DELTA,
) -> CheckReport:
    """e(W(λe)ψ) = e(ψ) + λ on the lattice, with t_e unchanged within two time steps."""
    e = unit_vector(e, psi.grid.dim)
    original = measure_turning_times(psi, e, times, delta)
    moved = measure_turning_times(shifted, e, times, delta)
    border_error = abs(border(shifted, e, delta) - border(psi, e, delta) - shift)
    rows = [
        {'quantity': 'border', 'observed': border_error, 'margin': 1e-9 - border_error},
        {'quantity': 't_e', 'observed': moved.t_e - original.t_e,
         'margin': 2.0 * original.time_step - abs(moved.t_e - original.t_e)},
    ]
    return make_report('translation_covariance', pd.DataFrame(rows))


def check_time_reversal(
    psi: SpinorField,
    reversed_psi: SpinorField,
    e,
    times: Sequence[float],
    delta: float = DEFAULT_DELTA,
) -> CheckReport:
    """e(𝒯ψ) = e(ψ) and t_e(𝒯ψ) = -t_e(ψ) within two time steps."""
    e = unit_vector(e, psi.grid.dim)
    original = measure_turning_times(psi, e, times, delta)
    mirrored = measure_turning_times(reversed_psi, e, times, delta)
    border_error = abs(border(reversed_psi, e, delta) - border(psi, e, delta))
    rows = [
        {'quantity': 'border', 'observed': border_error, 'margin': 1e-12 - border_error},
        {'quantity': 't_e', 'observed': mirrored.t_e + original.t_e,
         'margin': 2.0 * original.time_step - abs(mirrored.t_e + original.t_e)},
    ]
    return make_report('time_reversal', pd.DataFrame(rows))


def light_cone_leakage(psi_t: SpinorField, radius: float, center=None) -> float:
    """Relative mass of ψ_t outside the ball of the given radius."""
    return shell_mass(psi_t, radius, np.inf, center)


def fit_decay_exponent(times, values) -> float:
    """Slope of log(values) against log(1 + |t|) by least squares."""
    x = np.log1p(np.abs(np.asarray(times, dtype=float)))
    y = np.log(np.maximum(np.asarray(values, dtype=float), np.finfo(float).tiny))
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


@dataclass
class ShellReport:
    """Inner-ball and outside-light-cone norms of ψ_t per sampled time."""

    frame: pd.DataFrame
    radius: float
    decay_exponent: Optional[float] = None
    cone_speed: Optional[float] = None


def shell_report(
    psi: SpinorField,
    times: Sequence[float],
    r: float,
    delta: float = DEFAULT_DELTA,
    cone_speed: Optional[float] = None,
    decay_window: Optional[Sequence[float]] = None,
    evolver: Evolver = evolve,
) -> ShellReport:
    """
    Table of (t, ‖1_{B_r}ψ_t‖, ‖1_{ℝ^d∖B_{|t|}}ψ_t‖) with optional cone column ‖1_{B_{v|t|}}ψ_t‖.

    ``decay_window`` = (t_lo, t_hi) requests a log-log fit of the outer column
    over the samples with t_lo ≤ |t| ≤ t_hi. ``delta`` is recorded for provenance only.
    """
    times = _validated_times(times)

    def _row(t: float) -> Dict:
        state = _state_at(psi, t, evolver)
        row = {
            't': t,
            'inner_mass': float(np.sqrt(shell_mass(state, 0.0, r))),
            'outer_mass': float(np.sqrt(shell_mass(state, abs(t), np.inf))),
        }
        if cone_speed:
            row['cone_mass'] = float(np.sqrt(shell_mass(state, 0.0, cone_speed * abs(t))))
        return row

    frame = pd.DataFrame(ordered_map(_row, [float(t) for t in times]))
    exponent = None
    if decay_window is not None:
        lo, hi = decay_window
        window = frame[(frame['t'].abs() >= lo) & (frame['t'].abs() <= hi)]
        if len(window) >= 2:
            exponent = fit_decay_exponent(window['t'], window['outer_mass'])
            logger.info(f"Outer-mass decay exponent over [{lo}, {hi}]: {exponent:.3f}")
        else:
            logger.warning(f"Decay window [{lo}, {hi}] holds fewer than two samples; no exponent fitted")
    return ShellReport(frame=frame, radius=r, decay_exponent=exponent, cone_speed=cone_speed)

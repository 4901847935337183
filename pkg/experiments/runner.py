"""
Experiment runner service: executes one validated configuration, writes its
CSV/JSON outputs and the run manifest, and records the run in the database.
"""

import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
from django.conf import settings
from django.utils import timezone

from DiracFront import __version__ as TOOL_VERSION
from lab_services.carrier_border import (
    CheckReport,
    border_trace,
    check_causality,
    check_long_term,
    check_min_law,
    check_turning_budget,
    check_upper_bound,
    enforce_horizon,
    fit_tent,
    light_cone_leakage,
    make_report,
    measure_turning_times,
    shell_report,
    width,
)
from lab_services.exceptions import ApexNotBracketedError, DiracFrontError
from lab_services.exponential_type import (
    EfsincConstants,
    efsinc_check,
    entire_cos_log,
    entire_sinc_log,
    fourier_laplace_log,
    p_indicator_estimate,
    product_indicator_check,
    support_function,
)
from lab_services.lattice_spinor import as_vector, axis_directions, carrier_radius, make_grid
from lab_services.parallel import ordered_map, worker_count
from lab_services.spectral_evolution import evolve, evolve_nw, nw_evolver, validate_horizon
from lab_services.state_factory import (
    bump_state,
    far_face_cut_state,
    lattice_ceiling,
    nise_state,
    random_spinor,
)

from .catalog import EXPERIMENTS
from .models import ExperimentRun
from .recipes import build_state, recipe_direction, turning_window

logger = logging.getLogger(__name__)

CSV_OPTIONS = {'index': False, 'float_format': '%.17g', 'lineterminator': '\n'}


def _jsonable(value):
    """Convert numpy scalars and arrays (recursively) to plain JSON types."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, Path):
        return str(value)
    return value


def _direction_columns(e) -> Dict[str, float]:
    return {f'e_{k + 1}': float(c) for k, c in enumerate(e)}


@dataclass
class RunResult:
    """Outcome of one run: manifest, check reports and where the files went."""

    manifest: Dict[str, Any]
    checks: List[CheckReport]
    output_dir: Path
    run: Optional[ExperimentRun] = None
    files: List[str] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(report.passed for report in self.checks)


class ExperimentRunner:
    """Runs a validated experiment configuration (see serializers.validate_config)."""

    def __init__(self, config: Dict[str, Any], output_dir=None):
        self.config = config
        self.entry = EXPERIMENTS[config['experiment']]
        self.seed = int(config.get('seed', 0))
        self.delta = float(config['delta'])
        self.parameters = dict(config.get('parameters') or {})
        self.grid = make_grid(**config['grid']) if config.get('grid') else None

        root = Path(settings.DIRAC_FRONT['OUTPUT_ROOT'])
        self.output_dir = Path(output_dir or config.get('output_dir') or root / self.entry.name)

        self.checks: List[CheckReport] = []
        self.files: List[str] = []
        self.notes: List[str] = []
        self.results: Dict[str, Any] = {}
        self.state = None
        self.times = None
        if config.get('time'):
            sampling = config['time']
            self.times = np.linspace(sampling['t_min'], sampling['t_max'], sampling['steps'])

    # Tolerances

    def _tolerance(self, key: str, cells_setting: str) -> float:
        configured = (self.config.get('tolerances') or {}).get(key)
        if configured is not None:
            return float(configured)
        return settings.DIRAC_FRONT[cells_setting] * self.grid.dx

    @property
    def single_tol(self) -> float:
        return self._tolerance('single', 'SINGLE_TOL_CELLS')

    @property
    def compound_tol(self) -> float:
        return self._tolerance('compound', 'COMPOUND_TOL_CELLS')

    @property
    def time_step(self) -> float:
        return float(np.min(np.diff(self.times))) if self.times is not None and len(self.times) > 1 else 0.0

    @property
    def direction(self) -> np.ndarray:
        recipe = self.config.get('state') or {}
        return recipe_direction(recipe, self.grid.dim, self.parameters.get('direction'))

    # Output helpers

    def _write_frame(self, name: str, frame: pd.DataFrame):
        path = self.output_dir / name
        frame.to_csv(path, **CSV_OPTIONS)
        self.files.append(name)
        logger.info(f"Wrote {path} ({len(frame)} rows)")

    def _write_json(self, name: str, payload: Dict[str, Any]):
        path = self.output_dir / name
        with open(path, 'w') as f:
            json.dump(_jsonable(payload), f, indent=2, sort_keys=True)
            f.write('\n')
        self.files.append(name)
        logger.info(f"Wrote {path}")

    def _add(self, report: CheckReport, filename: Optional[str] = None) -> CheckReport:
        self.checks.append(report)
        if filename:
            self._write_frame(filename, report.entries)
        return report

    # Entry point

    def run(self) -> RunResult:
        """
        Execute the configured experiment.

        Returns:
            RunResult with the manifest that was written to ``manifest.json``

        Raises:
            DiracFrontError: a construction or horizon precondition failed
            OSError: the output directory is not writable
        """
        started_at = timezone.now()
        clock = time.perf_counter()
        self.output_dir.mkdir(parents=True, exist_ok=True)
        logger.info(f"Running experiment '{self.entry.name}' (seed={self.seed}) into {self.output_dir}")

        if self.entry.needs_state:
            self.state = build_state(self.grid, self.config['state'], self.seed, self.delta,
                                     self.parameters.get('direction'))
        getattr(self, f'_run_{self.entry.name}')()

        manifest = {
            'experiment': self.entry.name,
            'config': self.config,
            'tool_version': TOOL_VERSION,
            'seed': self.seed,
            'delta': self.delta,
            'grid': self.grid.as_dict() if self.grid else None,
            'threads': worker_count(),
            'state': self.state.metadata if self.state else None,
            'checks': [report.summary() for report in self.checks],
            'all_passed': all(report.passed for report in self.checks),
            'results': self.results,
            'notes': self.notes,
            'files': sorted(self.files + ['manifest.json']),
            'started_at': started_at.isoformat(),
            'wall_clock_seconds': time.perf_counter() - clock,
        }
        manifest = _jsonable(manifest)
        self._write_json('manifest.json', manifest)

        result = RunResult(manifest=manifest, checks=self.checks, output_dir=self.output_dir,
                           run=self._record(manifest), files=sorted(self.files))
        logger.info(f"Experiment '{self.entry.name}' finished: "
                    f"{'all checks passed' if result.all_passed else 'some checks FAILED'}")
        return result

    def _record(self, manifest: Dict[str, Any]) -> Optional[ExperimentRun]:
        try:
            return ExperimentRun.objects.create(
                experiment=self.entry.name,
                config=manifest['config'],
                manifest=manifest,
                output_dir=str(self.output_dir),
                all_passed=manifest['all_passed'],
                seed=self.seed,
                tool_version=TOOL_VERSION,
            )
        except Exception as e:
            logger.warning(f"Could not store the run record, files are still complete: {e}")
            return None

    # Experiments

    def _turning_time_check(self, measured: Dict[str, float]) -> Optional[CheckReport]:
        metadata = self.state.metadata if self.state else {}
        rows = []
        for key, value in measured.items():
            predicted = metadata.get(f'predicted_{key}')
            if predicted is None:
                continue
            rows.append({'quantity': key, 'measured': value, 'predicted': predicted,
                         'margin': 2.0 * self.time_step - abs(value - predicted)})
        if not rows:
            return None
        return self._add(make_report('prescribed_turning_times', pd.DataFrame(rows)))

    def _run_tent(self):
        psi, e = self.state.field, self.direction
        trace = border_trace(psi, e, self.times, self.delta)
        unit = fit_tent(trace)
        free = fit_tent(trace, free_slope=True)
        self._write_frame('trace.csv', trace.to_frame())
        self._write_json('tent.json', {**unit.as_dict(), 'free_slope': free.as_dict(),
                                       'direction': e, 'delta': self.delta})

        self._add(make_report('tent_residual', pd.DataFrame([{
            'residual_rms': unit.residual_rms, 'tolerance': self.single_tol,
            'margin': self.single_tol - unit.residual_rms,
        }])))
        slope_tol = float(self.parameters['free_slope_tolerance'])
        self._add(make_report('free_slope', pd.DataFrame([
            {'side': side, 'slope': slope, 'margin': slope_tol - abs(slope - 1.0)}
            for side, slope in (('pre', free.slope_pre), ('post', free.slope_post))
        ])))
        excess = trace.lipschitz_excess()
        self._add(make_report('lipschitz', pd.DataFrame({
            't_from': trace.times[:-1], 't_to': trace.times[1:], 'excess': excess, 'margin': -excess,
        })))
        self._turning_time_check({'t_e': unit.t_e})

    def _run_trembling(self):
        psi, e = self.state.field, self.direction
        turning = measure_turning_times(psi, e, self.times, self.delta)
        self._write_frame('trace_e.csv', turning.trace_e.to_frame())
        self._write_frame('trace_ebar.csv', turning.trace_ebar.to_frame())
        self._write_json('tent_e.json', {**turning.fit_e.as_dict(), 'direction': e})
        self._write_json('tent_ebar.json', {**turning.fit_ebar.as_dict(), 'direction': -e})
        self._turning_time_check({'t_e': turning.t_e, 't_ebar': turning.t_ebar})
        self._add(check_turning_budget(psi, e, self.times, self.delta, self.compound_tol, turning=turning),
                  'turning_budget.csv')

    def _run_min_law(self):
        psi = self.state.field
        enforce_horizon(psi, self.parameters['times'], self.delta)
        frames = [
            check_min_law(psi, e, self.parameters['times'], self.delta, self.compound_tol).entries
            for e in axis_directions(self.grid.dim)[::2]
        ]
        self._add(make_report('min_law', pd.concat(frames, ignore_index=True)), 'min_law.csv')

    def _run_upper_bound(self):
        psi = self.state.field
        enforce_horizon(psi, self.times, self.delta)
        self._add(check_causality(psi, self.times, self.delta, self.single_tol), 'causality.csv')

        bound_frames, budget_frames = [], []
        for k, e in enumerate(axis_directions(self.grid.dim)[::2]):
            try:
                turning = measure_turning_times(psi, e, self.times, self.delta, check_horizon=False)
            except ApexNotBracketedError as err:
                logger.warning(f"Axis {k + 1}: {err}; checking the plain bound only")
                self.notes.append(f"axis {k + 1}: turning times not bracketed, sharpened bounds skipped")
                turning = None
            for d, measured in ((e, turning), (-e, turning.reversed() if turning else None)):
                entries = check_upper_bound(psi, d, self.times, self.delta, self.compound_tol,
                                            turning=measured).entries
                bound_frames.append(entries.assign(**_direction_columns(d)))
            if turning is not None:
                budget = check_turning_budget(psi, e, self.times, self.delta, self.compound_tol, turning=turning)
                budget_frames.append(budget.entries.assign(**_direction_columns(e)))

        self._add(make_report('upper_bound', pd.concat(bound_frames, ignore_index=True)), 'upper_bound.csv')
        if budget_frames:
            self._add(make_report('turning_budget', pd.concat(budget_frames, ignore_index=True)),
                      'turning_budget.csv')

    def _run_long_term(self):
        psi = self.state.field
        R = self.parameters.get('radius')
        R = carrier_radius(psi, self.delta) if R is None else float(R)
        span = float(self.parameters['span'])
        enforce_horizon(psi, [2.0 * R + span], self.delta)
        self._add(check_long_term(psi, R, self.delta, self.compound_tol, span=span,
                                  steps=int(self.parameters['steps'])), 'long_term.csv')

    def _pre_asymptotic_note(self, quantity: str, t_max: float) -> str:
        """Why a momentum-bump state cannot meet a decay criterion by |t| = t_max."""
        band = 2.0 * float(self.state.metadata['p_radius'])
        return (f"{quantity} at |t| <= {t_max:g} is pre-asymptotic: a momentum support of width {band:g} "
                f"forces a position spread >= {np.pi / band:.3g}, and that spread, not the cone, "
                f"sets the mass until |t| far exceeds it")

    def _run_shell(self):
        psi = self.state.field
        validate_horizon(self.grid, 0.0, float(np.max(np.abs(self.times))))
        speed = float(self.state.metadata.get('v', 0.0))
        cone_speed = float(self.parameters['cone_fraction']) * speed if speed > 0 else None
        if cone_speed is None:
            self.notes.append("momentum support contains p = 0; cone column skipped")

        report = shell_report(psi, self.times, float(self.parameters['inner_radius']), self.delta,
                              cone_speed=cone_speed, decay_window=self.parameters['decay_window'])
        self._write_frame('shell.csv', report.frame[['t', 'inner_mass', 'outer_mass']])
        last = report.frame.loc[report.frame['t'].abs().idxmax()]
        threshold = float(self.parameters['inner_threshold'])
        self._add(make_report('inner_mass', pd.DataFrame([{
            't': last['t'], 'inner_mass': last['inner_mass'], 'margin': threshold - last['inner_mass'],
        }])))

        exponent = report.decay_exponent
        limit = float(self.parameters['decay_exponent_max'])
        lo, hi = self.parameters['decay_window']
        window = report.frame[(report.frame['t'].abs() >= lo) & (report.frame['t'].abs() <= hi)]
        self.results['decay_exponent'] = exponent
        self.results['outer_mass_window'] = window[['t', 'outer_mass']].to_dict(orient='list')
        notes = []
        if exponent is not None and exponent > limit:
            notes.append(self._pre_asymptotic_note('outer-mass decay', hi))
        self._add(make_report('outer_decay', pd.DataFrame([{
            'exponent': exponent if exponent is not None else np.nan,
            'limit': limit,
            'margin': limit - exponent if exponent is not None else -np.inf,
        }]), notes=notes))

        if cone_speed is not None:
            self._write_frame('shell_cone.csv', report.frame[['t', 'cone_mass']])
            self.results['cone_speed'] = cone_speed
            margin = threshold - last['cone_mass']
            notes = [self._pre_asymptotic_note('cone mass', abs(last['t']))] if margin < 0 else []
            self._add(make_report('cone_mass', pd.DataFrame([{
                't': last['t'], 'cone_mass': last['cone_mass'], 'margin': margin,
            }]), notes=notes))

    def _run_asymptotic_causality(self):
        psi = self.state.field
        enforce_horizon(psi, self.times, self.delta)
        eta = int(self.parameters['eta'])
        R0 = carrier_radius(psi, self.delta)

        def _leakage(t: float) -> Dict[str, float]:
            radius = R0 + abs(t) + self.single_tol
            return {
                't': t,
                'dirac_leakage': light_cone_leakage(evolve(psi, t), radius),
                'nw_leakage': light_cone_leakage(evolve_nw(psi, t, eta), radius),
            }

        leakage = pd.DataFrame(ordered_map(_leakage, [float(t) for t in self.times]))
        self._write_frame('leakage.csv', leakage)
        report = shell_report(psi, self.times, R0, self.delta, evolver=nw_evolver(eta))
        self._write_frame('shell.csv', report.frame)

        contrast_time = self.parameters.get('contrast_time')
        if contrast_time is None:
            row = leakage.loc[leakage['t'].abs().idxmax()]
        else:
            row = leakage.loc[(leakage['t'] - float(contrast_time)).abs().idxmin()]
        self._add(make_report('leakage_ordering', pd.DataFrame([{
            't': row['t'], 'dirac_leakage': row['dirac_leakage'], 'nw_leakage': row['nw_leakage'],
            'margin': row['nw_leakage'] - row['dirac_leakage'],
        }]), notes=["inner causality check skipped: Newton-Wigner evolution is not causal"]))

    def _run_efsinc(self):
        u_lo, u_hi = self.parameters['u_range']
        points = int(self.parameters['points'])
        v_max = float(self.parameters['v_max'])
        frames = {'efsinc_cos': [], 'efsinc_sinc': []}
        for t in self.parameters['t_values']:
            for mu in self.parameters['mu_values']:
                threshold = EfsincConstants(t=float(t), mu=float(mu)).threshold
                if v_max <= threshold:
                    self.notes.append(f"t={t}, mu={mu}: v_max {v_max} does not exceed C_t={threshold:.6g}")
                    continue
                u = np.linspace(u_lo, u_hi, points)
                v = np.linspace(threshold, v_max, points + 1)[1:]
                report = efsinc_check(t, mu, u, v)
                for name, part in (('efsinc_cos', report.cos_report), ('efsinc_sinc', report.sinc_report)):
                    frames[name].append(part.entries.assign(t=float(t), mu=float(mu)))

        columns = ['t', 'mu', 'u', 'v', 'log_lower', 'log_value', 'log_upper', 'margin']
        for name, filename in (('efsinc_cos', 'efsinc.csv'), ('efsinc_sinc', 'efsinc_sinc.csv')):
            frame = pd.concat(frames[name], ignore_index=True)[columns] if frames[name] else pd.DataFrame(
                columns=columns)
            self._add(make_report(name, frame), filename)

    def _run_indicator(self):
        t = float(self.parameters['t'])
        mass = float(self.parameters['mass'])
        lam = np.asarray(self.parameters['lambda'], dtype=float)
        x = np.zeros_like(lam) if self.parameters.get('x') is None else np.asarray(self.parameters['x'], float)
        radii = self.parameters['r_schedule']
        expected = abs(t) * float(np.linalg.norm(lam))
        rel_tol = float(self.parameters['rel_tol'])

        cos_estimate = p_indicator_estimate(lambda z: entire_cos_log(t, z, mass), lam, x, radii)
        sinc_estimate = p_indicator_estimate(lambda z: entire_sinc_log(t, z, mass), lam, x, radii,
                                             log_correction=True)
        self._write_frame('indicator.csv', cos_estimate.frame)
        self._write_frame('indicator_sinc.csv', sinc_estimate.frame)
        self.results['extrapolated'] = {'cos': cos_estimate.extrapolated, 'sinc': sinc_estimate.extrapolated}
        self._add(make_report('indicator', pd.DataFrame([
            {'function': name, 'estimate': estimate.estimate, 'expected': expected,
             'correction': estimate.correction,
             'margin': rel_tol * expected - abs(estimate.estimate - expected)}
            for name, estimate in (('cos', cos_estimate), ('sinc', sinc_estimate))
        ])))

    def _default_directions(self) -> List[np.ndarray]:
        if self.grid.dim == 1:
            return [np.array([v]) for v in (1.0, -1.0, 2.0, -0.5, 3.0)]
        diagonal = np.ones(3) / np.sqrt(3.0)
        return [np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), np.array([0, 0, -1.0]),
                diagonal, np.array([-2.0, 1.0, 0])]

    def _run_pp_consistency(self):
        psi = self.state.field
        recipe = self.config['state']
        center = as_vector(recipe.get('center') or np.zeros(self.grid.dim), self.grid.dim)
        radius = float(recipe['radius'])
        directions = self.parameters.get('directions')
        directions = ([as_vector(d, self.grid.dim) for d in directions] if directions
                      else self._default_directions())
        component = int(self.parameters['component'])
        radii = self.parameters['r_schedule']
        rel_tol = float(self.parameters['rel_tol'])
        origin = np.zeros(self.grid.dim)

        rows = []
        for lam in directions:
            estimate = p_indicator_estimate(lambda z: fourier_laplace_log(psi, z, component), lam, origin, radii)
            expected = float(center @ lam + radius * np.linalg.norm(lam))
            rows.append({
                **{f'lambda_{k + 1}': float(c) for k, c in enumerate(lam)},
                'estimate': estimate.estimate,
                'expected': expected,
                'support_function': support_function(psi, lam, self.delta),
                'margin': rel_tol * abs(expected) - abs(estimate.estimate - expected),
            })
        self._add(make_report('pp_consistency', pd.DataFrame(rows)), 'pp_consistency.csv')
        self._add(product_indicator_check(psi, float(self.parameters['t']), directions, radii, component,
                                          self.delta, rel_tol), 'indicator_additivity.csv')

    def _run_gpteb_search(self):
        e = self.direction
        a, b, tau = (float(self.parameters[key]) for key in ('a', 'b', 'tau'))
        ramp = self.parameters.get('ramp')
        max_residual = self.parameters.get('max_residual')
        rows, failures = [], []
        for depth in self.parameters['depths']:
            try:
                constructed = far_face_cut_state(self.grid, e, a, b, tau, float(depth), seed=self.seed,
                                                 delta=self.delta, time_step=float(self.parameters['time_step']),
                                                 ramp=ramp)
                psi = constructed.field
                turning = measure_turning_times(psi, e, self.times, self.delta, max_residual=max_residual)
            except DiracFrontError as err:
                logger.warning(f"Depth {depth}: {err}")
                failures.append(f"depth={depth}: {err}")
                rows.append({'depth': float(depth), 'margin': -np.inf, 'margin_budget': -np.inf})
                continue
            carrier_width = width(psi, e, self.delta)
            cut_ramp = constructed.metadata['ramp']
            signed = constructed.metadata['sign'] * turning.t_ebar
            rows.append({
                'depth': float(depth),
                'ramp': cut_ramp,
                't_e': turning.t_e,
                't_ebar': turning.t_ebar,
                'signed_t_ebar': signed,
                'width': carrier_width,
                'bound': 0.5 * (carrier_width - cut_ramp),
                'residual': max(turning.fit_e.residual_rms, turning.fit_ebar.residual_rms),
                'margin': signed - (0.5 * (carrier_width - cut_ramp) - self.compound_tol),
                'margin_budget': carrier_width + self.compound_tol - (abs(turning.t_e) + abs(turning.t_ebar)),
            })

        self.notes.extend(failures)
        frame = pd.DataFrame(rows, columns=['depth', 'ramp', 't_e', 't_ebar', 'signed_t_ebar', 'width',
                                            'bound', 'residual', 'margin', 'margin_budget'])
        self._write_frame('search.csv', frame)
        self._add(make_report('far_face_turning', frame.drop(columns='margin_budget'), notes=failures))
        self._add(make_report('turning_budget', frame.drop(columns='margin').rename(
            columns={'margin_budget': 'margin'})))

    def _run_open_problem_search(self):
        e = self.direction
        rng = np.random.default_rng(self.seed)
        radius = float(self.parameters['radius'])
        tau_lo, tau_hi = self.parameters['tau_range']
        a, b = float(self.parameters['a']), float(self.parameters['b'])
        frac_lo, frac_hi = self.parameters['depth_fraction']
        time_step = self.time_step

        rows = []
        for sample in range(int(self.parameters['samples'])):
            row = {'sample': sample}
            try:
                if sample % 2 == 0:
                    tau = float(rng.uniform(tau_lo, tau_hi))
                    shift = max(lattice_ceiling(self.grid, abs(tau)), self.grid.dx)
                    u = random_spinor(self.grid.n_components, self.seed + sample)
                    psi1 = bump_state(self.grid, np.zeros(self.grid.dim), radius, u)
                    psi = nise_state(psi1, e, tau, shift, times=turning_window(radius, time_step),
                                     delta=self.delta).field
                    row.update({'kind': 'nise', 'tau': tau, 'parameter': shift})
                else:
                    half = 0.5 * (b - a)
                    tau = float(rng.uniform(0.1, 0.9) * half * rng.choice([-1.0, 1.0]))
                    depth = float(rng.uniform(frac_lo, frac_hi) * abs(tau))
                    psi = far_face_cut_state(self.grid, e, a, b, tau, depth, seed=self.seed + sample,
                                             delta=self.delta, time_step=time_step).field
                    row.update({'kind': 'slab_cut', 'tau': tau, 'parameter': depth})
                turning = measure_turning_times(psi, e, self.times, self.delta,
                                                max_residual=self.parameters.get('max_residual'))
            except DiracFrontError as err:
                logger.warning(f"Search sample {sample} skipped: {err}")
                self.notes.append(f"sample {sample}: {err}")
                continue
            carrier_width = width(psi, e, self.delta)
            row.update({
                't_e': turning.t_e,
                't_ebar': turning.t_ebar,
                'width': carrier_width,
                'ratio': abs(turning.t_ebar) / (0.5 * carrier_width),
            })
            rows.append(row)

        frame = pd.DataFrame(rows, columns=['sample', 'kind', 'tau', 'parameter', 't_e', 't_ebar',
                                            'width', 'ratio'])
        self._write_frame('search.csv', frame)
        self.results['max_ratio'] = float(frame['ratio'].max()) if len(frame) else None
        self.results['exceeds_half_width'] = bool(len(frame) and frame['ratio'].max() > 1.0)
        logger.info(f"Search finished: max |t_ebar|/(width/2) = {self.results['max_ratio']}")

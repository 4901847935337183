"""
Catalog of named reproduction experiments
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple


@dataclass(frozen=True)
class ExperimentEntry:
    """Static description of one named experiment."""

    name: str
    description: str
    anchor: str
    needs_grid: bool = True
    needs_state: bool = True
    needs_time: bool = True
    state_kinds: Tuple[str, ...] = ('bump',)
    defaults: Dict[str, Any] = field(default_factory=dict)


EXPERIMENTS: Dict[str, ExperimentEntry] = {entry.name: entry for entry in [
    ExperimentEntry(
        name='tent',
        description='Border trace along e and its tent fit with unit and free slopes',
        anchor='Theorem (SETIIED)',
        state_kinds=('bump', 'nise', 'dsabtp', 'slab_cut'),
        defaults={'free_slope_tolerance': 0.05},
    ),
    ExperimentEntry(
        name='trembling',
        description='Shifted-copy state with prescribed turning times (t1, t2), both tents measured',
        anchor='Lemma (NISE)',
        state_kinds=('nise',),
    ),
    ExperimentEntry(
        name='min_law',
        description='min(e(psi_t), e(psi_-t)) = e(psi) - |t| along every axis direction',
        anchor='Lemma (SMF)',
        needs_time=False,
        state_kinds=('bump', 'nise', 'dsabtp'),
        defaults={'times': [0.25, 0.5, 1.0]},
    ),
    ExperimentEntry(
        name='upper_bound',
        description='Causality lower bound, upper bound and turning-time budget over the axis directions',
        anchor='Eq. (RI), Theorem (GGETIIED), Corollary (CSETIIED)',
        state_kinds=('bump', 'nise', 'dsabtp', 'slab_cut'),
    ),
    ExperimentEntry(
        name='long_term',
        description='Linear recession of the border with slope -1 beyond |t| = 2R',
        anchor='Corollary (LTSIE)',
        needs_time=False,
        state_kinds=('bump', 'nise', 'dsabtp'),
        defaults={'radius': None, 'span': 1.0, 'steps': 11},
    ),
    ExperimentEntry(
        name='shell',
        description='Inner-ball mass and outside-light-cone decay of a momentum-bump state',
        anchor='Theorems (PRBG), (VPOBT)',
        state_kinds=('momentum_bump',),
        defaults={
            'inner_radius': 0.5,
            'inner_threshold': 0.1,
            'decay_window': [2.0, 10.0],
            'decay_exponent_max': -2.0,
            'cone_fraction': 0.9,
        },
    ),
    ExperimentEntry(
        name='asymptotic_causality',
        description='Dirac versus Newton-Wigner leakage outside the light cone',
        anchor='Remark (AC)',
        defaults={'eta': 1, 'contrast_time': None},
    ),
    ExperimentEntry(
        name='efsinc',
        description='Log-domain sandwich bounds for cos and sinc of t*sqrt(mu^2 + (u+iv)^2)',
        anchor='Lemma (EFSINC)',
        needs_grid=False,
        needs_state=False,
        needs_time=False,
        state_kinds=(),
        defaults={
            't_values': [0.5, 1.0, 2.0],
            'mu_values': [0.0, 1.0, 3.0],
            'u_range': [-50.0, 50.0],
            'v_max': 50.0,
            'points': 200,
        },
    ),
    ExperimentEntry(
        name='indicator',
        description='P-indicator limits of cos(t*eps) and sinc(t*eps) along lambda',
        anchor='Lemma (PICESCE)',
        needs_grid=False,
        needs_state=False,
        needs_time=False,
        state_kinds=(),
        defaults={
            't': 1.0,
            'mass': 1.0,
            'lambda': [0.0, 0.0, 1.0],
            'x': None,
            'r_schedule': [1e2, 1e3, 1e4],
            'rel_tol': 0.01,
        },
    ),
    ExperimentEntry(
        name='pp_consistency',
        description='Indicator of the Fourier-Laplace transform of a ball bump against its support function',
        anchor='Theorem (TPP)',
        needs_time=False,
        defaults={
            'directions': None,
            'r_schedule': [1e2, 1e3, 1e4],
            'rel_tol': 0.05,
            'component': 0,
            't': 1.0,
        },
    ),
    ExperimentEntry(
        name='gpteb_search',
        description='Far-face slab cuts of a symmetric slab state, sweeping the cut depth',
        anchor='Lemma (GPTEB)',
        needs_state=False,
        defaults={'a': -1.0, 'b': 1.0, 'tau': 0.4, 'depths': [0.1, 0.2, 0.3], 'time_step': 0.05,
                  'ramp': None, 'max_residual': 0.05},
    ),
    ExperimentEntry(
        name='open_problem_search',
        description='Seeded random sweep for |t_ebar| > width/2 over shifted-copy and slab-cut states',
        anchor='open question after Lemma (GPTEB)',
        needs_state=False,
        defaults={
            'samples': 8,
            'radius': 0.5,
            'tau_range': [-0.3, 0.3],
            'a': -1.0,
            'b': 1.0,
            'depth_fraction': [0.2, 0.8],
            'max_residual': 0.05,
        },
    ),
]}

EXPERIMENT_CHOICES: List[Tuple[str, str]] = [(name, name.replace('_', ' ').title()) for name in EXPERIMENTS]


def experiment_table() -> List[Dict[str, str]]:
    """Rows (name, description, anchor) in catalog order."""
    return [
        {'name': entry.name, 'description': entry.description, 'anchor': entry.anchor}
        for entry in EXPERIMENTS.values()
    ]

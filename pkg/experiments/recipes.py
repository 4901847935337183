"""
Build states from validated state recipes
"""

import logging

import numpy as np

from lab_services.carrier_border import DEFAULT_DELTA
from lab_services.lattice_spinor import GridSpec, as_vector, unit_vector
from lab_services.state_factory import (
    ConstructedState,
    bump_state,
    dsabtp_state,
    far_face_cut_state,
    momentum_bump_state,
    nise_state,
    prescribed_turning_state,
    random_spinor,
)

logger = logging.getLogger(__name__)


def spinor_weights(recipe: dict, n_components: int, seed: int) -> np.ndarray:
    """Recipe weights as a complex vector, or a seeded random unit spinor when absent."""
    weights = recipe.get('spinor')
    if weights is None:
        return random_spinor(n_components, seed)
    return np.array([complex(re, im) for re, im in weights])


def recipe_direction(recipe: dict, dim: int, fallback=None) -> np.ndarray:
    direction = recipe.get('direction') or fallback
    if direction is None:
        direction = np.zeros(dim)
        direction[0] = 1.0
    return unit_vector(direction, dim)


def turning_window(radius: float, time_step: float) -> np.ndarray:
    """Symmetric sampling window wide enough to bracket both turning times of a radius-ρ bump."""
    reach = 2.0 * radius + 2.0 * time_step
    steps = int(np.ceil(2.0 * reach / time_step)) + 1
    return np.linspace(-reach, reach, steps)


def build_state(grid: GridSpec, recipe: dict, seed: int, delta: float = DEFAULT_DELTA,
                direction=None) -> ConstructedState:
    """
    Construct the state a recipe describes.

    Args:
        grid: Lattice the state lives on
        recipe: Validated state recipe (see StateRecipeSerializer)
        seed: Seed for randomized spinor weights
        delta: Border threshold used by constructions that measure turning times
        direction: Fallback direction when the recipe has none

    Returns:
        ConstructedState whose metadata always carries ``kind`` and ``seed``
    """
    kind = recipe['kind']
    e = recipe_direction(recipe, grid.dim, direction)
    mass = recipe.get('mass', 1.0)
    representation = recipe.get('representation', 'weyl')
    u = spinor_weights(recipe, grid.n_components, seed)
    center = as_vector(recipe.get('center') or np.zeros(grid.dim), grid.dim)
    logger.info(f"Building {kind} state on a dim-{grid.dim} grid (n={grid.n}, L={grid.extent})")

    if kind == 'bump':
        psi = bump_state(grid, center, recipe['radius'], u, mass, representation)
        constructed = ConstructedState(field=psi, metadata={
            'kind': 'bump', 'center': center.tolist(), 'radius': recipe['radius'],
        })
    elif kind == 'nise':
        psi1 = bump_state(grid, center, recipe['radius'], u, mass, representation)
        window = turning_window(recipe['radius'], recipe['time_step'])
        if 't1' in recipe and 't2' in recipe:
            constructed = prescribed_turning_state(psi1, e, recipe['t1'], recipe['t2'], times=window,
                                                   delta=delta, shift=recipe.get('shift'))
        else:
            constructed = nise_state(psi1, e, recipe['tau'], recipe['shift'], times=window, delta=delta)
    elif kind == 'dsabtp':
        constructed = dsabtp_state(grid, e, recipe['a'], recipe['b'], recipe['tau'], mass, spinor=u,
                                   seed=seed, delta=delta, time_step=recipe['time_step'],
                                   representation=representation)
    elif kind == 'slab_cut':
        constructed = far_face_cut_state(grid, e, recipe['a'], recipe['b'], recipe['tau'], recipe['depth'],
                                         mass, seed=seed, delta=delta, time_step=recipe['time_step'],
                                         ramp=recipe.get('ramp'))
    else:
        constructed = momentum_bump_state(grid, recipe['p_center'], recipe['p_radius'], u, mass,
                                          representation, radial=recipe.get('radial', False))

    constructed.metadata.setdefault('kind', kind)
    constructed.metadata['seed'] = int(seed)
    constructed.metadata['direction'] = e.tolist()
    return constructed

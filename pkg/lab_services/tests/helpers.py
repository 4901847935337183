"""
Shared grids and states for the service tests.

The fine dim-1 grid keeps the bump's lattice spectrum far below the border
threshold, so border measurements reflect the continuum supports.
"""
import numpy as np

from lab_services.lattice_spinor import make_grid
from lab_services.state_factory import bump_state, random_spinor

FINE_N = 1024
FINE_EXTENT = 16.0
RHO = 0.5


def fine_grid():
    return make_grid(1, FINE_N, FINE_EXTENT)


def coarse_grid(dim=1):
    return make_grid(dim, 64 if dim == 1 else 16, 8.0)


def bump(grid=None, center=0.0, radius=RHO, seed=1, spinor=None, representation='weyl'):
    grid = grid or fine_grid()
    u = random_spinor(grid.n_components, seed) if spinor is None else spinor
    return bump_state(grid, np.full(grid.dim, center, dtype=float), radius, u, representation=representation)


def symmetric_times(reach, step=0.05):
    return np.linspace(-reach, reach, int(round(2 * reach / step)) + 1)

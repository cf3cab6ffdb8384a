"""Fine-grid reference solutions shared by the test modules."""
import functools

import numpy as np

from dynheat import ProductState, default_setup, product_norm, solve_adjoint, solve_forward

FINE_CELLS, FINE_STEPS = 2048, 4096


@functools.lru_cache(maxsize=None)
def fine_setup():
    return default_setup(FINE_CELLS, FINE_STEPS)


def restrict(fine_values, coarse_grid):
    stride = FINE_CELLS // coarse_grid.n_cells
    return ProductState(coarse_grid, np.asarray(fine_values)[::stride])


def relative_error(values, reference):
    return product_norm(ProductState(reference.grid, values) - reference) / product_norm(reference)


@functools.lru_cache(maxsize=None)
def parabolic_final():
    s = fine_setup()
    x = s.space.nodes
    return solve_forward(s, x * (1 - x)).final.values


@functools.lru_cache(maxsize=None)
def example1_first_residual_adjoint():
    """Adjoint trajectory for the Example 1 residual at ``f_0 = 0`` with exact data."""
    s = fine_setup()
    return solve_adjoint(s, -parabolic_final()).values

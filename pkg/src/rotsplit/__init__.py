"""Fourier-splitting propagators for rotating 2D condensates in
time-dependent quadratic traps."""

from .algebra import (
    AveragedHamiltonian,
    AffineHamiltonian,
    BasisElement10,
    BasisElement15,
    bracket,
    classical_matrix,
    matrix_exp,
)
from .magnus import QuadraticHamiltonian, dissipative_step_scale, magnus_theta
from .decomp import (
    AffineDecompCoefficients,
    DecompCoefficients,
    SolverError,
    decompose_step,
    factor_product,
    solve_coefficients,
    strang_seed,
)
from .spectral import (
    GridSpec,
    Space,
    SpaceError,
    WaveFunction,
    apply_quadratic_phase,
    gaussian_state,
    rot_step,
    transform_x,
    transform_y,
    vortex_state,
)

__version__ = "0.1.0"

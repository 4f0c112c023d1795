"""Periodic 2D grid, wavefunction storage, and Fourier-diagonal flow application.

Arrays are row-major with the x index first.  Wavenumbers follow
k_n = pi n / L on the domain [-L, L)^2 in FFT ordering, which makes
p = -i d/dx exactly diagonal with real k after a unitary transform.  A small
space-tag state machine tracks whether each axis currently holds coordinate
or momentum data; the mixed-space multipliers (e.g. y * k_x) are only legal in
the matching representation and misuse raises ``SpaceError`` instead of
silently producing garbage.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .decomp import DecompCoefficients

__all__ = [
    "Space",
    "SpaceError",
    "GridSpec",
    "WaveFunction",
    "transform_x",
    "transform_y",
    "apply_quadratic_phase",
    "rot_step",
    "apply_Tx",
    "apply_Ty",
    "apply_W",
    "vortex_state",
    "gaussian_state",
]


class SpaceError(RuntimeError):
    """Operation requested in an incompatible coordinate/momentum representation."""


class Space(enum.Enum):
    XY = "xy"        # both axes in coordinate space
    KX_Y = "kx_y"    # x axis transformed to momentum space
    X_KY = "x_ky"    # y axis transformed to momentum space


@dataclass
class GridSpec:
    """Uniform periodic grid on [-L, L)^2 with cached axes and an FFT counter."""

    L: float
    nx: int
    ny: int
    fft_count: int = field(default=0, compare=False)

    def __post_init__(self):
        if self.L <= 0:
            raise ValueError(f"half-width L must be positive, got {self.L}")
        for name, n in (("nx", self.nx), ("ny", self.ny)):
            if n < 4 or n % 2:
                raise ValueError(f"{name} must be even and >= 4, got {n}")
        self.dx = 2.0 * self.L / self.nx
        self.dy = 2.0 * self.L / self.ny
        self.x = -self.L + self.dx * np.arange(self.nx)
        self.y = -self.L + self.dy * np.arange(self.ny)
        self.kx = 2.0 * np.pi * np.fft.fftfreq(self.nx, d=self.dx)
        self.ky = 2.0 * np.pi * np.fft.fftfreq(self.ny, d=self.dy)

    @property
    def weight(self) -> float:
        """Quadrature weight dx*dy of the discrete L2 norm."""
        return self.dx * self.dy

    def coordinate_mesh(self):
        return self.x[:, None], self.y[None, :]


@dataclass
class WaveFunction:
    """Complex field on a GridSpec plus the current representation tag.

    Mutated in place by the propagation routines; single-writer semantics.
    """

    values: np.ndarray
    grid: GridSpec
    space: Space = Space.XY

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.complex128)
        if self.values.shape != (self.grid.nx, self.grid.ny):
            raise ValueError(
                f"values shape {self.values.shape} does not match grid "
                f"({self.grid.nx}, {self.grid.ny})")

    def norm(self) -> float:
        """Discrete L2 norm sqrt(sum |psi|^2 dx dy)."""
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.grid.weight))

    def boundary_mass(self, width: int = 2) -> float:
        """sum |psi|^2 dx dy over the outermost ``width`` cells (box-size diagnostic)."""
        m = np.zeros_like(self.values, dtype=bool)
        m[:width, :] = m[-width:, :] = True
        m[:, :width] = m[:, -width:] = True
        return float(np.sum(np.abs(self.values[m]) ** 2) * self.grid.weight)

    def copy(self) -> "WaveFunction":
        return WaveFunction(self.values.copy(), self.grid, self.space)


def _require(psi: WaveFunction, *spaces: Space, what: str = "operation") -> None:
    if psi.space not in spaces:
        raise SpaceError(
            f"{what} requires representation {[s.value for s in spaces]}, "
            f"wavefunction is in {psi.space.value}")


def transform_x(psi: WaveFunction, forward: bool = True) -> WaveFunction:
    """Unitary batched 1D FFT along the x axis (xy <-> kx_y)."""
    if forward:
        _require(psi, Space.XY, what="forward x transform")
        psi.values = np.fft.fft(psi.values, axis=0, norm="ortho")
        psi.space = Space.KX_Y
    else:
        _require(psi, Space.KX_Y, what="inverse x transform")
        psi.values = np.fft.ifft(psi.values, axis=0, norm="ortho")
        psi.space = Space.XY
    psi.grid.fft_count += 1
    return psi


def transform_y(psi: WaveFunction, forward: bool = True) -> WaveFunction:
    """Unitary batched 1D FFT along the y axis (xy <-> x_ky)."""
    if forward:
        _require(psi, Space.XY, what="forward y transform")
        psi.values = np.fft.fft(psi.values, axis=1, norm="ortho")
        psi.space = Space.X_KY
    else:
        _require(psi, Space.X_KY, what="inverse y transform")
        psi.values = np.fft.ifft(psi.values, axis=1, norm="ortho")
        psi.space = Space.XY
    psi.grid.fft_count += 1
    return psi


# variable name -> (allowed spaces, array builder)
_VARIABLES = {
    "x2": ((Space.XY, Space.X_KY), lambda g: (g.x**2)[:, None]),
    "y2": ((Space.XY, Space.KX_Y), lambda g: (g.y**2)[None, :]),
    "kx2": ((Space.KX_Y,), lambda g: (g.kx**2)[:, None]),
    "ky2": ((Space.X_KY,), lambda g: (g.ky**2)[None, :]),
    "y_kx": ((Space.KX_Y,), lambda g: g.kx[:, None] * g.y[None, :]),
    "x_ky": ((Space.X_KY,), lambda g: g.x[:, None] * g.ky[None, :]),
    "x": ((Space.XY, Space.X_KY), lambda g: g.x[:, None]),
    "y": ((Space.XY, Space.KX_Y), lambda g: g.y[None, :]),
    "kx": ((Space.KX_Y,), lambda g: g.kx[:, None]),
    "ky": ((Space.X_KY,), lambda g: g.ky[None, :]),
}


def apply_quadratic_phase(psi: WaveFunction, c: complex, variable: str) -> WaveFunction:
    """Pointwise multiplication by exp(c * variable) where the variable is
    diagonal in the current representation (state-checked)."""
    try:
        spaces, build = _VARIABLES[variable]
    except KeyError:
        raise ValueError(f"unknown multiplier variable {variable!r}") from None
    _require(psi, *spaces, what=f"multiplier exp(c*{variable})")
    psi.values *= np.exp(c * build(psi.grid))
    return psi


def _y_factor_multiplier(grid: GridSpec, f, g, e) -> np.ndarray:
    """exp(-i (f y^2/2 + g kx^2/2 - e y kx)) on the (kx, y) mesh."""
    expo = (-0.5j * f) * (grid.y**2)[None, :] + (-0.5j * g) * (grid.kx**2)[:, None] \
        + (1j * e) * (grid.kx[:, None] * grid.y[None, :])
    return np.exp(expo)


def _x_factor_multiplier(grid: GridSpec, f, g, e) -> np.ndarray:
    """exp(-i (f x^2/2 + g ky^2/2 + e x ky)) on the (x, ky) mesh."""
    expo = (-0.5j * f) * (grid.x**2)[:, None] + (-0.5j * g) * (grid.ky**2)[None, :] \
        + (-1j * e) * (grid.x[:, None] * grid.ky[None, :])
    return np.exp(expo)


def rot_step(psi: WaveFunction, c: DecompCoefficients) -> WaveFunction:
    """Apply one decomposition step with exactly six batched 1D transforms.

    The factors act right to left: the (f3, g3, e3) factor first, the bare
    exp(-i f0 x^2/2) multiplier last.  Classical parameters are converted to
    operator exponents (the -i and 1/2 factors) here.
    """
    _require(psi, Space.XY, what="rot_step")
    g = psi.grid
    transform_x(psi)
    psi.values *= _y_factor_multiplier(g, c.f3, c.g3, c.e3)
    transform_x(psi, forward=False)
    transform_y(psi)
    psi.values *= _x_factor_multiplier(g, c.f2, c.g2, c.e2)
    transform_y(psi, forward=False)
    transform_x(psi)
    psi.values *= _y_factor_multiplier(g, c.f1, c.g1, c.e1)
    transform_x(psi, forward=False)
    psi.values *= np.exp((-0.5j * c.f0) * (g.x**2))[:, None]
    return psi


def apply_Tx(psi: WaveFunction, h: complex, omega: float = 0.0) -> WaveFunction:
    """Exact flow of T_x = p_x^2/2 - Omega y p_x over (possibly complex) step h."""
    _require(psi, Space.XY, what="apply_Tx")
    g = psi.grid
    transform_x(psi)
    expo = (-0.5j * h) * (g.kx**2)[:, None] + (1j * h * omega) * (g.kx[:, None] * g.y[None, :])
    psi.values *= np.exp(expo)
    return transform_x(psi, forward=False)


def apply_Ty(psi: WaveFunction, h: complex, omega: float = 0.0) -> WaveFunction:
    """Exact flow of T_y = p_y^2/2 + Omega x p_y over step h."""
    _require(psi, Space.XY, what="apply_Ty")
    g = psi.grid
    transform_y(psi)
    expo = (-0.5j * h) * (g.ky**2)[None, :] + (-1j * h * omega) * (g.x[:, None] * g.ky[None, :])
    psi.values *= np.exp(expo)
    return transform_y(psi, forward=False)


def apply_W(psi: WaveFunction, h: complex, potential: np.ndarray) -> WaveFunction:
    """Exact flow of a frozen coordinate-diagonal potential: psi *= exp(-i h W)."""
    _require(psi, Space.XY, what="apply_W")
    psi.values *= np.exp(-1j * h * potential)
    return psi


def vortex_state(grid: GridSpec) -> WaveFunction:
    """Normalized (x + i y) exp(-(x^2+y^2)/2) vortex."""
    x, y = grid.coordinate_mesh()
    vals = (x + 1j * y) * np.exp(-0.5 * (x**2 + y**2))
    psi = WaveFunction(vals, grid)
    psi.values /= psi.norm()
    return psi


def gaussian_state(grid: GridSpec) -> WaveFunction:
    """Normalized exp(-(x^2+y^2)/2)."""
    x, y = grid.coordinate_mesh()
    psi = WaveFunction(np.exp(-0.5 * (x**2 + y**2)) + 0j, grid)
    psi.values /= psi.norm()
    return psi

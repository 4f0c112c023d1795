"""Time-stepping compositions built from the decomposition step and frozen flows.

Two flow families enter every composition: the A flow advances the quadratic
part H_A together with physical time (Magnus average + factorized step), the
B flow is the frozen remainder (nonlinearity + external potential).  Time
bookkeeping follows the near-integrable prescription: the accumulated A-stage
time is the freeze time for every B stage, which preserves the generalized
order of a composition when the remainder is a small perturbation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .decomp import DEFAULT_TOL, decompose_step
from .magnus import QuadraticHamiltonian, dissipative_step_scale
from .spectral import WaveFunction, apply_Tx, apply_Ty, apply_W, rot_step

__all__ = [
    "NonlinearTerm",
    "SplittingScheme",
    "SRKN6B",
    "STRANG_AB",
    "IntegrationResult",
    "nonlinear_flow",
    "dissipative_nonlinear_flow",
    "strang_wrap",
    "std2_step",
    "triple_jump",
    "srkn_step",
    "integrate",
    "METHODS",
    "trap_values",
]

TRIPLE_JUMP_GAMMA = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))


@dataclass(frozen=True)
class NonlinearTerm:
    """Frozen remainder B = g |psi|^2 + V(x, y, t), with dissipation lam >= 0
    mirroring the quadratic part."""

    g: float = 0.0
    V: Optional[Callable] = None  # V(x[:, None], y[None, :], t) -> array
    lam: float = 0.0

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError(f"lam must be >= 0, got {self.lam}")

    @property
    def is_trivial(self) -> bool:
        return self.g == 0.0 and self.V is None


@dataclass(frozen=True)
class SplittingScheme:
    """Ordered (kind, coefficient) stages of a two-part composition.

    ``kind`` is "A" (quadratic-part flow, advances time) or "B" (frozen
    remainder).  Consistency requires both coefficient families to sum to 1.
    """

    name: str
    stages: tuple
    order: int
    generalized_order: Optional[tuple] = None

    def __post_init__(self):
        for kind in ("A", "B"):
            s = self.coefficient_sum(kind)
            if abs(s - 1.0) > 1e-13:
                raise ValueError(f"{self.name}: {kind} coefficients sum to {s}, not 1")

    def coefficient_sum(self, kind: str) -> float:
        return math.fsum(c for k, c in self.stages if k == kind)

    @property
    def is_palindromic(self) -> bool:
        return self.stages == tuple(reversed(self.stages))


# Optimized 6-stage fourth-order SRKN splitting; coefficients from
# Blanes & Moan, J. Comput. Appl. Math. 142 (2002) 313-330, method SRKN6^b.
_BM_A1 = 0.245298957184271
_BM_A2 = 0.604872665711080
_BM_A3 = 0.5 - _BM_A1 - _BM_A2
_BM_B1 = 0.0829844064174052
_BM_B2 = 0.396309801498368
_BM_B3 = -0.0390563049223486
_BM_B4 = 1.0 - 2.0 * (_BM_B1 + _BM_B2 + _BM_B3)

SRKN6B = SplittingScheme(
    name="SRKN6b",
    stages=(
        ("B", _BM_B1), ("A", _BM_A1), ("B", _BM_B2), ("A", _BM_A2),
        ("B", _BM_B3), ("A", _BM_A3), ("B", _BM_B4), ("A", _BM_A3),
        ("B", _BM_B3), ("A", _BM_A2), ("B", _BM_B2), ("A", _BM_A1),
        ("B", _BM_B1),
    ),
    order=4,
)

STRANG_AB = SplittingScheme(
    name="strang",
    stages=(("B", 0.5), ("A", 1.0), ("B", 0.5)),
    order=2,
    generalized_order=(4, 2),
)


def trap_values(h_a: QuadraticHamiltonian, grid, t: float) -> np.ndarray:
    """Coordinate-diagonal trap potential at time t (incl. optional linear terms)."""
    x, y = grid.coordinate_mesh()
    w = 0.5 * (h_a.omega_x_sq(t) * x**2 + h_a.omega_y_sq(t) * y**2)
    if h_a.xi_x is not None:
        w = w + h_a.xi_x(t) * x
    if h_a.xi_y is not None:
        w = w + h_a.xi_y(t) * y
    return w


def _potential_values(term: NonlinearTerm, grid, t: float):
    if term.V is None:
        return 0.0
    x, y = grid.coordinate_mesh()
    return term.V(x, y, t)


def nonlinear_flow(psi: WaveFunction, term: NonlinearTerm, t: float, h: float) -> WaveFunction:
    """Exact frozen flow psi <- exp(-i h (g |psi|^2 + V(t))) psi; |psi| invariant."""
    if term.lam != 0:
        raise ValueError("nonlinear_flow requires lam = 0; use dissipative_nonlinear_flow")
    if term.is_trivial:
        return psi
    b = term.g * np.abs(psi.values) ** 2 + _potential_values(term, psi.grid, t)
    psi.values *= np.exp(-1j * h * b)
    return psi


def _phi(z: np.ndarray) -> np.ndarray:
    """(exp(z) - 1)/z, series near 0 to avoid cancellation."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < 1e-4
    zs = np.where(small, 1.0, z)
    out = np.where(small, 1.0 + z / 2.0 + z**2 / 6.0 + z**3 / 24.0,
                   np.expm1(zs) / zs)
    return out


def dissipative_nonlinear_flow(psi: WaveFunction, term: NonlinearTerm, t: float,
                               h: float, potential: np.ndarray | float | None = None) -> WaveFunction:
    """Closed-form frozen flow of (i - lam) d_t psi = (g |psi|^2 + V) psi.

    The density obeys a logistic law; the accumulated phase+decay follows from
    its time integral, giving

        psi <- exp(-(i+lam)/(2 lam) * log[mu phi(mu V) g |psi|^2 + exp(mu V)]) psi,

    mu = 2 lam h / (1 + lam^2), phi(z) = (e^z - 1)/z.  ``potential`` overrides
    the frozen V (used by the standard split to fold the trap in).
    """
    lam = term.lam
    if lam <= 0:
        raise ValueError("dissipative_nonlinear_flow requires lam > 0")
    if h <= 0:
        raise ValueError("dissipative flow needs a positive step")
    v = _potential_values(term, psi.grid, t) if potential is None else potential
    mu = 2.0 * lam * h / (1.0 + lam * lam)
    z = mu * np.asarray(v, dtype=float)
    rho = np.abs(psi.values) ** 2
    arg = mu * _phi(z) * term.g * rho + np.exp(z)
    if np.any(arg <= 0):
        raise RuntimeError("non-positive log argument in dissipative flow "
                           "(g < 0 or complex V are unsupported)")
    psi.values *= np.exp((-(1j + lam) / (2.0 * lam)) * np.log(arg))
    return psi


def _b_flow(psi, term, t, h, potential=None):
    if term.lam > 0:
        return dissipative_nonlinear_flow(psi, term, t, h, potential=potential)
    if potential is None:
        return nonlinear_flow(psi, term, t, h)
    b = term.g * np.abs(psi.values) ** 2 + potential
    psi.values *= np.exp(-1j * h * b)
    return psi


def strang_wrap(psi: WaveFunction, h_a: QuadraticHamiltonian, term: NonlinearTerm,
                t: float, h: float, order: int = 4, tol: float = DEFAULT_TOL) -> WaveFunction:
    """ROT step: frozen-remainder half steps around one factorized quadratic step.

    Reduces exactly to the bare decomposition step when the remainder vanishes.
    """
    if term.is_trivial:
        return rot_step(psi, decompose_step(h_a, t, h, order, tol))
    _b_flow(psi, term, t, 0.5 * h)
    rot_step(psi, decompose_step(h_a, t, h, order, tol))
    _b_flow(psi, term, t + h, 0.5 * h)
    return psi


def std2_step(psi: WaveFunction, h_a: QuadraticHamiltonian, term: NonlinearTerm,
              t: float, h: float) -> WaveFunction:
    """Standard symmetric five-factor split: W(t)/2, Tx/2, Ty, Tx/2, W(t+h)/2.

    W folds the trap together with the frozen remainder; the kinetic/rotation
    factors are diagonal in the mixed representations.  Six 1D transforms.
    """
    g = psi.grid
    om = h_a.Omega
    h_eff = dissipative_step_scale(h, h_a.lam)
    tm = t + 0.5 * h
    mx = h_a.m_x(tm) if h_a.m_x else 1.0
    my = h_a.m_y(tm) if h_a.m_y else 1.0

    _w_half(psi, h_a, term, t, 0.5 * h)
    apply_Tx(psi, 0.5 * h_eff * mx, omega=om / mx)
    apply_Ty(psi, h_eff * my, omega=om / my)
    apply_Tx(psi, 0.5 * h_eff * mx, omega=om / mx)
    _w_half(psi, h_a, term, t + h, 0.5 * h)
    return psi


def _w_half(psi, h_a, term, t, h):
    w = trap_values(h_a, psi.grid, t)
    if term.lam > 0:
        v = w + _potential_values(term, psi.grid, t)
        dissipative_nonlinear_flow(psi, term, t, h, potential=v)
    else:
        b = w + _potential_values(term, psi.grid, t)
        if term.g:
            b = b + term.g * np.abs(psi.values) ** 2
        apply_W(psi, h, b)
    return psi


def triple_jump(base_step: Callable, psi: WaveFunction, t: float, h: float,
                lam: float = 0.0) -> WaveFunction:
    """Fourth-order composition S(gh) S((1-2g)h) S(gh), g = 1/(2 - 2^(1/3)).

    The middle substep is negative, which is unstable under dissipation;
    rejected for lam > 0.
    """
    if lam > 0:
        raise ValueError("triple jump needs negative substeps; not usable with dissipation")
    gam = TRIPLE_JUMP_GAMMA
    base_step(psi, t, gam * h)
    base_step(psi, t + gam * h, (1.0 - 2.0 * gam) * h)
    base_step(psi, t + (1.0 - gam) * h, gam * h)
    return psi


def srkn_step(psi: WaveFunction, scheme: SplittingScheme, h_a: QuadraticHamiltonian,
              term: NonlinearTerm, t: float, h: float, order: int = 4,
              tol: float = DEFAULT_TOL) -> WaveFunction:
    """One step of a two-part composition: A stages advance the quadratic flow
    (and physical time), B stages apply the remainder frozen at the accumulated
    stage time."""
    if h_a.lam > 0 and any(k == "A" and c < 0 for k, c in scheme.stages):
        raise ValueError(f"{scheme.name} has negative quadratic stages; "
                         "not usable with dissipation")
    t_cur = t
    for kind, coeff in scheme.stages:
        if kind == "A":
            rot_step(psi, decompose_step(h_a, t_cur, coeff * h, order, tol))
            t_cur += coeff * h
        else:
            _b_flow(psi, term, t_cur, coeff * h)
    return psi


@dataclass
class IntegrationResult:
    """Final state plus per-step diagnostics of one uniform-step integration."""

    psi: WaveFunction
    method: str
    n_steps: int
    h: float
    norms: np.ndarray           # length n_steps + 1, includes the initial norm
    boundary_mass: np.ndarray   # same shape; outermost-2-cells mass
    fft_count: int


def _make_rot2(order=4):
    def step(psi, h_a, term, t, h):
        return strang_wrap(psi, h_a, term, t, h, order=order)
    return step


def _y4(base):
    def step(psi, h_a, term, t, h):
        return triple_jump(lambda p, tt, hh: base(p, h_a, term, tt, hh), psi, t, h,
                           lam=h_a.lam)
    return step


def _bm4(psi, h_a, term, t, h):
    return srkn_step(psi, SRKN6B, h_a, term, t, h)


METHODS: dict[str, Callable] = {
    "ROT2": _make_rot2(order=4),
    "STD2": std2_step,
    "Y4-STD": _y4(std2_step),
    "Y4-ROT": _y4(_make_rot2(order=4)),
    "BM4-ROT": _bm4,
}


def integrate(psi0: WaveFunction, method: str, h_a: QuadraticHamiltonian,
              term: NonlinearTerm, t0: float, T: float, n_steps: int) -> IntegrationResult:
    """Propagate psi0 from t0 to T in n_steps uniform steps of ``method``.

    Decomposition failures propagate as SolverError carrying the failing (t, h).
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {sorted(METHODS)}")
    if term.lam != h_a.lam:
        raise ValueError(f"inconsistent dissipation: term.lam={term.lam}, h_a.lam={h_a.lam}")
    step = METHODS[method]
    h = (T - t0) / n_steps
    psi = psi0.copy()
    fft0 = psi.grid.fft_count
    norms = np.empty(n_steps + 1)
    bmass = np.empty(n_steps + 1)
    norms[0], bmass[0] = psi.norm(), psi.boundary_mass()
    for k in range(n_steps):
        step(psi, h_a, term, t0 + k * h, h)
        norms[k + 1], bmass[k + 1] = psi.norm(), psi.boundary_mass()
    return IntegrationResult(psi=psi, method=method, n_steps=n_steps, h=h,
                             norms=norms, boundary_mass=bmass,
                             fft_count=psi.grid.fft_count - fft0)

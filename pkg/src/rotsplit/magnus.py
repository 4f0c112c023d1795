"""Magnus averaging of the time-dependent quadratic Hamiltonian over one step.

The order-4 average uses the two-node Gauss-Legendre rule,

    H_avg = (H(t1) + H(t2))/2 - s/(4 sqrt(3)) {H(t1), H(t2)},
    t_{1,2} = t + h (1 -+ 1/sqrt(3))/2,

whose exponential reproduces the exact step propagator to O(h^5).  Order 2 is
the midpoint rule.  ``s`` equals the step h, or the complex effective step
i h/(i - lambda) in dissipative mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from .algebra import AffineHamiltonian, AveragedHamiltonian, affine_bracket, bracket

__all__ = [
    "QuadraticHamiltonian",
    "magnus_theta",
    "magnus_theta_affine",
    "dissipative_step_scale",
]

GAUSS_C1 = 0.5 - math.sqrt(3.0) / 6.0
GAUSS_C2 = 0.5 + math.sqrt(3.0) / 6.0
_BRACKET_WEIGHT = 1.0 / (4.0 * math.sqrt(3.0))


@dataclass(frozen=True)
class QuadraticHamiltonian:
    """Time-dependent trap H(t) = (m_x(t) p_x^2 + m_y(t) p_y^2)/2
    + (omega_x_sq(t) x^2 + omega_y_sq(t) y^2)/2 + Omega (x p_y - y p_x)
    [+ xi_x(t) x + xi_y(t) y].

    ``m_x, m_y`` are inverse-mass coefficients (default 1).  ``lam >= 0`` is
    the dissipation strength of (i - lam) d_t psi = H psi.
    """

    omega_x_sq: Callable[[float], float]
    omega_y_sq: Callable[[float], float]
    Omega: float = 0.0
    xi_x: Optional[Callable[[float], float]] = None
    xi_y: Optional[Callable[[float], float]] = None
    lam: float = 0.0
    m_x: Optional[Callable[[float], float]] = None
    m_y: Optional[Callable[[float], float]] = None

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError(f"dissipation lam must be >= 0, got {self.lam}")

    def at(self, t: float) -> AveragedHamiltonian:
        """Instantaneous quadratic coefficients at time t."""
        h = AveragedHamiltonian(
            m_x=self.m_x(t) if self.m_x else 1.0,
            m_y=self.m_y(t) if self.m_y else 1.0,
            w_x=self.omega_x_sq(t),
            w_y=self.omega_y_sq(t),
            Omega_x=self.Omega,
            Omega_y=self.Omega,
        )
        return h

    def affine_at(self, t: float) -> AffineHamiltonian:
        return AffineHamiltonian(
            quad=self.at(t),
            lin_x=self.xi_x(t) if self.xi_x else 0.0,
            lin_y=self.xi_y(t) if self.xi_y else 0.0,
        )

    @property
    def has_linear(self) -> bool:
        return self.xi_x is not None or self.xi_y is not None


def _validate_step(h: float, order: int) -> None:
    if not (h > 0 and math.isfinite(h)):
        raise ValueError(f"step h must be positive and finite, got {h}")
    if order not in (2, 4):
        raise ValueError(f"Magnus order must be 2 or 4, got {order}")


def magnus_theta(h_a: QuadraticHamiltonian, t: float, h: float, order: int = 4,
                 bracket_step: complex | None = None) -> AveragedHamiltonian:
    """Averaged Hamiltonian H_avg with exp(Theta) propagating [t, t+h],
    Theta = -i h H_avg.

    ``bracket_step`` overrides the step entering the commutator weight (used
    by the dissipative pipeline, where it is complex); quadrature nodes stay
    at real times either way.
    """
    _validate_step(h, order)
    if order == 2:
        return h_a.at(t + 0.5 * h)
    s = h if bracket_step is None else bracket_step
    h1 = h_a.at(t + GAUSS_C1 * h)
    h2 = h_a.at(t + GAUSS_C2 * h)
    return 0.5 * (h1 + h2) - (_BRACKET_WEIGHT * s) * bracket(h1, h2)


def magnus_theta_affine(h_a: QuadraticHamiltonian, t: float, h: float, order: int = 4,
                        bracket_step: complex | None = None) -> AffineHamiltonian:
    """Affine-extended Magnus average, including linear terms and phase."""
    _validate_step(h, order)
    if order == 2:
        return h_a.affine_at(t + 0.5 * h)
    s = h if bracket_step is None else bracket_step
    h1 = h_a.affine_at(t + GAUSS_C1 * h)
    h2 = h_a.affine_at(t + GAUSS_C2 * h)
    return 0.5 * (h1 + h2) - (_BRACKET_WEIGHT * s) * affine_bracket(h1, h2)


def dissipative_step_scale(h: float, lam: float) -> complex | float:
    """Effective complex step i h / (i - lam); equals h exactly for lam = 0."""
    if lam < 0:
        raise ValueError(f"lam must be >= 0, got {lam}")
    if lam == 0:
        return h
    return h * (1.0 - 1j * lam) / (1.0 + lam * lam)

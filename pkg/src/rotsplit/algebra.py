"""Lie algebra of planar quadratic Hamiltonians and its classical 4x4 representation.

Quadratic Hamiltonians in (x, y, p_x, p_y) close under commutation.  Every such
Hamiltonian maps injectively onto the 4x4 generator of its classical equations
of motion, and the matrix commutator represents the Poisson bracket exactly.
All bracket computations downstream go through this representation rather than
through hard-coded structure constants.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "BasisElement10",
    "BasisElement15",
    "AveragedHamiltonian",
    "AffineHamiltonian",
    "AlgebraConsistencyError",
    "SYMPLECTIC_J",
    "classical_matrix",
    "coefficients_from_matrix",
    "bracket",
    "affine_bracket",
    "basis_hamiltonian",
    "matrix_exp",
]

# Canonical symplectic form for state ordering (x, y, p_x, p_y).
SYMPLECTIC_J = np.array(
    [
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
    ]
)


class AlgebraConsistencyError(RuntimeError):
    """A matrix claimed to represent a quadratic Hamiltonian does not."""


class BasisElement10(enum.Enum):
    """Basis monomials of the ten-dimensional quadratic algebra.

    The symmetrized pairs (xp_x + p_x x) and (yp_y + p_y y) are represented by
    their classical polynomials 2*x*p_x and 2*y*p_y; Weyl ordering only affects
    the unobservable global phase.
    """

    X2 = "x^2"
    PX2 = "px^2"
    Y2 = "y^2"
    PY2 = "py^2"
    X_PY = "x py"
    Y_PX = "y px"
    XY = "x y"
    PX_PY = "px py"
    X_PX = "x px + px x"
    Y_PY = "y py + py y"


class BasisElement15(enum.Enum):
    """Extended basis including linear terms and the identity (phase) element."""

    E1 = "x"
    E2 = "px"
    E3 = "x^2/2"
    E4 = "px^2/2"
    E5 = "(x px + px x)/2"
    E6 = "y"
    E7 = "py"
    E8 = "y^2/2"
    E9 = "py^2/2"
    E10 = "(y py + py y)/2"
    E11 = "x y"
    E12 = "px py"
    E13 = "x py"
    E14 = "y px"
    E15 = "1"


@dataclass(frozen=True)
class AveragedHamiltonian:
    """Coefficients of a quadratic Hamiltonian

        H = (m_x p_x^2 + m_y p_y^2)/2 + (w_x x^2 + w_y y^2)/2
            + Omega_x x p_y - Omega_y y p_x
            + alpha x p_x + beta y p_y + gamma x y + delta p_x p_y

    Real in unitary mode; complex coefficients appear in dissipative mode.
    """

    m_x: complex = 0.0
    m_y: complex = 0.0
    w_x: complex = 0.0
    w_y: complex = 0.0
    Omega_x: complex = 0.0
    Omega_y: complex = 0.0
    alpha: complex = 0.0
    beta: complex = 0.0
    gamma: complex = 0.0
    delta: complex = 0.0

    _FIELDS = ("m_x", "m_y", "w_x", "w_y", "Omega_x", "Omega_y",
               "alpha", "beta", "gamma", "delta")

    def as_vector(self) -> np.ndarray:
        return np.array([getattr(self, f) for f in self._FIELDS])

    @classmethod
    def from_vector(cls, v) -> "AveragedHamiltonian":
        v = [_tighten(z) for z in v]
        return cls(**dict(zip(cls._FIELDS, v)))

    def is_real(self) -> bool:
        return all(not isinstance(getattr(self, f), complex) or getattr(self, f).imag == 0
                   for f in self._FIELDS)

    def __add__(self, other: "AveragedHamiltonian") -> "AveragedHamiltonian":
        return AveragedHamiltonian.from_vector(self.as_vector() + other.as_vector())

    def __sub__(self, other: "AveragedHamiltonian") -> "AveragedHamiltonian":
        return AveragedHamiltonian.from_vector(self.as_vector() - other.as_vector())

    def __mul__(self, s) -> "AveragedHamiltonian":
        return AveragedHamiltonian.from_vector(self.as_vector() * s)

    __rmul__ = __mul__


@dataclass(frozen=True)
class AffineHamiltonian:
    """Quadratic Hamiltonian extended by linear terms and a phase constant.

    ``lin_x, lin_px, lin_y, lin_py`` are the coefficients of x, p_x, y, p_y.
    ``phase`` multiplies the identity element; it is carried through bracket
    arithmetic but never enters observables.
    """

    quad: AveragedHamiltonian
    lin_x: complex = 0.0
    lin_px: complex = 0.0
    lin_y: complex = 0.0
    lin_py: complex = 0.0
    phase: complex = 0.0

    def shift_vector(self) -> np.ndarray:
        """Inhomogeneous part b of the classical system dz/dt = M z + b."""
        return np.array([self.lin_px, self.lin_py, -self.lin_x, -self.lin_y])

    def __add__(self, other: "AffineHamiltonian") -> "AffineHamiltonian":
        return AffineHamiltonian(
            self.quad + other.quad,
            _tighten(self.lin_x + other.lin_x),
            _tighten(self.lin_px + other.lin_px),
            _tighten(self.lin_y + other.lin_y),
            _tighten(self.lin_py + other.lin_py),
            _tighten(self.phase + other.phase),
        )

    def __sub__(self, other: "AffineHamiltonian") -> "AffineHamiltonian":
        return self + (-1.0) * other

    def __mul__(self, s) -> "AffineHamiltonian":
        return AffineHamiltonian(
            self.quad * s,
            _tighten(self.lin_x * s), _tighten(self.lin_px * s),
            _tighten(self.lin_y * s), _tighten(self.lin_py * s),
            _tighten(self.phase * s),
        )

    __rmul__ = __mul__


def _tighten(z):
    """Collapse complex scalars with exactly zero imaginary part to float."""
    z = complex(z)
    return z.real if z.imag == 0.0 else z


def _check_finite(h: AveragedHamiltonian) -> None:
    if not np.all(np.isfinite(h.as_vector().astype(complex).view(float))):
        raise ValueError(f"non-finite Hamiltonian coefficient in {h}")


def classical_matrix(h: AveragedHamiltonian) -> np.ndarray:
    """Generator M of the classical equations of motion d/dt (x,y,px,py) = M z."""
    _check_finite(h)
    m = np.array(
        [
            [h.alpha, -h.Omega_y, h.m_x, h.delta],
            [h.Omega_x, h.beta, h.delta, h.m_y],
            [-h.w_x, -h.gamma, -h.alpha, -h.Omega_x],
            [-h.gamma, -h.w_y, h.Omega_y, -h.beta],
        ]
    )
    if np.iscomplexobj(m) and not np.any(m.imag):
        m = m.real
    return m


def coefficients_from_matrix(m: np.ndarray, rtol: float = 1e-9) -> AveragedHamiltonian:
    """Invert :func:`classical_matrix`.

    Raises AlgebraConsistencyError when the redundant entries of ``m`` disagree,
    i.e. when ``m`` is not in the image of the representation.
    """
    m = np.asarray(m)
    scale = max(np.abs(m).max(), 1.0)
    pairs = [  # (entry, entry that must match it)
        ((0, 3), (1, 2)),   # delta
        ((2, 1), (3, 0)),   # -gamma
        ((2, 2), None), ((3, 3), None), ((2, 3), None), ((3, 2), None),
    ]
    expected = {
        (2, 2): -m[0, 0], (3, 3): -m[1, 1], (2, 3): -m[1, 0], (3, 2): -m[0, 1],
    }
    for a, b in pairs:
        want = expected[a] if b is None else m[b]
        if abs(m[a] - want) > rtol * scale:
            raise AlgebraConsistencyError(
                f"matrix entry {a} = {m[a]} inconsistent with {want}; "
                "not a quadratic-Hamiltonian generator"
            )
    return AveragedHamiltonian(
        m_x=_tighten(m[0, 2]),
        m_y=_tighten(m[1, 3]),
        w_x=_tighten(-m[2, 0]),
        w_y=_tighten(-m[3, 1]),
        Omega_x=_tighten(m[1, 0]),
        Omega_y=_tighten(-m[0, 1]),
        alpha=_tighten(m[0, 0]),
        beta=_tighten(m[1, 1]),
        gamma=_tighten(-m[2, 1]),
        delta=_tighten(m[0, 3]),
    )


def bracket(a: AveragedHamiltonian, b: AveragedHamiltonian) -> AveragedHamiltonian:
    """Poisson bracket {a, b}, computed as a matrix commutator.

    Corresponds to the quantum bracket through [A, B] = i {A, B}, exact for
    quadratic Hamiltonians.
    """
    ma, mb = classical_matrix(a), classical_matrix(b)
    return coefficients_from_matrix(ma @ mb - mb @ ma)


def affine_bracket(a: AffineHamiltonian, b: AffineHamiltonian) -> AffineHamiltonian:
    """Poisson bracket on the 15-element algebra (quadratic + linear + phase)."""
    ma, mb = classical_matrix(a.quad), classical_matrix(b.quad)
    ba, bb = a.shift_vector(), b.shift_vector()
    quad = coefficients_from_matrix(ma @ mb - mb @ ma)
    shift = ma @ bb - mb @ ba
    phase = ba @ SYMPLECTIC_J @ bb
    return AffineHamiltonian(
        quad,
        lin_x=_tighten(-shift[2]),
        lin_px=_tighten(shift[0]),
        lin_y=_tighten(-shift[3]),
        lin_py=_tighten(shift[1]),
        phase=_tighten(phase),
    )


_BASIS_COEFFS = {
    # H contains (w_x/2) x^2, so the bare monomial x^2 carries w_x = 2, etc.
    BasisElement10.X2: {"w_x": 2.0},
    BasisElement10.PX2: {"m_x": 2.0},
    BasisElement10.Y2: {"w_y": 2.0},
    BasisElement10.PY2: {"m_y": 2.0},
    BasisElement10.X_PY: {"Omega_x": 1.0},
    BasisElement10.Y_PX: {"Omega_y": -1.0},
    BasisElement10.XY: {"gamma": 1.0},
    BasisElement10.PX_PY: {"delta": 1.0},
    BasisElement10.X_PX: {"alpha": 2.0},   # xp_x + p_x x = 2 x p_x classically
    BasisElement10.Y_PY: {"beta": 2.0},
}


def basis_hamiltonian(tag: BasisElement10) -> AveragedHamiltonian:
    """The basis monomial ``tag`` as an AveragedHamiltonian."""
    return AveragedHamiltonian(**_BASIS_COEFFS[tag])


def matrix_exp(m: np.ndarray, t: complex = 1.0) -> np.ndarray:
    """exp(t*m) by scaling-and-squaring with a fixed-order Taylor expansion.

    Accurate to ~1e-15 relative error for ||t*m|| up to well beyond 10; the
    matrices here are 4x4 (or 5x5 augmented) so cost is irrelevant.
    """
    m = np.asarray(m)
    if not np.all(np.isfinite(np.asarray(m, dtype=complex).view(float))):
        raise ValueError("non-finite matrix entries")
    a = t * m
    n = a.shape[0]
    nrm = np.linalg.norm(a, np.inf)
    squarings = max(0, int(np.ceil(np.log2(nrm / 0.25))) if nrm > 0.25 else 0)
    a = a / (2.0**squarings)
    # Horner evaluation of the order-16 Taylor polynomial.
    eye = np.eye(n, dtype=a.dtype)
    result = eye + a / 16.0
    for k in range(15, 0, -1):
        result = eye + (a @ result) / k
    for _ in range(squarings):
        result = result @ result
    return result

"""Independent oracles used by the test suite.

Everything here deliberately avoids the library's own code paths: symbolic
Poisson brackets via sympy, matrix exponentials via a long scaled Taylor
series, fundamental matrices via adaptive ODE integration, and dense
spectrally-discretized Hamiltonians for grid-level cross-checks.
"""

from __future__ import annotations

import numpy as np
import sympy as sp
from scipy.integrate import solve_ivp

from rotsplit.algebra import AveragedHamiltonian, BasisElement10

X, Y, PX, PY = sp.symbols("x y p_x p_y")

# classical polynomial of each basis tag (symmetrized pairs -> 2 x p_x etc.)
BASIS_POLYNOMIALS = {
    BasisElement10.X2: X**2,
    BasisElement10.PX2: PX**2,
    BasisElement10.Y2: Y**2,
    BasisElement10.PY2: PY**2,
    BasisElement10.X_PY: X * PY,
    BasisElement10.Y_PX: Y * PX,
    BasisElement10.XY: X * Y,
    BasisElement10.PX_PY: PX * PY,
    BasisElement10.X_PX: 2 * X * PX,
    BasisElement10.Y_PY: 2 * Y * PY,
}


def poisson_bracket(f, g):
    """{f, g} = df/dx dg/dpx - df/dpx dg/dx + (same in y)."""
    return sp.expand(
        sp.diff(f, X) * sp.diff(g, PX) - sp.diff(f, PX) * sp.diff(g, X)
        + sp.diff(f, Y) * sp.diff(g, PY) - sp.diff(f, PY) * sp.diff(g, Y))


def hamiltonian_polynomial(h: AveragedHamiltonian):
    return sp.expand(
        sp.Rational(1, 2) * (h.m_x * PX**2 + h.m_y * PY**2 + h.w_x * X**2 + h.w_y * Y**2)
        + h.Omega_x * X * PY - h.Omega_y * Y * PX
        + h.alpha * X * PX + h.beta * Y * PY + h.gamma * X * Y + h.delta * PX * PY)


def polynomial_to_hamiltonian(poly) -> AveragedHamiltonian:
    p = sp.Poly(sp.expand(poly), X, Y, PX, PY)
    def coeff(*mono):
        return float(p.coeff_monomial(sp.prod(s**e for s, e in zip((X, Y, PX, PY), mono))))
    return AveragedHamiltonian(
        m_x=2 * coeff(0, 0, 2, 0), m_y=2 * coeff(0, 0, 0, 2),
        w_x=2 * coeff(2, 0, 0, 0), w_y=2 * coeff(0, 2, 0, 0),
        Omega_x=coeff(1, 0, 0, 1), Omega_y=-coeff(0, 1, 1, 0),
        alpha=coeff(1, 0, 1, 0), beta=coeff(0, 1, 0, 1),
        gamma=coeff(1, 1, 0, 0), delta=coeff(0, 0, 1, 1))


def taylor_expm(m: np.ndarray, t: float = 1.0, terms: int = 64) -> np.ndarray:
    """Scaled 64-term Taylor series with squaring; independent exp oracle."""
    a = np.asarray(t * m)
    s = 0
    while np.linalg.norm(a, np.inf) > 0.5:
        a = a / 2.0
        s += 1
    out = np.eye(a.shape[0], dtype=a.dtype)
    term = np.eye(a.shape[0], dtype=a.dtype)
    for k in range(1, terms + 1):
        term = term @ a / k
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


def fundamental_matrix(matrix_of_t, t0: float, h: float, dim: int = 4) -> np.ndarray:
    """High-accuracy fundamental solution of U' = M(t) U on [t0, t0 + h]."""
    def rhs(t, u):
        return (matrix_of_t(t) @ u.reshape(dim, dim)).ravel()
    sol = solve_ivp(rhs, (t0, t0 + h), np.eye(dim).ravel(), rtol=1e-13, atol=1e-14,
                    method="DOP853")
    return sol.y[:, -1].reshape(dim, dim)


def affine_fundamental(matrix_of_t, shift_of_t, t0: float, h: float):
    """(linear, shift) of the exact affine flow z' = M(t) z + b(t)."""
    def rhs(t, u):
        a = u.reshape(4, 5)
        m = matrix_of_t(t)
        out = np.empty_like(a)
        out[:, :4] = m @ a[:, :4]
        out[:, 4] = m @ a[:, 4] + shift_of_t(t)
        return out.ravel()
    u0 = np.zeros((4, 5))
    u0[:, :4] = np.eye(4)
    sol = solve_ivp(rhs, (t0, t0 + h), u0.ravel(), rtol=1e-13, atol=1e-14, method="DOP853")
    a = sol.y[:, -1].reshape(4, 5)
    return a[:, :4], a[:, 4]


def dense_grid_operators(grid):
    """Dense spectrally-exact X, Y, Px, Py on the flattened (x-major) grid."""
    nx, ny = grid.nx, grid.ny
    fx = np.fft.fft(np.eye(nx), axis=0, norm="ortho")
    fy = np.fft.fft(np.eye(ny), axis=0, norm="ortho")
    px1 = fx.conj().T @ np.diag(grid.kx) @ fx
    py1 = fy.conj().T @ np.diag(grid.ky) @ fy
    ix, iy = np.eye(nx), np.eye(ny)
    return (np.kron(np.diag(grid.x), iy), np.kron(ix, np.diag(grid.y)),
            np.kron(px1, iy), np.kron(ix, py1))


def dense_grid_hamiltonian(grid, h: AveragedHamiltonian) -> np.ndarray:
    """Weyl-symmetrized dense matrix of the quadratic Hamiltonian on the grid."""
    x, y, px, py = dense_grid_operators(grid)
    m = 0.5 * (h.m_x * px @ px + h.m_y * py @ py + h.w_x * x @ x + h.w_y * y @ y)
    m = m + h.Omega_x * x @ py - h.Omega_y * y @ px
    m = m + 0.5 * h.alpha * (x @ px + px @ x) + 0.5 * h.beta * (y @ py + py @ y)
    m = m + h.gamma * x @ y + h.delta * px @ py
    return m


def lsq_slope(hs, errs) -> float:
    """Least-squares slope of log(err) against log(h)."""
    return float(np.polyfit(np.log(hs), np.log(errs), 1)[0])

"""Four-factor Fourier-diagonalizable decomposition of one quadratic-Hamiltonian step.

One step exp(-i h H_avg) is factored into

    exp(F0 x^2) exp(F1 y^2 + G1 px^2 - E1 y px)
    exp(F2 x^2 + G2 py^2 + E2 x py) exp(F3 y^2 + G3 px^2 - E3 y px),

applied right to left, each factor diagonal after one 1D Fourier transform.
Coefficients are stored in the *classical* convention: ``c.f1`` etc. are the
real (complex if dissipative) parameters entering the unipotent 4x4 factor
matrices, i.e. the operator exponents are F1 = -i f1/2, G1 = -i g1/2,
E1 = -i e1.  They are found by matching the product of the factor matrices to
exp(h M) with a damped Gauss-Newton iteration on the 16 entry residuals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import classical_matrix, matrix_exp
from .magnus import QuadraticHamiltonian, dissipative_step_scale, magnus_theta, magnus_theta_affine

__all__ = [
    "DecompCoefficients",
    "AffineDecompCoefficients",
    "SolverError",
    "factor_product",
    "affine_factor_product",
    "strang_seed",
    "solve_coefficients",
    "solve_affine_coefficients",
    "decompose_step",
    "decompose_affine_step",
]

DEFAULT_TOL = 1e-12
MAX_ITER = 50


class SolverError(RuntimeError):
    """Coefficient iteration failed to reach tolerance (step likely too large)."""

    def __init__(self, message: str, residual: float, t: float | None = None,
                 h: float | None = None):
        super().__init__(message)
        self.residual = residual
        self.t = t
        self.h = h


@dataclass(frozen=True)
class DecompCoefficients:
    """Classical-convention factor parameters for one step, with solve metadata."""

    f0: complex
    f1: complex
    g1: complex
    e1: complex
    f2: complex
    g2: complex
    e2: complex
    f3: complex
    g3: complex
    e3: complex
    residual: float = 0.0
    t: float = 0.0
    h: float = 0.0

    _PARAMS = ("f0", "f1", "g1", "e1", "f2", "g2", "e2", "f3", "g3", "e3")

    def as_vector(self) -> np.ndarray:
        return np.array([getattr(self, p) for p in self._PARAMS])

    @classmethod
    def from_vector(cls, v: Sequence, residual: float = 0.0, t: float = 0.0,
                    h: float = 0.0) -> "DecompCoefficients":
        return cls(*v, residual=residual, t=t, h=h)

    def is_real(self) -> bool:
        return bool(np.all(np.isreal(self.as_vector())))

    def operator_exponents(self) -> dict:
        """Exponent coefficients of the operator factors (imaginary, unhalved
        cross terms): f_op = -i f/2, g_op = -i g/2, e_op = -i e."""
        out = {}
        for p in self._PARAMS:
            v = getattr(self, p)
            out[p] = -0.5j * v if p[0] in "fg" else -1j * v
        return out


@dataclass(frozen=True)
class AffineDecompCoefficients:
    """Parameters of the five-factor affine decomposition

        exp(n1 x^2 + m1 x) [factor1] [factor2] [factor3] exp(n2 x^2 + m2 x),

    with k1..k3 the linear momentum exponents of the inner factors.  Quadratic
    parameters use the same classical halved convention as DecompCoefficients;
    k and m are literal phase-space shift amounts.
    """

    n1: complex
    m1: complex
    f1: complex
    g1: complex
    e1: complex
    k1: complex
    f2: complex
    g2: complex
    e2: complex
    k2: complex
    f3: complex
    g3: complex
    e3: complex
    k3: complex
    n2: complex
    m2: complex
    residual: float = 0.0
    t: float = 0.0
    h: float = 0.0

    _PARAMS = ("n1", "m1", "f1", "g1", "e1", "k1", "f2", "g2", "e2", "k2",
               "f3", "g3", "e3", "k3", "n2", "m2")

    def as_vector(self) -> np.ndarray:
        return np.array([getattr(self, p) for p in self._PARAMS])

    @classmethod
    def from_vector(cls, v: Sequence, residual: float = 0.0, t: float = 0.0,
                    h: float = 0.0) -> "AffineDecompCoefficients":
        return cls(*v, residual=residual, t=t, h=h)


# --- factor matrices -------------------------------------------------------
#
# Unipotent generators; state ordering (x, y, px, py).  The y-type factor is
# the flow of f y^2/2 + g px^2/2 - e y px, the x-type factor of
# f x^2/2 + g py^2/2 + e x py, the outer factor of f0 x^2/2.

def _eye(dtype):
    return np.eye(4, dtype=dtype)


def _factor_x2(f, dtype):
    a = _eye(dtype)
    a[2, 0] = -f
    return a


def _factor_y(f, g, e, dtype):
    a = _eye(dtype)
    a[0, 1] = -e
    a[0, 2] = g
    a[3, 1] = -f
    a[3, 2] = e
    return a


def _factor_x(f, g, e, dtype):
    a = _eye(dtype)
    a[1, 0] = e
    a[1, 3] = g
    a[2, 0] = -f
    a[2, 3] = -e
    return a


def _single(i, j, v, n=4):
    d = np.zeros((n, n))
    d[i, j] = v
    return d


def _pair(i1, j1, v1, i2, j2, v2, n=4):
    d = np.zeros((n, n))
    d[i1, j1] = v1
    d[i2, j2] = v2
    return d


# (factor index, constant derivative matrix) per parameter, in the order of
# DecompCoefficients._PARAMS.  Factor 0 is the leftmost matrix of the product
# (the operator applied last).
_QUAD_DERIVS = [
    (0, _single(2, 0, -1.0)),                     # f0
    (1, _single(3, 1, -1.0)),                     # f1
    (1, _single(0, 2, 1.0)),                      # g1
    (1, _pair(0, 1, -1.0, 3, 2, 1.0)),            # e1
    (2, _single(2, 0, -1.0)),                     # f2
    (2, _single(1, 3, 1.0)),                      # g2
    (2, _pair(1, 0, 1.0, 2, 3, -1.0)),            # e2
    (3, _single(3, 1, -1.0)),                     # f3
    (3, _single(0, 2, 1.0)),                      # g3
    (3, _pair(0, 1, -1.0, 3, 2, 1.0)),            # e3
]


def _quad_factors(u: np.ndarray) -> list[np.ndarray]:
    dt = u.dtype
    f0, f1, g1, e1, f2, g2, e2, f3, g3, e3 = u
    return [
        _factor_x2(f0, dt),
        _factor_y(f1, g1, e1, dt),
        _factor_x(f2, g2, e2, dt),
        _factor_y(f3, g3, e3, dt),
    ]


def factor_product(c: DecompCoefficients | np.ndarray) -> np.ndarray:
    """Product of the four unipotent factor matrices.

    The matrix of the first-applied operator factor (the index-3 one) sits
    rightmost, so the product represents the composed flow on phase-space
    points; entries are polynomials of total degree <= 4 in the parameters.
    """
    u = c.as_vector() if isinstance(c, DecompCoefficients) else np.asarray(c)
    a0, a1, a2, a3 = _quad_factors(u)
    return a0 @ a1 @ a2 @ a3


# --- affine (5x5 homogeneous) versions -------------------------------------

def _aug(mat4, shift):
    a = np.eye(5, dtype=mat4.dtype)
    a[:4, :4] = mat4
    a[:4, 4] = shift
    return a


def _affine_factors(u: np.ndarray) -> list[np.ndarray]:
    dt = u.dtype
    n1, m1, f1, g1, e1, k1, f2, g2, e2, k2, f3, g3, e3, k3, n2, m2 = u
    return [
        _aug(_factor_x2(n1, dt), _shift(dt, 2, -m1)),
        _aug(_factor_y(f1, g1, e1, dt), _shift(dt, 0, k1)),
        _aug(_factor_x(f2, g2, e2, dt), _shift(dt, 1, k2)),
        _aug(_factor_y(f3, g3, e3, dt), _shift(dt, 0, k3)),
        _aug(_factor_x2(n2, dt), _shift(dt, 2, -m2)),
    ]


def _shift(dtype, i, v):
    s = np.zeros(4, dtype=dtype)
    s[i] = v
    return s


def _aug_deriv(i, j, v):
    d = np.zeros((5, 5))
    d[i, j] = v
    return d


def _aug_deriv_pair(i1, j1, v1, i2, j2, v2):
    d = np.zeros((5, 5))
    d[i1, j1] = v1
    d[i2, j2] = v2
    return d


_AFFINE_DERIVS = [
    (0, _aug_deriv(2, 0, -1.0)),                      # n1
    (0, _aug_deriv(2, 4, -1.0)),                      # m1
    (1, _aug_deriv(3, 1, -1.0)),                      # f1
    (1, _aug_deriv(0, 2, 1.0)),                       # g1
    (1, _aug_deriv_pair(0, 1, -1.0, 3, 2, 1.0)),      # e1
    (1, _aug_deriv(0, 4, 1.0)),                       # k1
    (2, _aug_deriv(2, 0, -1.0)),                      # f2
    (2, _aug_deriv(1, 3, 1.0)),                       # g2
    (2, _aug_deriv_pair(1, 0, 1.0, 2, 3, -1.0)),      # e2
    (2, _aug_deriv(1, 4, 1.0)),                       # k2
    (3, _aug_deriv(3, 1, -1.0)),                      # f3
    (3, _aug_deriv(0, 2, 1.0)),                       # g3
    (3, _aug_deriv_pair(0, 1, -1.0, 3, 2, 1.0)),      # e3
    (3, _aug_deriv(0, 4, 1.0)),                       # k3
    (4, _aug_deriv(2, 0, -1.0)),                      # n2
    (4, _aug_deriv(2, 4, -1.0)),                      # m2
]


def affine_factor_product(c: AffineDecompCoefficients | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Composed affine flow (linear part, shift) of the five factors.

    The last-listed factor (n2, m2) acts on phase-space points first.
    """
    u = c.as_vector() if isinstance(c, AffineDecompCoefficients) else np.asarray(c)
    mats = _affine_factors(u)
    p = mats[0]
    for m in mats[1:]:
        p = p @ m
    return p[:4, :4], p[:4, 4]


# --- Gauss-Newton core ------------------------------------------------------

def _gauss_newton(build_factors, derivs, target, seed, tol, max_iter,
                  rows=None):
    """Damped (Levenberg) Gauss-Newton on ||prod(factors(u)) - target||_F.

    ``rows`` restricts which residual rows are meaningful (used to drop the
    constant bottom row of homogeneous matrices).  When the damped iteration
    gets trapped in a residual local minimum, a plain undamped sweep from the
    seed is attempted before giving up; with the O(h^3)-accurate seeds used in
    production neither fallback triggers.
    """
    dtype = complex if np.iscomplexobj(target) or np.iscomplexobj(np.asarray(seed)) else float
    u0 = np.array(seed, dtype=dtype)
    n = target.shape[0]
    rows = slice(0, n) if rows is None else rows

    if not np.all(np.isfinite(np.asarray(target, dtype=complex).view(float))):
        raise SolverError("step target has non-finite entries (step far too large)",
                          residual=float("inf"))

    def residual(uv):
        mats = build_factors(uv)
        p = mats[0]
        for m in mats[1:]:
            p = p @ m
        return (p - target)[rows].ravel(), mats

    def jacobian(mats):
        prefix = [np.eye(n, dtype=dtype)]
        for m in mats[:-1]:
            prefix.append(prefix[-1] @ m)
        suffix = [np.eye(n, dtype=dtype)]
        for m in reversed(mats[1:]):
            suffix.append(m @ suffix[-1])
        suffix.reverse()
        return np.stack(
            [(prefix[j] @ d.astype(dtype) @ suffix[j])[rows].ravel() for j, d in derivs],
            axis=1)

    def levenberg(u, r, mats, res):
        mu = 0.0
        nparam = u.shape[0]
        for _ in range(max_iter):
            if res <= tol:
                return u, res
            jac = jacobian(mats)
            accepted = False
            for _retry in range(25):
                if mu == 0.0:
                    step, *_ = np.linalg.lstsq(jac, -r, rcond=None)
                else:
                    aug = np.vstack([jac, np.sqrt(mu) * np.eye(nparam, dtype=dtype)])
                    rhs = np.concatenate([-r, np.zeros(nparam, dtype=dtype)])
                    step, *_ = np.linalg.lstsq(aug, rhs, rcond=None)
                r_new, mats_new = residual(u + step)
                res_new = np.linalg.norm(r_new)
                if np.isfinite(res_new) and res_new < res:
                    u = u + step
                    r, mats, res = r_new, mats_new, res_new
                    mu = 0.0 if mu < 1e-12 else mu / 8.0
                    accepted = True
                    break
                mu = 1e-10 if mu == 0.0 else mu * 10.0
            if not accepted:
                break
        return u, res

    def plain(u, iters):
        best_u, best_res = u, np.inf
        for _ in range(iters):
            r, mats = residual(u)
            res = np.linalg.norm(r)
            if not np.isfinite(res):
                break
            if res < best_res:
                best_u, best_res = u.copy(), res
            if res <= tol:
                return u, res
            jac = jacobian(mats)
            try:
                step, *_ = np.linalg.lstsq(jac, -r, rcond=None)
            except np.linalg.LinAlgError:
                break
            u = u + step
        return best_u, best_res

    r, mats = residual(u0)
    u, res = levenberg(u0.copy(), r, mats, np.linalg.norm(r))
    if res <= tol:
        return u, res
    u, res = plain(u0.copy(), max_iter)
    if res <= tol:
        return u, res
    raise SolverError(
        f"coefficient iteration stalled at residual {res:.3e} (tol {tol:.1e})",
        residual=res,
    )


def strang_seed(h_a: QuadraticHamiltonian, t: float, h: float) -> DecompCoefficients:
    """Second-order seed: the plain Strang split of the step, exact to O(h^3).

    Pattern (per unit step, classical convention): f0 = 0,
    f1 = f3 = omega_y^2(t)/2, g1 = g3 = 1/2, e1 = e3 = Omega/2,
    f2 = omega_x^2(t), g2 = 1, e2 = Omega.
    """
    wy = h_a.omega_y_sq(t)
    wx = h_a.omega_x_sq(t)
    om = h_a.Omega
    mx = h_a.m_x(t) if h_a.m_x else 1.0
    my = h_a.m_y(t) if h_a.m_y else 1.0
    return DecompCoefficients(
        f0=0.0,
        f1=0.5 * h * wy, g1=0.5 * h * mx, e1=0.5 * h * om,
        f2=h * wx, g2=h * my, e2=h * om,
        f3=0.5 * h * wy, g3=0.5 * h * mx, e3=0.5 * h * om,
        residual=float("nan"), t=t, h=h,
    )


def solve_coefficients(target: np.ndarray, seed: DecompCoefficients | np.ndarray,
                       tol: float = DEFAULT_TOL, max_iter: int = MAX_ITER,
                       t: float = 0.0, h: float = 0.0) -> DecompCoefficients:
    """Match factor_product(c) to ``target`` in Frobenius norm.

    The 16 entry residuals are minimized over the 10 parameters with a damped
    Gauss-Newton iteration and an analytically assembled Jacobian.  Raises
    SolverError (carrying the final residual) on non-convergence, which
    signals that the step is too large.
    """
    seed_vec = seed.as_vector() if isinstance(seed, DecompCoefficients) else np.asarray(seed)
    try:
        u, res = _gauss_newton(_quad_factors, _QUAD_DERIVS, target, seed_vec, tol, max_iter)
    except SolverError:
        # widen the basin: retry from zero
        u, res = _gauss_newton(_quad_factors, _QUAD_DERIVS, target,
                               np.zeros_like(seed_vec), tol, max_iter)
    return DecompCoefficients.from_vector(u, residual=res, t=t, h=h)


def solve_affine_coefficients(target_linear: np.ndarray, target_shift: np.ndarray,
                              seed: AffineDecompCoefficients | np.ndarray,
                              tol: float = DEFAULT_TOL, max_iter: int = MAX_ITER,
                              t: float = 0.0, h: float = 0.0) -> AffineDecompCoefficients:
    """Affine analogue of solve_coefficients: 20 residuals over 16 parameters."""
    target = np.eye(5, dtype=complex if np.iscomplexobj(target_linear) else float)
    target[:4, :4] = target_linear
    target[:4, 4] = target_shift
    seed_vec = seed.as_vector() if isinstance(seed, AffineDecompCoefficients) else np.asarray(seed)
    try:
        u, res = _gauss_newton(_affine_factors, _AFFINE_DERIVS, target, seed_vec,
                               tol, max_iter, rows=slice(0, 4))
    except SolverError:
        u, res = _gauss_newton(_affine_factors, _AFFINE_DERIVS, target,
                               np.zeros_like(seed_vec), tol, max_iter, rows=slice(0, 4))
    return AffineDecompCoefficients.from_vector(u, residual=res, t=t, h=h)


def _signed_theta_and_target(h_a, t, h, order):
    """Magnus average and step target for either sign of h."""
    lam = h_a.lam
    if h > 0:
        h_eff = dissipative_step_scale(h, lam)
        theta = magnus_theta(h_a, t, h, order, bracket_step=h_eff)
        return theta, matrix_exp(classical_matrix(theta), h_eff)
    if lam > 0:
        raise ValueError("negative steps are not allowed in dissipative mode")
    # backward step: the inverse of the forward flow over [t+h, t]
    theta = magnus_theta(h_a, t + h, -h, order)
    return theta, matrix_exp(classical_matrix(theta), h)


def decompose_step(h_a: QuadraticHamiltonian, t: float, h: float, order: int = 4,
                   tol: float = DEFAULT_TOL) -> DecompCoefficients:
    """Full pipeline: Magnus average -> classical exp(h M) -> coefficient solve.

    Supports h < 0 (exact in the sign of h) except in dissipative mode, where
    coefficients become complex instead.
    """
    if h == 0 or not math.isfinite(h):
        raise ValueError(f"step h must be nonzero and finite, got {h}")
    with np.errstate(over="ignore", invalid="ignore"):
        theta, target = _signed_theta_and_target(h_a, t, h, order)
    seed = strang_seed(h_a, t, h).as_vector()
    if h_a.lam > 0:
        seed = seed * (dissipative_step_scale(h, h_a.lam) / h)
    try:
        c = solve_coefficients(target, seed, tol=tol, t=t, h=h)
    except SolverError as exc:
        raise SolverError(
            f"decomposition failed at t={t}, h={h}: {exc}", exc.residual, t=t, h=h
        ) from exc
    return DecompCoefficients.from_vector(c.as_vector(), residual=c.residual, t=t, h=h)


def decompose_affine_step(h_a: QuadraticHamiltonian, t: float, h: float,
                          order: int = 4, tol: float = DEFAULT_TOL) -> AffineDecompCoefficients:
    """Affine pipeline for Hamiltonians with linear terms (variation of constants)."""
    if h <= 0 or not math.isfinite(h):
        raise ValueError(f"step h must be positive and finite, got {h}")
    h_eff = dissipative_step_scale(h, h_a.lam)
    theta = magnus_theta_affine(h_a, t, h, order, bracket_step=h_eff)
    gen = np.zeros((5, 5), dtype=complex if h_a.lam > 0 else float)
    gen[:4, :4] = classical_matrix(theta.quad)
    gen[:4, 4] = theta.shift_vector()
    aug = matrix_exp(gen, h_eff)
    qseed = strang_seed(h_a, t, h)
    if h_a.lam > 0:
        qseed = DecompCoefficients.from_vector(
            qseed.as_vector() * (h_eff / h), t=t, h=h)
    seed = AffineDecompCoefficients(
        n1=qseed.f0, m1=0.0,
        f1=qseed.f1, g1=qseed.g1, e1=qseed.e1, k1=0.0,
        f2=qseed.f2, g2=qseed.g2, e2=qseed.e2, k2=0.0,
        f3=qseed.f3, g3=qseed.g3, e3=qseed.e3, k3=0.0,
        n2=0.0, m2=0.0,
    )
    try:
        return solve_affine_coefficients(aug[:4, :4], aug[:4, 4], seed, tol=tol, t=t, h=h)
    except SolverError as exc:
        raise SolverError(
            f"affine decomposition failed at t={t}, h={h}: {exc}", exc.residual, t=t, h=h
        ) from exc

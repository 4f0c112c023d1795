import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rotsplit.magnus import QuadraticHamiltonian


@pytest.fixture
def trap_w4():
    """The benchmark trap: omega_x^2 = 4(1+sin(t/2)), omega_y^2 = 4 - sin(t/2),
    Omega = 1/10."""
    return QuadraticHamiltonian(
        lambda t: 4.0 * (1.0 + np.sin(0.5 * t)),
        lambda t: 4.0 - np.sin(0.5 * t),
        Omega=0.1,
    )


@pytest.fixture
def trap_w2():
    """Weak-trap variant (omega_0^2 = 2, Omega = 1/5) used in nonlinear runs."""
    return QuadraticHamiltonian(
        lambda t: 2.0 * (1.0 + np.sin(0.5 * t)),
        lambda t: 2.0 - np.sin(0.5 * t),
        Omega=0.2,
    )


def make_trap(w0sq: float, omega: float, lam: float = 0.0) -> QuadraticHamiltonian:
    return QuadraticHamiltonian(
        lambda t: w0sq * (1.0 + np.sin(0.5 * t)),
        lambda t: w0sq - np.sin(0.5 * t),
        Omega=omega,
        lam=lam,
    )

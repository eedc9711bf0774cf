"""Complex linear algebra primitives for small Hilbert spaces.

State vectors are plain complex ndarrays of length d, density matrices are
d x d complex ndarrays.  Everything here assumes d <= 8 and dense storage.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, NotHermitian, ZeroNorm

# Norm below which a vector counts as the zero vector (jump onto a dark state).
ZERO_NORM_CUTOFF = 1e-14

# Two unit vectors are the same physical state when |<u|v>| >= 1 - PHASE_TOL.
PHASE_TOL = 1e-9

HERMITICITY_ATOL = 1e-12


def normalize(v: np.ndarray) -> np.ndarray:
    """Return v / ||v||.

    Raises ZeroNorm when ||v|| <= 1e-14, which in the simulation means a
    jump operator annihilated the state.
    """
    v = np.asarray(v, dtype=complex)
    n = np.linalg.norm(v)
    if n <= ZERO_NORM_CUTOFF:
        raise ZeroNorm(f"cannot normalize vector with norm {n:.3e}")
    return v / n


def outer(v: np.ndarray) -> np.ndarray:
    """Projector |v><v| of a unit vector: Hermitian, rank 1, trace |v|^2."""
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def expectation(v: np.ndarray, a: np.ndarray) -> complex:
    """<v|A|v>.  Real and non-negative whenever A = C^dag C."""
    v = np.asarray(v, dtype=complex)
    a = np.asarray(a, dtype=complex)
    if a.shape != (v.shape[0], v.shape[0]):
        raise DimensionMismatch(
            f"operator shape {a.shape} does not match state dimension {v.shape[0]}"
        )
    return complex(v.conj() @ (a @ v))


def phase_equal(u: np.ndarray, v: np.ndarray, tol: float = PHASE_TOL) -> bool:
    """True iff the unit vectors u and v agree up to a global phase.

    Test is |<u|v>| >= 1 - tol; a few hundred ulps of headroom keep the
    relation reflexive at tol = 0 despite rounding in the inner product.
    """
    ov = abs(np.vdot(u, v))
    return bool(ov >= 1.0 - tol - 1e-13)


def is_hermitian(rho: np.ndarray, atol: float = HERMITICITY_ATOL) -> bool:
    rho = np.asarray(rho)
    return bool(np.max(np.abs(rho - rho.conj().T)) <= atol)


def min_eigenvalue(rho: np.ndarray, atol: float = HERMITICITY_ATOL) -> float:
    """Smallest eigenvalue of a Hermitian matrix.

    The 2x2 case uses the quadratic formula, which is numerically stable.
    From 3x3 up this goes through LAPACK: characteristic-polynomial roots
    lose ~sqrt(eps) accuracy at degenerate eigenvalues (every projector has
    one), which would break the guarantee that pure states scan as
    non-negative to 1e-12.
    """
    rho = np.asarray(rho, dtype=complex)
    if not is_hermitian(rho, atol=max(atol, 1e-9)):
        raise NotHermitian("min_eigenvalue requires a Hermitian matrix")
    d = rho.shape[0]
    if d == 1:
        return float(rho[0, 0].real)
    if d == 2:
        tr = rho[0, 0].real + rho[1, 1].real
        diff = rho[0, 0].real - rho[1, 1].real
        disc = np.sqrt(diff * diff + 4.0 * abs(rho[0, 1]) ** 2)
        return float(0.5 * (tr - disc))
    return float(np.linalg.eigvalsh(rho)[0])

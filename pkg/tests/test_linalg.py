import numpy as np
import pytest

from nmqj import linalg
from nmqj.errors import DimensionMismatch, NotHermitian, ZeroNorm

SQRT13 = np.sqrt(13.0)


def test_normalize_scales_by_norm():
    v = linalg.normalize(np.array([3.0, 2.0]))
    assert np.allclose(v, np.array([3.0, 2.0]) / SQRT13, atol=1e-15)


def test_normalize_identity_on_unit_vector():
    v = linalg.normalize(np.array([0.0, 1.0]))
    assert np.array_equal(v, np.array([0.0 + 0j, 1.0 + 0j]))


def test_normalize_complex_amplitude():
    v = linalg.normalize(np.array([1.0 + 1.0j, 0.0]))
    assert np.allclose(v, np.array([(1 + 1j) / np.sqrt(2), 0.0]), atol=1e-15)


def test_normalize_zero_norm_raises():
    with pytest.raises(ZeroNorm):
        linalg.normalize(np.array([1e-15, 0.0]))


def test_outer_basis_projector():
    assert np.array_equal(
        linalg.outer(np.array([1.0, 0.0])), np.array([[1, 0], [0, 0]], dtype=complex)
    )


def test_outer_mixed_amplitudes():
    v = np.array([3.0, 2.0]) / SQRT13
    expected = np.array([[9, 6], [6, 4]], dtype=complex) / 13.0
    assert np.allclose(linalg.outer(v), expected, atol=1e-15)


def test_outer_hermitian_off_diagonals():
    v = np.array([1.0, 1.0j]) / np.sqrt(2)
    expected = np.array([[0.5, -0.5j], [0.5j, 0.5]])
    assert np.allclose(linalg.outer(v), expected, atol=1e-15)


SIGMA_PP = np.array([[1, 0], [0, 0]], dtype=complex)  # sigma_+ sigma_-


def test_expectation_excited_population():
    v = np.array([3.0, 2.0]) / SQRT13
    assert linalg.expectation(v, SIGMA_PP) == pytest.approx(9.0 / 13.0, abs=1e-15)


def test_expectation_dark_state():
    assert linalg.expectation(np.array([0.0, 1.0]), SIGMA_PP) == 0.0


def test_expectation_identity_is_norm():
    rng = np.random.default_rng(7)
    for _ in range(20):
        v = linalg.normalize(rng.normal(size=3) + 1j * rng.normal(size=3))
        assert linalg.expectation(v, np.eye(3)) == pytest.approx(1.0, abs=1e-12)


def test_expectation_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        linalg.expectation(np.array([1.0, 0.0, 0.0]), SIGMA_PP)


def test_expectation_equals_jump_norm_squared():
    # <v|C^dag C|v> = ||C v||^2 for random states and operators
    rng = np.random.default_rng(11)
    for d in (2, 3):
        for _ in range(25):
            v = linalg.normalize(rng.normal(size=d) + 1j * rng.normal(size=d))
            c = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            lhs = linalg.expectation(v, c.conj().T @ c)
            assert lhs.imag == pytest.approx(0.0, abs=1e-12)
            assert lhs.real == pytest.approx(np.linalg.norm(c @ v) ** 2, rel=1e-12)


def test_phase_equal_global_phase():
    for theta in (0.0, 0.7, np.pi, 4.2):
        u = np.array([1.0, 0.0], dtype=complex)
        v = np.array([np.exp(1j * theta), 0.0])
        assert linalg.phase_equal(u, v)


def test_phase_equal_orthogonal():
    assert not linalg.phase_equal(np.array([1.0, 0.0]), np.array([0.0, 1.0]))


def test_phase_equal_nearby_state():
    u = np.array([3.0, 2.0]) / SQRT13
    v = linalg.normalize(np.array([3.0, 2.0001]))
    assert linalg.phase_equal(u, v, tol=1e-6)


def test_phase_equal_symmetric_reflexive():
    rng = np.random.default_rng(3)
    for _ in range(20):
        u = linalg.normalize(rng.normal(size=2) + 1j * rng.normal(size=2))
        v = linalg.normalize(rng.normal(size=2) + 1j * rng.normal(size=2))
        assert linalg.phase_equal(u, u, tol=0.0)
        assert linalg.phase_equal(u, v) == linalg.phase_equal(v, u)


def test_min_eigenvalue_maximally_mixed():
    assert linalg.min_eigenvalue(np.eye(2) / 2) == pytest.approx(0.5, abs=1e-15)


def test_min_eigenvalue_pure_basis_state():
    assert linalg.min_eigenvalue(np.diag([1.0, 0.0, 0.0])) == pytest.approx(0.0, abs=1e-15)


def test_min_eigenvalue_slightly_negative():
    rho = np.array([[0.6, 0.5], [0.5, 0.4]], dtype=complex)
    expected = 0.5 * (1.0 - np.sqrt(1.04))  # 2x2 eigenvalue formula
    assert linalg.min_eigenvalue(rho) == pytest.approx(expected, abs=1e-15)
    assert expected == pytest.approx(-0.009901951359278449)


def test_min_eigenvalue_not_hermitian():
    with pytest.raises(NotHermitian):
        linalg.min_eigenvalue(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_min_eigenvalue_matches_lapack():
    rng = np.random.default_rng(19)
    for d in (2, 3):
        for _ in range(50):
            a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            rho = a @ a.conj().T
            assert linalg.min_eigenvalue(rho) == pytest.approx(
                np.linalg.eigvalsh(rho)[0], rel=1e-10, abs=1e-10
            )


def test_min_eigenvalue_of_projector_nonnegative():
    rng = np.random.default_rng(23)
    for _ in range(30):
        v = linalg.normalize(rng.normal(size=3) + 1j * rng.normal(size=3))
        assert linalg.min_eigenvalue(linalg.outer(v)) >= -1e-12


def test_registry_average_hermitian_unit_trace():
    rng = np.random.default_rng(29)
    for _ in range(10):
        counts = rng.integers(0, 100, size=4)
        counts[0] += 1
        n = counts.sum()
        rho = np.zeros((3, 3), dtype=complex)
        for c in counts:
            v = linalg.normalize(rng.normal(size=3) + 1j * rng.normal(size=3))
            rho += (c / n) * linalg.outer(v)
        assert linalg.is_hermitian(rho, atol=1e-12)
        assert rho.trace().real == pytest.approx(1.0, abs=1e-12)

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmkit.errors import DimensionMismatch, NonHermitian, NonSquare
from qmkit.numeric import (check_hermitian, evolve_unitary, find_roots, hermitian_eig,
                           is_hermitian, kron, partial_trace)


def random_hermitian(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return A + A.conj().T


def test_hermitian_eig_reconstructs():
    H = random_hermitian(6, 0)
    eig = hermitian_eig(H)
    assert np.all(np.diff(eig.values) >= 0)
    V = eig.vectors
    assert np.allclose(V.conj().T @ V, np.eye(6), atol=1e-12)
    assert np.allclose(V @ np.diag(eig.values) @ V.conj().T, H, atol=1e-12)


def test_non_hermitian_and_non_square_rejected():
    with pytest.raises(NonHermitian):
        hermitian_eig(np.array([[0, 1], [0, 0]]))
    with pytest.raises(NonSquare):
        check_hermitian(np.zeros((2, 3)))
    assert is_hermitian(np.diag([1.0, 2.0]))


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10_000), st.floats(-5, 5))
def test_evolution_is_unitary_and_composes(n, seed, t):
    H = random_hermitian(n, seed)
    U = evolve_unitary(H, t)
    assert np.allclose(U.conj().T @ U, np.eye(n), atol=1e-10)
    assert np.allclose(evolve_unitary(H, t / 2) @ evolve_unitary(H, t / 2), U, atol=1e-10)


def test_kron_first_factor_is_slow_index():
    A = np.diag([1.0, 2.0])
    B = np.diag([10.0, 20.0, 30.0])
    assert np.allclose(np.diag(kron(A, B)), [10, 20, 30, 20, 40, 60])


def test_partial_trace_of_product_state():
    rng = np.random.default_rng(3)
    a = rng.normal(size=2) + 1j * rng.normal(size=2)
    b = rng.normal(size=3) + 1j * rng.normal(size=3)
    a, b = a / np.linalg.norm(a), b / np.linalg.norm(b)
    rho = np.outer(np.kron(a, b), np.kron(a, b).conj())
    assert np.allclose(partial_trace(rho, 2, 3, "A"), np.outer(a, a.conj()))
    assert np.allclose(partial_trace(rho, 2, 3, "B"), np.outer(b, b.conj()))
    with pytest.raises(DimensionMismatch):
        partial_trace(rho, 3, 3)


def test_find_roots_of_sine():
    roots = find_roots(np.sin, 0.5, 10.0)
    assert np.allclose(roots, [np.pi, 2 * np.pi, 3 * np.pi], atol=1e-11)


def test_find_roots_ignores_touching_zeros():
    assert find_roots(lambda x: (x - 1.0) ** 2, 0.0, 2.0, grid=100) == []


def test_find_roots_needs_two_points():
    with pytest.raises(ValueError):
        find_roots(np.sin, 0, 1, grid=1)

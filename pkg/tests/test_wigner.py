import warnings

import numpy as np
import pytest

from qmkit.errors import DomainError, GridMismatch, NonHermitianInput, WindowTooSmall
from qmkit.wigner import (GridState, box_wigner, gaussian_purity, gaussian_wavefunction,
                          gaussian_wigner, inverse_wigner, phase_grids, purity,
                          sample_on_grid, semiclassical_partition, thermal_oscillator_wigner,
                          thermal_purity_oracle, two_slit_wigner, weyl_count,
                          weyl_expectation, wigner_transform)

X_GRID = np.linspace(-15, 15, 256, endpoint=False)


def gaussian_state(x0=1.0, p0=0.7, sigma=1.2):
    return GridState.from_wavefunction(X_GRID, gaussian_wavefunction(X_GRID, x0, p0, sigma))


def test_phase_grids_shape_and_spacing():
    X, P = phase_grids(X_GRID)
    dx = X_GRID[1] - X_GRID[0]
    assert len(X) == 512 and len(P) == 256
    assert np.isclose(X[1] - X[0], dx / 2)
    assert np.isclose(P[1] - P[0], np.pi / (256 * dx))
    with pytest.raises(GridMismatch):
        phase_grids(X_GRID[:-1])


def test_gaussian_matches_closed_form():
    s = 1.2
    W = wigner_transform(gaussian_state(sigma=s))
    XX, PP = W.mesh()
    ref = gaussian_wigner(XX, PP, 1.0, 0.7, s, 1 / (2 * s))
    assert np.max(np.abs(W.W - ref)) < 1e-10
    assert W.norm() == pytest.approx(1.0, abs=1e-12)
    assert purity(W) == pytest.approx(1.0, abs=1e-10)


def test_marginals():
    st = gaussian_state()
    W = wigner_transform(st)
    # position marginal on the original grid points equals the density
    assert np.allclose(W.position_marginal()[::2], st.density(), atol=1e-12)
    p = W.momentum_marginal()
    assert np.sum(p) * W.dP / (2 * np.pi) == pytest.approx(1.0, abs=1e-10)


def test_mixed_state_round_trip_and_purity():
    a = gaussian_wavefunction(X_GRID, -3, 0.5, 1.0)
    b = gaussian_wavefunction(X_GRID, 3, -0.5, 1.0)
    dx = X_GRID[1] - X_GRID[0]
    rho = 0.5 * (np.outer(a, a.conj()) + np.outer(b, b.conj()))
    st = GridState.from_density(X_GRID, rho)
    W = wigner_transform(st)
    assert np.max(np.abs(inverse_wigner(W).rho - st.rho)) < 1e-12
    assert purity(W) == pytest.approx(st.purity(), abs=1e-12)
    overlap = abs(np.sum(a.conj() * b) * dx) ** 2
    assert st.purity() == pytest.approx(0.5 + 0.5 * overlap, abs=1e-12)
    assert np.trace(st.rho).real * dx == pytest.approx(1.0)


def test_weyl_expectations():
    W = wigner_transform(gaussian_state(x0=1.0, p0=0.7))
    assert weyl_expectation(lambda X, P: X, W) == pytest.approx(1.0, abs=1e-10)
    assert weyl_expectation(lambda X, P: P, W) == pytest.approx(0.7, abs=1e-10)
    with pytest.raises(GridMismatch):
        weyl_expectation(np.zeros((3, 3)), W)


def test_input_checks():
    st = gaussian_state()
    with pytest.raises(NonHermitianInput):
        wigner_transform(GridState(st.x, st.rho + 0.1j * np.eye(len(st.x))))
    wide = GridState.from_wavefunction(X_GRID, gaussian_wavefunction(X_GRID, 0, 0, 8.0))
    with pytest.raises(WindowTooSmall):
        wigner_transform(wide)


def test_box_closed_form_against_transform():
    L, n = 1.0, 2
    x = np.linspace(0, L, 512, endpoint=False)
    psi = np.sqrt(2 / L) * np.sin(n * np.pi * x / L)
    W = wigner_transform(GridState.from_wavefunction(x, psi), check_edges=False)
    box = box_wigner(n, L)
    mask = (W.X > 0.05) & (W.X < 0.45)
    XX, PP = np.meshgrid(W.X[mask], W.P, indexing="ij")
    assert np.max(np.abs(W.W[mask] - box.total(XX, PP))) < 1e-3 * np.max(np.abs(W.W))
    with pytest.raises(DomainError):
        box.total(0.6, 0.0)


def test_two_slit_closed_form_and_negativity():
    x = np.linspace(-30, 30, 512, endpoint=False)
    ts = two_slit_wigner(12.0, 1.0, x)
    psi = gaussian_wavefunction(x, 6, 0, 1.0) + gaussian_wavefunction(x, -6, 0, 1.0)
    W = wigner_transform(GridState.from_wavefunction(x, psi))
    assert np.max(np.abs(W.W - ts.wigner.W)) < 1e-6
    assert ts.wigner.W.min() < -0.5 * ts.wigner.W.max()
    assert np.allclose(ts.momentum_marginal(ts.fringe_zeros()), 0, atol=1e-12)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        two_slit_wigner(1.0, 1.0, x)
    assert caught


def test_thermal_state_limits():
    th = thermal_oscillator_wigner(1.0, 1.0, 50.0)
    X = np.linspace(-8, 8, 401)
    P = np.linspace(-8, 8, 401)
    W = sample_on_grid(th, X, P)
    # deep cold limit is the oscillator ground state
    ref = sample_on_grid(lambda a, b: gaussian_wigner(a, b, 0, 0, np.sqrt(0.5), np.sqrt(0.5)), X, P)
    assert np.max(np.abs(W.W - ref.W)) < 1e-10
    assert W.norm() == pytest.approx(1.0, abs=1e-8)
    assert thermal_purity_oracle(1.0) == pytest.approx(np.tanh(0.5))
    with pytest.raises(DomainError):
        thermal_oscillator_wigner(1.0, 1.0, -1.0)


def test_gaussian_purity_formula():
    assert gaussian_purity(1.0, 0.5) == 1.0
    assert gaussian_purity(2.0, 0.5) == 0.5


def test_weyl_count_and_partition():
    X = np.linspace(-5, 5, 1001)
    P = np.linspace(-5, 5, 1001)
    H = lambda x, p: 0.5 * (x ** 2 + p ** 2)
    assert weyl_count(H, 5.0, X, P) == pytest.approx(5.0, rel=1e-3)
    with pytest.raises(WindowTooSmall):
        weyl_count(H, 20.0, X, P)
    Z = semiclassical_partition(H, 0.1, np.linspace(-40, 40, 801), np.linspace(-40, 40, 801))
    assert Z == pytest.approx(10.0, rel=1e-6)


def test_interference_term_carries_no_weight():
    x = np.linspace(-30, 30, 512, endpoint=False)
    ts = two_slit_wigner(12.0, 1.0, x)
    XX, PP = ts.wigner.mesh()
    fringe = np.cos(PP * 12.0) * gaussian_wigner(XX, PP, 0, 0, 1.0, 0.5)
    # the weight is exp(-sigma_p^2 d^2 / 2), negligible for separated slits
    assert np.sum(fringe) * ts.wigner.cell == pytest.approx(np.exp(-18.0), rel=1e-6)

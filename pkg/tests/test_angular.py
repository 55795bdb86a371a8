import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmkit.angular import (add_angular_momentum, build_spin_rep, cg_from_3j, euler_rotation,
                           j_squared_product_basis, rotation_closed_form, rotation_matrix,
                           spin_orbit_matrix, su2_axis_angle, twice, wigner_3j, wigner_eckart_g,
                           zeeman_hamiltonian, zeeman_spectrum)
from qmkit.errors import InvalidJ, NonUnitAxis, NotSU2, TriangleViolation

half_integers = st.integers(0, 8).map(lambda n: n / 2)


def test_twice_validates():
    assert twice(1.5) == 3
    assert twice(0) == 0
    with pytest.raises(InvalidJ):
        twice(0.3)
    with pytest.raises(InvalidJ):
        twice(-1)


@settings(max_examples=12, deadline=None)
@given(half_integers)
def test_spin_algebra(j):
    r = build_spin_rep(j)
    comm = r.Jx @ r.Jy - r.Jy @ r.Jx
    assert np.allclose(comm, 1j * r.Jz, atol=1e-12)
    assert np.allclose(r.casimir(), j * (j + 1) * np.eye(r.dim), atol=1e-12)
    assert np.allclose(np.diag(r.Jz).real, r.m_values)
    # raising operator has non-negative entries just above the diagonal
    assert np.all(np.diag(r.Jplus, 1).real >= 0)


def test_spin_half_is_pauli_over_two():
    r = build_spin_rep(0.5)
    assert np.allclose(2 * r.Jx, [[0, 1], [1, 0]])
    assert np.allclose(2 * r.Jy, [[0, -1j], [1j, 0]])
    assert np.allclose(2 * r.Jz, [[1, 0], [0, -1]])


@pytest.mark.parametrize("twoj", [1, 2])
def test_closed_form_rotations(twoj):
    rng = np.random.default_rng(twoj)
    rep = build_spin_rep(twoj / 2)
    for _ in range(10):
        n = rng.normal(size=3)
        n /= np.linalg.norm(n)
        phi = rng.uniform(0, 4 * np.pi)
        assert np.allclose(rotation_matrix(rep, n, phi), rotation_closed_form(twoj, n, phi),
                           atol=1e-12)


def test_spin_half_full_turn_is_minus_one():
    rep = build_spin_rep(0.5)
    assert np.allclose(rotation_matrix(rep, [0, 0, 1], 2 * np.pi), -np.eye(2))
    assert np.allclose(rotation_matrix(build_spin_rep(1), [0, 0, 1], 2 * np.pi), np.eye(3))


def test_axis_angle_round_trip():
    rng = np.random.default_rng(5)
    rep = build_spin_rep(0.5)
    for _ in range(20):
        n = rng.normal(size=3)
        n /= np.linalg.norm(n)
        phi = rng.uniform(0.1, 2 * np.pi - 0.1)
        m, psi = su2_axis_angle(rotation_matrix(rep, n, phi))
        assert np.allclose(m, n, atol=1e-10) and abs(psi - phi) < 1e-10


def test_axis_angle_rejects_bad_input():
    with pytest.raises(NotSU2):
        su2_axis_angle(np.diag([1, 2]))
    with pytest.raises(NonUnitAxis):
        rotation_matrix(build_spin_rep(0.5), [0, 0, 0], 1.0)


def test_euler_rotation_matches_product():
    rep = build_spin_rep(1)
    R = euler_rotation(rep, 0.3, 1.1, -0.4)
    ref = (rotation_matrix(rep, [0, 0, 1], 0.3) @ rotation_matrix(rep, [0, 1, 0], 1.1)
           @ rotation_matrix(rep, [0, 0, 1], -0.4))
    assert np.allclose(R, ref, atol=1e-12)


@settings(max_examples=15, deadline=None)
@given(half_integers, half_integers)
def test_cg_matrix_is_orthogonal_and_diagonalizes_j2(j1, j2):
    d = add_angular_momentum(j1, j2)
    n = len(d.labels)
    assert n == (twice(j1) + 1) * (twice(j2) + 1)
    assert np.allclose(d.T.T @ d.T, np.eye(n), atol=1e-12)
    J2 = j_squared_product_basis(d)
    jj = np.array([t / 2 * (t / 2 + 1) for t, _ in d.labels])
    assert np.allclose(d.T.T @ J2 @ d.T, np.diag(jj), atol=1e-10)


def test_cg_head_sign_and_3j_agreement():
    # columns agree with the Racah 3j formula once the head convention is applied
    for j1, j2 in [(1, 0.5), (1.5, 1), (2, 1), (1, 1)]:
        d = add_angular_momentum(j1, j2)
        m1s = [(twice(j1) - 2 * a) / 2 for a in range(twice(j1) + 1)]
        m2s = [(twice(j2) - 2 * b) / 2 for b in range(twice(j2) + 1)]
        ref = np.array([[cg_from_3j(j1, j2, tj / 2, m1, m2, tm / 2) for tj, tm in d.labels]
                        for m1 in m1s for m2 in m2s])
        for tj in d.multiplets:
            cols = [i for i, (t, _) in enumerate(d.labels) if t == tj]
            a, b = d.T[:, cols], ref[:, cols]
            s = np.sign(np.sum(a * b))
            assert np.allclose(s * a, b, atol=1e-12)


def test_wigner_3j_known_value_and_zero():
    # (1 1 0; 0 0 0) = -1/sqrt(3)
    assert abs(wigner_3j(1, 1, 0, 0, 0, 0) + 1 / np.sqrt(3)) < 1e-14
    assert wigner_3j(1, 1, 3, 0, 0, 0) == 0.0


def test_lande_projection_factors():
    gL, gS = wigner_eckart_g(1.5, 1, 0.5)
    assert abs(gL - 2 / 3) < 1e-15 and abs(gS - 1 / 3) < 1e-15
    with pytest.raises(TriangleViolation):
        wigner_eckart_g(3, 1, 0.5)


def test_spin_orbit_eigenvalues():
    vals = np.sort(np.linalg.eigvalsh(spin_orbit_matrix(1, 0.5)))
    assert np.allclose(vals, [-1, -1, 0.5, 0.5, 0.5, 0.5])


def test_weak_field_splitting_follows_lande_factor():
    v, g, h = 1.0, 2.0, 1e-6
    E = zeeman_spectrum(v, g, [h])[0]
    upper = np.sort(E[E > 0])
    gj = 1 + (g - 1) * (1.5 * 2.5 + 0.75 - 2) / (2 * 1.5 * 2.5)
    slopes = (upper - v / 2) / h
    assert np.allclose(slopes, gj * np.array([-1.5, -0.5, 0.5, 1.5]), rtol=1e-5)


def test_zeeman_hamiltonian_is_real_symmetric():
    H = zeeman_hamiltonian(0.7, 2.0, 0.3)
    assert np.allclose(H, H.T)


@pytest.mark.parametrize("l", [1, 2, 3])
def test_spin_orbit_coefficient_magnitudes(l):
    # |<m_l, m_s | l+1/2, m>| = sqrt((l +- m + 1/2) / (2l + 1)); signs are convention
    d = add_angular_momentum(l, 0.5)
    top = twice(l + 0.5)
    for col, (tj, tm) in enumerate(d.labels):
        if tj != top:
            continue
        m = tm / 2
        for row, (ml, ms) in enumerate((a, b) for a in range(l, -l - 1, -1) for b in (0.5, -0.5)):
            if ml + ms != m:
                continue
            ref = np.sqrt((l + 2 * ms * m + 0.5) / (2 * l + 1))
            assert abs(abs(d.T[row, col]) - ref) < 1e-12

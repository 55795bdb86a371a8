import numpy as np
import pytest
import scipy.integrate
import scipy.special

from qmkit.errors import DomainError
from qmkit.spherical import (ShieldedWell, born_dcs, born_phase_shift, cross_sections,
                             default_lmax, double_factorial, free_green, hard_sphere_phase_shift,
                             hydrogen_levels, interior_log_derivative, legendre_p,
                             phase_shift_set, regularized_delta_ueff, resonance_phase,
                             resonance_sigma, scattering_length, shielded_resonances,
                             sph_j_all, sph_n_all, spherical_bessel, unwrap_phase_shifts,
                             well_phase_shift, wigner_delay)


@pytest.mark.parametrize("x", [1e-3, 0.5, 3.0, 40.0, 250.0])
def test_bessel_against_scipy(x):
    lmax = 30
    J = sph_j_all(lmax, x)[:, 0]
    N = sph_n_all(lmax, x)[:, 0]
    for l in range(lmax + 1):
        ref_j = scipy.special.spherical_jn(l, x)
        ref_n = -scipy.special.spherical_yn(l, x)
        assert abs(J[l] - ref_j) <= 1e-12 * max(abs(ref_j), 1e-300) + 1e-300
        if np.isfinite(ref_n):
            assert abs(N[l] - ref_n) <= 1e-12 * abs(ref_n)


def test_small_argument_limit():
    x = 1e-4
    J = sph_j_all(6, x)[:, 0]
    for l in range(7):
        assert J[l] == pytest.approx(x ** l / double_factorial(2 * l + 1), rel=1e-7)


def test_hankel_wronskian_and_derivatives():
    x = np.array([0.7, 5.0, 20.0])
    for l in range(4):
        j, n, hp, hm, dj, dn, dhp, dhm = spherical_bessel(l, x, derivative=True)
        # j y' - y j' = 1/x^2 and n = -y
        assert np.allclose(j * dn - n * dj, -1 / x ** 2, rtol=1e-12)
        assert np.allclose(hp, n + 1j * j)
        ref = scipy.special.spherical_jn(l, x, derivative=True)
        assert np.allclose(dj, ref, rtol=1e-12)
    with pytest.raises(DomainError):
        spherical_bessel(0, 0.0)


def test_legendre_matches_scipy():
    x = np.linspace(-1, 1, 9)
    for l in range(8):
        assert np.allclose(legendre_p(l, x), scipy.special.eval_legendre(l, x))


def _radial_phase(V, a, E, l, m=1.0):
    """Phase shift from direct integration of the radial equation for a square well."""
    k = np.sqrt(2 * m * E)
    r0 = 1e-6

    def rhs(r, y):
        u, du = y
        return [du, (l * (l + 1) / r ** 2 + 2 * m * (V - E)) * u]

    sol = scipy.integrate.solve_ivp(rhs, [r0, a], [r0 ** (l + 1), (l + 1) * r0 ** l],
                                    rtol=1e-12, atol=1e-14)
    u, du = sol.y[:, -1]
    kl = du / u - 1 / a  # R'/R from u = r R
    j, n, _, _, dj, dn, _, _ = spherical_bessel(l, k * a, derivative=True)
    return np.arctan(-(kl * j - k * dj) / (kl * n - k * dn))


@pytest.mark.parametrize("V,E,l", [(-3.0, 1.0, 0), (-3.0, 1.0, 2), (2.0, 0.5, 1), (2.0, 4.0, 0)])
def test_well_phase_shift_against_ode(V, E, l):
    assert well_phase_shift(ShieldedWell(1.0, V), E, l) == pytest.approx(
        _radial_phase(V, 1.0, E, l), abs=1e-8)


def test_hard_sphere_s_wave():
    assert hard_sphere_phase_shift(0, 0.7) == pytest.approx(-0.7)
    assert well_phase_shift(ShieldedWell(1.0, np.inf), 0.5 * 0.7 ** 2, 0) == pytest.approx(-0.7)


def test_interior_log_derivative_at_floor():
    assert interior_log_derivative(ShieldedWell(2.0, 1.0), 1.0, 3) == pytest.approx(1.5)


def test_born_phase_shift_weak_well():
    V, a, E = 1e-3, 1.0, 0.02
    exact = well_phase_shift(ShieldedWell(a, V), E, 0)
    born, valid = born_phase_shift(lambda r: V if r < a else 0.0, 0, E, rmax=a, with_flag=True)
    assert valid and born == pytest.approx(exact, rel=1e-2)


def test_born_dcs_soft_sphere():
    V0, a, E = 0.1, 1.0, 2.0
    k = 2.0
    theta = np.array([0.3, 1.0, 2.5])
    q = 2 * k * np.sin(theta / 2)
    Uq = 4 * np.pi * V0 * (np.sin(q * a) - q * a * np.cos(q * a)) / q ** 3
    ref = (1 / (2 * np.pi)) ** 2 * Uq ** 2
    assert np.allclose(born_dcs(lambda r: V0 if r < a else 0.0, E, theta, rmax=a), ref, rtol=1e-8)


def test_partial_cross_sections_and_unitarity_bound():
    ps = phase_shift_set(2.0, [np.pi / 2, 0.3, 0.0])
    cs = cross_sections(ps)
    assert cs.partial[0] == pytest.approx(4 * np.pi / ps.k ** 2)
    assert cs.total == pytest.approx(cs.partial.sum())
    assert default_lmax(10.2) == 19


def test_resonance_line_shapes():
    E = np.linspace(0.5, 1.5, 5)
    d = resonance_phase(0.0, 1.0, 0.1, E)
    assert np.all(np.diff(d) > 0) and d[2] == pytest.approx(np.pi / 2)
    assert resonance_sigma(0.0, 1.0, 0.1, 1.0, 0, 2.0) == pytest.approx(np.pi)


def test_unwrap_removes_pi_jumps():
    d = np.array([1.4, 1.5, -1.6, -1.5])
    out = unwrap_phase_shifts(d)
    assert np.all(np.abs(np.diff(out)) < 0.5)


def test_scattering_length():
    assert scattering_length(ShieldedWell(1.5, np.inf)).a_s == 1.5
    V, a = -0.5, 1.0
    al = np.sqrt(-2 * V)
    res = scattering_length(ShieldedWell(a, V))
    assert res.a_s == pytest.approx(a - np.tan(al * a) / al)
    deep = scattering_length(ShieldedWell(1.0, -2.0))
    assert deep.a_s > 1 and deep.E_bound < 0


def test_shielded_resonances_narrow_with_barrier():
    widths = []
    for U in (20.0, 40.0, 80.0):
        well = ShieldedWell(1.0, 0.0, U)
        res = shielded_resonances(well, 0, (1.0, 8.0))
        assert res
        widths.append(res[0].gamma_r)
        tau = wigner_delay(well, res[0].E_r, 0)
        assert tau == pytest.approx(4 / res[0].gamma_r, rel=0.05)
    assert widths[0] > widths[1] > widths[2]


def test_free_green_functions():
    E, r = 0.5, np.array([0.5, 2.0])
    k = 1.0
    assert np.allclose(free_green(3, E, r), -np.exp(1j * k * r) / (2 * np.pi * r))
    # far field of the 2D function
    far = free_green(2, E, 200.0)
    asym = -1j / 2 * np.sqrt(2 / (np.pi * k * 200.0)) * np.exp(1j * (k * 200.0 - np.pi / 4))
    assert abs(far - asym) < 1e-3 * abs(asym)
    with pytest.raises(DomainError):
        free_green(4, E, 1.0)


def test_regularized_delta_weak_limit():
    assert regularized_delta_ueff(1e-8, 50.0, 1.0) == pytest.approx(1e-8, rel=1e-6)
    with pytest.raises(DomainError):
        regularized_delta_ueff(1.0, 0.5, 1.0)


def test_hydrogen_levels():
    assert hydrogen_levels(1.0, 1.0, 0, 1) == -0.5
    assert hydrogen_levels(1.0, 1.0, 1, 1) == hydrogen_levels(1.0, 1.0, 0, 2)


def test_born_validity_rule_on_soft_spheres():
    for V in (1e-3, 1e-2, 0.05, 0.2):
        for E in (0.05, 0.5, 2.0):
            for l in (0, 1):
                born, valid = born_phase_shift(lambda r: V if r < 1.0 else 0.0, l, E,
                                               rmax=1.0, with_flag=True)
                if valid:
                    exact = well_phase_shift(ShieldedWell(1.0, V), E, l)
                    assert abs(born - exact) < 0.1 * abs(exact)

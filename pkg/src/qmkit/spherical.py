"""Spherical scattering: Bessel machinery, phase shifts, cross sections,
resonances, Born approximations and free Green functions.

Sign convention: n_l is the spherical Neumann function with
n_0(x) = +cos(x)/x, so n_l = -y_l in the more common notation, and the
outgoing/incoming Hankel functions are h_l^{+-} = n_l +- i j_l. Log
derivatives k_l refer to the radial function R(r); the u = rR convention
differs by 1/a.
"""

from dataclasses import dataclass

import numpy as np
import scipy.integrate
import scipy.special

from .errors import DomainError, IntegralDiverged


# ------------------------------------------------------------ special functions

def _as_array(x):
    return np.atleast_1d(np.asarray(x, dtype=float))


def sph_j_all(lmax, x):
    """j_0..j_lmax at x (array), shape (lmax+1, len(x)).

    Uses upward recurrence where x > lmax and Miller's downward recurrence
    elsewhere, normalized on whichever of j_0, j_1 is larger.
    """
    x = _as_array(x)
    out = np.zeros((lmax + 1, x.size))
    zero = x == 0
    xs = np.where(zero, 1.0, x)
    j0 = np.sin(xs) / xs
    j1 = np.sin(xs) / xs ** 2 - np.cos(xs) / xs
    up = xs > lmax
    if np.any(up):
        xu = xs[up]
        a, b = j0[up], j1[up]
        out[0, up] = a
        if lmax >= 1:
            out[1, up] = b
        for l in range(1, lmax):
            a, b = b, (2 * l + 1) / xu * b - a
            out[l + 1, up] = b
    down = ~up
    if np.any(down):
        xd = xs[down]
        top = int(lmax + 30 + np.sqrt(40 * max(lmax, xd.max(), 1.0)))
        fp = np.zeros(xd.size)
        f = np.full(xd.size, 1e-300)
        vals = np.zeros((lmax + 1, xd.size))
        for l in range(top, 0, -1):
            fm = (2 * l + 1) / xd * f - fp
            fp, f = f, fm
            if l - 1 <= lmax:
                vals[l - 1] = f
            big = np.abs(f) > 1e200
            if np.any(big):
                f[big] /= 1e200
                fp[big] /= 1e200
                vals[:, big] /= 1e200
        # fp now holds the unnormalized j_1, f the unnormalized j_0
        use0 = np.abs(j0[down]) >= np.abs(j1[down])
        scale = np.where(use0, j0[down] / f, j1[down] / np.where(fp == 0, 1, fp))
        out[:, down] = vals * scale
    if np.any(zero):
        out[:, zero] = 0.0
        out[0, zero] = 1.0
    return out


def sph_n_all(lmax, x):
    """n_0..n_lmax with n_0 = cos(x)/x, by upward recurrence."""
    x = _as_array(x)
    if np.any(x <= 0):
        raise DomainError("n_l is singular for x <= 0")
    out = np.zeros((lmax + 1, x.size))
    a = np.cos(x) / x
    b = np.cos(x) / x ** 2 + np.sin(x) / x
    out[0] = a
    if lmax >= 1:
        out[1] = b
    with np.errstate(over="ignore", invalid="ignore"):
        for l in range(1, lmax):
            a, b = b, (2 * l + 1) / x * b - a
            out[l + 1] = b
    return out


def _derivs(f, x):
    """Derivatives from f_l' = f_{l-1} - (l+1) f_l / x and f_0' = -f_1."""
    d = np.zeros_like(f)
    lmax = f.shape[0] - 1
    if lmax == 0:
        raise ValueError("need at least l = 1 for derivatives")
    d[0] = -f[1]
    for l in range(1, lmax + 1):
        d[l] = f[l - 1] - (l + 1) * f[l] / x
    return d


def spherical_bessel(l, x, derivative=False):
    """(j_l, n_l, h_l^+, h_l^-) at x > 0, optionally with derivatives."""
    x = _as_array(x)
    if np.any(x <= 0):
        raise DomainError("x must be positive for the singular family")
    J = sph_j_all(l + 1, x)
    N = sph_n_all(l + 1, x)
    j, n = J[l], N[l]
    res = [j, n, n + 1j * j, n - 1j * j]
    if derivative:
        dj, dn = _derivs(J, x)[l], _derivs(N, x)[l]
        res += [dj, dn, dn + 1j * dj, dn - 1j * dj]
    if np.ndim(x) and x.size == 1:
        res = [r[0] for r in res]
    return tuple(res)


def legendre_p(l, x):
    x = np.asarray(x, dtype=float)
    p0, p1 = np.ones_like(x), x
    if l == 0:
        return p0
    for k in range(1, l):
        p0, p1 = p1, ((2 * k + 1) * x * p1 - k * p0) / (k + 1)
    return p1


def double_factorial(n):
    return float(scipy.special.factorial2(n, exact=True)) if n > 0 else 1.0


# ------------------------------------------------------------ shielded well

@dataclass(frozen=True)
class ShieldedWell:
    """V(r) = V for r < a plus a shell U delta(r - a)."""
    a: float
    V: float
    U: float = 0.0
    m: float = 1.0


def interior_log_derivative(well, E, l):
    """k_l = R'/R just outside the shell (R convention).

    The interior solution is regular at the origin: j_l(alpha r) above the
    floor, i_l(kappa r) below it, r^l exactly at E = V. The shell adds 2mU.
    """
    a, m = well.a, well.m
    boost = 2 * m * well.U
    if np.isinf(well.V) and well.V > 0:
        return np.inf
    d = E - well.V
    if d > 0:
        al = np.sqrt(2 * m * d)
        J = sph_j_all(l + 1, al * a)[:, 0]
        with np.errstate(divide="ignore"):
            if l == 0:
                return -al * J[1] / J[0] + boost
            return al * J[l - 1] / J[l] - (l + 1) / a + boost
    if d < 0:
        ka = np.sqrt(-2 * m * d)
        x = ka * a
        # i_l' = i_{l+1} + (l/x) i_l, ratio via exponentially scaled Bessel I
        ratio = scipy.special.ive(l + 1.5, x) / scipy.special.ive(l + 0.5, x)
        return ka * ratio + l / a + boost
    return l / a + boost


def interior_log_derivative_u(well, E):
    """s-wave log derivative in the u = rR convention, alpha cot(alpha a) + 2mU."""
    return interior_log_derivative(well, E, 0) + 1.0 / well.a


def phase_shift(k_l, l, E, a, m=1.0):
    """Phase shift from matching at r = a, reduced to (-pi/2, pi/2]."""
    k = np.sqrt(2 * m * E)
    j, n, _, _, dj, dn, _, _ = spherical_bessel(l, k * a, derivative=True)
    if np.isinf(k_l):
        t = -j / n
    else:
        t = -(k_l * j - k * dj) / (k_l * n - k * dn)
    d = float(np.arctan(t))
    return d


def well_phase_shift(well, E, l):
    return phase_shift(interior_log_derivative(well, E, l), l, E, well.a, well.m)


def unwrap_phase_shifts(deltas):
    """Remove jumps of pi from a phase-shift sequence sampled in energy."""
    return 0.5 * np.unwrap(2 * np.asarray(deltas, dtype=float))


def hard_sphere_phase_shift(l, ka):
    j, n, _, _ = spherical_bessel(l, ka)
    return float(np.arctan(-j / n))


def born_phase_shift(Vfun, l, E, m=1.0, rmax=np.inf, points=None, with_flag=False):
    """-(2/v_E) int V(r) (k r j_l(k r))^2 dr by adaptive quadrature.

    With ``with_flag`` the result is (delta, valid). Valid requires
    |delta| < 0.1 and a weak potential, m int |V| r dr < 0.05; a small
    phase shift alone is not enough at low energy.
    """
    k = np.sqrt(2 * m * E)
    v = k / m

    def integrand(r):
        if r == 0:
            return 0.0
        jl = sph_j_all(l, k * r)[l, 0]
        return Vfun(r) * (k * r * jl) ** 2

    opts = {"limit": 400}
    if points is not None and np.isfinite(rmax):
        opts["points"] = points
    val, err = scipy.integrate.quad(integrand, 0, rmax, **opts)
    if not np.isfinite(val) or (abs(err) > 1e-3 * max(abs(val), 1e-12) and abs(err) > 1e-10):
        raise IntegralDiverged("Born integral did not converge")
    delta = -2 / v * val
    if with_flag:
        strength, _ = scipy.integrate.quad(lambda r: abs(Vfun(r)) * r, 0, rmax, **opts)
        return delta, bool(abs(delta) < 0.1 and m * strength < 0.05)
    return delta


# ------------------------------------------------------------ cross sections

@dataclass(frozen=True)
class PhaseShiftSet:
    E: float
    deltas: np.ndarray
    k: float


def phase_shift_set(E, deltas, m=1.0):
    return PhaseShiftSet(E, np.asarray(deltas, dtype=float), float(np.sqrt(2 * m * E)))


def default_lmax(ka):
    return int(np.ceil(ka)) + 8


@dataclass(frozen=True)
class CrossSections:
    partial: np.ndarray
    total: float
    k: float
    deltas: np.ndarray
    tail: float

    def amplitude(self, theta):
        """f(theta) = -(1/k) sum sqrt((2l+1) pi) T_ll Y_l0(theta)."""
        theta = np.asarray(theta, dtype=float)
        c = np.cos(theta)
        f = np.zeros(np.shape(theta), dtype=complex)
        for l, d in enumerate(self.deltas):
            T = -np.exp(1j * d) * 2 * np.sin(d)
            Y = np.sqrt((2 * l + 1) / (4 * np.pi)) * legendre_p(l, c)
            f += np.sqrt((2 * l + 1) * np.pi) * T * Y
        return -f / self.k

    def dcs(self, theta):
        return np.abs(self.amplitude(theta)) ** 2


def cross_sections(ps):
    l = np.arange(len(ps.deltas))
    partial = (2 * l + 1) * 4 * np.pi / ps.k ** 2 * np.sin(ps.deltas) ** 2
    return CrossSections(partial, float(partial.sum()), ps.k, ps.deltas,
                         float(partial[-1]) if len(partial) else 0.0)


def optical_theorem_residual(ps):
    cs = cross_sections(ps)
    f0 = cs.amplitude(0.0)
    return float(abs(cs.total - 4 * np.pi / ps.k * f0.imag))


def hard_sphere_cross_section(a, E, lmax=None, m=1.0):
    k = np.sqrt(2 * m * E)
    if lmax is None:
        lmax = default_lmax(k * a)
    x = k * a
    J = sph_j_all(lmax, x)[:, 0]
    N = sph_n_all(lmax, x)[:, 0]
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        deltas = np.arctan(-J / N)
    deltas = np.where(np.isfinite(deltas), deltas, 0.0)
    return cross_sections(PhaseShiftSet(E, deltas, k))


def resonance_phase(delta_bg, E_r, gamma_r, E):
    """delta_bg - arctan((Gamma/2)/(E - E_r)), written to rise smoothly by pi."""
    return delta_bg + np.arctan2(0.5 * gamma_r, E_r - np.asarray(E, dtype=float))


def resonance_sigma(delta_bg, E_r, gamma_r, E, l, k):
    d = resonance_phase(delta_bg, E_r, gamma_r, E)
    return (2 * l + 1) * 4 * np.pi / k ** 2 * np.sin(d) ** 2


# ------------------------------------------------------------ low energy

@dataclass(frozen=True)
class ScatteringLength:
    a_s: float
    E_bound: float | None


def scattering_length(well):
    """a_s = a - 1/k0 with k0 the zero-energy u-convention log derivative."""
    a, m = well.a, well.m
    if np.isinf(well.V) and well.V > 0:
        return ScatteringLength(a, None)
    kt = interior_log_derivative_u(well, 0.0)
    if kt == 0:
        return ScatteringLength(np.inf, None)
    a_s = a - 1 / kt
    Eb = -1 / (2 * m * (a_s - a) ** 2) if a_s > a else None
    return ScatteringLength(float(a_s), Eb)


# ------------------------------------------------------------ resonances

def outgoing_log_derivative(l, E, a, m=1.0):
    """k h_l^+'(ka) / h_l^+(ka) = eps + i gamma."""
    k = np.sqrt(2 * m * E)
    _, _, hp, _, _, _, dhp, _ = spherical_bessel(l, k * a, derivative=True)
    return k * dhp / hp


@dataclass(frozen=True)
class Resonance:
    E_r: float
    gamma_r: float
    v_r: float


def shielded_resonances(well, l, E_range, grid=4001, dE=None):
    """Narrow resonances of a shielded well by linearizing k_l near its zeros.

    D(E) = k_l(E) - Re[k h'^+/h^+] crosses zero with negative slope at a
    resonance; then v_r = -1/D'(E_r) and Gamma_r = 2 gamma(E_r) v_r.
    """
    Emin, Emax = E_range
    Es = np.linspace(Emin, Emax, grid)

    def D(E):
        return interior_log_derivative(well, E, l) - outgoing_log_derivative(l, E, well.a, well.m).real

    vals = np.array([D(E) for E in Es])
    out = []
    for i in range(grid - 1):
        f1, f2 = vals[i], vals[i + 1]
        if not (np.isfinite(f1) and np.isfinite(f2)) or not (f1 > 0 > f2):
            continue
        lo, hi = Es[i], Es[i + 1]
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if D(mid) > 0:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-14 * max(1.0, mid):
                break
        Er = 0.5 * (lo + hi)
        h = dE if dE is not None else 1e-6 * max(Er, 1e-3)
        slope = (D(Er + h) - D(Er - h)) / (2 * h)
        vr = -1 / slope
        g = outgoing_log_derivative(l, Er, well.a, well.m).imag
        out.append(Resonance(float(Er), float(2 * g * vr), float(vr)))
    return out


def wigner_delay(well, E, l=0, dE=1e-7):
    """tau = d(2 delta)/dE by central differences."""
    d1 = well_phase_shift(well, E - dE, l)
    d2 = well_phase_shift(well, E + dE, l)
    dd = (d2 - d1 + np.pi / 2) % np.pi - np.pi / 2
    return 2 * dd / (2 * dE)


# ------------------------------------------------------------ Born

def born_transform(Ufun, q, rmax=np.inf):
    """U(q) = 4 pi int U(r) sinc(q r) r^2 dr."""
    def integrand(r):
        x = q * r
        s = np.sin(x) / x if x != 0 else 1.0
        return Ufun(r) * s * r * r
    val, _ = scipy.integrate.quad(integrand, 0, rmax, limit=400)
    return 4 * np.pi * val


def born_dcs(Ufun, E, theta, m=1.0, rmax=np.inf):
    k = np.sqrt(2 * m * E)
    q = 2 * k * np.sin(np.asarray(theta, dtype=float) / 2)
    Uq = np.vectorize(lambda qq: born_transform(Ufun, qq, rmax))(q)
    return (m / (2 * np.pi)) ** 2 * np.abs(Uq) ** 2


def born_total(Ufun, E, m=1.0, rmax=np.inf):
    """sigma = (1 / 2 pi v^2) int_0^{2k} |U(q)|^2 q dq."""
    k = np.sqrt(2 * m * E)
    v = k / m
    val, _ = scipy.integrate.quad(lambda q: abs(born_transform(Ufun, q, rmax)) ** 2 * q,
                                  0, 2 * k, limit=200)
    return val / (2 * np.pi * v ** 2)


# ------------------------------------------------------------ Green functions

def free_green(d, E, r, m=1.0):
    """Outgoing free Green function in d = 1, 2, 3 dimensions."""
    if E <= 0:
        raise DomainError("energy must be positive")
    r = np.asarray(r, dtype=float)
    k = np.sqrt(2 * m * E)
    if d == 1:
        return -1j * (m / k) * np.exp(1j * k * np.abs(r))
    if np.any(r <= 0):
        raise DomainError("r must be positive")
    if d == 2:
        return -1j * (m / 2) * scipy.special.hankel1(0, k * r)
    if d == 3:
        return -(m / (2 * np.pi * r)) * np.exp(1j * k * r)
    raise DomainError("dimension must be 1, 2 or 3")


def regularized_delta_ueff(u, cutoff, E, m=1.0):
    """u_eff = u / (1 - u G) with G = -(m/pi^2) Lambda_E in three dimensions."""
    k = np.sqrt(2 * m * E)
    if cutoff <= k:
        raise DomainError("cutoff must exceed k_E")
    lam = cutoff - 0.5 * k * np.log((cutoff + k) / (cutoff - k)) + 0.5j * np.pi * k
    G = -(m / np.pi ** 2) * lam
    return u / (1 - u * G)


def hydrogen_levels(alpha, mass, l, nu):
    if nu < 1:
        raise ValueError("nu must be >= 1")
    return -alpha ** 2 * mass / (2 * (l + nu) ** 2)

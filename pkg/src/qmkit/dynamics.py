"""Driven two-level dynamics, decay into a quasi-continuum and rate equations."""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (DegenerateSpectrum, NegativeInput, NoConvergence,
                     WindowTooSmall)
from .numeric import hermitian_eig


@dataclass(frozen=True)
class TwoLevel:
    """H = [[eps/2, c], [c, -eps/2]] up to a constant."""
    eps: float
    c: float

    @property
    def omega(self):
        return float(np.hypot(2 * self.c, self.eps))

    @property
    def theta0(self):
        return float(np.arctan2(2 * self.c, self.eps))

    def hamiltonian(self):
        return np.array([[self.eps / 2, self.c], [self.c, -self.eps / 2]], dtype=complex)

    def bloch_vector(self):
        return np.array([2 * self.c, 0.0, self.eps])


def rabi_probability(tl, t):
    """Probability to remain in the initial site."""
    t = np.asarray(t, dtype=float)
    return 1 - np.sin(tl.theta0) ** 2 * np.sin(tl.omega * t / 2) ** 2


def bloch_precession(omega, M0, t):
    """Rotate M0 by the angle |omega| t about the direction of omega."""
    omega = np.asarray(omega, dtype=float)
    M0 = np.asarray(M0, dtype=float)
    w = np.linalg.norm(omega)
    if w == 0:
        return M0.copy()
    n = omega / w
    a = w * t
    return (M0 * np.cos(a) + np.cross(n, M0) * np.sin(a)
            + n * np.dot(n, M0) * (1 - np.cos(a)))


# ---------------------------------------------------------------- Landau-Zener

@dataclass(frozen=True)
class LZSweep:
    """H(t) = alpha t sigma_z / 2 + kappa sigma_x / 2 on the window [-T, T]."""
    alpha: float
    kappa: float
    T: float | None = None

    def window(self):
        if self.T is not None:
            return self.T
        return 2000.0 * max(self.kappa, np.sqrt(self.alpha)) / self.alpha


def lz_formula(sweep):
    """Probability to stay in the initial diabatic state."""
    return float(np.exp(-0.5 * np.pi * sweep.kappa ** 2 / sweep.alpha))


def _quat_mul(a, b):
    # (a0 - i a.sigma)(b0 - i b.sigma) in the (c0, c) parametrization
    a0, av = a[..., 0], a[..., 1:]
    b0, bv = b[..., 0], b[..., 1:]
    c0 = a0 * b0 - np.sum(av * bv, axis=-1)
    cv = a0[..., None] * bv + b0[..., None] * av + np.cross(av, bv)
    return np.concatenate([c0[..., None], cv], axis=-1)


def _ordered_product(q):
    """Time-ordered product q[-1] ... q[1] q[0] of SU(2) quaternions."""
    while len(q) > 1:
        if len(q) % 2:
            q = np.concatenate([q, np.array([[1.0, 0, 0, 0]])])
        q = _quat_mul(q[1::2], q[0::2])
    return q[0]


def _magnus_steps(alpha, kappa, t0, h, n):
    """Fourth-order Magnus step unitaries for n steps of size h from t0."""
    tm = t0 + h * (np.arange(n) + 0.5)
    dt = h * np.sqrt(3) / 6
    # z components of the Pauli vector at the two Gauss points
    h1z = 0.5 * alpha * (tm - dt)
    h2z = 0.5 * alpha * (tm + dt)
    hx = 0.5 * kappa
    vec = np.zeros((n, 3))
    vec[:, 0] = h * hx
    vec[:, 2] = 0.5 * h * (h1z + h2z)
    # commutator correction (sqrt(3)/6) h^2 (h2 x h1); only y survives
    vec[:, 1] = np.sqrt(3) / 6 * h ** 2 * hx * (h2z - h1z)
    ang = np.linalg.norm(vec, axis=1)
    q = np.empty((n, 4))
    q[:, 0] = np.cos(ang)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(ang > 0, np.sin(ang) / ang, 1.0)
    q[:, 1:] = vec * s[:, None]
    return q


def lz_propagator(alpha, kappa, T, steps):
    """Propagator over [-T, T] as a quaternion (u0, u), U = u0 - i u.sigma."""
    return _ordered_product(_magnus_steps(alpha, kappa, -T, 2 * T / steps, steps))


def _quat_matrix(q):
    return np.array([[q[0] - 1j * q[3], -1j * q[1] - q[2]],
                     [-1j * q[1] + q[2], q[0] + 1j * q[3]]])


def lz_numeric(sweep, steps=None):
    """Integrate the sweep from -T to T starting in the up state.

    The step never exceeds 0.01 min(1/kappa, 1/sqrt(alpha)); a smaller
    ``steps`` request is raised to that bound.
    """
    T, steps = _lz_setup(sweep, steps)
    q = lz_propagator(sweep.alpha, sweep.kappa, T, steps)
    # <up|U|up> = q0 - i qz
    return float(q[0] ** 2 + q[3] ** 2)


def _lz_setup(sweep, steps):
    alpha, kappa = sweep.alpha, sweep.kappa
    T = sweep.window()
    if alpha <= 0 or alpha * T < 20 * max(kappa, np.sqrt(alpha)):
        raise WindowTooSmall("need alpha*T >= 20*max(kappa, sqrt(alpha))")
    hmax = 0.01 * min(1 / kappa if kappa > 0 else np.inf, 1 / np.sqrt(alpha))
    need = int(np.ceil(2 * T / hmax))
    return T, need if steps is None else max(int(steps), need)


def lz_trajectory(sweep, steps=None, samples=200):
    """Times and populations (|c_up|^2, |c_down|^2) sampled along the sweep."""
    T, steps = _lz_setup(sweep, steps)
    h = 2 * T / steps
    psi = np.array([1.0, 0.0], dtype=complex)
    per = max(1, steps // samples)
    times, pops = [], []
    t, done = -T, 0
    while done < steps:
        n = min(per, steps - done)
        q = _ordered_product(_magnus_steps(sweep.alpha, sweep.kappa, t, h, n))
        psi = _quat_matrix(q) @ psi
        t += n * h
        done += n
        times.append(t)
        pops.append(np.abs(psi) ** 2)
    return np.array(times), np.array(pops)


# ------------------------------------------------------------------ FGR

def fgr_probability(W, omega, drive, t):
    """First-order transition probability under periodic driving."""
    t = np.asarray(t, dtype=float)
    x = (omega - drive) * t / 2
    return np.abs(W) ** 2 * t ** 2 * np.sinc(x / np.pi) ** 2


def fgr_rate(delta, sigma):
    if delta <= 0:
        raise ValueError("level spacing must be positive")
    return 2 * np.pi * sigma ** 2 / delta


# ------------------------------------------------------------ decay model

@dataclass(frozen=True)
class DecayModel:
    """Level E0 coupled with strength sigma to Nband equally spaced levels.

    The band is symmetric about E0 with spacing delta, so its half-width
    is Nband*delta/2.
    """
    E0: float
    delta: float
    sigma: float
    Nband: int

    @property
    def gamma(self):
        return fgr_rate(self.delta, self.sigma)

    def levels(self):
        k = np.arange(self.Nband)
        return self.E0 + (k + 0.5 - self.Nband / 2) * self.delta

    def hamiltonian(self):
        n = self.Nband
        H = np.zeros((n + 1, n + 1))
        H[0, 0] = self.E0
        H[1:, 1:] = np.diag(self.levels())
        H[0, 1:] = H[1:, 0] = self.sigma
        return H


@dataclass(frozen=True)
class DecaySpectrum:
    energies: np.ndarray
    overlaps: np.ndarray


def _secular(model, E):
    Ek = model.levels()
    return (E - model.E0) - model.sigma ** 2 * np.sum(
        1.0 / (E[:, None] - Ek[None, :]), axis=1)


def decay_spectrum(model, overlaps="lorentzian"):
    """Eigenvalues of the decay model and the weights of the discrete level.

    Eigenvalues come from the secular equation
    sum_k sigma^2 / (E - E_k) = E - E0, which has one root in every gap
    between band levels and one on each side of the band.

    ``overlaps="lorentzian"`` uses sigma^2 / ((E-E0)^2 + (Gamma/2)^2) with
    Gamma/2 = sqrt(sigma^2 + (pi sigma^2/delta)^2), renormalized on the
    finite band. ``overlaps="exact"`` uses the finite-model eigenvector
    weights 1 / (1 + sum_k sigma^2/(E-E_k)^2).
    """
    Ek = model.levels()
    s2 = model.sigma ** 2
    if model.sigma == 0:
        E = np.sort(np.concatenate([[model.E0], Ek]))
        w = np.isclose(E, model.E0, rtol=0, atol=1e-12 * max(1, abs(model.E0))).astype(float)
        return DecaySpectrum(E, w / w.sum())
    R = 2 * np.sqrt(model.Nband) * model.sigma + model.delta
    lo = np.concatenate([[Ek[0] - R], Ek])
    hi = np.concatenate([Ek, [Ek[-1] + R]])
    # the secular function increases from -inf to +inf on each interval
    a, b = lo.copy(), hi.copy()
    for _ in range(200):
        m = 0.5 * (a + b)
        fm = _secular(model, m)
        up = fm > 0
        b = np.where(up, m, b)
        a = np.where(up, a, m)
        if np.all(b - a <= 4 * np.finfo(float).eps * np.maximum(1, np.abs(m))):
            break
    E = 0.5 * (a + b)
    if overlaps == "lorentzian":
        half = np.sqrt(s2 + (np.pi * s2 / model.delta) ** 2)
        w = s2 / ((E - model.E0) ** 2 + half ** 2)
    elif overlaps == "exact":
        w = 1.0 / (1.0 + s2 * np.sum(1.0 / (E[:, None] - Ek[None, :]) ** 2, axis=1))
    else:
        raise ValueError("overlaps must be 'lorentzian' or 'exact'")
    return DecaySpectrum(E, w / w.sum())


def survival_probability(model, t, spectrum=None, overlaps="exact"):
    """|sum_n w_n exp(-i E_n t)|^2 for the initially occupied discrete level.

    By default the weights are the exact eigenvector overlaps of the
    finite model, so the sum is the true survival probability. The
    Lorentzian weights describe an infinite band and, once truncated and
    renormalized, overshoot e^{-Gamma t} by roughly twice the missing tail
    weight.
    """
    if spectrum is None:
        spectrum = decay_spectrum(model, overlaps)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    amp = np.exp(-1j * np.outer(t, spectrum.energies)) @ spectrum.overlaps
    P = np.abs(amp) ** 2
    return P if P.size > 1 else float(P[0])


# ------------------------------------------------------------------ Gamow

@dataclass(frozen=True)
class GamowWell:
    """Well of width a sealed by a delta barrier u delta(x - a)."""
    a: float
    u: float
    m: float = 1.0
    n: int = 1

    @property
    def alpha_b(self):
        return self.m * self.u


@dataclass(frozen=True)
class GamowPole:
    E_r: float
    gamma_r: float
    g: float
    k_first: complex
    k_exact: complex
    E_exact: float
    gamma_exact: float
    converged: bool
    iterations: int = 0
    extra: dict = field(default_factory=dict)


def gamow_secular(k, a, alpha_b):
    return 1j * k - k / np.tan(k * a) - 2 * alpha_b


def gamow_pole(well, tol=1e-13, maxiter=100, strict=False):
    """First-order Gamow pole and its Newton refinement.

    If the refinement does not converge the first-order values are
    reported with ``converged=False``; with ``strict=True`` NoConvergence
    is raised instead.
    """
    if well.n < 1:
        raise ValueError("level index must be >= 1")
    a, ab, m = well.a, well.alpha_b, well.m
    kn = np.pi * well.n / a
    if np.isinf(ab):
        E = kn ** 2 / (2 * m)
        return GamowPole(E, 0.0, 0.0, complex(kn), complex(kn), E, 0.0, True)
    kr = kn - (1 / a) * (kn / (2 * ab))
    gr = (1 / a) * (kn / (2 * ab)) ** 2
    E_r = kr ** 2 / (2 * m)
    Gamma_r = 2 * (kr / m) * gr
    g = (kn / ab) ** 2
    k = complex(kr, -gr)
    converged = False
    it = 0
    for it in range(1, maxiter + 1):
        s = np.sin(k * a)
        F = 1j * k - k * np.cos(k * a) / s - 2 * ab
        dF = 1j - np.cos(k * a) / s + k * a / s ** 2
        step = F / dF
        k = k - step
        if not np.isfinite(k):
            break
        if abs(step) < tol * max(1.0, abs(k)):
            converged = True
            break
    if converged and abs(k - complex(kr, -gr)) > 0.5 * np.pi / a:
        # wandered to a different pole
        converged = False
    if not converged:
        if strict:
            raise NoConvergence("complex Newton refinement of the pole failed")
        k = complex(kr, -gr)
    E = k ** 2 / (2 * m)
    return GamowPole(E_r, Gamma_r, g, complex(kr, -gr), k, float(E.real),
                     float(-2 * E.imag), converged, it)


# ------------------------------------------------------------ master equation

def rate_matrix(W, nu):
    """Transition rates w_nm = nu |W_nm|^2 with zero diagonal."""
    W = np.asarray(W)
    w = nu * np.abs(W) ** 2
    np.fill_diagonal(w, 0.0)
    return w


def master_generator(W, nu):
    """Generator of dp/dt = G p; every column sums to zero."""
    w = rate_matrix(W, nu)
    return w - np.diag(w.sum(axis=0))


def pauli_master(W, nu, p0, t):
    """Probabilities at time t under the Pauli master equation."""
    p0 = np.asarray(p0, dtype=float)
    if nu < 0 or np.any(p0 < 0):
        raise NegativeInput("noise intensity and probabilities must be non-negative")
    if abs(p0.sum() - 1) > 1e-10:
        raise ValueError("initial probabilities must sum to 1")
    G = master_generator(W, nu)
    p = scipy.linalg.expm(G * t) @ p0
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def decay_constants(W, nu):
    """Gamma_n = sum_m w_mn, the total escape rate from each state."""
    return rate_matrix(W, nu).sum(axis=0)


# ------------------------------------------------------------ adiabatic basis

def adiabatic_coupling(Hfun, X, dX=1e-5):
    """A_nm = i V_nm / (E_m - E_n) in the eigenbasis of H(X), zero diagonal."""
    H0 = np.asarray(Hfun(X))
    eig = hermitian_eig(H0)
    E = eig.values
    scale = max(np.max(np.abs(H0)), 1e-300)
    if len(E) > 1 and np.min(np.diff(E)) <= 1e-8 * scale:
        raise DegenerateSpectrum("adiabatic coupling needs a non-degenerate spectrum")
    dH = (np.asarray(Hfun(X + dX)) - np.asarray(Hfun(X - dX))) / (2 * dX)
    V = eig.vectors.conj().T @ dH @ eig.vectors
    gap = E[None, :] - E[:, None]
    np.fill_diagonal(gap, 1.0)
    A = 1j * V / gap
    np.fill_diagonal(A, 0.0)
    return A


def adiabaticity_ratio(xdot, delta, sigma):
    """Diagnostic xdot * sigma / delta^2; small values mean adiabatic."""
    return xdot * sigma / delta ** 2

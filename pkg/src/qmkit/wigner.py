"""Wigner functions on grids and the Wigner-Weyl trace formula.

A state on the grid x_n = x_0 + n dx (n = 0..N-1, N even) is transformed
on the half-step grid X_s = x_0 + s dx/2, because the pairs (x_a, x_b)
with a + b = s are exactly the points X_s +- r/2. Along each X_s the
off-diagonal coordinate r = (a - b) dx has step 2 dx and N samples, so the
conjugate momentum grid has spacing pi/(N dx) and N points. States should
be band limited to |p| < pi/(2 dx). The transform is a pair of DFT
matrices (even and odd s), so rho -> W -> rho is exact to round-off.

All phase-space integrals use the measure dX dP / 2pi.
"""

from dataclasses import dataclass
import warnings

import numpy as np

from .errors import DomainError, GridMismatch, NonHermitianInput, WindowTooSmall

EDGE_TOL = 1e-8


@dataclass(frozen=True)
class GridState:
    """A density matrix rho(x', x'') sampled on a uniform grid, trace(rho) dx = 1."""
    x: np.ndarray
    rho: np.ndarray

    @property
    def dx(self):
        return float(self.x[1] - self.x[0])

    @classmethod
    def from_wavefunction(cls, x, psi):
        x = np.asarray(x, dtype=float)
        psi = np.asarray(psi, dtype=complex)
        dx = x[1] - x[0]
        psi = psi / np.sqrt(np.sum(np.abs(psi) ** 2) * dx)
        return cls(x, np.outer(psi, psi.conj()))

    @classmethod
    def from_density(cls, x, rho):
        x = np.asarray(x, dtype=float)
        rho = np.asarray(rho, dtype=complex)
        dx = x[1] - x[0]
        return cls(x, rho / (np.trace(rho).real * dx))

    def purity(self):
        return float(np.sum(np.abs(self.rho) ** 2).real * self.dx ** 2)

    def density(self):
        return np.diag(self.rho).real


@dataclass(frozen=True)
class PhaseSpaceFunction:
    X: np.ndarray
    P: np.ndarray
    W: np.ndarray  # shape (len(X), len(P))

    @property
    def dX(self):
        return float(self.X[1] - self.X[0])

    @property
    def dP(self):
        return float(self.P[1] - self.P[0])

    @property
    def cell(self):
        return self.dX * self.dP / (2 * np.pi)

    def norm(self):
        return float(np.sum(self.W) * self.cell)

    def position_marginal(self):
        """Integral over P, dP/2pi."""
        return self.W.sum(axis=1) * self.dP / (2 * np.pi)

    def momentum_marginal(self):
        """Integral over X, dX."""
        return self.W.sum(axis=0) * self.dX

    def mesh(self):
        return np.meshgrid(self.X, self.P, indexing="ij")


def phase_grids(x):
    """Half-step X grid (2N points) and conjugate P grid (N points) for x."""
    x = np.asarray(x, dtype=float)
    N = len(x)
    if N % 2:
        raise GridMismatch("the x grid must have an even number of points")
    dx = x[1] - x[0]
    if not np.allclose(np.diff(x), dx, rtol=1e-10, atol=0):
        raise GridMismatch("the x grid must be uniform")
    X = x[0] + 0.5 * dx * np.arange(2 * N)
    dp = np.pi / (N * dx)
    P = dp * (np.arange(N) - N // 2)
    return X, P


def _offsets(N, parity):
    return 2 * np.arange(N) - N + parity


def _kernels(N, dx, P):
    # E[j, k] = exp(-i P_j q_k dx), one matrix per parity of s
    return [np.exp(-1j * np.outer(P, _offsets(N, par)) * dx) for par in (0, 1)]


def _pair_indices(N, s, parity):
    q = _offsets(N, parity)
    a = (s + q) // 2
    b = a - q
    ok = (a >= 0) & (a < N) & (b >= 0) & (b < N)
    return a, b, ok


def wigner_transform(state, check_edges=True):
    """rho_W(X, P) = int rho(X + r/2, X - r/2) exp(-i P r) dr."""
    rho = np.asarray(state.rho)
    N = len(state.x)
    if rho.shape != (N, N):
        raise GridMismatch("rho does not match the x grid")
    scale = np.max(np.abs(rho))
    if np.max(np.abs(rho - rho.conj().T)) > 1e-10 * max(scale, 1.0):
        raise NonHermitianInput("density matrix is not Hermitian")
    if check_edges:
        edge = max(np.max(np.abs(rho[0])), np.max(np.abs(rho[-1])))
        if edge > EDGE_TOL * scale:
            raise WindowTooSmall("state does not decay at the window edges")
    X, P = phase_grids(state.x)
    dx = state.dx
    kern = _kernels(N, dx, P)
    W = np.zeros((2 * N, N))
    for par in (0, 1):
        rows = np.arange(par, 2 * N, 2)
        samples = np.zeros((len(rows), N), dtype=complex)
        for i, s in enumerate(rows):
            a, b, ok = _pair_indices(N, s, par)
            samples[i, ok] = rho[a[ok], b[ok]]
        vals = 2 * dx * samples @ kern[par].T
        W[rows] = vals.real
    return PhaseSpaceFunction(X, P, W)


def inverse_wigner(W):
    """Recover the grid density matrix from a Wigner function on conjugate grids."""
    N = len(W.P)
    if W.W.shape != (2 * N, N):
        raise GridMismatch("W is not on a grid produced by wigner_transform")
    dx = 2 * W.dX
    x = W.X[::2]
    if not np.isclose(W.dP, np.pi / (N * dx), rtol=1e-10):
        raise GridMismatch("P grid is not conjugate to the X grid")
    kern = _kernels(N, dx, W.P)
    rho = np.zeros((N, N), dtype=complex)
    for par in (0, 1):
        rows = np.arange(par, 2 * N, 2)
        samples = (W.dP / (2 * np.pi)) * W.W[rows] @ kern[par].conj()
        for i, s in enumerate(rows):
            a, b, ok = _pair_indices(N, s, par)
            rho[a[ok], b[ok]] = samples[i, ok]
    return GridState(x, rho)


def weyl_expectation(A, W):
    """Sum of A(X, P) W(X, P) dX dP / 2pi. A may be an array or a callable."""
    if callable(A):
        XX, PP = W.mesh()
        A = A(XX, PP)
    A = np.asarray(A)
    if A.shape != W.W.shape:
        raise GridMismatch("observable and Wigner function grids differ")
    return float(np.sum(A * W.W).real * W.cell)


def purity(obj):
    """trace(rho^2), from a GridState directly or from a Wigner function."""
    if isinstance(obj, GridState):
        return obj.purity()
    return float(np.sum(obj.W ** 2) * obj.cell)


# ------------------------------------------------------------ closed forms

def gaussian_wavefunction(x, x0, p0, sigma):
    x = np.asarray(x, dtype=float)
    return ((2 * np.pi * sigma ** 2) ** -0.25
            * np.exp(-(x - x0) ** 2 / (4 * sigma ** 2) + 1j * p0 * x))


def gaussian_wigner(X, P, x0, p0, sigma_x, sigma_p):
    """(1/(sigma_x sigma_p)) exp(-(X-x0)^2/2sigma_x^2 - (P-p0)^2/2sigma_p^2)."""
    return (np.exp(-(X - x0) ** 2 / (2 * sigma_x ** 2) - (P - p0) ** 2 / (2 * sigma_p ** 2))
            / (sigma_x * sigma_p))


def gaussian_purity(sigma_x, sigma_p):
    return 1.0 / (2 * sigma_x * sigma_p)


@dataclass(frozen=True)
class BoxWigner:
    """Components of the Wigner function of the n-th box eigenstate on 0 < X < L/2."""
    n: int
    L: float

    @property
    def k(self):
        return np.pi * self.n / self.L

    def _check(self, X):
        X = np.asarray(X, dtype=float)
        if np.any(X <= 0) or np.any(X >= self.L / 2):
            raise DomainError("closed forms hold only for 0 < X < L/2")
        return X

    @staticmethod
    def _sinc(u):
        return np.sinc(u / np.pi)

    def classical_plus(self, X, P):
        X = self._check(X)
        return 4 * X / self.L * self._sinc(2 * X * (P - self.k))

    def classical_minus(self, X, P):
        X = self._check(X)
        return 4 * X / self.L * self._sinc(2 * X * (P + self.k))

    def interference(self, X, P):
        X = self._check(X)
        return -2 * np.cos(2 * self.k * X) * 4 * X / self.L * self._sinc(2 * X * P)

    def total(self, X, P):
        # equal weights of one half reproduce the density 2 sin^2(kX)/L
        return 0.5 * (self.classical_plus(X, P) + self.classical_minus(X, P)
                      + self.interference(X, P))

    def density(self, X):
        X = self._check(X)
        return 2 * np.sin(self.k * X) ** 2 / self.L


def box_wigner(n, L):
    if n < 1:
        raise DomainError("n must be >= 1")
    return BoxWigner(int(n), float(L))


@dataclass(frozen=True)
class TwoSlitWigner:
    d: float
    sigma: float
    wigner: PhaseSpaceFunction

    def rho0(self, X, P):
        return gaussian_wigner(X, P, 0.0, 0.0, self.sigma, 1 / (2 * self.sigma))

    def rho0_momentum(self, P):
        sp = 1 / (2 * self.sigma)
        return np.sqrt(2 * np.pi) / sp * np.exp(-np.asarray(P) ** 2 / (2 * sp ** 2))

    def momentum_marginal(self, P):
        """2 cos^2(P d / 2) rho0(P), with rho0(P) the X-integral of rho0."""
        P = np.asarray(P, dtype=float)
        return 2 * np.cos(P * self.d / 2) ** 2 * self.rho0_momentum(P)

    def fringe_zeros(self, count=3):
        k = np.arange(count)
        return np.pi * (2 * k + 1) / self.d


def two_slit_wigner(d, sigma, x):
    """Sum of two Gaussian slits plus the cos(P d) interference term on the grid of x."""
    overlap = np.exp(-d ** 2 / (8 * sigma ** 2))
    if overlap > 1e-6:
        warnings.warn(f"slits overlap ({overlap:.2e}); closed form is approximate",
                      stacklevel=2)
    X, P = phase_grids(x)
    XX, PP = np.meshgrid(X, P, indexing="ij")
    sp = 1 / (2 * sigma)
    W = (0.5 * gaussian_wigner(XX, PP, d / 2, 0, sigma, sp)
         + 0.5 * gaussian_wigner(XX, PP, -d / 2, 0, sigma, sp)
         + np.cos(PP * d) * gaussian_wigner(XX, PP, 0, 0, sigma, sp))
    return TwoSlitWigner(float(d), float(sigma), PhaseSpaceFunction(X, P, W))


def momentum_marginal(W):
    return W.momentum_marginal()


@dataclass(frozen=True)
class ThermalOscillator:
    m: float
    omega: float
    beta: float

    @property
    def beta_eff(self):
        """beta tanh(beta omega / 2) / (beta omega / 2)."""
        h = 0.5 * self.beta * self.omega
        return self.beta * np.tanh(h) / h

    def energy(self, X, P):
        return P ** 2 / (2 * self.m) + 0.5 * self.m * self.omega ** 2 * X ** 2

    def __call__(self, X, P):
        b = self.beta_eff
        return b * self.omega * np.exp(-b * self.energy(X, P))

    def purity(self):
        return float(np.tanh(0.5 * self.beta * self.omega))

    def widths(self):
        b = self.beta_eff
        return 1 / np.sqrt(b * self.m * self.omega ** 2), np.sqrt(self.m / b)


def thermal_oscillator_wigner(m, omega, beta):
    if beta <= 0 or omega <= 0:
        raise DomainError("beta and omega must be positive")
    return ThermalOscillator(float(m), float(omega), float(beta))


def thermal_purity_oracle(beta_omega, nmax=None):
    """sum_n p_n^2 for Boltzmann weights of an oscillator."""
    if nmax is None:
        nmax = int(60 / beta_omega) + 50
    w = np.exp(-beta_omega * np.arange(nmax))
    p = w / w.sum()
    return float(np.sum(p ** 2))


def sample_on_grid(f, X, P):
    XX, PP = np.meshgrid(X, P, indexing="ij")
    return PhaseSpaceFunction(np.asarray(X), np.asarray(P), f(XX, PP))


# ------------------------------------------------------------ semiclassics

def _check_window(inside):
    if inside[0].any() or inside[-1].any() or inside[:, 0].any() or inside[:, -1].any():
        raise WindowTooSmall("energy surface touches the grid boundary")


def weyl_count(H, E, X, P):
    """Number of states below E: area of H(X, P) <= E in units of 2pi."""
    XX, PP = np.meshgrid(X, P, indexing="ij")
    inside = H(XX, PP) <= E
    _check_window(inside)
    cell = (X[1] - X[0]) * (P[1] - P[0]) / (2 * np.pi)
    return float(inside.sum() * cell)


def semiclassical_partition(H, beta, X, P):
    """Z = integral of exp(-beta H) dX dP / 2pi on the grid."""
    XX, PP = np.meshgrid(X, P, indexing="ij")
    cell = (X[1] - X[0]) * (P[1] - P[0]) / (2 * np.pi)
    return float(np.sum(np.exp(-beta * H(XX, PP))) * cell)

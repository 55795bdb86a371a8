"""Quasi one-dimensional scattering: point scatterers, junctions, transfer
matrices, multichannel deltas, rings and quantum graphs.

Amplitudes are flux normalized, psi = (A e^{-ikx} + B e^{ikx}) / sqrt(v)
in each lead, with mass m = 1 unless stated otherwise.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .errors import InvalidG, NoOpenChannel, SingularBlock, ThresholdEnergy
from .numeric import find_roots


@dataclass(frozen=True)
class ScatteringMatrix:
    S: np.ndarray
    E: float | None = None
    velocities: np.ndarray | None = None
    thresholds: np.ndarray | None = None

    @property
    def channels(self):
        return self.S.shape[0]

    def unitarity_error(self):
        n = self.S.shape[0]
        return float(np.max(np.abs(self.S.conj().T @ self.S - np.eye(n))))

    def reciprocity_error(self):
        return float(np.max(np.abs(self.S - self.S.T)))


def _ratio(u, vE):
    if vE <= 0:
        raise ValueError("velocity must be positive")
    return np.inf if np.isinf(u) else u / vE


def delta_amplitudes(u, vE):
    """Reflection and transmission amplitudes of u delta(x)."""
    s = _ratio(u, vE)
    if np.isinf(s):
        return complex(-1.0), complex(0.0)
    r = -1j * s / (1 + 1j * s)
    return r, 1 + r


def delta_transmission(u, vE):
    s = _ratio(u, vE)
    return 0.0 if np.isinf(s) else 1.0 / (1.0 + s * s)


def junction_smatrix(M, u, vE, convention="wall", swapped=False):
    """S matrix of M wires joined at a delta junction of strength u.

    ``convention="wall"`` takes psi = A e^{-ikr} - B e^{ikr} on each wire,
    giving S_ab = delta_ab - (2/M) / (1 + i u/v); u = infinity is then the
    identity. ``convention="standard"`` drops the minus sign in front of B,
    which flips the sign of S; for M = 2 this is [[r, t], [t, r]].
    ``swapped=True`` (M = 2 only) exchanges the rows, the [[t, r], [r, t]]
    ordering that lists the transmitted channel first.
    """
    if M < 1:
        raise ValueError("need at least one wire")
    s = _ratio(u, vE)
    f = 0.0 if np.isinf(s) else 2.0 / M / (1 + 1j * s)
    S = np.eye(M, dtype=complex) - f * np.ones((M, M))
    if convention == "standard":
        S = -S
    elif convention != "wall":
        raise ValueError("convention must be 'wall' or 'standard'")
    if swapped:
        if M != 2:
            raise ValueError("row swap is only defined for two wires")
        S = S[::-1]
    return ScatteringMatrix(S)


def fabry_perot(g, phi):
    """Transmission through two identical barriers of transmission g."""
    g = np.asarray(g, dtype=float)
    if np.any(g <= 0) or np.any(g > 1):
        raise InvalidG("g must lie in (0, 1]")
    return 1.0 / (1.0 + 4 * (1 - g) / g ** 2 * np.sin(phi) ** 2)


# --------------------------------------------------------- transfer matrices

@dataclass(frozen=True)
class TransferMatrix:
    """(B_R, A_R) = T (A_L, B_L) with T = [[Tpp, Tpm], [Tmp, Tmm]]."""
    Tpp: np.ndarray
    Tpm: np.ndarray
    Tmp: np.ndarray
    Tmm: np.ndarray

    @classmethod
    def from_matrix(cls, T):
        T = np.asarray(T, dtype=complex)
        n = T.shape[0] // 2
        return cls(T[:n, :n], T[:n, n:], T[n:, :n], T[n:, n:])

    def matrix(self):
        return np.block([[self.Tpp, self.Tpm], [self.Tmp, self.Tmm]])

    def __matmul__(self, other):
        return TransferMatrix.from_matrix(self.matrix() @ other.matrix())


def delta_transfer(Mcal):
    """Transfer matrix of a (multichannel) delta with reduced coupling Mcal."""
    Mcal = np.atleast_2d(np.asarray(Mcal, dtype=complex))
    one = np.eye(Mcal.shape[0])
    return TransferMatrix(one - 1j * Mcal, -1j * Mcal, 1j * Mcal, one + 1j * Mcal)


def free_transfer(kL):
    """Free propagation over a segment; kL holds one phase per channel."""
    kL = np.atleast_1d(np.asarray(kL, dtype=float))
    z = np.zeros((len(kL), len(kL)))
    return TransferMatrix(np.diag(np.exp(1j * kL)), z, z, np.diag(np.exp(-1j * kL)))


def transfer_to_smatrix(T):
    """S over channels ordered (left, right), outgoing from incoming."""
    try:
        inv = np.linalg.inv(T.Tmm)
    except np.linalg.LinAlgError as exc:
        raise SingularBlock("T-- is not invertible") from exc
    if not np.all(np.isfinite(inv)) or np.linalg.cond(T.Tmm) > 1e14:
        raise SingularBlock("T-- is not invertible")
    S = np.block([[-inv @ T.Tmp, inv],
                  [T.Tpp - T.Tpm @ inv @ T.Tmp, T.Tpm @ inv]])
    return ScatteringMatrix(S)


def smatrix_to_transfer(S):
    S = S.S if isinstance(S, ScatteringMatrix) else np.asarray(S)
    n = S.shape[0] // 2
    SLL, SLR, SRL, SRR = S[:n, :n], S[:n, n:], S[n:, :n], S[n:, n:]
    try:
        Tmm = np.linalg.inv(SLR)
    except np.linalg.LinAlgError as exc:
        raise SingularBlock("no transmission: transfer matrix undefined") from exc
    Tmp = -Tmm @ SLL
    Tpm = SRR @ Tmm
    Tpp = SRL - SRR @ Tmm @ SLL
    return TransferMatrix(Tpp, Tpm, Tmp, Tmm)


def two_delta_transmission(g, phi):
    """|S_T|^2 for two identical deltas composed with transfer matrices.

    The barrier strength is chosen to give transmission g and the free
    segment so that the round-trip phase equals phi.
    """
    s = np.sqrt((1 - g) / g)
    r = -1j * s / (1 + 1j * s)
    kL = phi - np.angle(r) if s > 0 else phi
    T = delta_transfer(s) @ free_transfer(kL) @ delta_transfer(s)
    S = transfer_to_smatrix(T).S
    return float(np.abs(S[1, 0]) ** 2)


# ------------------------------------------------------------ multichannel

def channel_wavenumbers(E, thresholds, m=1.0):
    """Open wavenumbers k_n and closed decay constants alpha_n."""
    thresholds = np.asarray(thresholds, dtype=float)
    d = E - thresholds
    if np.any(d == 0):
        raise ThresholdEnergy("energy coincides with a channel threshold")
    open_ = d > 0
    k = np.sqrt(2 * m * np.abs(d))
    return open_, k


def inelastic_delta_smatrix(Q, E, thresholds, m=1.0):
    """S matrix of a delta scatterer coupling several channels.

    Closed channels are eliminated first, leaving
    Mcal = M_vv - M_vu (1 + M_uu)^-1 M_uv with M = v^-1/2 Q v^-1/2 (u in
    place of v for closed channels). The result is 2N x 2N over the N
    open channels, ordered (left leads, right leads).
    """
    Q = np.atleast_2d(np.asarray(Q, dtype=complex))
    open_, k = channel_wavenumbers(E, thresholds, m)
    if not np.any(open_):
        raise NoOpenChannel("no channel is open at this energy")
    vel = k / m
    w = 1 / np.sqrt(vel)
    M = w[:, None] * Q * w[None, :]
    o, c = np.flatnonzero(open_), np.flatnonzero(~open_)
    Mvv = M[np.ix_(o, o)]
    if len(c):
        Mvu, Muv, Muu = M[np.ix_(o, c)], M[np.ix_(c, o)], M[np.ix_(c, c)]
        Mcal = Mvv - Mvu @ np.linalg.solve(np.eye(len(c)) + Muu, Muv)
    else:
        Mcal = Mvv
    ST = np.linalg.inv(np.eye(len(o)) + 1j * Mcal)
    SR = ST - np.eye(len(o))
    S = np.block([[SR, ST], [ST, SR]])
    return ScatteringMatrix(S, E, vel[o], np.asarray(thresholds, dtype=float))


def waveguide_point_reflection(weights, u, E, thresholds, m=1.0):
    """Closed-form reflection block for a point scatterer in a waveguide.

    Q_nm = u w_n w_m with w_n the transverse mode amplitudes at the
    scatterer. Returns -i M_vv / (1 + tr M_uu + i tr M_vv).
    """
    weights = np.asarray(weights, dtype=float)
    open_, k = channel_wavenumbers(E, thresholds, m)
    vel = k / m
    a = weights / np.sqrt(vel)
    av, au = a[open_], a[~open_]
    Mvv = u * np.outer(av, av)
    return -1j * Mvv / (1 + u * np.sum(au ** 2) + 1j * u * np.sum(av ** 2))


# ------------------------------------------------------------------ rings

def ab_ring_spectrum(L, flux, n_values, m=1.0):
    """E_n = (1/2m) (2pi/L)^2 (n - flux/2pi)^2 for each n."""
    n = np.asarray(n_values, dtype=float)
    return 0.5 / m * (2 * np.pi / L) ** 2 * (n - flux / (2 * np.pi)) ** 2


def persistent_current(L, flux, n, m=1.0):
    """I_n = -dE_n/dflux."""
    n = np.asarray(n, dtype=float)
    return (1 / m) * (2 * np.pi / L) ** 2 * (n - flux / (2 * np.pi)) / (2 * np.pi)


def ring_secular(k, L, u, phi, m=1.0):
    """cos(kL - arctan(mu/k)) - sqrt(g) cos(phi) for a ring with one delta."""
    k = np.asarray(k, dtype=float)
    if np.isinf(u):
        return np.sin(k * L)
    x = m * u / k
    return np.cos(k * L - np.arctan(x)) - np.cos(phi) / np.sqrt(1 + x * x)


def _ring_secular_dk(k, L, u, phi, m=1.0):
    mu = m * u
    gam = k * L - np.arctan(mu / k)
    dgam = L + mu / (k * k + mu * mu)
    dsg = mu * mu / (k * k + mu * mu) ** 1.5
    return -np.sin(gam) * dgam - np.cos(phi) * dsg


def ring_with_scatterer_spectrum(L, u, phi, E_range, m=1.0, grid=None, tol=1e-10):
    """Levels of a ring of length L threaded by flux phi with a delta u.

    Simple roots are sign changes of the secular function. Tangential roots
    (the degenerate pairs of the clean ring at integer or half-integer flux)
    are found as zeros of its derivative where the function itself vanishes;
    they are returned twice. The k = 0 level of the clean ring at integer
    flux is included when E_range starts at zero.
    """
    Emin, Emax = E_range
    kmin = np.sqrt(2 * m * max(Emin, 0.0))
    kmax = np.sqrt(2 * m * Emax)
    if grid is None:
        grid = max(2001, int(40 * (kmax - kmin) * L / np.pi) + 1)
    lo = max(kmin, 1e-9 * max(kmax, 1.0))
    f = lambda k: ring_secular(k, L, u, phi, m)
    ks = list(find_roots(f, lo, kmax, grid))
    if not np.isinf(u):
        df = lambda k: _ring_secular_dk(k, L, u, phi, m)
        for kc in find_roots(df, lo, kmax, grid):
            if abs(f(kc)) < tol and not any(abs(kc - q) < 1e-7 for q in ks):
                ks.extend([kc, kc])
    ks = np.sort(np.array(ks))
    E = ks ** 2 / (2 * m)
    if u == 0 and np.isclose(np.cos(phi), 1.0, atol=1e-14) and Emin <= 0:
        E = np.concatenate([[0.0], E])
    return E[(E >= Emin) & (E <= Emax)]


def ring_finite_difference(L, u, phi, N=2000, m=1.0, levels=10):
    """Lowest levels of a discretized ring with a delta on site 0.

    The flux enters as a hopping phase e^{i phi/N}; the delta becomes an
    on-site energy u/dx.
    """
    dx = L / N
    t = 1 / (2 * m * dx * dx)
    idx = np.arange(N)
    hop = -t * np.exp(1j * phi / N)
    rows = np.concatenate([idx, idx, (idx + 1) % N])
    cols = np.concatenate([idx, (idx + 1) % N, idx])
    vals = np.concatenate([np.full(N, 2 * t, dtype=complex),
                           np.full(N, hop), np.full(N, np.conj(hop))])
    H = scipy.sparse.csc_matrix((vals, (rows, cols)), shape=(N, N))
    H = H + scipy.sparse.csc_matrix(([u / dx], ([0], [0])), shape=(N, N))
    # shift-invert about a point below the spectrum
    vals = scipy.sparse.linalg.eigsh(H, k=levels, sigma=-1.0, which="LM",
                                     return_eigenvectors=False)
    return np.sort(vals.real)


# ---------------------------------------------------------------- networks

@dataclass
class Network:
    """Quantum graph.

    ``bonds`` holds (i, j, L, phi) tuples. Directed bond b runs i -> j and
    its reversal b + nbonds runs j -> i with flux phase -phi. Each vertex
    carries a delta junction of strength ``u[vertex]`` (default 0, i.e.
    Kirchhoff matching) unless ``vertex_s[vertex]`` supplies a function
    E -> local S matrix over the directed bonds leaving that vertex, in
    increasing directed-bond order, using the standard sign convention.
    """
    bonds: list
    u: dict = field(default_factory=dict)
    vertex_s: dict = field(default_factory=dict)
    m: float = 1.0

    def __post_init__(self):
        nb = len(self.bonds)
        self.L = np.array([b[2] for b in self.bonds] * 2, dtype=float)
        phis = np.array([b[3] if len(b) > 3 else 0.0 for b in self.bonds], dtype=float)
        self.phi = np.concatenate([phis, -phis])
        self.start = np.array([b[0] for b in self.bonds] + [b[1] for b in self.bonds])
        J = np.zeros((2 * nb, 2 * nb))
        J[np.arange(nb), np.arange(nb) + nb] = 1
        J[np.arange(nb) + nb, np.arange(nb)] = 1
        self.J = J
        self.vertices = sorted(set(self.start.tolist()))

    @property
    def ndirected(self):
        return 2 * len(self.bonds)

    def smatrix(self, E):
        """Block-diagonal vertex S matrix over directed bonds."""
        n = self.ndirected
        S = np.zeros((n, n), dtype=complex)
        vE = np.sqrt(2 * E / self.m)
        for v in self.vertices:
            out = np.flatnonzero(self.start == v)
            if v in self.vertex_s:
                local = np.asarray(self.vertex_s[v](E))
            else:
                local = junction_smatrix(len(out), self.u.get(v, 0.0), vE,
                                         convention="standard").S
            S[np.ix_(out, out)] = local
        return S

    def bond_phases(self, k):
        return np.exp(1j * (k * self.L + self.phi))

    def evolution(self, E):
        """U = J e^{ikL} S; eigenstates satisfy det(1 - U) = 0."""
        k = np.sqrt(2 * self.m * E)
        return (self.J * self.bond_phases(k)[None, :]) @ self.smatrix(E)


def _count_state(net, E, theta_ref=None):
    U = net.evolution(E)
    lam = np.linalg.eigvals(U)
    th = np.angle(lam)
    total = np.angle(np.prod(lam))
    if theta_ref is not None:
        total += 2 * np.pi * np.round((theta_ref - total) / (2 * np.pi))
    return total, np.sum(np.mod(th, 2 * np.pi))


def _count(total, phases):
    return int(np.round((total - phases) / (2 * np.pi)))


def network_spectrum(net, E_range, grid=2001, return_multiplicity=False):
    """Eigenenergies of a quantum graph in the half-open range (Emin, Emax].

    The total eigenphase of U = J e^{ikL} S is followed continuously along
    the scan; every time one of the eigenphases passes through zero the
    running count increases by one. Cells are bisected on that count, so a
    degenerate level is located and reported with its multiplicity.
    Eigenphases are assumed to advance with energy, which holds whenever
    the bond phases dominate the energy dependence of the vertex matrices.
    """
    Emin, Emax = E_range
    kmin, kmax = np.sqrt(2 * net.m * max(Emin, 0.0)), np.sqrt(2 * net.m * Emax)
    Ltot = net.L.sum()
    n = max(grid, int(np.ceil((kmax - kmin) * Ltot / 0.25)) + 1)
    ks = np.linspace(kmin, kmax, n)
    if ks[0] == 0:
        ks[0] = 1e-12 * max(kmax, 1.0)
    Es = ks ** 2 / (2 * net.m)
    totals, sums = [], []
    ref = None
    for E in Es:
        tot, s = _count_state(net, E, ref)
        totals.append(tot)
        sums.append(s)
        ref = tot
    counts = [_count(t, s) for t, s in zip(totals, sums)]
    roots, mult = [], []
    xtol = 1e-14 * max(Emax, 1.0)

    def refine(a, b, ta, ca, tb, cb):
        if cb - ca <= 0:
            return
        if b - a < xtol:
            roots.append(0.5 * (a + b))
            mult.append(cb - ca)
            return
        mid = 0.5 * (a + b)
        guess = ta + (tb - ta) * 0.5
        tm, sm = _count_state(net, mid, guess)
        cm = _count(tm, sm)
        cm = min(max(cm, ca), cb)
        refine(a, mid, ta, ca, tm, cm)
        refine(mid, b, tm, cm, tb, cb)

    for i in range(n - 1):
        refine(Es[i], Es[i + 1], totals[i], counts[i], totals[i + 1], counts[i + 1])
    roots = np.array(roots)
    mult = np.array(mult, dtype=int)
    if return_multiplicity:
        return roots, mult
    return np.repeat(roots, mult)


def network_secular(net, E, theta=None):
    """Real secular function det(1-U) e^{-i Theta/2} / (-2i)^n.

    Without an explicit branch for Theta the principal angle of det U is
    used, so the sign is only meaningful along a continuous scan.
    """
    U = net.evolution(E)
    n = U.shape[0]
    d = np.linalg.det(np.eye(n) - U)
    if theta is None:
        theta = np.angle(np.linalg.det(U))
    return (d * np.exp(-0.5j * theta) / (-2j) ** n).real


def two_bond_ring(L1, L2, u1, u2, phi=0.0, m=1.0):
    """Two vertices joined by bonds A (carrying the flux) and B, deltas u1, u2."""
    return Network([(1, 2, L1, phi), (1, 2, L2, 0.0)], u={1: u1, 2: u2}, m=m)


# ------------------------------------------------------------ DOS and Green

def friedel_dos(Sfun, E, dE=1e-6):
    """(1/2pi i) tr(dS/dE S^dagger) by central differences."""
    def mat(x):
        s = Sfun(x)
        return np.atleast_2d(s.S if isinstance(s, ScatteringMatrix) else s)
    dS = (mat(E + dE) - mat(E - dE)) / (2 * dE)
    val = np.trace(dS @ mat(E).conj().T) / (2j * np.pi)
    return float(val.real)


def green_1d(E, x, x0, u=0.0, m=1.0):
    """Retarded Green function of a line with an optional delta u at x = 0."""
    if E <= 0:
        raise ValueError("energy must be positive")
    k = np.sqrt(2 * m * E)
    v = k / m
    x = np.asarray(x, dtype=float)
    G = -1j / v * np.exp(1j * k * np.abs(x - x0))
    if u == 0:
        return G
    r, t = delta_amplitudes(u, v)
    far = np.exp(1j * k * (np.abs(x) + abs(x0)))
    same = (x * x0) > 0
    return np.where(same, G - 1j / v * r * far, -1j / v * t * far)


def wall_shift_matrix(n, mm, L, mass=1.0):
    """Coupling V_nm = -(pi^2 / (m L^3)) n m induced by moving a hard wall."""
    return -(np.pi ** 2) / (mass * L ** 3) * n * mm


def junction_coupling(dpsi_n, dpsi_m, u, mass=1.0):
    """W_nm = -(1 / (4 m^2 u)) psi_n' psi_m' across a strong delta junction."""
    return -dpsi_n * dpsi_m / (4 * mass ** 2 * u)


def double_well_splitting(a, g, E, m=1.0):
    """Tunnelling frequency (v_E / a) sqrt(g) of a symmetric double well."""
    if not 0 < g <= 1:
        raise InvalidG("g must lie in (0, 1]")
    return np.sqrt(2 * E / m) / a * np.sqrt(g)

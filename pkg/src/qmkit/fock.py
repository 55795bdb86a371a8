"""Occupation-number bases, many-body operators, the Bose-Hubbard dimer,
and bipartite-state tools (reductions, Schmidt, entropy, Bell tests,
projective measurement).

Fermion sign convention: a_r and a_r^dagger carry (-1)**(sum of n_s over
s > r). The more common convention counts orbitals s < r, so matrix
elements from other codes can differ in sign.
"""

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .angular import SIGMA_X, SIGMA_Y, SIGMA_Z, build_spin_rep
from .errors import IncompleteProjectors, QMKitError, SymmetryViolation
from .numeric import hermitian_eig, partial_trace

BOSON = "boson"
FERMION = "fermion"


@dataclass(frozen=True)
class FockBasis:
    """Occupation states of M orbitals, lexicographic with orbital 1 fastest.

    Bosons need either a fixed particle number N or a per-orbital cap;
    fermions have cap 1 and may optionally fix N.
    """
    M: int
    statistics: str = BOSON
    N: int | None = None
    cap: int | None = None
    states: tuple = field(init=False)
    index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.statistics not in (BOSON, FERMION):
            raise ValueError("statistics must be 'boson' or 'fermion'")
        if self.statistics == FERMION:
            cap = 1
        elif self.cap is not None:
            cap = self.cap
        elif self.N is not None:
            cap = self.N
        else:
            raise ValueError("bosons need N or cap")
        states = []
        # itertools.product varies the last slot fastest; reverse to make orbital 1 fastest
        for occ in product(range(cap + 1), repeat=self.M):
            occ = occ[::-1]
            if self.N is None or sum(occ) == self.N:
                states.append(occ)
        object.__setattr__(self, "states", tuple(states))
        object.__setattr__(self, "index", {s: i for i, s in enumerate(states)})

    @property
    def dim(self):
        return len(self.states)

    @property
    def fermionic(self):
        return self.statistics == FERMION


def _act(basis, occ, ops):
    """Apply a string of ('a'|'c', r) ops, rightmost first. Returns (amp, occ)."""
    occ = list(occ)
    amp = 1.0
    for kind, r in reversed(ops):
        n = occ[r]
        if basis.fermionic:
            sign = -1.0 if sum(occ[r + 1:]) % 2 else 1.0
            if kind == "a":
                if n == 0:
                    return 0.0, None
                occ[r] = 0
            else:
                if n == 1:
                    return 0.0, None
                occ[r] = 1
            amp *= sign
        else:
            if kind == "a":
                if n == 0:
                    return 0.0, None
                amp *= np.sqrt(n)
                occ[r] = n - 1
            else:
                amp *= np.sqrt(n + 1)
                occ[r] = n + 1
    return amp, tuple(occ)


def _operator(basis, terms):
    """Sum of coefficient * op-string over the basis; out-of-basis results are dropped."""
    out = np.zeros((basis.dim, basis.dim), dtype=complex)
    for j, occ in enumerate(basis.states):
        for coef, ops in terms:
            if coef == 0:
                continue
            amp, new = _act(basis, occ, ops)
            if amp == 0.0:
                continue
            i = basis.index.get(new)
            if i is not None:
                out[i, j] += coef * amp
    return out


def ladder(basis, r):
    """(a_r, a_r^dagger) as matrices on the basis (orbitals numbered from 0)."""
    if not 0 <= r < basis.M:
        raise IndexError(f"orbital {r} out of range")
    a = _operator(basis, [(1.0, [("a", r)])]).real
    return a, a.T.copy()


def number_operator(basis, r):
    return np.diag([float(s[r]) for s in basis.states])


def one_body_operator(basis, h):
    """sum over k', k of a_k'^dagger h[k', k] a_k."""
    h = np.asarray(h)
    if h.shape != (basis.M, basis.M):
        raise ValueError("h must be M x M")
    if np.max(np.abs(h - h.conj().T)) > 1e-12 * max(1.0, np.max(np.abs(h))):
        raise SymmetryViolation("one-body matrix is not Hermitian")
    terms = [(h[kp, k], [("c", kp), ("a", k)])
             for kp in range(basis.M) for k in range(basis.M)]
    return _operator(basis, terms)


def check_two_body(U, tol=1e-12):
    """U[k', l', k, l] must equal U[l', k', l, k] and conj(U[k, l, k', l'])."""
    U = np.asarray(U)
    scale = max(1.0, float(np.max(np.abs(U))))
    if np.max(np.abs(U - U.transpose(1, 0, 3, 2))) > tol * scale:
        raise SymmetryViolation("U lacks the particle-exchange symmetry")
    if np.max(np.abs(U - U.transpose(2, 3, 0, 1).conj())) > tol * scale:
        raise SymmetryViolation("U is not Hermitian")
    return U


def random_two_body(M, rng):
    """A random tensor with the required symmetries, for tests and demos."""
    U = rng.normal(size=(M,) * 4) + 1j * rng.normal(size=(M,) * 4)
    U = U + U.transpose(1, 0, 3, 2)
    U = U + U.transpose(2, 3, 0, 1).conj()
    return U / 4


def two_body_operator(basis, U):
    """1/2 sum of a_k'^dagger a_l'^dagger U[k', l', k, l] a_l a_k."""
    U = check_two_body(U)
    M = basis.M
    terms = []
    for kp, lp, k, l in product(range(M), repeat=4):
        c = U[kp, lp, k, l]
        if c != 0:
            terms.append((0.5 * c, [("c", kp), ("c", lp), ("a", l), ("a", k)]))
    return _operator(basis, terms)


def slater_expectation(R, U):
    """Direct minus exchange sum over occupied pairs of a Slater determinant."""
    R = sorted(set(R))
    U = np.asarray(U)
    total = 0.0
    for k in R:
        for l in R:
            total += U[k, l, k, l] - U[l, k, k, l]
    return float(np.real(0.5 * total))


# ------------------------------------------------------------ Bose-Hubbard dimer

def dimer_basis(N):
    """Two-site sector of N bosons, ordered n1 = N, N-1, ..., 0."""
    return FockBasis(2, BOSON, N=N)


def dimer_hamiltonian_ladder(N, U, K, eps):
    """Site Hamiltonian from particle-conserving ladder-operator strings."""
    basis = dimer_basis(N)
    terms = [(-0.5 * eps, [("c", 0), ("a", 0)]),
             (0.5 * eps, [("c", 1), ("a", 1)]),
             (0.5 * U, [("c", 0), ("c", 0), ("a", 0), ("a", 0)]),
             (0.5 * U, [("c", 1), ("c", 1), ("a", 1), ("a", 1)]),
             (-0.5 * K, [("c", 1), ("a", 0)]),
             (-0.5 * K, [("c", 0), ("a", 1)])]
    return _operator(basis, terms).real


def dimer_constant(N, U):
    return U * (N * N / 4 - N / 2)


def dimer_hamiltonian_spin(N, U, K, eps):
    """U Jz^2 - eps Jz - K Jx in the spin-N/2 representation, without the constant."""
    rep = build_spin_rep(N / 2)
    Jz, Jx = rep.Jz.real, rep.Jx.real
    return U * Jz @ Jz - eps * Jz - K * Jx


def bose_hubbard_dimer(N, U, K, eps, tol=1e-12):
    """Dimer Hamiltonian in the |n1> basis, cross-checked against the spin mapping."""
    if N < 1:
        raise ValueError("N must be >= 1")
    H = dimer_hamiltonian_ladder(N, U, K, eps)
    Hs = dimer_hamiltonian_spin(N, U, K, eps) + dimer_constant(N, U) * np.eye(N + 1)
    scale = max(1.0, float(np.max(np.abs(H))))
    if np.max(np.abs(H - Hs)) > tol * scale:
        raise QMKitError("ladder and spin constructions of the dimer disagree")
    return H


@dataclass(frozen=True)
class DimerObservables:
    S: np.ndarray
    rho1: np.ndarray
    purity: float


def dimer_observables(state, N):
    """Bloch vector S = (2/N)<J>, one-body density matrix and its purity."""
    psi = np.asarray(state, dtype=complex)
    rep = build_spin_rep(N / 2)
    S = np.array([(psi.conj() @ J @ psi).real for J in (rep.Jx, rep.Jy, rep.Jz)]) * 2 / N
    rho1 = 0.5 * (np.eye(2) + S[0] * SIGMA_X + S[1] * SIGMA_Y + S[2] * SIGMA_Z)
    return DimerObservables(S, rho1, float(0.5 * (1 + S @ S)))


# ------------------------------------------------------------ bipartite states

@dataclass(frozen=True)
class BipartiteState:
    """Amplitudes psi[i, alpha] of a pure state of A x B."""
    psi: np.ndarray

    def __post_init__(self):
        psi = np.asarray(self.psi, dtype=complex)
        nrm = np.linalg.norm(psi)
        if nrm == 0:
            raise ValueError("zero state")
        object.__setattr__(self, "psi", psi / nrm)

    @property
    def dims(self):
        return self.psi.shape

    @classmethod
    def from_vector(cls, vec, dimA, dimB):
        return cls(np.asarray(vec).reshape(dimA, dimB))

    def vector(self):
        return self.psi.reshape(-1)

    def density(self):
        v = self.vector()
        return np.outer(v, v.conj())


def reduce(state, keep="A"):
    if keep == "A":
        return state.psi @ state.psi.conj().T
    if keep == "B":
        return state.psi.T @ state.psi.conj()
    raise ValueError("keep must be 'A' or 'B'")


@dataclass(frozen=True)
class SchmidtDecomposition:
    p: np.ndarray
    A: np.ndarray  # columns
    B: np.ndarray  # columns

    def reconstruct(self):
        return (self.A * np.sqrt(self.p)) @ self.B.T


def schmidt(state, tol=1e-14):
    """psi = sum_r sqrt(p_r) |A_r> (x) |B_r>, p descending, zero weights dropped.

    Each A_r is phased so its first nonzero component is real positive.
    """
    u, s, vh = np.linalg.svd(state.psi, full_matrices=False)
    keep = s ** 2 > tol
    u, s, vh = u[:, keep], s[keep], vh[keep]
    A = u.copy()
    B = vh.T.copy()
    for r in range(A.shape[1]):
        lead = A[np.flatnonzero(np.abs(A[:, r]) > 1e-12)[0], r]
        ph = lead / abs(lead)
        A[:, r] /= ph
        B[:, r] *= ph
    return SchmidtDecomposition(s ** 2, A, B)


def entropy(rho):
    """Von Neumann entropy in nats; accepts a density matrix or a probability vector."""
    rho = np.asarray(rho)
    p = rho if rho.ndim == 1 else hermitian_eig(rho).values
    p = p[p > 1e-15]
    return float(-np.sum(p * np.log(p)))


def subsystem_entropies(rho, dimA, dimB):
    return (entropy(partial_trace(rho, dimA, dimB, "A")),
            entropy(partial_trace(rho, dimA, dimB, "B")),
            entropy(rho))


SINGLET = BipartiteState(np.array([[0, 1], [-1, 0]]) / np.sqrt(2))


def spin_along(theta):
    """sigma_theta = cos(theta) sigma_z + sin(theta) sigma_x."""
    return np.cos(theta) * SIGMA_Z + np.sin(theta) * SIGMA_X


def singlet_correlation(thetaA, thetaB):
    """<sigma_A (x) sigma_B> on the singlet vector, angles in radians."""
    v = SINGLET.vector()
    op = np.kron(spin_along(thetaA), spin_along(thetaB))
    return float((v.conj() @ op @ v).real)


def chsh(thetaA, thetaB, thetaA2, thetaB2):
    C = singlet_correlation
    return C(thetaA, thetaB) + C(thetaA, thetaB2) + C(thetaA2, thetaB) - C(thetaA2, thetaB2)


@dataclass(frozen=True)
class MeasurementResult:
    probabilities: np.ndarray
    rho: np.ndarray


def measure(rho, projectors, tol=1e-10):
    """Non-selective projective measurement: rho -> sum_a P_a rho P_a."""
    rho = np.asarray(rho, dtype=complex)
    Ps = [np.asarray(P, dtype=complex) for P in projectors]
    n = rho.shape[0]
    if np.max(np.abs(sum(Ps) - np.eye(n))) > tol:
        raise IncompleteProjectors("projectors do not sum to the identity")
    for i, P in enumerate(Ps):
        if np.max(np.abs(P @ P - P)) > tol:
            raise IncompleteProjectors(f"projector {i} is not idempotent")
    probs = np.array([np.trace(P @ rho @ P).real for P in Ps])
    final = sum(P @ rho @ P for P in Ps)
    return MeasurementResult(probs, final)

"""Dense matrix helpers and bracketed root finding."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NonHermitian, NonSquare

HERMITIAN_TOL = 1e-12
DEFAULT_GRID = 2001


@dataclass(frozen=True)
class EigenDecomposition:
    values: np.ndarray
    vectors: np.ndarray


def _as_square(M):
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NonSquare(f"expected a square matrix, got shape {M.shape}")
    return M


def is_hermitian(M, tol=HERMITIAN_TOL):
    M = np.asarray(M)
    scale = max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0
    return bool(np.max(np.abs(M - M.conj().T), initial=0.0) <= tol * scale)


def check_hermitian(M, tol=HERMITIAN_TOL):
    M = _as_square(M)
    if not is_hermitian(M, tol):
        raise NonHermitian("matrix is not Hermitian within tolerance")
    return M


def hermitian_eig(M):
    """Ascending eigenvalues and orthonormal eigenvectors of a Hermitian matrix."""
    M = check_hermitian(M)
    # symmetrize to kill round-off asymmetry before calling LAPACK
    H = 0.5 * (M + M.conj().T)
    values, vectors = scipy.linalg.eigh(H)
    return EigenDecomposition(values=values, vectors=vectors)


def evolve_unitary(H, t):
    """U = exp(-i t H) built from the eigendecomposition of H."""
    eig = hermitian_eig(H)
    phases = np.exp(-1j * t * eig.values)
    return (eig.vectors * phases) @ eig.vectors.conj().T


def kron(A, B):
    """Tensor product with the first factor as the slow (outer) index."""
    return np.kron(np.asarray(A), np.asarray(B))


def partial_trace(rho, dimA, dimB, keep="A"):
    rho = np.asarray(rho)
    n = dimA * dimB
    if rho.shape != (n, n):
        raise DimensionMismatch(
            f"rho has shape {rho.shape}, expected ({n}, {n})")
    r = rho.reshape(dimA, dimB, dimA, dimB)
    if keep == "A":
        return np.einsum("ijkj->ik", r)
    if keep == "B":
        return np.einsum("ijil->jl", r)
    raise ValueError("keep must be 'A' or 'B'")


def _bisect(f, a, b, fa, fb, xtol, ftol=1e-12, maxiter=200):
    for _ in range(maxiter):
        m = 0.5 * (a + b)
        fm = float(f(m))
        if fm == 0.0 or abs(fm) < ftol or (b - a) < xtol:
            return m
        if np.sign(fm) == np.sign(fa):
            a, fa = m, fm
        else:
            b, fb = m, fm
    return 0.5 * (a + b)


def _evaluate(f, xs):
    # use a vectorized call when f supports it, else loop
    try:
        with np.errstate(all="ignore"):
            fs = np.asarray(f(xs), dtype=float)
        if fs.shape == xs.shape:
            return fs
    except (TypeError, ValueError):
        pass
    return np.array([f(x) for x in xs], dtype=float)


def find_roots(f, lo, hi, grid=DEFAULT_GRID):
    """All sign-change roots of a scalar function on [lo, hi].

    The interval is scanned on ``grid`` equally spaced points and every
    bracket is refined by bisection. Roots that only touch zero without
    a sign change are not found; densify the grid near sharp features.
    """
    if grid < 2:
        raise ValueError("grid must be at least 2")
    xs = np.linspace(lo, hi, grid)
    fs = _evaluate(f, xs)
    xtol = 1e-13 * (hi - lo)
    roots = []
    for i in range(grid - 1):
        fa, fb = fs[i], fs[i + 1]
        if not (np.isfinite(fa) and np.isfinite(fb)):
            continue
        if fa == 0.0:
            roots.append(xs[i])
        elif fa * fb < 0:
            roots.append(_bisect(f, xs[i], xs[i + 1], fa, fb, xtol))
    if fs[-1] == 0.0:
        roots.append(xs[-1])
    out = []
    for r in sorted(roots):
        if not out or r - out[-1] > 10 * xtol:
            out.append(r)
    return out

"""Spin representations, rotations, angular-momentum addition and the Zeeman problem.

Every basis is ordered m = +j, j-1, ..., -j. Spin quantum numbers are
stored internally as twice-integers so that half-integers compare exactly.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, sqrt

import numpy as np
import scipy.linalg

from .errors import InvalidJ, NonUnitAxis, NotSU2, TriangleViolation
from .numeric import evolve_unitary, hermitian_eig, kron

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def twice(j):
    """Return 2j as an int, raising InvalidJ unless j is a half-integer >= 0."""
    try:
        two = Fraction(j).limit_denominator(1000) * 2
    except (TypeError, ValueError) as exc:
        raise InvalidJ(f"not a number: {j!r}") from exc
    if two.denominator != 1 or two < 0 or abs(float(two) - 2 * float(j)) > 1e-9:
        raise InvalidJ(f"2j must be a non-negative integer, got j={j}")
    return int(two)


@dataclass(frozen=True)
class SpinRepresentation:
    twoj: int
    Jx: np.ndarray
    Jy: np.ndarray
    Jz: np.ndarray
    Jplus: np.ndarray
    Jminus: np.ndarray

    @property
    def j(self):
        return self.twoj / 2

    @property
    def dim(self):
        return self.twoj + 1

    @property
    def m_values(self):
        return np.array([(self.twoj - 2 * k) / 2 for k in range(self.dim)])

    def component(self, n):
        """The generator along the direction n, J_n = n . J."""
        return n[0] * self.Jx + n[1] * self.Jy + n[2] * self.Jz

    def casimir(self):
        return self.Jx @ self.Jx + self.Jy @ self.Jy + self.Jz @ self.Jz


def build_spin_rep(j):
    two = twice(j)
    jj = two / 2
    ms = np.array([(two - 2 * k) / 2 for k in range(two + 1)])
    Jp = np.zeros((two + 1, two + 1))
    # J+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>, and |m+1> sits one row above |m>
    for k in range(1, two + 1):
        m = ms[k]
        Jp[k - 1, k] = np.sqrt(jj * (jj + 1) - m * (m + 1))
    Jp = Jp.astype(complex)
    Jm = Jp.conj().T
    Jx = 0.5 * (Jp + Jm)
    Jy = -0.5j * (Jp - Jm)
    Jz = np.diag(ms).astype(complex)
    return SpinRepresentation(two, Jx, Jy, Jz, Jp, Jm)


def _unit(n, tol=1e-10):
    n = np.asarray(n, dtype=float)
    if n.shape != (3,) or abs(np.linalg.norm(n) - 1.0) > tol:
        raise NonUnitAxis(f"axis must be a unit 3-vector, got {n}")
    return n


def rotation_matrix(rep, n, phi):
    """R(phi) = exp(-i phi n.J) in the given representation."""
    n = _unit(n)
    return evolve_unitary(rep.component(n), phi)


def rotation_closed_form(twoj, n, phi):
    """Closed-form rotations for spin 1/2 and spin 1."""
    n = _unit(n)
    if twoj == 1:
        sn = n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z
        return np.cos(phi / 2) * np.eye(2) - 1j * np.sin(phi / 2) * sn
    if twoj == 2:
        Sn = build_spin_rep(1).component(n)
        return np.eye(3) - 1j * np.sin(phi) * Sn - (1 - np.cos(phi)) * Sn @ Sn
    raise InvalidJ("closed forms exist only for j=1/2 and j=1")


def su2_axis_angle(U, tol=1e-10):
    """Axis and angle of a spin-1/2 rotation matrix.

    Returns (n, phi) with phi in [0, 2pi). The identity (and -identity,
    which is the same rotation) has no defined axis; z is returned.
    """
    U = np.asarray(U, dtype=complex)
    if U.shape != (2, 2):
        raise NotSU2("expected a 2x2 matrix")
    if (np.max(np.abs(U.conj().T @ U - np.eye(2))) > tol
            or abs(np.linalg.det(U) - 1) > tol):
        raise NotSU2("matrix is not special unitary")
    c = 0.5 * np.trace(U).real
    # tr(U sigma_k) = -2i sin(phi/2) n_k
    v = np.array([0.5j * np.trace(U @ s) for s in (SIGMA_X, SIGMA_Y, SIGMA_Z)]).real
    s = np.linalg.norm(v)
    if s < tol:
        return np.array([0.0, 0.0, 1.0]), 0.0
    phi = 2 * np.arctan2(s, c)
    return v / s, float(phi % (2 * np.pi))


def euler_rotation(rep, alpha, beta, gamma):
    """R = exp(-i alpha Jz) exp(-i beta Jy) exp(-i gamma Jz)."""
    return (evolve_unitary(rep.Jz, alpha) @ evolve_unitary(rep.Jy, beta)
            @ evolve_unitary(rep.Jz, gamma))


@dataclass(frozen=True)
class CGDecomposition:
    twoj1: int
    twoj2: int
    multiplets: tuple  # twice-j values, descending
    T: np.ndarray
    labels: tuple  # (twoj, twom) per column

    @property
    def j_values(self):
        return [t / 2 for t in self.multiplets]


def _total_ops(r1, r2):
    I1, I2 = np.eye(r1.dim), np.eye(r2.dim)
    Jm = kron(r1.Jminus, I2) + kron(I1, r2.Jminus)
    Jz = kron(r1.Jz, I2) + kron(I1, r2.Jz)
    return Jm.real, np.diag(Jz).real


def add_angular_momentum(j1, j2):
    """Clebsch-Gordan matrix built by lowering from the top of each multiplet.

    Product basis |m1, m2> has m2 as the fast index. Columns of T are the
    coupled states ordered by descending j and then descending m. The head
    state of each multiplet has a positive coefficient on its component of
    largest m1.
    """
    a, b = twice(j1), twice(j2)
    r1, r2 = build_spin_rep(a / 2), build_spin_rep(b / 2)
    Jm, mz = _total_ops(r1, r2)
    d = r1.dim * r2.dim
    cols, labels = [], []
    twojs = tuple(range(a + b, abs(a - b) - 1, -2))
    for tj in twojs:
        sector = np.flatnonzero(np.isclose(2 * mz, tj))
        if cols:
            prev = np.array(cols)[:, sector]
            prev = prev[np.any(np.abs(prev) > 1e-14, axis=1)]
        else:
            prev = np.zeros((0, len(sector)))
        if len(prev):
            null = scipy.linalg.null_space(prev)
        else:
            null = np.eye(len(sector))
        head_sector = null[:, 0]
        head = np.zeros(d)
        head[sector] = head_sector
        # sector is ordered by descending m1, so the first nonzero entry has maximal m1
        lead = head[sector][np.flatnonzero(np.abs(head[sector]) > 1e-12)[0]]
        head *= np.sign(lead) / np.linalg.norm(head)
        v = head
        for k in range(tj + 1):
            cols.append(v)
            labels.append((tj, tj - 2 * k))
            if k < tj:
                w = Jm @ v
                v = w / np.linalg.norm(w)
    T = np.array(cols).T
    T[np.abs(T) < 1e-15] = 0.0
    return CGDecomposition(a, b, twojs, T, tuple(labels))


def j_squared_product_basis(decomp):
    """Matrix of the total J^2 in the product basis, T diag(j(j+1)) T^T."""
    jj = np.array([tj / 2 * (tj / 2 + 1) for tj, _ in decomp.labels])
    return (decomp.T * jj) @ decomp.T.T


def _triangle(ta, tb, tc):
    return (abs(ta - tb) <= tc <= ta + tb) and (ta + tb + tc) % 2 == 0


def wigner_eckart_g(j, l, s):
    """Projection factors (gL, gS) of L and S onto J inside a j multiplet."""
    tj, tl, ts = twice(j), twice(l), twice(s)
    if not _triangle(tl, ts, tj) or tj == 0:
        raise TriangleViolation(f"(j={j}, l={l}, s={s}) not triangle-compatible")
    J = Fraction(tj, 2)
    L = Fraction(tl, 2)
    S = Fraction(ts, 2)
    jj, ll, ss = J * (J + 1), L * (L + 1), S * (S + 1)
    gL = (jj + ll - ss) / (2 * jj)
    gS = (jj + ss - ll) / (2 * jj)
    return float(gL), float(gS)


def spin_orbit_matrix(l=1, s=0.5):
    """L.S in the |m_l, m_s> product basis."""
    L, S = build_spin_rep(l), build_spin_rep(s)
    return (kron(L.Jx, S.Jx) + kron(L.Jy, S.Jy) + kron(L.Jz, S.Jz)).real


def zeeman_hamiltonian(v, g, h):
    """H = h Lz + g h Sz + v L.S for l=1, s=1/2 in the |m_l, m_s> basis."""
    L, S = build_spin_rep(1), build_spin_rep(0.5)
    Lz = kron(L.Jz, np.eye(2)).real
    Sz = kron(np.eye(3), S.Jz).real
    return h * Lz + g * h * Sz + v * spin_orbit_matrix(1, 0.5)


def zeeman_spectrum(v, g, h_values):
    """Sorted eigenvalues, one row of six per field value."""
    h_values = np.atleast_1d(np.asarray(h_values, dtype=float))
    return np.array([hermitian_eig(zeeman_hamiltonian(v, g, h)).values
                     for h in h_values])


def _fact(n2):
    # n2 is twice an integer argument
    if n2 < 0 or n2 % 2:
        raise ValueError
    return factorial(n2 // 2)


def wigner_3j(l, s, j, ml, ms, m):
    """Wigner 3j symbol with lower row (ml, ms, -m).

    Returns 0 whenever the triangle rule or ml + ms = m fails. The value
    is related to the Clebsch-Gordan matrix through
    T = (-1)**(l - s + m) sqrt(2j + 1) * wigner_3j(l, s, j, ml, ms, m).
    """
    a, b, c = twice(l), twice(s), twice(j)
    try:
        x, y = round(2 * ml), round(2 * ms)
        z = -round(2 * m)
    except TypeError:
        return 0.0
    if x + y + z != 0 or not _triangle(a, b, c):
        return 0.0
    if abs(x) > a or abs(y) > b or abs(z) > c:
        return 0.0
    if (a + x) % 2 or (b + y) % 2 or (c + z) % 2:
        return 0.0
    # Racah formula with all arguments doubled
    pre = (_fact(a + b - c) * _fact(a - b + c) * _fact(-a + b + c)
           / _fact(a + b + c + 2))
    pre *= (_fact(a + x) * _fact(a - x) * _fact(b + y) * _fact(b - y)
            * _fact(c + z) * _fact(c - z))
    total = 0.0
    kmin = max(0, (b - c - x) // 2, (a - c + y) // 2)
    kmax = min((a + b - c) // 2, (a - x) // 2, (b + y) // 2)
    for k in range(kmin, kmax + 1):
        den = (factorial(k) * _fact(c - b + x + 2 * k) * _fact(c - a - y + 2 * k)
               * _fact(a + b - c - 2 * k) * _fact(a - x - 2 * k) * _fact(b + y - 2 * k))
        total += (-1) ** k / den
    phase = (-1) ** ((a - b - z) // 2)
    return float(phase * sqrt(pre) * total)


def cg_from_3j(l, s, j, ml, ms, m):
    """Clebsch-Gordan coefficient obtained from the 3j symbol."""
    sign = (-1) ** ((twice(l) - twice(s) + round(2 * m)) // 2)
    return sign * sqrt(twice(j) + 1) * wigner_3j(l, s, j, ml, ms, m)

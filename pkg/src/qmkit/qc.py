"""State-vector simulator, Hadamard and Fourier transforms, modular
multiplication, period finding and the Shor factoring pipeline.

Qubit 0 is the least significant bit of the basis index. In a Shor
register the control (x) qubits come first, x = index mod 2**n_c, and the
work (y) register sits above them.

The Fourier transform uses exp(-2 pi i k x / N_c), the conjugate of the
convention found in most quantum-computing texts.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import isqrt

import numpy as np

from .errors import (DuplicateIndex, ExtractionFailed, IndexOutOfRange, NoInverse,
                     NotCoprime, RetriesExhausted)

GATES = {
    "T": np.diag([1, np.exp(1j * np.pi / 4)]),
    "S": np.diag([1, 1j]),
    "Z": np.diag([1, -1]).astype(complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "R": np.array([[1, -1], [1, 1]], dtype=complex) / np.sqrt(2),
}
MAX_RETRIES = 32


@dataclass
class QubitRegister:
    n: int
    amplitudes: np.ndarray = None

    def __post_init__(self):
        if self.amplitudes is None:
            self.amplitudes = np.zeros(2 ** self.n, dtype=complex)
            self.amplitudes[0] = 1.0
        else:
            self.amplitudes = np.asarray(self.amplitudes, dtype=complex).copy()
            if self.amplitudes.shape != (2 ** self.n,):
                raise IndexOutOfRange("amplitude vector has the wrong length")

    @classmethod
    def basis(cls, n, index):
        reg = cls(n)
        reg.amplitudes[0] = 0.0
        reg.amplitudes[index] = 1.0
        return reg

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self):
        return np.abs(self.amplitudes) ** 2

    def tensor(self):
        # axis n-1-q holds qubit q
        return self.amplitudes.reshape((2,) * self.n)

    def axis(self, q):
        return self.n - 1 - q


def _check(reg, *qubits):
    for q in qubits:
        if not 0 <= q < reg.n:
            raise IndexOutOfRange(f"qubit {q} outside a {reg.n}-qubit register")
    if len(set(qubits)) != len(qubits):
        raise DuplicateIndex(f"qubits must be distinct, got {qubits}")


def _gate(gate):
    return GATES[gate] if isinstance(gate, str) else np.asarray(gate, dtype=complex)


def controlled_apply(reg, gate, controls, target):
    """Apply a one-qubit gate to target on the subspace where all controls are 1."""
    controls = list(controls)
    _check(reg, *controls, target)
    U = _gate(gate)
    psi = reg.tensor()
    idx = [slice(None)] * reg.n
    for c in controls:
        idx[reg.axis(c)] = 1
    sub = psi[tuple(idx)]
    # the target axis shifts left by the number of fixed control axes before it
    t = reg.axis(target) - sum(1 for c in controls if reg.axis(c) < reg.axis(target))
    sub = np.moveaxis(np.tensordot(U, sub, axes=([1], [t])), 0, t)
    psi[tuple(idx)] = sub
    return reg


def apply_gate(reg, gate, target):
    return controlled_apply(reg, gate, [], target)


def cnot(reg, control, target):
    return controlled_apply(reg, "X", [control], target)


def toffoli(reg, c1, c2, target):
    return controlled_apply(reg, "X", [c1, c2], target)


def swap_via_cnots(reg, a, b):
    cnot(reg, a, b)
    cnot(reg, b, a)
    cnot(reg, a, b)
    return reg


def gate_matrix(n, op):
    """Dense matrix of a register operation op(reg), column by column."""
    cols = []
    for i in range(2 ** n):
        reg = QubitRegister.basis(n, i)
        op(reg)
        cols.append(reg.amplitudes)
    return np.array(cols).T


def hadamard_all(reg, qubits=None):
    for q in (range(reg.n) if qubits is None else qubits):
        apply_gate(reg, "H", q)
    return reg


def _subregister(reg, lo, width):
    if lo < 0 or lo + width > reg.n:
        raise IndexOutOfRange("subregister outside the register")
    return reg.amplitudes.reshape(2 ** (reg.n - lo - width), 2 ** width, 2 ** lo)


def qft(reg, lo=0, width=None, inverse=False):
    """|x> -> N_c**-1/2 sum_k exp(-2 pi i k x / N_c) |k> on qubits lo..lo+width-1."""
    width = reg.n - lo if width is None else width
    view = _subregister(reg, lo, width)
    f = np.fft.ifft if inverse else np.fft.fft
    reg.amplitudes = f(view, axis=1, norm="ortho").reshape(-1)
    return reg


def qft_matrix(width):
    Nc = 2 ** width
    k = np.arange(Nc)
    return np.exp(-2j * np.pi * np.outer(k, k) / Nc) / np.sqrt(Nc)


# ------------------------------------------------------------ modular arithmetic

def euclid_gcd(a, b):
    """Greatest common divisor by repeated remainders."""
    a, b = abs(int(a)), abs(int(b))
    if a == 0 and b == 0:
        raise ValueError("gcd(0, 0) is undefined")
    while b:
        a, b = b, a % b
    return a


def work_width(N):
    return max(1, int(N - 1).bit_length())


def default_control_width(N):
    return 2 * int(np.ceil(np.log2(N))) + 1


def stage_permutation(Ms, N, n):
    """y -> Ms y mod N on [0, N), identity on [N, 2**n)."""
    y = np.arange(2 ** n)
    return np.where(y < N, (Ms * y) % N, y)


def modmul_permutation(M, N, n_c, n=None):
    """Index map of the full controlled multiplication on x + 2**n_c y."""
    if euclid_gcd(M, N) != 1:
        raise NotCoprime(f"gcd({M}, {N}) != 1")
    n = work_width(N) if n is None else n
    Nc = 2 ** n_c
    x = np.arange(Nc)
    y = np.arange(2 ** n)
    Y = np.broadcast_to(y[:, None], (2 ** n, Nc)).copy()
    for s in range(n_c):
        Ms = pow(M, 2 ** s, N)
        perm = stage_permutation(Ms, N, n)
        on = (x >> s) & 1 == 1
        Y[:, on] = perm[Y[:, on]]
    return (x[None, :] + Nc * Y).reshape(-1)


def controlled_modmul(reg, M, N, n_c):
    """|x>|y> -> |x>|M**x y mod N> as n_c staged controlled multiplications."""
    n = reg.n - n_c
    if 2 ** n < N:
        raise IndexOutOfRange("work register too small for N")
    dest = modmul_permutation(M, N, n_c, n)
    new = np.empty_like(reg.amplitudes)
    new[dest] = reg.amplitudes
    reg.amplitudes = new
    return reg


def convergents(num, den):
    """Continued-fraction convergents p/q of num/den."""
    out = []
    h0, h1, k0, k1 = 0, 1, 1, 0
    a, b = num, den
    while b:
        q = a // b
        a, b = b, a - q * b
        h0, h1 = h1, q * h1 + h0
        k0, k1 = k1, q * k1 + k0
        out.append(Fraction(h1, k1))
    return out


def order_from_sample(k, n_c, M, N):
    """Order r from the convergents of k/2**n_c, or None.

    Each convergent denominator d < N is tried together with its small
    multiples m d for m up to ceil(log2 N); the first r with M**r = 1 mod N
    wins. A sample k = 0 carries no information and is rejected.
    """
    if k == 0:
        return None
    mult = max(1, int(np.ceil(np.log2(N))))
    for c in convergents(k, 2 ** n_c):
        d = c.denominator
        if d >= N:
            break
        for m in range(1, mult + 1):
            r = m * d
            if r >= N:
                break
            if pow(M, r, N) == 1:
                return r
    return None


def multiplicative_order(M, N):
    r, v = 1, M % N
    while v != 1:
        v = (v * M) % N
        r += 1
    return r


def period_find_distribution(N, M, n_c=None):
    """Exact distribution of the measured control value k."""
    n_c = default_control_width(N) if n_c is None else n_c
    return _distribution(int(N), int(M), int(n_c)).copy()


@lru_cache(maxsize=64)
def _distribution(N, M, n_c):
    n = work_width(N)
    reg = QubitRegister(n_c + n)
    reg.amplitudes[:] = 0
    reg.amplitudes[2 ** n_c] = 1.0  # x = 0, y = 1
    hadamard_all(reg, range(n_c))
    controlled_modmul(reg, M, N, n_c)
    qft(reg, 0, n_c)
    probs = reg.probabilities().reshape(2 ** n, 2 ** n_c).sum(axis=0)
    probs = probs / probs.sum()
    probs.flags.writeable = False
    return probs


@dataclass
class PeriodFindResult:
    r: int | None
    samples: list = field(default_factory=list)


def period_find(N, M, n_c=None, rng=None, retries=MAX_RETRIES):
    """Sample k from the simulated circuit until continued fractions give a valid order."""
    if euclid_gcd(M, N) != 1:
        raise NotCoprime(f"gcd({M}, {N}) != 1")
    rng = np.random.default_rng() if rng is None else rng
    n_c = default_control_width(N) if n_c is None else n_c
    probs = period_find_distribution(N, M, n_c)
    samples = []
    for _ in range(retries):
        k = int(rng.choice(len(probs), p=probs))
        r = order_from_sample(k, n_c, M, N)
        samples.append({"k": k, "r": r})
        if r is not None:
            assert pow(M, r, N) == 1
            return PeriodFindResult(r, samples)
    raise ExtractionFailed(f"no valid order for M={M}, N={N}", samples)


def _integer_root(N, b):
    x = round(N ** (1.0 / b))
    for c in (x - 1, x, x + 1):
        if c > 1 and c ** b == N:
            return c
    return None


def _is_prime(n):
    if n < 2:
        return False
    for p in range(2, isqrt(n) + 1):
        if n % p == 0:
            return False
    return True


@dataclass
class ShorRun:
    N: int
    n_c: int
    seed: int | None
    attempts: list = field(default_factory=list)
    factors: tuple | None = None
    classical: str | None = None

    def transcript(self):
        return {"N": self.N, "n_c": self.n_c, "seed": self.seed,
                "attempts": self.attempts, "classical": self.classical,
                "factors": list(self.factors) if self.factors else None}


def shor_factor(N, rng=None, seed=None, n_c=None, retries=MAX_RETRIES):
    """Factor N with random bases, simulated period finding and Euclid's algorithm."""
    if rng is None:
        rng = np.random.default_rng(seed)
    N = int(N)
    if N < 4 or _is_prime(N):
        raise ValueError(f"{N} is not composite")
    n_c = default_control_width(N) if n_c is None else n_c
    run = ShorRun(N, n_c, seed)
    if N % 2 == 0:
        run.factors, run.classical = (2, N // 2), "even"
        return run
    for b in range(2, N.bit_length() + 1):
        c = _integer_root(N, b)
        if c is not None:
            run.factors, run.classical = (c, N // c), "prime power"
            return run
    for _ in range(retries):
        M = int(rng.integers(2, N))
        g = euclid_gcd(M, N)
        step = {"M": M, "gcd": g}
        run.attempts.append(step)
        if g > 1:
            step["outcome"] = "lucky gcd"
            run.factors = tuple(sorted((g, N // g)))
            return run
        try:
            found = period_find(N, M, n_c, rng, retries=1)
        except ExtractionFailed as exc:
            step["samples"], step["outcome"] = exc.transcript, "extraction failed"
            continue
        r = found.r
        step["samples"], step["r"] = found.samples, r
        if r % 2:
            step["outcome"] = "odd r"
            continue
        Q = pow(M, r // 2, N)
        step["Q"] = Q
        if Q == N - 1:
            step["outcome"] = "Q = -1"
            continue
        p, q = euclid_gcd(Q - 1, N), euclid_gcd(Q + 1, N)
        step["outcome"] = "factored"
        f = p if 1 < p < N else q
        run.factors = tuple(sorted((f, N // f)))
        assert run.factors[0] * run.factors[1] == N
        return run
    raise RetriesExhausted(f"no factor of {N} after {retries} attempts", run.transcript())


# ------------------------------------------------------------ RSA

@dataclass(frozen=True)
class RSAResult:
    N: int
    b: int
    B: int
    A_recovered: int


def mod_inverse(a, m):
    """Inverse of a mod m via the extended Euclid recursion."""
    r0, r1, s0, s1 = m, a % m, 0, 1
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if r0 != 1:
        raise NoInverse(f"{a} has no inverse mod {m}")
    return s0 % m


def rsa_roundtrip(p, q, a, A):
    if not (_is_prime(p) and _is_prime(q)):
        raise ValueError("p and q must be prime")
    N = p * q
    if not 0 <= A < N:
        raise ValueError("message must satisfy 0 <= A < N")
    b = mod_inverse(a, (p - 1) * (q - 1))
    B = pow(A, a, N)
    return RSAResult(N, b, B, pow(B, b, N))

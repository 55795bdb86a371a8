from math import gcd

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmkit.errors import (DuplicateIndex, ExtractionFailed, IndexOutOfRange, NoInverse,
                          NotCoprime, RetriesExhausted)
from qmkit.qc import (GATES, QubitRegister, apply_gate, cnot, controlled_modmul, convergents,
                      default_control_width, euclid_gcd, gate_matrix, hadamard_all,
                      mod_inverse, multiplicative_order, order_from_sample,
                      period_find, period_find_distribution, qft, qft_matrix, rsa_roundtrip,
                      shor_factor, swap_via_cnots, toffoli, work_width)


def test_gates_are_unitary():
    for U in GATES.values():
        assert np.allclose(U.conj().T @ U, np.eye(2))
    assert np.allclose(GATES["S"] @ GATES["S"], GATES["Z"])
    assert np.allclose(GATES["T"] @ GATES["T"], GATES["S"])


def test_cnot_matrix_with_qubit_zero_least_significant():
    M = gate_matrix(2, lambda r: cnot(r, 1, 0))
    # control is qubit 1 (value 2), target qubit 0 (value 1): swaps |2> and |3>
    ref = np.eye(4)[[0, 1, 3, 2]]
    assert np.allclose(M, ref)


def test_swap_and_toffoli():
    S = gate_matrix(2, lambda r: swap_via_cnots(r, 0, 1))
    assert np.allclose(S, np.eye(4)[[0, 2, 1, 3]])
    T = gate_matrix(3, lambda r: toffoli(r, 1, 2, 0))
    assert np.allclose(T, np.eye(8)[[0, 1, 2, 3, 4, 5, 7, 6]])


def test_register_errors():
    reg = QubitRegister(2)
    with pytest.raises(IndexOutOfRange):
        apply_gate(reg, "H", 2)
    with pytest.raises(DuplicateIndex):
        cnot(reg, 1, 1)
    with pytest.raises(IndexOutOfRange):
        QubitRegister(2, np.ones(3))


def test_hadamard_all_gives_uniform_superposition():
    reg = hadamard_all(QubitRegister(4))
    assert np.allclose(reg.amplitudes, 0.25)


@settings(max_examples=10, deadline=None)
@given(st.integers(1, 6), st.integers(0, 1000))
def test_qft_matches_matrix_and_inverts(n, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    v /= np.linalg.norm(v)
    reg = qft(QubitRegister(n, v))
    assert np.allclose(reg.amplitudes, qft_matrix(n) @ v)
    assert np.allclose(qft(reg, inverse=True).amplitudes, v)


def test_one_qubit_qft_is_hadamard():
    assert np.allclose(qft_matrix(1), GATES["H"])


def test_qft_on_subregister():
    n_lo, n = 2, 5
    rng = np.random.default_rng(1)
    v = rng.normal(size=2 ** n)
    reg = qft(QubitRegister(n, v), lo=n_lo, width=3)
    ref = np.kron(qft_matrix(3), np.eye(2 ** n_lo)) @ v
    assert np.allclose(reg.amplitudes, ref)


def test_controlled_modmul_action():
    N, M, n_c = 15, 7, 4
    n = work_width(N)
    for x in range(2 ** n_c):
        for y in (1, 4, 14, 15):
            reg = QubitRegister.basis(n_c + n, x + 2 ** n_c * y)
            controlled_modmul(reg, M, N, n_c)
            y_new = (pow(M, x, N) * y) % N if y < N else y
            assert reg.amplitudes[x + 2 ** n_c * y_new] == 1.0
    with pytest.raises(NotCoprime):
        controlled_modmul(QubitRegister(n_c + n), 5, N, n_c)


def test_widths():
    assert work_width(15) == 4 and work_width(21) == 5
    assert default_control_width(15) == 9


def test_gcd_and_order():
    assert euclid_gcd(21, 14) == 7
    assert multiplicative_order(7, 15) == 4
    assert multiplicative_order(2, 21) == 6
    with pytest.raises(ValueError):
        euclid_gcd(0, 0)


def test_convergents():
    fr = convergents(13, 30)
    assert [(c.numerator, c.denominator) for c in fr][-1] == (13, 30)
    assert (fr[1].numerator, fr[1].denominator) == (1, 2)


def test_order_from_sample():
    # k = 64 of 256 is 1/4: period 4 for M = 7 mod 15
    assert order_from_sample(64, 8, 7, 15) == 4
    assert order_from_sample(0, 8, 7, 15) is None


def test_period_distribution_peaks():
    probs = period_find_distribution(15, 7, 8)
    assert probs.sum() == pytest.approx(1.0)
    peaks = np.sort(np.argsort(probs)[-4:])
    assert list(peaks) == [0, 64, 128, 192]
    assert probs[peaks].sum() == pytest.approx(1.0)


def test_period_find_and_failure():
    res = period_find(15, 7, 8, np.random.default_rng(0))
    assert res.r == 4
    # with one control qubit this seed draws k = 0 three times
    with pytest.raises(ExtractionFailed) as info:
        period_find(15, 7, 1, np.random.default_rng(20), retries=3)
    assert len(info.value.transcript) == 3


def test_shor_classical_shortcuts():
    assert shor_factor(22, seed=0).classical == "even"
    run = shor_factor(49, seed=0)
    assert run.factors == (7, 7) and run.classical == "prime power"
    with pytest.raises(ValueError):
        shor_factor(13)


def test_shor_transcript_is_reproducible():
    a = shor_factor(21, seed=5).transcript()
    b = shor_factor(21, seed=5).transcript()
    assert a == b and a["factors"] == [3, 7]


def test_shor_retries_exhausted():
    with pytest.raises(RetriesExhausted):
        shor_factor(15, seed=6, n_c=1, retries=2)


def test_mod_inverse():
    for m in (7, 20, 33):
        for a in range(1, m):
            if gcd(a, m) == 1:
                assert (a * mod_inverse(a, m)) % m == 1
    with pytest.raises(NoInverse):
        mod_inverse(4, 20)


def test_rsa_example():
    res = rsa_roundtrip(3, 11, 3, 5)
    assert (res.N, res.b, res.B, res.A_recovered) == (33, 7, 26, 5)
    with pytest.raises(ValueError):
        rsa_roundtrip(4, 11, 3, 5)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shottree.benchmarks import gen_bv, gen_ghz
from shottree.circuit import Circuit, gate
from shottree.density import circuit_unitary, embed_operator
from shottree.rng import RandomStream
from shottree.statevector import (
    CapacityError,
    MemoryBudget,
    Statevector,
    apply_circuit,
    apply_gate,
    copy_state,
    ideal_distribution,
    init_state,
    sample_outcome,
)

from conftest import random_circuit


def oracle_state(c):
    """Full 2^n x 2^n unitary applied to |0..0>."""
    psi = np.zeros(1 << c.n_qubits, dtype=complex)
    psi[0] = 1
    return circuit_unitary(c) @ psi


class TestInit:
    def test_one_qubit(self):
        np.testing.assert_array_equal(init_state(1).amplitudes, [1, 0])

    def test_three_qubits(self):
        s = init_state(3)
        assert len(s) == 8 and s.amplitudes[0] == 1 and not s.amplitudes[1:].any()

    def test_27_qubits_rejected(self):
        with pytest.raises(CapacityError):
            init_state(27)

    def test_budget_too_small(self):
        with pytest.raises(CapacityError):
            init_state(10, MemoryBudget(limit_bytes=1000))

    def test_budget_released_on_collection(self):
        b = MemoryBudget(limit_bytes=16 * 8)
        s = init_state(3, b)
        assert b.in_use == 128
        del s
        assert b.in_use == 0


class TestApplyGate:
    def test_x(self):
        np.testing.assert_allclose(apply_gate(init_state(1), gate("X", 0)).amplitudes, [0, 1])

    def test_h(self):
        r = 1 / math.sqrt(2)
        np.testing.assert_allclose(apply_gate(init_state(1), gate("H", 0)).amplitudes, [r, r])

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            apply_gate(init_state(2), gate("X", 2))

    def test_little_endian(self):
        s = apply_gate(init_state(3), gate("X", 1))
        assert s.amplitudes[2] == 1

    def test_bv3_matches_matrix_oracle(self):
        c = gen_bv(2, "11")
        s = apply_circuit(init_state(3), c)
        np.testing.assert_allclose(s.amplitudes, oracle_state(c), atol=1e-12)
        # ancilla (qubit 2) is in |->, data qubits read the hidden string
        probs = s.probabilities()
        assert probs[0b011] + probs[0b111] == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("seed", range(20))
    def test_random_three_qubit_vs_oracle(self, seed):
        c = random_circuit(3, 30, seed, two_qubit_fraction=0.5)
        s = apply_circuit(init_state(3), c)
        np.testing.assert_allclose(s.amplitudes, oracle_state(c), rtol=0, atol=1e-10)

    def test_two_qubit_gate_on_reversed_pair(self):
        c = Circuit(4, (gate("H", 3), gate("CX", 3, 1), gate("CP", 2, 0, params=[0.7]), gate("SWAP", 3, 0)))
        s = apply_circuit(init_state(4), c)
        np.testing.assert_allclose(s.amplitudes, oracle_state(c), atol=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 10), st.integers(1, 200), st.integers(0, 2**31))
    def test_norm_preserved(self, n, n_gates, seed):
        s = apply_circuit(init_state(n), random_circuit(n, n_gates, seed))
        assert abs(s.norm() - 1) <= 1e-9


class TestEmbedOracle:
    def test_embed_matches_kron(self):
        # qubit 0 is the rightmost kron factor
        m = np.array([[0, 1], [1, 0]])
        np.testing.assert_array_equal(embed_operator(m, (0,), 2), np.kron(np.eye(2), m))
        np.testing.assert_array_equal(embed_operator(m, (1,), 2), np.kron(m, np.eye(2)))


class TestCopy:
    def test_copy_is_independent(self):
        s = init_state(1)
        dup = copy_state(s)
        np.testing.assert_array_equal(dup.amplitudes, [1, 0])
        apply_gate(dup, gate("X", 0))
        np.testing.assert_array_equal(s.amplitudes, [1, 0])

    def test_copy_random_vector(self):
        rng = np.random.default_rng(0)
        v = rng.normal(size=1024) + 1j * rng.normal(size=1024)
        s = Statevector(v / np.linalg.norm(v))
        dup = copy_state(s)
        assert np.array_equal(dup.amplitudes, s.amplitudes)
        assert dup.amplitudes is not s.amplitudes

    def test_copy_over_budget(self):
        b = MemoryBudget(limit_bytes=16 * 8 * 2)
        s = init_state(3, b)
        keep = copy_state(s)
        with pytest.raises(CapacityError):
            copy_state(s)
        del keep
        copy_state(s)


class TestSampling:
    def test_basis_state(self):
        s = init_state(1)
        rng = RandomStream(1)
        assert {sample_outcome(s, rng) for _ in range(100)} == {"0"}

    def test_plus_state(self):
        s = apply_gate(init_state(1), gate("H", 0))
        rng = RandomStream(2)
        ones = sum(sample_outcome(s, rng) == "1" for _ in range(100000))
        assert abs(ones / 100000 - 0.5) <= 0.01

    def test_ghz3(self):
        s = apply_circuit(init_state(3), gen_ghz(3))
        rng = RandomStream(3)
        draws = [sample_outcome(s, rng) for _ in range(100000)]
        assert set(draws) <= {"000", "111"}
        assert abs(draws.count("000") / 100000 - 0.5) <= 0.01

    def test_consumes_one_draw(self):
        s = apply_gate(init_state(1), gate("H", 0))
        a, b = RandomStream(5), RandomStream(5)
        sample_outcome(s, a)
        b.random()
        assert a.state == b.state

    def test_marginals_multinomial(self):
        c = random_circuit(3, 20, seed=11)
        s = apply_circuit(init_state(3), c)
        p = s.probabilities()
        rng = RandomStream(4)
        n = 50000
        counts = np.zeros(8)
        for _ in range(n):
            counts[int(sample_outcome(s, rng), 2)] += 1
        sigma = np.sqrt(p * (1 - p) / n)
        assert np.all(np.abs(counts / n - p) <= 5 * sigma + 1e-12)


def test_ideal_distribution_ghz():
    assert ideal_distribution(gen_ghz(3)) == pytest.approx({"000": 0.5, "111": 0.5})

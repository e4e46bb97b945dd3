import math

import numpy as np
import pytest

from shottree.benchmarks import gen_bv, gen_ghz, gen_qft
from shottree.circuit import Circuit, gate, gate_matrix, slice_circuit
from shottree.metrics import tvd
from shottree.noise import Depolarizing, NoiseModel, Readout, kraus_for
from shottree.rng import RandomStream, child_key, root_key
from shottree.scheduler import (
    TreeStructure,
    estimate_speedup,
    execute_baseline,
    execute_tree,
    instances_of,
    subcircuit_nodes,
    total_nodes,
)
from shottree.statevector import CapacityError, MemoryBudget, ideal_distribution

from conftest import NAMED_MODELS, random_circuit


def _apply(psi, m, qubits, n):
    """Apply a 1- or 2-qubit matrix with numpy tensor contraction."""
    k = len(qubits)
    t = psi.reshape((2,) * n)
    axes = [n - 1 - q for q in qubits]
    t = np.tensordot(m.reshape((2,) * (2 * k)), t, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(t, list(range(k)), axes).reshape(-1)


def reference_tree(slices, arities, m, seed):
    """Recursive tree simulation written against the numpy/Python APIs only.

    Mirrors the documented stream layout: each node draws one uniform per
    noise location in gate order, and leaves draw the sample then one
    uniform per readout bit from qubit 0 upwards.
    """
    n = slices[0].n_qubits
    ro = m.readout
    outcomes = []

    def run(psi, depth, key):
        for child in range(arities[depth]):
            ckey = child_key(key, depth, child)
            rng = RandomStream(ckey)
            s = psi.copy()
            for g in slices[depth].gates:
                s = _apply(s, gate_matrix(g.kind), g.qubits, n)
                for q in g.qubits:
                    for ch in m.after_gate:
                        ops = kraus_for(ch, g.tag).operators
                        cand = [_apply(s, k, (q,), n) for k in ops]
                        probs = np.array([np.vdot(v, v).real for v in cand])
                        thresh = rng.random() * probs.sum()
                        acc, chosen = 0.0, 0
                        for j, pj in enumerate(probs):
                            if pj <= 0:
                                continue
                            acc += pj
                            chosen = j
                            if thresh < acc:
                                break
                        s = cand[chosen] / math.sqrt(probs[chosen])
            if depth + 1 < len(arities):
                run(s, depth + 1, ckey)
                continue
            cum = np.cumsum(np.abs(s) ** 2)
            idx = int(np.searchsorted(cum, rng.random(), side="right"))
            if ro is not None:
                for q in range(n):
                    u = rng.random()
                    if (idx >> q) & 1:
                        idx ^= (u < ro.p10) << q
                    else:
                        idx ^= (u < ro.p01) << q
            outcomes.append(format(idx, f"0{n}b"))

    psi0 = np.zeros(1 << n, dtype=complex)
    psi0[0] = 1
    run(psi0, 0, root_key(seed))
    counts = {}
    for o in outcomes:
        counts[o] = counts.get(o, 0) + 1
    return counts


class TestTreeArithmetic:
    def test_node_counts(self):
        assert [instances_of((16, 2, 2), i) for i in (1, 2, 3)] == [16, 32, 64]
        assert total_nodes((16, 2, 2)) == 113
        assert [instances_of((64, 1, 1), i) for i in (1, 2, 3)] == [64, 64, 64]
        assert total_nodes((64, 1, 1)) == 193
        assert instances_of((500,), 1) == 500

    def test_index_range(self):
        with pytest.raises(IndexError):
            instances_of((2, 2), 0)
        with pytest.raises(IndexError):
            instances_of((2, 2), 3)

    @pytest.mark.parametrize(
        "arities,nodes,speedup",
        [((250, 2, 2), 1750, 1.71), ((20, 10, 5), 1220, 2.46), ((10, 10, 10), 1110, 2.70),
         ((5, 10, 20), 1055, 2.84), ((2, 2, 250), 1006, 2.98)],
    )
    def test_speedup_table(self, arities, nodes, speedup):
        assert subcircuit_nodes(arities) == nodes
        assert round(estimate_speedup(arities, 1000), 2) == speedup

    def test_baseline_speedup_is_one(self):
        assert estimate_speedup((1000,)) == 1.0

    def test_structure_validation(self):
        with pytest.raises(ValueError):
            TreeStructure((2, 0))
        with pytest.raises(ValueError):
            TreeStructure((2, 2), (gen_ghz(3),))


class TestExecuteTree:
    def test_ghz3_noiseless_reuse(self):
        t = TreeStructure.from_partition(gen_ghz(3), [1], (2, 4))
        res = execute_tree(t, None, master_seed=1)
        assert res.shots == 8
        assert set(res.counts) <= {"000", "111"}
        assert res.nodes_executed == 2 + 8
        # last child consumes the parent state, every other child copies
        assert res.states_copied == 1 + 2 * 3

    def test_bv3_nodes(self):
        t = TreeStructure.from_partition(gen_bv(2, "11"), [2, 5], (16, 2, 2))
        res = execute_tree(t, NoiseModel((Depolarizing(0.001),)), master_seed=3)
        assert res.shots == 64
        assert res.nodes_executed == 112 == subcircuit_nodes(t)

    def test_single_slice_tree_is_baseline(self):
        c = random_circuit(3, 20, seed=5)
        m = NAMED_MODELS["ALL"]
        a = execute_tree(TreeStructure((300,), (c,)), m, 9)
        b = execute_baseline(c, m, 300, 9)
        assert a.counts == b.counts

    def test_degenerate_tree_distribution(self):
        c = Circuit(1, (gate("X", 0), gate("X", 0), gate("X", 0)), measured=True)
        m = NoiseModel((Depolarizing(0.2),))
        slices = slice_circuit(c, [1, 2])
        ones = sum(execute_tree(TreeStructure((1, 1, 1), slices), m, s).counts.get("1", 0) for s in range(4000))
        # P(1) after three noisy X gates: bit-flip prob per gate q = 2p/3
        q = 2 * 0.2 / 3
        exact = ((1 + (1 - 2 * q) ** 3) / 2)
        assert abs(ones / 4000 - exact) <= 4 * math.sqrt(exact * (1 - exact) / 4000)

    @pytest.mark.parametrize(
        "circuit,bounds,arities,model",
        [
            (gen_bv(2, "11"), [2, 5], (4, 3, 2), NoiseModel((Depolarizing(0.05), Readout(0.1, 0.2)))),
            (random_circuit(3, 24, seed=7), [5, 14], (3, 2, 4), NAMED_MODELS["ALL"]),
            (random_circuit(2, 12, seed=8), [], (40,), NAMED_MODELS["TRR"]),
        ],
    )
    def test_matches_reference_implementation(self, circuit, bounds, arities, model):
        slices = slice_circuit(circuit, bounds)
        res = execute_tree(TreeStructure(arities, tuple(slices)), model, master_seed=21)
        assert res.counts == reference_tree(slices, arities, model, 21)

    @pytest.mark.parametrize("threads", [2, 3, 8])
    def test_thread_count_does_not_change_counts(self, threads):
        c = gen_qft(5, prepend_hadamards=True)
        t = TreeStructure.from_partition(c, [4, 12], (10, 4, 5))
        m = NoiseModel((Depolarizing(0.02), Readout(0.01, 0.02)))
        assert execute_tree(t, m, 5, threads=threads).counts == execute_tree(t, m, 5, threads=1).counts

    def test_seed_changes_counts(self):
        c = random_circuit(3, 20, seed=2)
        m = NoiseModel((Depolarizing(0.05),))
        assert execute_baseline(c, m, 500, 1).counts != execute_baseline(c, m, 500, 2).counts

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_zero_noise_collapse(self, n):
        c = random_circuit(n, 10 * n, seed=n)
        t = TreeStructure.from_partition(c, [3, 3 + 3 * n], (40, 20, 40))
        res = execute_tree(t, NoiseModel(), 13)
        assert res.shots == 32000
        assert tvd(res.counts, ideal_distribution(c)) <= 0.02

    def test_capacity_error(self):
        t = TreeStructure.from_partition(gen_ghz(3), [1, 2], (2, 2, 2))
        with pytest.raises(CapacityError):
            execute_tree(t, None, 1, budget=MemoryBudget(limit_bytes=16 * 8 * 2))

    def test_budget_released(self):
        b = MemoryBudget()
        execute_tree(TreeStructure.from_partition(gen_ghz(3), [1], (2, 2)), None, 1, threads=2, budget=b)
        assert b.in_use == 0


class TestExecuteBaseline:
    def test_idle_qubit(self):
        assert execute_baseline(Circuit(1, ()), None, 100, 0).counts == {"0": 100}

    def test_x_depolarizing(self):
        c = Circuit(1, (gate("X", 0),), measured=True)
        res = execute_baseline(c, NoiseModel((Depolarizing(0.1),)), 100000, 7)
        assert abs(res.counts["0"] / 100000 - 0.2 / 3) <= 0.003

    def test_ghz3(self):
        res = execute_baseline(gen_ghz(3), None, 10000, 3)
        assert tvd(res.counts, {"000": 0.5, "111": 0.5}) <= 0.02
        assert res.nodes_executed == 10000 and res.states_copied == 9999

    def test_needs_a_shot(self):
        with pytest.raises(ValueError):
            execute_baseline(gen_ghz(2), None, 0, 1)


class TestReuseStatistics:
    def test_tree_error_frequencies_are_unbiased(self):
        # averaged over many tree runs, per-qubit error frequencies approach the
        # exact values even though a single run is far noisier than a baseline run
        from shottree.density import evolve_density, output_distribution
        from shottree.metrics import qubit_error_frequency
        from shottree.partition import CopyCostProfile, plan_partition

        c = gen_qft(5, prepend_hadamards=True)
        m = NoiseModel((Depolarizing(0.005),))
        exact = output_distribution(evolve_density(c, m))
        want = np.array([sum(p for k, p in exact.items() if k[4 - q] == "1") for q in range(5)])
        plan = plan_partition(c, m, 4000, CopyCostProfile(1.0))
        t = TreeStructure.from_partition(c, plan.partition, plan.arities)
        runs = np.array([qubit_error_frequency(execute_tree(t, m, s).counts, "00000") for s in range(200)])
        stderr = runs.std(axis=0, ddof=1) / math.sqrt(len(runs))
        assert np.all(np.abs(runs.mean(axis=0) - want) <= 4 * stderr)
        # single-run spread well above the binomial value for 4000 shots
        assert np.max(runs.std(axis=0) / np.sqrt(want * (1 - want) / 4000)) > 3

"""Simulation-tree execution with intermediate-state reuse, and the flat baseline.

A tree with arities (A_0, ..., A_{k-1}) over k slices runs slice d once per
node at depth d; each resulting state is reused by A_{d+1} children.  Leaves
draw one outcome each, so a run yields prod(A) outcomes.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .circuit import Circuit, Partition, gate_matrix, slice_circuit
from .noise import NoiseModel, kraus_for
from .rng import root_key
from .statevector import AMPLITUDE_BYTES, MemoryBudget, default_budget, to_bitstring


@dataclass(frozen=True)
class TreeStructure:
    arities: tuple[int, ...]
    slices: tuple[Circuit, ...] = ()

    def __post_init__(self):
        arities = tuple(int(a) for a in self.arities)
        object.__setattr__(self, "arities", arities)
        object.__setattr__(self, "slices", tuple(self.slices))
        if not arities or min(arities) < 1:
            raise ValueError(f"arities must be positive, got {arities}")
        if self.slices:
            if len(self.slices) != len(arities):
                raise ValueError(f"{len(arities)} arities for {len(self.slices)} slices")
            if len({s.n_qubits for s in self.slices}) != 1:
                raise ValueError("all slices must have the same width")

    @classmethod
    def from_partition(cls, c: Circuit, p: Partition | Sequence[int], arities: Sequence[int]):
        return cls(tuple(arities), tuple(slice_circuit(c, p)))

    @property
    def depth(self) -> int:
        return len(self.arities)

    @property
    def n_outcomes(self) -> int:
        return math.prod(self.arities)


@dataclass
class TreeRunResult:
    counts: dict[str, int]
    nodes_executed: int
    states_copied: int
    wall_time: float
    seed: int
    arities: tuple[int, ...] = field(default=())

    @property
    def shots(self) -> int:
        return sum(self.counts.values())


def _arities(t) -> tuple[int, ...]:
    return t.arities if isinstance(t, TreeStructure) else tuple(int(a) for a in t)


def instances_of(t: TreeStructure | Sequence[int], i: int) -> int:
    """Number of executions of subcircuit ``i`` (1-indexed): prod(A_0..A_{i-1})."""
    a = _arities(t)
    if not 1 <= i <= len(a):
        raise IndexError(f"subcircuit {i} outside 1..{len(a)}")
    return math.prod(a[:i])


def subcircuit_nodes(t: TreeStructure | Sequence[int]) -> int:
    a = _arities(t)
    return sum(instances_of(a, i) for i in range(1, len(a) + 1))


def total_nodes(t: TreeStructure | Sequence[int]) -> int:
    """Tree size including the root (initial-state) node."""
    return 1 + subcircuit_nodes(t)


def estimate_speedup(t: TreeStructure | Sequence[int], n_baseline: int | None = None) -> float:
    """Node ratio of the flat baseline tree (N,1,...,1) to this tree."""
    a = _arities(t)
    n = math.prod(a) if n_baseline is None else n_baseline
    return len(a) * n / subcircuit_nodes(a)


@dataclass
class _Compiled:
    n_qubits: int
    g_nq: np.ndarray
    g_qa: np.ndarray
    g_qb: np.ndarray
    g_mat: np.ndarray
    g_ev: np.ndarray
    ev_qubit: np.ndarray
    ev_kstart: np.ndarray
    ev_kcount: np.ndarray
    ev_fixed: np.ndarray
    kraus: np.ndarray
    kweight: np.ndarray
    kident: np.ndarray
    sl_ptr: np.ndarray
    has_readout: bool
    p01: float
    p10: float


def compile_slices(slices: Sequence[Circuit], m: NoiseModel) -> _Compiled:
    """Flatten slices plus noise locations into the arrays the kernels consume."""
    n = slices[0].n_qubits
    gates = [g for s in slices for g in s.gates]
    ng = len(gates)
    g_nq = np.zeros(ng, dtype=np.int64)
    g_qa = np.zeros(ng, dtype=np.int64)
    g_qb = np.zeros(ng, dtype=np.int64)
    g_mat = np.zeros((ng, 4, 4), dtype=np.complex128)
    g_ev = np.zeros(ng + 1, dtype=np.int64)
    ev_qubit, ev_kstart, ev_kcount, ev_fixed = [], [], [], []
    kraus, kweight, kident = [], [], []
    kcache: dict = {}
    channels = m.after_gate
    for i, g in enumerate(gates):
        mat = gate_matrix(g.kind)
        g_nq[i] = len(g.qubits)
        g_qa[i] = g.qubits[0]
        g_qb[i] = g.qubits[-1]
        g_mat[i, : mat.shape[0], : mat.shape[1]] = mat
        for q in g.qubits:
            for ch in channels:
                key = (ch, g.tag)
                if key not in kcache:
                    ops, w, ident, fixed = kraus_for(ch, g.tag).kernel_form()
                    kcache[key] = (len(kraus), len(ops), fixed)
                    kraus.extend(ops)
                    kweight.extend(w)
                    kident.extend(ident)
                start, count, fixed = kcache[key]
                ev_qubit.append(q)
                ev_kstart.append(start)
                ev_kcount.append(count)
                ev_fixed.append(fixed)
        g_ev[i + 1] = len(ev_qubit)
    sl_ptr = np.zeros(len(slices) + 1, dtype=np.int64)
    sl_ptr[1:] = np.cumsum([len(s.gates) for s in slices])
    ro = m.readout
    return _Compiled(
        n, g_nq, g_qa, g_qb, g_mat, g_ev,
        np.array(ev_qubit, dtype=np.int64),
        np.array(ev_kstart, dtype=np.int64),
        np.array(ev_kcount, dtype=np.int64),
        np.array(ev_fixed, dtype=np.bool_),
        np.array(kraus, dtype=np.complex128).reshape(-1, 2, 2),
        np.array(kweight, dtype=np.float64),
        np.array(kident, dtype=np.bool_),
        sl_ptr,
        ro is not None,
        ro.p01 if ro else 0.0,
        ro.p10 if ro else 0.0,
    )


def _counts_from_outcomes(outcomes: np.ndarray, n: int) -> dict[str, int]:
    values, counts = np.unique(outcomes, return_counts=True)
    return {to_bitstring(int(v), n): int(c) for v, c in zip(values, counts)}


def execute_tree(
    t: TreeStructure,
    m: NoiseModel | None,
    master_seed: int,
    threads: int = 1,
    budget: MemoryBudget | None = None,
) -> TreeRunResult:
    """Depth-first tree simulation with path-seeded noise.

    Top-level subtrees are split across up to ``threads`` workers, each with
    its own depth+1 statevector buffers.  Counts do not depend on ``threads``.
    """
    if not t.slices:
        raise ValueError("tree structure has no slices to execute")
    m = m or NoiseModel()
    budget = default_budget if budget is None else budget
    n = t.slices[0].n_qubits
    budget.check_width(n)
    comp = compile_slices(t.slices, m)
    arities = np.array(t.arities, dtype=np.int64)
    k = len(t.arities)
    per_worker = (k + 1) * (AMPLITUDE_BYTES << n)

    workers = max(1, min(int(threads), t.arities[0]))
    while workers > 1 and per_worker * workers > budget.limit_bytes - budget.in_use:
        workers -= 1
    budget.reserve(per_worker * workers)
    try:
        outcomes = np.empty(t.n_outcomes, dtype=np.int64)
        root = np.uint64(root_key(master_seed))
        bounds = np.linspace(0, t.arities[0], workers + 1).round().astype(int)

        def work(lo: int, hi: int):
            bufs = np.zeros((k + 1, 1 << n), dtype=np.complex128)
            return _kernels.run_tree(
                n, comp.g_nq, comp.g_qa, comp.g_qb, comp.g_mat, comp.g_ev,
                comp.ev_qubit, comp.ev_kstart, comp.ev_kcount, comp.ev_fixed,
                comp.kraus, comp.kweight, comp.kident,
                comp.sl_ptr, arities, root, lo, hi,
                comp.has_readout, comp.p01, comp.p10, bufs, outcomes,
            )

        start = time.perf_counter()
        if workers == 1:
            results = [work(0, t.arities[0])]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(work, int(lo), int(hi))
                           for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
                results = [f.result() for f in futures]
        wall = time.perf_counter() - start
    finally:
        budget.release(per_worker * workers)

    return TreeRunResult(
        counts=_counts_from_outcomes(outcomes, n),
        nodes_executed=int(sum(r[0] for r in results)),
        states_copied=int(sum(r[1] for r in results)),
        wall_time=wall,
        seed=master_seed,
        arities=t.arities,
    )


def execute_baseline(
    c: Circuit,
    m: NoiseModel | None,
    n_shots: int,
    master_seed: int,
    threads: int = 1,
    budget: MemoryBudget | None = None,
) -> TreeRunResult:
    """``n_shots`` independent full-circuit trajectories: the tree (N) on one slice."""
    if n_shots < 1:
        raise ValueError("need at least one shot")
    return execute_tree(TreeStructure((n_shots,), (c,)), m, master_seed, threads, budget)

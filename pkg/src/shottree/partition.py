"""Dynamic circuit partitioning: slice boundaries and per-level arities.

The first slice is kept as short as the state-copy cost allows and gets
enough executions for a 95%-confidence estimate of its error proportion;
the remainder is cut into k near-equal slices sharing one arity, with k as
large as the arity (>= 2), copy-cost and memory constraints permit.
"""
from __future__ import annotations

import json
import math
import statistics
import time
from dataclasses import dataclass
from typing import Callable, Sequence

from .circuit import Circuit, Partition, even_boundaries, gate
from .noise import NoiseModel
from .scheduler import estimate_speedup
from .statevector import (
    AMPLITUDE_BYTES,
    DEFAULT_BUDGET_BYTES,
    apply_gate,
    copy_state,
    init_state,
    MemoryBudget,
)


@dataclass(frozen=True)
class CopyCostProfile:
    """Statevector copy time expressed in single-gate application times."""

    gates_equivalent: float
    per_width: tuple[tuple[int, float], ...] = ()

    def __post_init__(self):
        if not (self.gates_equivalent > 0 and math.isfinite(self.gates_equivalent)):
            raise ValueError(f"copy cost must be positive and finite, got {self.gates_equivalent}")

    @property
    def min_gates(self) -> int:
        return max(1, round(self.gates_equivalent))


@dataclass(frozen=True)
class ResourceLimits:
    memory_budget_bytes: int = DEFAULT_BUDGET_BYTES

    def max_live_states(self, n_qubits: int) -> int:
        return self.memory_budget_bytes // (AMPLITUDE_BYTES << n_qubits)


@dataclass(frozen=True)
class PartitionPlan:
    partition: Partition
    arities: tuple[int, ...]
    predicted_speedup: float
    first_error_rate: float

    @property
    def n_slices(self) -> int:
        return len(self.arities)

    @property
    def is_baseline(self) -> bool:
        return len(self.arities) == 1

    def to_dict(self) -> dict:
        return {
            "boundaries": list(self.partition.boundaries),
            "arities": list(self.arities),
            "predicted_speedup": self.predicted_speedup,
            "first_error_rate": self.first_error_rate,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def profile_copy_cost(
    n_qubits_list: Sequence[int],
    reps: int = 10,
    clock: Callable[[], float] = time.perf_counter,
    budget: MemoryBudget | None = None,
) -> CopyCostProfile:
    """Measure copy time / single H-gate time for each width; average the ratios.

    ``clock`` is injectable so tests can drive the measurement deterministically.
    """
    if reps < 10:
        raise ValueError("reps must be at least 10")
    if not n_qubits_list:
        raise ValueError("need at least one width to profile")
    budget = budget or MemoryBudget()
    h0 = gate("H", 0)
    ratios = []
    for n in n_qubits_list:
        s = init_state(n, budget)
        apply_gate(s, h0)
        copy_times, gate_times = [], []
        for _ in range(reps):
            t0 = clock()
            dup = copy_state(s)
            t1 = clock()
            copy_times.append(t1 - t0)
            del dup
            t0 = clock()
            apply_gate(s, h0)
            t1 = clock()
            gate_times.append(t1 - t0)
        g = statistics.median(gate_times)
        ratios.append((int(n), statistics.median(copy_times) / g if g > 0 else math.inf))
        del s
    finite = [r for _, r in ratios if math.isfinite(r)]
    mean = statistics.fmean(finite) if finite else 1.0
    return CopyCostProfile(mean, tuple(ratios))


def first_subcircuit_error_rate(slice_: Circuit, m: NoiseModel) -> float:
    """1 - prod(1 - e_i) over the noise locations of ``slice_``."""
    keep = 1.0
    for g in slice_.gates:
        e = m.location_error(g)
        keep *= (1.0 - e) ** len(g.qubits)
    return 1.0 - keep


def required_first_shots(p_hat: float, n: int, z: float = 1.96, eps: float = 0.05) -> int:
    """Finite-population sample size for estimating a proportion ``p_hat``.

    ``p_hat`` is clamped to [0, 0.5]; the result is ceiled and clamped to [1, n].
    """
    if n < 1:
        raise ValueError("n must be positive")
    p = min(max(p_hat, 0.0), 0.5)
    n0 = z * z * p * (1.0 - p) / (eps * eps)
    a0 = n0 / (1.0 + n0 / n)
    # guard against 15.000000000000002-style round-up
    return int(min(max(math.ceil(a0 - 1e-9), 1), n))


def rest_arity(n: int, a0: int, k: int) -> int:
    """floor((n / a0) ** (1 / k)), computed exactly in integers."""
    if k < 1 or a0 < 1:
        raise ValueError("need k >= 1 and a0 >= 1")
    a = max(1, int(math.floor((n / a0) ** (1.0 / k))))
    while (a + 1) ** k * a0 <= n:
        a += 1
    while a > 1 and a**k * a0 > n:
        a -= 1
    return a


def top_up(arities: Sequence[int], n: int) -> tuple[int, ...]:
    """Round-robin +1 increments from the first level until prod >= n."""
    a = list(arities)
    i = 0
    while math.prod(a) < n:
        a[i % len(a)] += 1
        i += 1
    return tuple(a)


def plan_partition(
    c: Circuit,
    m: NoiseModel | None,
    n_shots: int,
    cost: CopyCostProfile,
    limits: ResourceLimits | None = None,
    first_shots: int | None = None,
) -> PartitionPlan:
    """Choose boundaries and arities for ``n_shots`` outcomes of ``c``.

    ``first_shots`` overrides the sample-size rule for A_0.  Falls back to the
    single-slice baseline plan (arities ``(n_shots,)``) when no tree qualifies.
    """
    if n_shots < 1:
        raise ValueError("n_shots must be positive")
    m = m or NoiseModel()
    limits = limits or ResourceLimits()
    n_gates = len(c.gates)
    min_gates = cost.min_gates
    live_cap = limits.max_live_states(c.n_qubits)

    first_len = min(min_gates, n_gates)
    p_hat = first_subcircuit_error_rate(Circuit(c.n_qubits, c.gates[:first_len]), m)
    if first_shots is None:
        a0 = required_first_shots(p_hat, n_shots)
    else:
        a0 = int(min(max(first_shots, 1), n_shots))

    remainder = n_gates - first_len
    best = 0
    k = 1
    while (
        remainder // k >= min_gates
        and k + 2 <= live_cap
        and rest_arity(n_shots, a0, k) >= 2
    ):
        best = k
        k += 1

    if best == 0:
        return PartitionPlan(Partition(()), (n_shots,), 1.0, p_hat)
    bounds = [first_len, *even_boundaries(n_gates, best, start=first_len)]
    arities = top_up((a0,) + (rest_arity(n_shots, a0, best),) * best, n_shots)
    return PartitionPlan(Partition(tuple(bounds)), arities, estimate_speedup(arities), p_hat)

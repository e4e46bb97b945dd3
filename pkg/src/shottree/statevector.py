"""Dense statevectors, gate application, copying and measurement sampling."""
from __future__ import annotations

import threading
import weakref

import numpy as np

from . import _kernels
from .circuit import Circuit, Gate, gate_matrix
from .rng import RandomStream

AMPLITUDE_BYTES = 16
DEFAULT_MAX_QUBITS = 26
DEFAULT_BUDGET_BYTES = 4 << 30


class CapacityError(MemoryError):
    """A statevector would exceed the qubit cap or the live-memory budget."""


class MemoryBudget:
    """Cap on the bytes held by all live statevectors drawn from it."""

    def __init__(self, limit_bytes: int = DEFAULT_BUDGET_BYTES, max_qubits: int = DEFAULT_MAX_QUBITS):
        self.limit_bytes = int(limit_bytes)
        self.max_qubits = max_qubits
        self.in_use = 0
        self._lock = threading.Lock()

    def reserve(self, nbytes: int) -> None:
        with self._lock:
            if self.in_use + nbytes > self.limit_bytes:
                raise CapacityError(
                    f"need {nbytes} bytes, {self.limit_bytes - self.in_use} of "
                    f"{self.limit_bytes} available"
                )
            self.in_use += nbytes

    def release(self, nbytes: int) -> None:
        with self._lock:
            self.in_use = max(0, self.in_use - nbytes)

    def max_live_states(self, n_qubits: int) -> int:
        return self.limit_bytes // (AMPLITUDE_BYTES << n_qubits)

    def check_width(self, n_qubits: int) -> None:
        if not 1 <= n_qubits <= self.max_qubits:
            raise CapacityError(
                f"{n_qubits} qubits outside supported range 1..{self.max_qubits}"
            )
        if (AMPLITUDE_BYTES << n_qubits) > self.limit_bytes:
            raise CapacityError(f"a {n_qubits}-qubit state exceeds the memory budget")


default_budget = MemoryBudget()


class Statevector:
    """2**n complex amplitudes, with qubit 0 as the least significant index bit."""

    def __init__(
        self, amplitudes: np.ndarray, budget: MemoryBudget | None = None, *, reserved: bool = False
    ):
        amplitudes = np.ascontiguousarray(amplitudes, dtype=np.complex128)
        dim = amplitudes.shape[0]
        n = dim.bit_length() - 1
        if amplitudes.ndim != 1 or dim != 1 << n or n < 1:
            raise ValueError("amplitude array length must be a power of two >= 2")
        budget = default_budget if budget is None else budget
        if not reserved:
            budget.check_width(n)
            budget.reserve(amplitudes.nbytes)
        self.amplitudes = amplitudes
        self.n_qubits = n
        self.budget = budget
        weakref.finalize(self, budget.release, amplitudes.nbytes)

    def __len__(self) -> int:
        return self.amplitudes.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def init_state(n_qubits: int, budget: MemoryBudget | None = None) -> Statevector:
    """|0...0> on ``n_qubits`` qubits."""
    budget = default_budget if budget is None else budget
    budget.check_width(n_qubits)
    nbytes = AMPLITUDE_BYTES << n_qubits
    budget.reserve(nbytes)
    try:
        amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    except MemoryError:
        budget.release(nbytes)
        raise
    amps[0] = 1.0
    return Statevector(amps, budget, reserved=True)


def copy_state(s: Statevector) -> Statevector:
    """Deep copy of ``s``, charged against the same memory budget."""
    s.budget.reserve(s.amplitudes.nbytes)
    return Statevector(s.amplitudes.copy(), s.budget, reserved=True)


def apply_gate(s: Statevector, g: Gate) -> Statevector:
    """Apply ``g`` to ``s`` in place and return ``s``."""
    if max(g.qubits) >= s.n_qubits:
        raise IndexError(f"{g!r} out of range for {s.n_qubits} qubit(s)")
    m = gate_matrix(g.kind)
    if len(g.qubits) == 1:
        _kernels.apply_1q(s.amplitudes, g.qubits[0], m)
    else:
        _kernels.apply_2q(s.amplitudes, g.qubits[0], g.qubits[1], m)
    return s


def apply_circuit(s: Statevector, c: Circuit) -> Statevector:
    """Noise-free application of every gate of ``c``."""
    for g in c.gates:
        apply_gate(s, g)
    return s


def to_bitstring(index: int, n_qubits: int) -> str:
    return format(index, f"0{n_qubits}b")


def sample_outcome(s: Statevector, rng: RandomStream) -> str:
    """Draw one computational-basis outcome; consumes one uniform from ``rng``."""
    idx = _kernels.sample_index(s.amplitudes, rng.random())
    return to_bitstring(idx, s.n_qubits)


def ideal_distribution(c: Circuit, tol: float = 1e-15) -> dict[str, float]:
    """Exact noise-free output probabilities of ``c`` (entries above ``tol``)."""
    s = apply_circuit(init_state(c.n_qubits), c)
    probs = s.probabilities()
    probs = probs / probs.sum()
    return {
        to_bitstring(int(i), c.n_qubits): float(probs[i])
        for i in np.flatnonzero(probs > tol)
    }

"""Distribution-level quality measures for simulator outputs."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping


class WidthMismatchError(ValueError):
    pass


class DegenerateReferenceError(ValueError):
    pass


@dataclass(frozen=True)
class Distribution:
    """Outcome probabilities keyed by full-width bitstrings (qubit 0 rightmost)."""

    n_qubits: int
    probs: Mapping[str, float]

    def __post_init__(self):
        for key, p in self.probs.items():
            if len(key) != self.n_qubits:
                raise WidthMismatchError(f"bitstring {key!r} is not {self.n_qubits} bits wide")
            if p < 0:
                raise ValueError(f"negative probability for {key!r}")
        total = sum(self.probs.values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {total}, not 1")

    @classmethod
    def from_counts(cls, counts: Mapping[str, int]) -> "Distribution":
        total = sum(counts.values())
        if total <= 0:
            raise ValueError("empty counts")
        n = len(next(iter(counts)))
        return cls(n, {k: v / total for k, v in counts.items() if v})

    @classmethod
    def from_probs(cls, probs: Mapping[str, float], normalize: bool = True) -> "Distribution":
        n = len(next(iter(probs)))
        total = sum(probs.values()) if normalize else 1.0
        return cls(n, {k: p / total for k, p in probs.items() if p > 0})

    def get(self, key: str) -> float:
        return self.probs.get(key, 0.0)


def _as_dist(d) -> Distribution:
    if isinstance(d, Distribution):
        return d
    if d and all(isinstance(v, int) and not isinstance(v, bool) for v in d.values()):
        return Distribution.from_counts(d)
    return Distribution.from_probs(d)


def _check_width(p: Distribution, q: Distribution) -> None:
    if p.n_qubits != q.n_qubits:
        raise WidthMismatchError(f"{p.n_qubits}-qubit vs {q.n_qubits}-qubit distributions")


def state_fidelity(p_ideal, p_out) -> float:
    """Squared Bhattacharyya coefficient between two outcome distributions.

    Plain count maps are accepted and normalized.
    """
    p, q = _as_dist(p_ideal), _as_dist(p_out)
    _check_width(p, q)
    bc = sum(math.sqrt(pv * q.get(x)) for x, pv in p.probs.items())
    return min(1.0, bc * bc)


def uniform_fidelity(p_ideal) -> float:
    """Fidelity of ``p_ideal`` against the uniform distribution over all 2**n outcomes."""
    p = _as_dist(p_ideal)
    bc = sum(math.sqrt(v) for v in p.probs.values()) / math.sqrt(2.0 ** p.n_qubits)
    return min(1.0, bc * bc)


def normalized_fidelity(p_ideal, p_out) -> float:
    """Fidelity rescaled so a uniform output scores 0 and a perfect one scores 1."""
    p, q = _as_dist(p_ideal), _as_dist(p_out)
    _check_width(p, q)
    f_uni = uniform_fidelity(p)
    if 1.0 - f_uni < 1e-12:
        raise DegenerateReferenceError("ideal distribution is uniform")
    return (state_fidelity(p, q) - f_uni) / (1.0 - f_uni)


def tvd(p, q) -> float:
    """Total variation distance, half the L1 distance."""
    p, q = _as_dist(p), _as_dist(q)
    _check_width(p, q)
    keys = set(p.probs) | set(q.probs)
    return 0.5 * sum(abs(p.get(x) - q.get(x)) for x in keys)


def qubit_error_frequency(counts: Mapping[str, int], reference: str) -> list[float]:
    """Per-qubit fraction of outcomes disagreeing with ``reference``.

    Element i refers to qubit i, i.e. the i-th character from the right.
    """
    n = len(reference)
    total = 0
    wrong = [0] * n
    for bits, cnt in counts.items():
        if len(bits) != n:
            raise WidthMismatchError(f"outcome {bits!r} vs reference {reference!r}")
        total += cnt
        for q in range(n):
            if bits[n - 1 - q] != reference[n - 1 - q]:
                wrong[q] += cnt
    if total == 0:
        raise ValueError("empty counts")
    return [w / total for w in wrong]

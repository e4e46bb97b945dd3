"""Exact density-matrix evolution for small circuits.

This is the reference the trajectory engine is checked against.  It builds
full 2**n x 2**n operators with plain numpy and shares no code with the
statevector kernels.
"""
from __future__ import annotations

import itertools

import numpy as np

from .circuit import Circuit, gate_matrix
from .noise import NoiseModel, Readout, kraus_for
from .statevector import CapacityError

DEFAULT_ORACLE_QUBITS = 6


def embed_operator(m: np.ndarray, qubits: tuple[int, ...], n_qubits: int) -> np.ndarray:
    """Lift a 2x2 or 4x4 operator on ``qubits`` to the full little-endian space.

    For two qubits the local index is ``2 * bit(qubits[0]) + bit(qubits[1])``.
    """
    dim = 1 << n_qubits
    k = len(qubits)
    full = np.zeros((dim, dim), dtype=np.complex128)
    idx = np.arange(dim)
    local = np.zeros(dim, dtype=np.int64)
    rest = idx.copy()
    for pos, q in enumerate(qubits):
        bit = (idx >> q) & 1
        local |= bit << (k - 1 - pos)
        rest &= ~(1 << q)
    for row_local, col_local in itertools.product(range(1 << k), repeat=2):
        coeff = m[row_local, col_local]
        if coeff == 0:
            continue
        cols = idx[local == col_local]
        rows = rest[cols]
        for pos, q in enumerate(qubits):
            if (row_local >> (k - 1 - pos)) & 1:
                rows = rows | (1 << q)
        full[rows, cols] += coeff
    return full


def circuit_unitary(c: Circuit) -> np.ndarray:
    """Full unitary of ``c`` as the ordered product of embedded gate matrices."""
    u = np.eye(1 << c.n_qubits, dtype=np.complex128)
    for g in c.gates:
        u = embed_operator(gate_matrix(g.kind), g.qubits, c.n_qubits) @ u
    return u


def evolve_density(
    c: Circuit, m: NoiseModel | None = None, max_qubits: int = DEFAULT_ORACLE_QUBITS
) -> np.ndarray:
    """Density matrix after ``c`` with every after-gate channel applied exactly."""
    n = c.n_qubits
    if n > max_qubits:
        raise CapacityError(f"density-matrix oracle limited to {max_qubits} qubits, got {n}")
    m = m or NoiseModel()
    dim = 1 << n
    rho = np.zeros((dim, dim), dtype=np.complex128)
    rho[0, 0] = 1.0
    cache: dict = {}
    for g in c.gates:
        u = embed_operator(gate_matrix(g.kind), g.qubits, n)
        rho = u @ rho @ u.conj().T
        for q in g.qubits:
            for ch in m.after_gate:
                key = (ch, g.tag, q)
                if key not in cache:
                    cache[key] = [
                        embed_operator(k, (q,), n) for k in kraus_for(ch, g.tag).operators
                    ]
                rho = sum(k @ rho @ k.conj().T for k in cache[key])
    return rho


def output_distribution(rho: np.ndarray, readout: Readout | None = None) -> dict[str, float]:
    """Exact outcome probabilities of ``rho``, optionally convolved with readout flips."""
    dim = rho.shape[0]
    n = dim.bit_length() - 1
    probs = np.clip(np.real(np.diag(rho)), 0.0, None)
    if readout is not None:
        flip = np.array([[1 - readout.p01, readout.p10], [readout.p01, 1 - readout.p10]])
        # axis n-1-q of the reshaped tensor is qubit q
        t = probs.reshape((2,) * n)
        for q in range(n):
            t = np.moveaxis(np.tensordot(flip, t, axes=([1], [n - 1 - q])), 0, n - 1 - q)
        probs = t.reshape(dim)
    return {format(i, f"0{n}b"): float(p) for i, p in enumerate(probs) if p > 0}

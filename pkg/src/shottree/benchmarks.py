"""Deterministic generators for the benchmark circuit families."""
from __future__ import annotations

import math
from typing import Sequence

from .circuit import Circuit, Gate, gate


def qft_gates(qubits: Sequence[int], inverse: bool = False) -> list[Gate]:
    """Textbook QFT on ``qubits`` (index 0 least significant), swaps included."""
    n = len(qubits)
    out: list[Gate] = []
    for i in range(n - 1, -1, -1):
        out.append(gate("H", qubits[i]))
        for j in range(i - 1, -1, -1):
            out.append(gate("CP", qubits[j], qubits[i], params=[math.pi / 2 ** (i - j)]))
    for i in range(n // 2):
        out.append(gate("SWAP", qubits[i], qubits[n - 1 - i]))
    if inverse:
        out = [
            gate(g.tag, *g.qubits, params=[-p for p in g.kind.params]) for g in reversed(out)
        ]
    return out


def gen_qft(n: int, prepend_hadamards: bool = False) -> Circuit:
    """n-qubit QFT; with ``prepend_hadamards`` the ideal output is all zeros."""
    if n < 1:
        raise ValueError("n must be >= 1")
    pre = [gate("H", q) for q in range(n)] if prepend_hadamards else []
    return Circuit(n, tuple(pre + qft_gates(range(n))), measured=True)


def gen_bv(n_data: int, hidden: str) -> Circuit:
    """Bernstein-Vazirani on ``n_data`` data qubits plus an ancilla (qubit n_data).

    ``hidden`` is written like a readout: its rightmost character is data
    qubit 0, so the data bits of the ideal outcome spell ``hidden``.
    """
    if len(hidden) != n_data or set(hidden) - {"0", "1"}:
        raise ValueError(f"hidden string must be {n_data} binary digits")
    anc = n_data
    gates = [gate("X", anc)]
    gates += [gate("H", q) for q in range(n_data + 1)]
    for q in range(n_data):
        if hidden[n_data - 1 - q] == "1":
            gates.append(gate("CX", q, anc))
    gates += [gate("H", q) for q in range(n_data)]
    return Circuit(n_data + 1, tuple(gates), measured=True)


def gen_ghz(n: int) -> Circuit:
    if n < 2:
        raise ValueError("GHZ needs at least 2 qubits")
    gates = [gate("H", 0)] + [gate("CX", 0, q) for q in range(1, n)]
    return Circuit(n, tuple(gates), measured=True)


def gen_qpe(n_phase: int, phase: float) -> Circuit:
    """Phase estimation of diag(1, exp(2*pi*i*phase)) on eigenstate |1>.

    Counting qubits are 0..n_phase-1 (qubit 0 least significant); the
    eigenstate qubit is n_phase and always reads 1.
    """
    if n_phase < 1:
        raise ValueError("n_phase must be >= 1")
    if not 0.0 <= phase < 1.0:
        raise ValueError("phase must lie in [0, 1)")
    eig = n_phase
    gates = [gate("X", eig)]
    gates += [gate("H", q) for q in range(n_phase)]
    for j in range(n_phase):
        angle = 2 * math.pi * phase * 2**j
        gates.append(gate("CP", j, eig, params=[math.remainder(angle, 2 * math.pi)]))
    gates += qft_gates(range(n_phase), inverse=True)
    return Circuit(n_phase + 1, tuple(gates), measured=True)


def gen_qaoa_maxcut(
    edges: Sequence[tuple[int, int]],
    beta: float | Sequence[float],
    gamma: float | Sequence[float],
    p_layers: int = 1,
    n_nodes: int | None = None,
) -> Circuit:
    """Max-Cut QAOA: H layer, then per layer CX-RZ(2*gamma)-CX per edge and RX(2*beta)."""
    if n_nodes is None:
        if not edges:
            raise ValueError("n_nodes is required for an empty edge list")
        n_nodes = max(max(u, v) for u, v in edges) + 1
    betas = [beta] * p_layers if isinstance(beta, (int, float)) else list(beta)
    gammas = [gamma] * p_layers if isinstance(gamma, (int, float)) else list(gamma)
    if len(betas) != p_layers or len(gammas) != p_layers:
        raise ValueError("need one beta and one gamma per layer")
    gates = [gate("H", q) for q in range(n_nodes)]
    for b, g in zip(betas, gammas):
        for u, v in edges:
            gates += [gate("CX", u, v), gate("RZ", v, params=[2 * g]), gate("CX", u, v)]
        gates += [gate("RX", q, params=[2 * b]) for q in range(n_nodes)]
    return Circuit(n_nodes, tuple(gates), measured=True)

"""Circuit representation, gate matrices and contiguous slicing.

Qubit ordering is little-endian: qubit 0 is the least significant bit of a
basis-state index and the rightmost character of a bitstring.  Two-qubit
matrices act on the local basis ``2 * b(qubits[0]) + b(qubits[1])``, so the
first listed qubit (the control for CX/CZ/CP) is the more significant local bit.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

# tag -> (number of qubits, number of angle parameters)
GATE_SPECS: dict[str, tuple[int, int]] = {
    "X": (1, 0),
    "Y": (1, 0),
    "Z": (1, 0),
    "H": (1, 0),
    "S": (1, 0),
    "SDG": (1, 0),
    "T": (1, 0),
    "TDG": (1, 0),
    "RX": (1, 1),
    "RY": (1, 1),
    "RZ": (1, 1),
    "U": (1, 3),
    "CX": (2, 0),
    "CZ": (2, 0),
    "SWAP": (2, 0),
    "CP": (2, 1),
}

SELF_INVERSE = ("X", "Y", "Z", "H", "CX", "CZ", "SWAP")


class CircuitError(ValueError):
    """Raised for malformed gates, circuits or partitions."""


@dataclass(frozen=True)
class GateKind:
    tag: str
    params: tuple[float, ...] = ()

    def __post_init__(self):
        tag = self.tag.upper()
        if tag not in GATE_SPECS:
            raise CircuitError(f"unknown gate tag {self.tag!r}")
        object.__setattr__(self, "tag", tag)
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if len(self.params) != GATE_SPECS[tag][1]:
            raise CircuitError(
                f"{tag} takes {GATE_SPECS[tag][1]} parameter(s), got {len(self.params)}"
            )

    @property
    def num_qubits(self) -> int:
        return GATE_SPECS[self.tag][0]


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple[int, ...]

    def __post_init__(self):
        qubits = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qubits)
        if len(qubits) != self.kind.num_qubits:
            raise CircuitError(
                f"{self.kind.tag} acts on {self.kind.num_qubits} qubit(s), got {qubits}"
            )
        if len(set(qubits)) != len(qubits):
            raise CircuitError(f"repeated qubit in {self.kind.tag}{qubits}")
        if min(qubits) < 0:
            raise CircuitError(f"negative qubit index in {self.kind.tag}{qubits}")

    @property
    def tag(self) -> str:
        return self.kind.tag

    def __repr__(self) -> str:
        args = ",".join(f"{p:.6g}" for p in self.kind.params)
        head = f"{self.tag}({args})" if args else self.tag
        return f"{head}{list(self.qubits)}"


def gate(tag: str, *qubits: int, params: Sequence[float] = ()) -> Gate:
    """Shorthand constructor: ``gate("CP", 0, 1, params=[pi / 2])``."""
    return Gate(GateKind(tag, tuple(params)), tuple(qubits))


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = ()
    measured: bool = False

    def __post_init__(self):
        if self.n_qubits < 1:
            raise CircuitError("a circuit needs at least one qubit")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if max(g.qubits) >= self.n_qubits:
                raise CircuitError(f"{g!r} out of range for {self.n_qubits} qubit(s)")

    def __len__(self) -> int:
        return len(self.gates)

    @property
    def n_locations(self) -> int:
        """Number of after-gate noise locations (one per touched qubit)."""
        return sum(len(g.qubits) for g in self.gates)


@dataclass(frozen=True)
class Partition:
    boundaries: tuple[int, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "boundaries", tuple(int(b) for b in self.boundaries))

    @property
    def n_slices(self) -> int:
        return len(self.boundaries) + 1

    def validate(self, n_gates: int) -> None:
        prev = 0
        for b in self.boundaries:
            if b <= prev or b >= n_gates:
                raise CircuitError(
                    f"invalid boundaries {list(self.boundaries)} for {n_gates} gates"
                )
            prev = b


def slice_circuit(c: Circuit, p: Partition | Sequence[int]) -> list[Circuit]:
    """Split ``c`` into contiguous subcircuits at the partition boundaries.

    Every piece keeps the full register width; only the last one inherits
    the terminal-measurement flag.
    """
    if not isinstance(p, Partition):
        p = Partition(tuple(p))
    p.validate(len(c.gates))
    edges = (0, *p.boundaries, len(c.gates))
    last = len(edges) - 2
    return [
        Circuit(c.n_qubits, c.gates[lo:hi], measured=c.measured and i == last)
        for i, (lo, hi) in enumerate(zip(edges[:-1], edges[1:]))
    ]


def even_boundaries(n_gates: int, n_slices: int, start: int = 0) -> list[int]:
    """Boundaries splitting gates ``[start, n_gates)`` into near-equal pieces.

    Lengths differ by at most one; the longer pieces come first.
    """
    length = n_gates - start
    if n_slices < 1 or n_slices > length:
        raise CircuitError(f"cannot split {length} gates into {n_slices} slices")
    base, extra = divmod(length, n_slices)
    out = []
    pos = start
    for i in range(n_slices - 1):
        pos += base + (1 if i < extra else 0)
        out.append(pos)
    return out


_SQ2 = 1.0 / math.sqrt(2.0)


def gate_matrix(kind: GateKind | Gate) -> np.ndarray:
    """Unitary matrix of a gate kind (2x2 or 4x4, complex128)."""
    if isinstance(kind, Gate):
        kind = kind.kind
    tag, p = kind.tag, kind.params
    if tag == "X":
        m = [[0, 1], [1, 0]]
    elif tag == "Y":
        m = [[0, -1j], [1j, 0]]
    elif tag == "Z":
        m = [[1, 0], [0, -1]]
    elif tag == "H":
        m = [[_SQ2, _SQ2], [_SQ2, -_SQ2]]
    elif tag == "S":
        m = [[1, 0], [0, 1j]]
    elif tag == "SDG":
        m = [[1, 0], [0, -1j]]
    elif tag == "T":
        m = [[1, 0], [0, cmath.exp(1j * math.pi / 4)]]
    elif tag == "TDG":
        m = [[1, 0], [0, cmath.exp(-1j * math.pi / 4)]]
    elif tag == "RX":
        c, s = math.cos(p[0] / 2), math.sin(p[0] / 2)
        m = [[c, -1j * s], [-1j * s, c]]
    elif tag == "RY":
        c, s = math.cos(p[0] / 2), math.sin(p[0] / 2)
        m = [[c, -s], [s, c]]
    elif tag == "RZ":
        m = [[cmath.exp(-0.5j * p[0]), 0], [0, cmath.exp(0.5j * p[0])]]
    elif tag == "U":
        theta, phi, lam = p
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        m = [
            [c, -cmath.exp(1j * lam) * s],
            [cmath.exp(1j * phi) * s, cmath.exp(1j * (phi + lam)) * c],
        ]
    elif tag == "CX":
        m = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]
    elif tag == "CZ":
        m = np.diag([1, 1, 1, -1])
    elif tag == "SWAP":
        m = [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]
    elif tag == "CP":
        m = np.diag([1, 1, 1, cmath.exp(1j * p[0])])
    else:  # pragma: no cover - GateKind validates tags
        raise CircuitError(tag)
    return np.asarray(m, dtype=np.complex128)

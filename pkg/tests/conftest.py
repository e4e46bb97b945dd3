import math

import numpy as np
import pytest

from shottree.circuit import Circuit, gate
from shottree.noise import (
    AmplitudeDamping,
    Depolarizing,
    NoiseModel,
    PhaseDamping,
    Readout,
    ThermalRelaxation,
)

ONE_QUBIT = ["X", "Y", "Z", "H", "S", "SDG", "T", "TDG", "RX", "RY", "RZ", "U"]
TWO_QUBIT = ["CX", "CZ", "SWAP", "CP"]
N_PARAMS = {"RX": 1, "RY": 1, "RZ": 1, "U": 3, "CP": 1}


def random_circuit(n_qubits, n_gates, seed, two_qubit_fraction=0.3):
    rng = np.random.default_rng(seed)
    gates = []
    for _ in range(n_gates):
        if n_qubits > 1 and rng.random() < two_qubit_fraction:
            tag = TWO_QUBIT[rng.integers(len(TWO_QUBIT))]
            qs = rng.choice(n_qubits, size=2, replace=False)
        else:
            tag = ONE_QUBIT[rng.integers(len(ONE_QUBIT))]
            qs = [rng.integers(n_qubits)]
        params = rng.uniform(-math.pi, math.pi, N_PARAMS.get(tag, 0))
        gates.append(gate(tag, *[int(q) for q in qs], params=params))
    return Circuit(n_qubits, tuple(gates), measured=True)


# single-channel and combined noise models, with and without readout error
DC = Depolarizing(0.01)
TR = ThermalRelaxation(10.0, 15.0, {"default": 100.0, "CX": 300.0, "CZ": 300.0, "SWAP": 300.0, "CP": 300.0})
AD = AmplitudeDamping(0.01)
PD = PhaseDamping(0.01)
RE = Readout(0.02, 0.05)

NAMED_MODELS = {
    "DC": NoiseModel((DC,)),
    "DCR": NoiseModel((DC, RE)),
    "TR": NoiseModel((TR,)),
    "TRR": NoiseModel((TR, RE)),
    "AD": NoiseModel((AD,)),
    "ADR": NoiseModel((AD, RE)),
    "PD": NoiseModel((PD,)),
    "PDR": NoiseModel((PD, RE)),
    "ALL": NoiseModel((DC, TR, AD, PD, RE)),
}



# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)

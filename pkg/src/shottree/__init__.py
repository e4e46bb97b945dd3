"""Noisy statevector simulation with intermediate-state reuse across shots."""
from .benchmarks import gen_bv, gen_ghz, gen_qaoa_maxcut, gen_qft, gen_qpe
from .circuit import Circuit, Gate, GateKind, Partition, gate, gate_matrix, slice_circuit
from .density import evolve_density, output_distribution
from .metrics import Distribution, normalized_fidelity, qubit_error_frequency, state_fidelity, tvd
from .noise import (
    AmplitudeDamping,
    Depolarizing,
    NoiseModel,
    PhaseDamping,
    Readout,
    ThermalRelaxation,
    apply_readout_error,
    kraus_for,
    load_noise_model,
    trajectory_noise_step,
)
from .partition import (
    CopyCostProfile,
    PartitionPlan,
    ResourceLimits,
    first_subcircuit_error_rate,
    plan_partition,
    profile_copy_cost,
    required_first_shots,
    rest_arity,
)
from .qasm import parse_qasm, to_qasm
from .rng import RandomStream
from .scheduler import (
    TreeRunResult,
    TreeStructure,
    estimate_speedup,
    execute_baseline,
    execute_tree,
    instances_of,
    total_nodes,
)
from .statevector import (
    CapacityError,
    MemoryBudget,
    Statevector,
    apply_gate,
    copy_state,
    ideal_distribution,
    init_state,
    sample_outcome,
)

__version__ = "0.1.0"

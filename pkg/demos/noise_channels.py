"""
Trajectories against the exact density matrix
==============================================

Each shot samples one Kraus operator per noise location.  Averaged over many
shots this must reproduce the exact mixed-state evolution, which is cheap to
compute for a handful of qubits.
"""

from shottree import (
    AmplitudeDamping,
    Depolarizing,
    NoiseModel,
    PhaseDamping,
    Readout,
    ThermalRelaxation,
    evolve_density,
    execute_baseline,
    gen_qpe,
    output_distribution,
    tvd,
)

circuit = gen_qpe(3, 1 / 3)
thermal = ThermalRelaxation(10.0, 15.0, {"default": 100.0, "CP": 300.0})
readout = Readout(0.02, 0.05)
models = {
    "depolarizing": NoiseModel((Depolarizing(0.01),)),
    "thermal": NoiseModel((thermal,)),
    "amplitude damping": NoiseModel((AmplitudeDamping(0.01),)),
    "phase damping": NoiseModel((PhaseDamping(0.01),)),
    "all + readout": NoiseModel((Depolarizing(0.01), thermal, AmplitudeDamping(0.01), PhaseDamping(0.01), readout)),
}

###############################################################################
# Total variation distance shrinks like 1/sqrt(shots).
for name, model in models.items():
    exact = output_distribution(evolve_density(circuit, model), model.readout)
    row = []
    for shots in (1000, 10000, 100000):
        counts = execute_baseline(circuit, model, shots, master_seed=3).counts
        row.append("%.4f" % tvd(counts, exact))
    print("%-18s TVD at 1e3/1e4/1e5 shots: %s" % (name, " ".join(row)))

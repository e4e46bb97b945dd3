"""
How the planner shapes the simulation tree
==========================================

The planner picks a short first slice, runs it often enough to estimate its
error rate at 95% confidence, then splits the rest into as many equal slices
as the shot budget allows with at least two reuses each.
"""

from shottree import (
    CopyCostProfile,
    Depolarizing,
    NoiseModel,
    gen_qft,
    plan_partition,
    profile_copy_cost,
    required_first_shots,
)
from shottree.scheduler import total_nodes

circuit = gen_qft(14, prepend_hadamards=True)
print("%d gates on %d qubits" % (len(circuit.gates), circuit.n_qubits))

###############################################################################
# Copy cost on this machine, in units of one Hadamard application.
profile = profile_copy_cost([10, 14], reps=10)
print("measured copy cost: %.2f gate times" % profile.gates_equivalent)

###############################################################################
# Cheaper copies allow shorter slices and deeper trees.
noise = NoiseModel((Depolarizing(0.001),))
for cost in (1, 5, 10, 30):
    plan = plan_partition(circuit, noise, 32000, CopyCostProfile(cost))
    print("cost %2d: arities %-40s nodes %6d  predicted %.2fx" % (
        cost, plan.arities, total_nodes(plan.arities), plan.predicted_speedup))

###############################################################################
# Noisier first slices need more independent samples.
for p_hat in (0.0, 0.001, 0.01, 0.1, 0.5):
    print("first-slice error %.3f -> %d first-slice shots" % (p_hat, required_first_shots(p_hat, 32000)))

"""
Scanning QAOA angles with tree simulation
=========================================

Parameter sweeps run many noisy circuits with the same structure.  Each
grid point here is one tree simulation; the Max-Cut expectation is read off
the sampled bitstrings.
"""

import numpy as np

from shottree import (
    CopyCostProfile,
    Depolarizing,
    NoiseModel,
    TreeStructure,
    execute_tree,
    gen_qaoa_maxcut,
    plan_partition,
)

edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)]
noise = NoiseModel((Depolarizing(0.002),))


def cut_value(bits):
    # bitstrings are little-endian: vertex v is character -1 - v
    return sum(bits[-1 - u] != bits[-1 - v] for u, v in edges)


betas = np.linspace(0, np.pi / 2, 6)
gammas = np.linspace(0, np.pi, 6)
grid = np.zeros((len(betas), len(gammas)))
for i, beta in enumerate(betas):
    for j, gamma in enumerate(gammas):
        circuit = gen_qaoa_maxcut(edges, beta, gamma, p_layers=2)
        plan = plan_partition(circuit, noise, 4000, CopyCostProfile(2.0))
        run = execute_tree(TreeStructure.from_partition(circuit, plan.partition, plan.arities), noise, 7)
        grid[i, j] = sum(cut_value(b) * c for b, c in run.counts.items()) / run.shots

###############################################################################
# Rows are beta, columns gamma.  The maximum cut of this graph is 6.
np.set_printoptions(precision=2, suppress=True)
print(grid)
i, j = np.unravel_index(grid.argmax(), grid.shape)
print("best: beta=%.3f gamma=%.3f expected cut %.3f" % (betas[i], gammas[j], grid[i, j]))

"""
Weighted constants for an oscillating multiplier
================================================

Estimate the best constant in a weighted inequality for the multiplier
``exp(i|xi|^2) |xi|^-1`` restricted to large frequencies.  The right side
carries a chain of maximal operators applied to the weight.
"""

import matplotlib.pyplot as plt
import numpy as np

from weighted_multipliers import (estimate_weighted_constant, make_grid, make_miyachi,
                                  parse_chain, restrict_support)
from weighted_multipliers.weights import WeightSpec, build_weight

###############################################################################
# Multiplier and chain
# --------------------
# The chain applies four Hardy-Littlewood passes, then the region maximal
# operator with ``alpha = 2`` and ``beta = 1``, then six more passes.  Stages
# act from right to left.

m = restrict_support(make_miyachi(2.0, 1.0))
chain = parse_chain("HL^6 * R(2, 1) * HL^4")

###############################################################################
# Power iteration on two grids
# ----------------------------
# The finite-grid constant is the top eigenvalue of a positive operator.  A
# stable value under refinement stands in for the continuum constant.

rows = []
for seed in range(4):
    spec = WeightSpec("lognormal", seed)
    vals = []
    for n in (512, 1024):
        g = make_grid(n, 32.0)
        est = estimate_weighted_constant(m, chain, build_weight(g, spec), seed=seed)
        vals.append(est.value)
    rows.append(vals)
    print(f"seed {seed}: {vals[0]:.4f} -> {vals[1]:.4f}")

rows = np.array(rows)
fig, ax = plt.subplots(figsize=(5, 4))
ax.plot(rows[:, 0], rows[:, 1], "o")
lim = [0, rows.max() * 1.1]
ax.plot(lim, lim, "k:", lw=0.8)
ax.set_xlabel("constant, 512 points")
ax.set_ylabel("constant, 1024 points")

plt.show()

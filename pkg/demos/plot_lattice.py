"""
A Littlewood-Paley lattice
==========================

Cut a dyadic frequency band into cells of equal width with smooth bumps that
sum to one, then split a band-limited signal into the matching pieces.
"""

import matplotlib.pyplot as plt
import numpy as np

from weighted_multipliers import apply_sk, build_lattice, make_grid
from weighted_multipliers.lattice import cell_symbol
from weighted_multipliers.weights import random_signal

###############################################################################
# The partition of unity
# ----------------------
# With ``R = 2`` and ``alpha = 2`` the band ``[2, 4]`` and its reflection are
# cut into cells of width ``R^(1 - alpha) = 1/2``.

grid = make_grid(1024, 64.0)
lat = build_lattice(2.0, 2.0, grid=grid, symmetric=True)
xi = np.fft.fftshift(grid.freqs())

fig, (ax0, ax1) = plt.subplots(2, 1, figsize=(8, 6))
total = 0
for k in lat.cells:
    s = cell_symbol(lat, k)
    total = total + s
    ax0.plot(xi, np.fft.fftshift(s), lw=0.8)
ax0.plot(xi, np.fft.fftshift(total), "k", lw=1.5)
ax0.set_xlim(-5, 5)
ax0.set_xlabel("frequency")
band = lat.band_mask()
print("partition error on the band:", np.max(np.abs(total[band] - 1)))

###############################################################################
# Splitting a signal
# ------------------
# The pieces of a signal with spectrum in the band add back to the signal.

f = random_signal(grid, 0, band=(2.0, 4.0))
pieces = [apply_sk(f, lat, k).values for k in lat.cells]
print("reconstruction error:", np.max(np.abs(sum(pieces) - f.values)))
x = grid.coords()
ax1.plot(x, f.values.real, "k", lw=1.0, label="f")
for p in pieces[:3]:
    ax1.plot(x, p.real, lw=0.7)
ax1.set_xlim(-8, 8)
ax1.set_xlabel("x")
ax1.legend()

plt.show()

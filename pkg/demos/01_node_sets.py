"""
Node sets on the unit disk
==========================

Bos arrays, the polar grid and the golden-angle spiral, and how a small
subset of a sampling set is matched to the Bos array.
"""

import numpy as np

from diskir.mock_select import select_mock_nodes
from diskir.nodesets import bos_array, optimal_radii, polar_grid, ring_sizes, spiral_set

# A Bos array of degree m puts m_nu = 2m + 5 - 4nu points on ring nu.
m = 5
print("rings:", ring_sizes(m), "radii:", np.round(optimal_radii(m), 5))
opt = bos_array(m)
print(f"{len(opt)} nodes = (m+1)(m+2)/2 = {(m + 1) * (m + 2) // 2}")

# Two sampling sets of about the same size.
grid = polar_grid(20, with_origin=True)
spiral = spiral_set(441)
print(f"polar grid: {len(grid)} points, spiral: {len(spiral)} points")

# Greedy matching: each Bos node takes the nearest unused sample (L1 distance).
for name, samples in (("grid", grid), ("spiral", spiral)):
    mock, idx = select_mock_nodes(samples, opt)
    shift = np.abs(mock.x - opt.x) + np.abs(mock.y - opt.y)
    print(f"{name}: mean L1 shift {shift.mean():.4f}, max {shift.max():.4f}")

# Write the nodes for plotting elsewhere.
opt.to_csv("bos_m5.csv")

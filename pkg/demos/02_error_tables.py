"""
Approximation errors on the two sampling sets
=============================================

Fit the six test functions on the 101 x 101 polar grid (plus origin) and on
the 10000-point spiral, and compare with the published maxima.
"""

from diskir.bench import run_experiment

summary = run_experiment("tables_1_2", "results")
cmp = summary["published_comparison"]
print(f"{cmp['passed']} of {cmp['compared']} cells within one order of magnitude")

# The cells that do not match are the sin(xy) and exp(-xy) rows at low degree;
# swapping those two labels makes every cell match (see README).
for row in cmp["failures"]:
    print(f"  {row['node_set']:6s} f{row['function']} (m={row['m']}, r~={row['rtilde']}): "
          f"ours {row['error']:.3e}, published {row['published']:.4e}")

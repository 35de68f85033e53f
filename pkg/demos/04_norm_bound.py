"""
Growth of the operator-norm bound
=================================

K1 + K2 along n = 10..100 on the polar grid with m = n//4 and
r~ = m + isqrt(m), and the fitted power of n.
"""

import math

from diskir.bench import loglog_slope, normbound_trend

rows = normbound_trend(range(10, 101, 10), "grid")
for r in rows:
    print(f"n={r['n']:3d}  K1={r['K1']:.3e}  K2={r['K2']:.3e}  bound={r['norm_bound']:.3e}")

slope = loglog_slope([r["n"] for r in rows], [r["K_sum"] for r in rows])
print(f"K1 + K2 ~ n^{slope:.2f}")
# a log10-vs-ln fit of the same data gives slope / ln(10)
print(f"slope with log10 on one axis and ln on the other: {slope / math.log(10):.2f}")

"""
Conditioning of interpolation and of the saddle-point system
============================================================

The Bos collocation matrix stays well conditioned as m grows, while the KKT
matrix of the constrained fit grows with the regression degree.
"""

import math

from diskir.bench import kkt_problem
from diskir.clsq import cond_inf_value, kkt_matrix
from diskir.nodesets import bos_array, cond_inf, gram_matrix, polar_grid
from diskir.zernike import build_basis

for m in (5, 10, 20, 40, 70):
    kappa = cond_inf(gram_matrix(bos_array(m), build_basis(m)))
    print(f"Bos array m={m:2d}: cond_inf = {kappa:.3e}")

samples = polar_grid(100, with_origin=True)
for m in (10, 25, 40, 55, 70):
    rt = m + math.isqrt(m)
    kappa = cond_inf_value(kkt_matrix(kkt_problem(samples, m, rt)))
    print(f"KKT n=100 m={m:2d} r~={rt:2d}: cond_inf = {kappa:.3e}")

"""
Cubature through the fitted operator
====================================

Integrate the operator instead of the function: a product Gauss rule that is
exact for the operator's degree gives the integral of the fitted expansion.
"""

import math

from diskir.approximant import fit_operator
from diskir.bench import EXACT_INTEGRALS, get_function, sampling_set
from diskir.cubature import default_radial_points, integrate_model, product_disk_rule

f = get_function(1)  # exp(-(x^2 + y^2))
exact = EXACT_INTEGRALS[1]
for n in (20, 40, 60, 80, 100):
    m = n // 4
    rt = m + math.isqrt(m)
    rule = product_disk_rule(default_radial_points(rt))
    model = fit_operator(sampling_set("grid", n), f, m, rt)
    err = abs(integrate_model(model, rule) - exact)
    print(f"n={n:3d}  m={m:2d}  r~={rt:2d}  rule nodes={rule.node_count:4d}  error={err:.3e}")

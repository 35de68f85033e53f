"""Cubature on the unit disk.

:func:`product_disk_rule` builds a tensor rule in ``(s, theta)`` with
``s = r^2``: Gauss-Legendre in ``s`` on ``[0, 1]`` and ``2q + 1`` equally
spaced angles.  The substitution absorbs the Jacobian ``r``, so the rule
integrates every polynomial of total degree ``<= 2q - 1`` exactly.

:func:`integrate_model` applies a rule to a fitted operator, which is the
interpolation-regression cubature formula.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

__all__ = [
    "CubatureRule",
    "product_disk_rule",
    "integrate_model",
    "integrate",
    "reference_integral",
    "disk_moment",
    "default_radial_points",
]


@dataclass(frozen=True)
class CubatureRule:
    x: np.ndarray
    y: np.ndarray
    weights: np.ndarray
    exact_degree: int

    def __post_init__(self):
        for name in ("x", "y", "weights"):
            arr = np.array(getattr(self, name), dtype=float).ravel()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if not (self.x.size == self.y.size == self.weights.size):
            raise ValidationError("nodes and weights differ in length")

    @property
    def node_count(self) -> int:
        return self.weights.size

    def __call__(self, f) -> float:
        return integrate(f, self)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "y", "weight"])
            for row in zip(self.x, self.y, self.weights):
                w.writerow([f"{v:.15g}" for v in row])

    @classmethod
    def read_csv(cls, path, exact_degree: int = -1) -> "CubatureRule":
        """Load an ``x,y,weight`` rule, e.g. one produced by external software."""
        data = np.genfromtxt(path, delimiter=",", names=True, ndmin=1)
        return cls(data["x"], data["y"], data["weight"], exact_degree)


def product_disk_rule(radial_points: int) -> CubatureRule:
    """Tensor Gauss rule with ``q * (2q + 1)`` nodes, exact through degree ``2q - 1``."""
    q = int(radial_points)
    if q < 1:
        raise ValidationError("radial_points must be >= 1")
    t, w = np.polynomial.legendre.leggauss(q)
    s = (t + 1) / 2
    ws = w / 2
    na = 2 * q + 1
    theta = 2 * np.pi * np.arange(na) / na
    r = np.sqrt(s)
    rr, tt = np.meshgrid(r, theta, indexing="ij")
    weights = np.repeat(ws * np.pi / na, na)
    return CubatureRule(rr * np.cos(tt), rr * np.sin(tt), weights, 2 * q - 1)


def default_radial_points(rtilde: int) -> int:
    """Smallest ``q`` whose product rule integrates degree ``rtilde`` exactly."""
    return math.ceil((rtilde + 1) / 2)


def integrate(f, rule: CubatureRule) -> float:
    return float(np.dot(rule.weights, np.asarray(f(rule.x, rule.y), dtype=float) * np.ones(rule.node_count)))


def integrate_model(model, rule: CubatureRule) -> float:
    """``sum_j w_j * model(xi_j)``."""
    return integrate(model, rule)


def reference_integral(f, radial_points: int = 60) -> float:
    """High-order product-rule value of ``int_D f dx dy``."""
    return integrate(f, product_disk_rule(radial_points))


def disk_moment(a: int, b: int) -> float:
    """``int_D x^a y^b dx dy`` in closed form."""
    if a % 2 or b % 2:
        return 0.0
    return (
        2.0 * math.gamma((a + 1) / 2) * math.gamma((b + 1) / 2)
        / ((a + b + 2) * math.gamma((a + b) / 2 + 1))
    )

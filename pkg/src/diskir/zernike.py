"""Orthonormal Zernike polynomials on the unit disk.

Indices are double indices ``(m, l)`` with ``|l| <= m`` and ``m - |l|`` even.
The angular factor is ``cos(l*theta)`` for ``l >= 0`` and ``sin(|l|*theta)``
for ``l < 0``.  Normalisation is with respect to the weight ``r dtheta dr``
on the unit disk, so that

    int_0^1 int_0^{2pi} Z_m^l Z_m'^l' r dtheta dr = delta

which gives ``gamma = sqrt((m+1)/pi)`` for ``l == 0`` and
``sqrt(2(m+1)/pi)`` otherwise.

Two evaluations of the radial factor are provided. :func:`radial_poly` sums
the explicit finite series in exact rational arithmetic and is meant as a
reference; :func:`radial_poly_jacobi` goes through the Jacobi three-term
recurrence and is what the basis uses for bulk evaluation, since the explicit
series cancels catastrophically in floating point once ``m`` exceeds ~20.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

import numpy as np

from .errors import ValidationError, ZernikeIndexError

__all__ = [
    "ZernikeIndex",
    "DiskPoint",
    "GradedZernikeBasis",
    "norm_constant",
    "radial_poly",
    "radial_poly_jacobi",
    "jacobi_poly",
    "angular_part",
    "zernike_eval",
    "build_basis",
    "basis_dimension",
]


@dataclass(frozen=True, order=True)
class ZernikeIndex:
    m: int
    l: int

    def __post_init__(self):
        m, l = self.m, self.l
        if int(m) != m or int(l) != l:
            raise ZernikeIndexError(f"indices must be integers, got ({m}, {l})")
        if m < 0 or abs(l) > m or (m - abs(l)) % 2:
            raise ZernikeIndexError(
                f"invalid Zernike index (m={m}, l={l}): need |l| <= m and m-|l| even"
            )

    @property
    def n(self) -> int:
        """Degree of the Jacobi factor, (m - |l|) / 2."""
        return (self.m - abs(self.l)) // 2


def _as_index(idx) -> ZernikeIndex:
    if isinstance(idx, ZernikeIndex):
        return idx
    m, l = idx
    return ZernikeIndex(int(m), int(l))


def basis_dimension(degree: int) -> int:
    """Dimension of bivariate polynomials of total degree <= ``degree``."""
    return (degree + 1) * (degree + 2) // 2


@dataclass(frozen=True)
class DiskPoint:
    """A point of the closed unit disk held in polar and Cartesian form."""

    r: float
    theta: float
    x: float
    y: float

    @classmethod
    def from_polar(cls, r: float, theta: float) -> "DiskPoint":
        theta = float(theta)
        x, y = r * math.cos(theta), r * math.sin(theta)
        return cls(float(r), theta % (2 * math.pi), x, y)

    @classmethod
    def from_cartesian(cls, x: float, y: float) -> "DiskPoint":
        r = math.hypot(x, y)
        theta = math.atan2(y, x) % (2 * math.pi) if r > 0 else 0.0
        return cls(r, theta, float(x), float(y))


def norm_constant(idx) -> float:
    """``gamma_m^l`` making Z_m^l unit-norm under ``r dtheta dr``."""
    idx = _as_index(idx)
    if idx.l == 0:
        return math.sqrt((idx.m + 1) / math.pi)
    return math.sqrt(2 * (idx.m + 1) / math.pi)


@lru_cache(maxsize=None)
def _radial_coefficients(m: int, l: int) -> tuple[tuple[int, int], ...]:
    # (power, integer coefficient) pairs of the explicit series
    l = abs(l)
    out = []
    for s in range((m - l) // 2 + 1):
        c = math.factorial(m - s) // (
            math.factorial(s)
            * math.factorial((m + l) // 2 - s)
            * math.factorial((m - l) // 2 - s)
        )
        out.append((m - 2 * s, -c if s % 2 else c))
    return tuple(out)


def _radial_exact(coeffs, r: float) -> float:
    rq = Fraction(float(r))
    total = Fraction(0)
    for power, c in coeffs:
        total += c * rq**power
    return float(total)


def radial_poly(idx, r):
    """Radial factor ``R_m^{|l|}(r)`` from the explicit alternating sum.

    The integer coefficients and the sum are formed exactly and rounded once,
    so the result is the correctly rounded value of the series at the given
    double ``r``.  Accepts a scalar or an array of radii; arrays are evaluated
    point by point and are therefore slow.
    """
    idx = _as_index(idx)
    coeffs = _radial_coefficients(idx.m, idx.l)
    if np.ndim(r) == 0:
        return _radial_exact(coeffs, r)
    r = np.asarray(r, dtype=float)
    return np.array([_radial_exact(coeffs, v) for v in r.ravel()]).reshape(r.shape)


def jacobi_poly(n: int, alpha: float, t):
    """Jacobi polynomial ``P_n^{(alpha, 0)}(t)`` via the three-term recurrence."""
    t = np.asarray(t, dtype=float)
    p_prev = np.ones_like(t)
    if n == 0:
        return p_prev
    a = alpha
    p = (a + 1) + (a + 2) * (t - 1) / 2
    for k in range(2, n + 1):
        c0 = 2 * k * (k + a) * (2 * k + a - 2)
        c1 = (2 * k + a - 1) * ((2 * k + a) * (2 * k + a - 2) * t + a * a)
        c2 = 2 * (k + a - 1) * (k - 1) * (2 * k + a)
        p_prev, p = p, (c1 * p - c2 * p_prev) / c0
    return p


def radial_poly_jacobi(idx, r):
    """Radial factor through ``(-1)^n r^|l| P_n^{(|l|,0)}(1 - 2 r^2)``."""
    idx = _as_index(idx)
    r = np.asarray(r, dtype=float)
    n, a = idx.n, abs(idx.l)
    val = (-1) ** n * r**a * jacobi_poly(n, a, 1 - 2 * r * r)
    return float(val) if val.ndim == 0 else val


def angular_part(l: int, theta):
    if l >= 0:
        return np.cos(l * np.asarray(theta, dtype=float))
    return np.sin(-l * np.asarray(theta, dtype=float))


def zernike_eval(idx, p: DiskPoint, gamma: float | None = None) -> float:
    """Evaluate ``gamma * R_m^{|l|}(r) * chi_l(theta)`` at a single point."""
    idx = _as_index(idx)
    if gamma is None:
        gamma = norm_constant(idx)
    if not gamma > 0:
        raise ValidationError("normalisation constant must be positive")
    return float(gamma * radial_poly_jacobi(idx, p.r) * angular_part(idx.l, p.theta))


@dataclass(frozen=True)
class GradedZernikeBasis:
    """Zernike polynomials of radial order <= ``max_degree`` in graded order.

    All indices of order ``m`` precede those of order ``m + 1``; inside one
    order ``l`` runs ``-m, -m+2, ..., m``.  Consequently the first
    ``(m+1)(m+2)/2`` entries span the polynomials of degree ``<= m``.
    """

    max_degree: int
    entries: tuple[ZernikeIndex, ...] = field(repr=False)
    norm_constants: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[ZernikeIndex]:
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def position(self, m: int, l: int) -> int:
        """Zero-based single index of ``Z_m^l`` in this ordering."""
        ZernikeIndex(m, l)
        return m * (m + 1) // 2 + (l + m) // 2

    def evaluate_polar(self, r, theta, count: int | None = None) -> np.ndarray:
        """Matrix ``[u_j(p_i)]`` of shape ``(npoints, count)``."""
        r = np.atleast_1d(np.asarray(r, dtype=float)).ravel()
        theta = np.atleast_1d(np.asarray(theta, dtype=float)).ravel()
        count = len(self) if count is None else count
        if count > len(self):
            raise ValidationError(f"basis has {len(self)} entries, {count} requested")
        out = np.empty((r.size, count))
        if count == 0:
            return out
        deg = self.entries[count - 1].m
        t = 1.0 - 2.0 * r * r
        cos_t, sin_t = {}, {}
        for a in range(deg + 1):
            # all radial orders sharing |l| = a come out of one recurrence
            nmax = (deg - a) // 2
            ra = r**a
            p_prev = np.ones_like(t)
            polys = [p_prev]
            if nmax >= 1:
                p = (a + 1) + (a + 2) * (t - 1) / 2
                polys.append(p)
                for k in range(2, nmax + 1):
                    c0 = 2 * k * (k + a) * (2 * k + a - 2)
                    c1 = (2 * k + a - 1) * ((2 * k + a) * (2 * k + a - 2) * t + a * a)
                    c2 = 2 * (k + a - 1) * (k - 1) * (2 * k + a)
                    p_prev, p = p, (c1 * p - c2 * p_prev) / c0
                    polys.append(p)
            cos_t[a] = np.cos(a * theta)
            if a > 0:
                sin_t[a] = np.sin(a * theta)
            for k, pk in enumerate(polys):
                m = a + 2 * k
                radial = (-1) ** k * ra * pk
                for l in ((a,) if a == 0 else (-a, a)):
                    j = self.position(m, l)
                    if j >= count:
                        continue
                    ang = cos_t[a] if l >= 0 else sin_t[a]
                    out[:, j] = self.norm_constants[j] * radial * ang
        return out

    def evaluate(self, x, y, count: int | None = None) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return self.evaluate_polar(np.hypot(x, y), np.arctan2(y, x), count)

    def sup_norms(self) -> np.ndarray:
        """Exact ``max |u_j|`` over the disk, which is ``gamma_j``."""
        return self.norm_constants.copy()


def build_basis(degree: int) -> GradedZernikeBasis:
    if degree < 0:
        raise ValidationError("degree must be non-negative")
    entries = tuple(
        ZernikeIndex(m, l) for m in range(degree + 1) for l in range(-m, m + 1, 2)
    )
    gammas = np.array([norm_constant(e) for e in entries])
    gammas.flags.writeable = False
    return GradedZernikeBasis(degree, entries, gammas)

"""Node sets on the unit disk and collocation-matrix conditioning.

Three families are built here:

* the Bos array with ring radii from a cubic fit in Chebyshev zeros
  (the "optimal" interpolation nodes for degree ``m``),
* polar grids ``r_eta = (eta+1)/(n+1)``, ``theta_kappa = 2 pi kappa/(n+1)``,
  optionally with the origin appended,
* golden-angle spirals ``r_i = sqrt(i/N)``, ``theta_i = i * pi (3 - sqrt 5)``.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np
import scipy.linalg

from .errors import CardinalityError, ConstructionError, SingularityError, ValidationError
from .zernike import DiskPoint, GradedZernikeBasis, basis_dimension

__all__ = [
    "NodeSet",
    "BosArraySpec",
    "ring_count",
    "ring_sizes",
    "chebyshev_zeros",
    "optimal_radii",
    "bos_spec",
    "bos_array",
    "polar_grid",
    "spiral_set",
    "gram_matrix",
    "cond_inf",
    "GOLDEN_ANGLE",
]

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))

# cubic least-squares fit of the kappa_inf-optimal ring radii
_RADII_FIT = (1.1565, -0.76535, 0.60517)

PROVENANCES = ("optimal", "polar_grid", "polar_grid_with_origin", "spiral", "mock_optimal", "custom")


def _reduce_angle(c, s) -> np.ndarray:
    # atan2 of the evaluated cos/sin instead of theta mod fl(2 pi): for large
    # theta the latter drifts by ~theta * 1e-16 away from the stored x, y
    t = np.mod(np.arctan2(s, c), 2 * np.pi)
    return np.where(t >= 2 * np.pi, 0.0, t)


@dataclass(frozen=True)
class NodeSet:
    """Ordered points of the unit disk with a provenance tag.

    Coordinates are stored as read-only arrays in both Cartesian and polar
    form; ``theta`` is reduced to ``[0, 2 pi)``.
    """

    x: np.ndarray
    y: np.ndarray
    r: np.ndarray
    theta: np.ndarray
    provenance: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("x", "y", "r", "theta"):
            arr = np.array(getattr(self, name), dtype=float).ravel()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if not (self.x.size == self.y.size == self.r.size == self.theta.size):
            raise ValidationError("coordinate arrays differ in length")
        if self.provenance not in PROVENANCES:
            raise ValidationError(f"unknown provenance {self.provenance!r}")

    @classmethod
    def from_polar(cls, r, theta, provenance="custom", **params) -> "NodeSet":
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        c, s = np.cos(theta), np.sin(theta)
        return cls(r * c, r * s, r, _reduce_angle(c, s), provenance, params)

    @classmethod
    def from_cartesian(cls, x, y, provenance="custom", **params) -> "NodeSet":
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return cls(x, y, np.hypot(x, y), _reduce_angle(x, y), provenance, params)

    def __len__(self) -> int:
        return self.x.size

    def __iter__(self) -> Iterator[DiskPoint]:
        for i in range(len(self)):
            yield self[i]

    def __getitem__(self, i) -> DiskPoint:
        return DiskPoint(float(self.r[i]), float(self.theta[i]), float(self.x[i]), float(self.y[i]))

    @property
    def points(self) -> list[DiskPoint]:
        return list(self)

    @property
    def xy(self) -> np.ndarray:
        return np.column_stack([self.x, self.y])

    def subset(self, index, provenance: str | None = None, **params) -> "NodeSet":
        index = np.asarray(index, dtype=int)
        return NodeSet(
            self.x[index], self.y[index], self.r[index], self.theta[index],
            provenance or self.provenance, params or dict(self.params),
        )

    def min_separation(self) -> float:
        """Smallest pairwise Euclidean distance (``inf`` for fewer than 2 points)."""
        if len(self) < 2:
            return math.inf
        from scipy.spatial import cKDTree

        d, _ = cKDTree(self.xy).query(self.xy, k=2)
        return float(d[:, 1].min())

    def to_csv(self, path) -> None:
        """Write ``x,y,r,theta`` with 15 significant digits."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y", "r", "theta"])
            for row in zip(self.x, self.y, self.r, self.theta):
                w.writerow([f"{v:.15g}" for v in row])

    @classmethod
    def read_csv(cls, path, provenance="custom") -> "NodeSet":
        data = np.genfromtxt(path, delimiter=",", names=True, ndmin=1)
        return cls(data["x"], data["y"], data["r"], data["theta"], provenance, {})


def ring_count(m: int) -> int:
    """Number of circles ``K(m) = floor(m/2) + 1`` of the Bos array."""
    return m // 2 + 1


def ring_sizes(m: int) -> list[int]:
    """Nodes per circle, ``2m + 5 - 4 nu`` for ``nu = 1..K``."""
    return [2 * m + 5 - 4 * nu for nu in range(1, ring_count(m) + 1)]


def chebyshev_zeros(m: int) -> np.ndarray:
    """The ``K(m)`` largest zeros of the Chebyshev polynomial ``T_{m+1}``."""
    if m < 0:
        raise ValidationError("m must be non-negative")
    nu = np.arange(1, ring_count(m) + 1)
    z = np.cos((2 * nu - 1) * np.pi / (2 * (m + 1)))
    if m % 2 == 0:
        # the last one is cos(pi/2); snap it so the centre node is exact
        z[-1] = 0.0
    return z


def _radii_from_zeros(z) -> np.ndarray:
    c1, c2, c3 = _RADII_FIT
    z = np.asarray(z, dtype=float)
    return z * (c1 + z * (c2 + z * c3))


def optimal_radii(m: int) -> np.ndarray:
    """Ring radii ``1.1565 z - 0.76535 z^2 + 0.60517 z^3`` at the Chebyshev zeros.

    For even ``m`` the innermost radius is exactly 0 (a single centre node).

    Raises
    ------
    ConstructionError
        If a radius leaves ``[0, 1]`` or the sequence is not strictly
        decreasing.
    """
    rho = _radii_from_zeros(chebyshev_zeros(m))
    if np.any(rho < 0) or np.any(rho > 1.0 + 1e-9):
        raise ConstructionError(f"ring radius outside [0, 1] for m={m}: {rho}")
    if np.any(np.diff(rho) >= 0):
        raise ConstructionError(f"ring radii not strictly decreasing for m={m}")
    if m % 2 == 1 and rho[-1] <= 0:
        raise ConstructionError(f"innermost ring collapsed for odd m={m}")
    return rho


@dataclass(frozen=True)
class BosArraySpec:
    m: int
    K: int
    ring_radii: np.ndarray
    ring_counts: tuple[int, ...]

    @property
    def size(self) -> int:
        return sum(self.ring_counts)


def bos_spec(m: int) -> BosArraySpec:
    return BosArraySpec(m, ring_count(m), optimal_radii(m), tuple(ring_sizes(m)))


def bos_array(m: int) -> NodeSet:
    """Bos array with optimal radii; ring-major, then angle, starting at 0."""
    spec = bos_spec(m)
    r, theta = [], []
    for rho, count in zip(spec.ring_radii, spec.ring_counts):
        sigma = np.arange(count)
        r.append(np.full(count, rho))
        theta.append(2 * np.pi * sigma / count)
    nodes = NodeSet.from_polar(np.concatenate(r), np.concatenate(theta), "optimal", m=m)
    if len(nodes) != basis_dimension(m):
        raise ConstructionError(f"Bos array for m={m} has {len(nodes)} nodes")
    return nodes


def polar_grid(n: int, with_origin: bool = False) -> NodeSet:
    """``(n+1)^2`` points ``(r_eta, theta_kappa)``, radius-major.

    With ``with_origin`` the point ``(0, 0)`` is appended last.
    """
    if n < 1:
        raise ValidationError("n must be >= 1")
    radii = np.arange(1, n + 2) / (n + 1)
    angles = 2 * np.pi * np.arange(n + 1) / (n + 1)
    rr, tt = np.meshgrid(radii, angles, indexing="ij")
    r, theta = rr.ravel(), tt.ravel()
    if with_origin:
        r = np.append(r, 0.0)
        theta = np.append(theta, 0.0)
        return NodeSet.from_polar(r, theta, "polar_grid_with_origin", n=n)
    return NodeSet.from_polar(r, theta, "polar_grid", n=n)


def spiral_set(nstar: int) -> NodeSet:
    """Golden-angle (Fibonacci) spiral of ``nstar`` points starting at the origin."""
    if nstar < 1:
        raise ValidationError("nstar must be >= 1")
    i = np.arange(nstar)
    r = np.sqrt(i / nstar)
    # coordinates from the unreduced angle; NodeSet stores theta mod 2 pi
    return NodeSet.from_polar(r, i * GOLDEN_ANGLE, "spiral", nstar=nstar)


def gram_matrix(nodes: NodeSet, basis: GradedZernikeBasis, count: int | None = None) -> np.ndarray:
    """Collocation matrix ``A[j, l] = Z_l(p_j)`` on the first ``count`` basis entries.

    ``count`` defaults to the full basis; the node count must equal it.
    """
    count = len(basis) if count is None else count
    if len(nodes) != count:
        raise CardinalityError(f"{len(nodes)} nodes for a {count}-dimensional space")
    if len(basis) < count:
        raise CardinalityError(f"basis has only {len(basis)} entries, need {count}")
    return basis.evaluate_polar(nodes.r, nodes.theta, count)


def cond_inf(a) -> float:
    """``||A||_inf * ||A^{-1}||_inf`` with the inverse formed from an LU factorization."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError("cond_inf needs a square matrix")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=True)
    if np.any(np.diag(lu) == 0):
        raise SingularityError("matrix is exactly singular")
    inv = scipy.linalg.lu_solve((lu, piv), np.eye(a.shape[0]))
    kappa = np.abs(a).sum(axis=1).max() * np.abs(inv).sum(axis=1).max()
    if not np.isfinite(kappa) or kappa * np.finfo(float).eps >= 1.0:
        raise SingularityError(f"matrix singular to working precision (kappa={kappa:.3e})")
    return float(kappa)

"""Equality-constrained least squares for the interpolation-regression fit.

The problem is

    minimise ||M a - b||_2   subject to   C a = d

with ``M`` the basis evaluated at every sample and ``C`` the basis evaluated
at the mock-optimal subset.  It is solved two ways:

* :func:`solve_kkt` factors the symmetric indefinite saddle-point matrix
  ``[[2 M^T M, C^T], [C, 0]]`` and also returns the Lagrange multipliers;
* :func:`solve_elimination` uses a QR factorization of ``C`` to eliminate the
  first ``M`` coefficients and solves the reduced problem by QR.

:func:`norm_bound_constants` evaluates the operator-norm bound
``max_i ||u_i||_inf * (K1 + K2)`` from the elimination factors.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg

from .errors import AdmissibilityError, SingularityError, StateError, ValidationError
from .nodesets import bos_array
from .zernike import GradedZernikeBasis, basis_dimension, build_basis

__all__ = [
    "ConstrainedLSProblem",
    "Diagnostics",
    "FitResult",
    "EliminationFactors",
    "numerical_rank",
    "assemble",
    "solve_kkt",
    "solve_elimination",
    "eliminate",
    "norm_bound_constants",
    "sup_norm_estimate",
    "cond_inf_value",
]

_EPS = np.finfo(float).eps


def numerical_rank(a) -> int:
    """Rank with the cutoff ``sigma_max * max(shape) * eps``."""
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.count_nonzero(s > s[0] * max(a.shape) * _EPS))


def cond_inf_value(a) -> float:
    """Infinity-norm condition number; ``inf`` instead of raising when singular."""
    a = np.asarray(a, dtype=float)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        try:
            lu, piv = scipy.linalg.lu_factor(a)
        except (ValueError, np.linalg.LinAlgError):
            return float("inf")
        if np.any(np.diag(lu) == 0):
            return float("inf")
        inv = scipy.linalg.lu_solve((lu, piv), np.eye(a.shape[0]))
    kappa = np.abs(a).sum(axis=1).max() * np.abs(inv).sum(axis=1).max()
    return float(kappa) if np.isfinite(kappa) else float("inf")


@dataclass(frozen=True)
class ConstrainedLSProblem:
    """Matrices and data of one constrained least-squares fit.

    ``design`` is ``n* x R~`` (all samples), ``constraint`` is ``M x R~``
    (mock nodes), ``b`` holds all sample values and ``d`` the values at the
    mock nodes.
    """

    design: np.ndarray
    constraint: np.ndarray
    b: np.ndarray
    d: np.ndarray
    basis: GradedZernikeBasis | None = None
    m: int | None = None
    mock_index: np.ndarray | None = None
    rank_design: int | None = None
    rank_constraint: int | None = None

    def __post_init__(self):
        for name in ("design", "constraint", "b", "d"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        n_star, rt = self.design.shape
        nm, rt2 = self.constraint.shape
        if rt2 != rt:
            raise ValidationError("design and constraint matrices differ in width")
        if self.b.shape != (n_star,) or self.d.shape != (nm,):
            raise ValidationError("right-hand sides do not match the matrices")
        if nm > rt:
            raise ValidationError(f"{nm} constraints exceed {rt} unknowns")

    @property
    def dims(self) -> tuple[int, int, int]:
        """``(n_star, R_tilde, M)``."""
        return self.design.shape[0], self.design.shape[1], self.constraint.shape[0]

    def with_values(self, values) -> "ConstrainedLSProblem":
        """Same matrices, new sample values (the mock values follow)."""
        if self.mock_index is None:
            raise StateError("problem was built without a mock index")
        b = np.asarray(values, dtype=float).ravel()
        return ConstrainedLSProblem(
            self.design, self.constraint, b, b[self.mock_index], self.basis,
            self.m, self.mock_index, self.rank_design, self.rank_constraint,
        )


@dataclass
class Diagnostics:
    n_star: int
    R_tilde: int
    M: int
    rank_M: int | None = None
    rank_C: int | None = None
    kkt_cond_inf: float | None = None
    constraint_residual: float | None = None
    ls_residual: float | None = None
    K1: float | None = None
    K2: float | None = None
    norm_bound: float | None = None

    _JSON_KEYS = (
        "n_star", "R_tilde", "M", "kkt_cond_inf", "K1", "K2",
        "norm_bound", "constraint_residual", "ls_residual",
    )

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        d = self.to_dict()
        return json.dumps({k: d[k] for k in self._JSON_KEYS}, **kw)


@dataclass
class FitResult:
    a_hat: np.ndarray
    method: str
    diagnostics: Diagnostics
    z_hat: np.ndarray | None = None
    factors: "EliminationFactors | None" = field(default=None, repr=False)


def assemble(
    samples,
    mock_index,
    values,
    basis: GradedZernikeBasis,
    m: int,
    rtilde: int,
    check_rank: bool = True,
) -> ConstrainedLSProblem:
    """Build ``M``, ``C``, ``b``, ``d`` from a sample set and its mock subset.

    Parameters
    ----------
    samples : NodeSet
    mock_index : array of int
        Positions in ``samples`` of the mock-optimal nodes, in constraint order.
    values : array
        Function values aligned with ``samples``.
    basis : GradedZernikeBasis
        Must have at least ``(rtilde+1)(rtilde+2)/2`` entries.
    m, rtilde : int
        Interpolation and regression degrees, ``rtilde > m``.

    Raises
    ------
    ValidationError
        Size conditions violated.
    AdmissibilityError
        ``M`` or ``C`` is numerically rank deficient.
    """
    n_star = len(samples)
    R = basis_dimension(rtilde)
    M = basis_dimension(m)
    if rtilde <= m:
        raise ValidationError(f"regression degree {rtilde} must exceed m={m}")
    if R >= n_star:
        raise ValidationError(f"R~={R} unknowns need more than {n_star} samples")
    if len(basis) < R:
        raise ValidationError(f"basis of degree {basis.max_degree} too small for rtilde={rtilde}")
    mock_index = np.asarray(mock_index, dtype=int)
    if mock_index.shape != (M,):
        raise ValidationError(f"expected {M} mock nodes, got {mock_index.size}")
    if np.unique(mock_index).size != M:
        raise ValidationError("mock nodes repeat a sample")
    b = np.asarray(values, dtype=float).ravel()
    if b.size != n_star:
        raise ValidationError(f"{b.size} values for {n_star} samples")

    design = basis.evaluate_polar(samples.r, samples.theta, R)
    constraint = design[mock_index]
    rank_m = rank_c = None
    if check_rank:
        rank_m = numerical_rank(design)
        if rank_m < R:
            raise AdmissibilityError(
                f"design matrix has rank {rank_m} < {R}; add samples or lower rtilde"
            )
        rank_c = numerical_rank(constraint)
        if rank_c < M:
            raise AdmissibilityError(f"constraint matrix has rank {rank_c} < {M}")
    return ConstrainedLSProblem(
        design, constraint, b, b[mock_index], basis, m, mock_index, rank_m, rank_c
    )


def _diagnostics(p: ConstrainedLSProblem, a: np.ndarray) -> Diagnostics:
    n_star, R, M = p.dims
    return Diagnostics(
        n_star, R, M,
        rank_M=p.rank_design,
        rank_C=p.rank_constraint,
        constraint_residual=float(np.max(np.abs(p.constraint @ a - p.d), initial=0.0)),
        ls_residual=float(np.linalg.norm(p.design @ a - p.b)),
    )


def kkt_matrix(p: ConstrainedLSProblem) -> np.ndarray:
    _, R, M = p.dims
    K = np.zeros((R + M, R + M))
    K[:R, :R] = 2.0 * p.design.T @ p.design
    K[:R, R:] = p.constraint.T
    K[R:, :R] = p.constraint
    return K


def solve_kkt(p: ConstrainedLSProblem, compute_cond: bool = True) -> FitResult:
    """Solve the saddle-point system with a Bunch-Kaufman factorization."""
    _, R, M = p.dims
    K = kkt_matrix(p)
    rhs = np.concatenate([2.0 * p.design.T @ p.b, p.d])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        try:
            sol = scipy.linalg.solve(K, rhs, assume_a="sym")
        except np.linalg.LinAlgError as exc:
            raise SingularityError(f"KKT matrix is singular: {exc}") from exc
    if not np.all(np.isfinite(sol)):
        raise SingularityError("KKT solve produced non-finite values")
    a, z = sol[:R], sol[R:]
    diag = _diagnostics(p, a)
    if compute_cond:
        diag.kkt_cond_inf = cond_inf_value(K)
    return FitResult(a, "kkt", diag, z_hat=z)


@dataclass(frozen=True)
class EliminationFactors:
    """Pieces of the direct elimination reused by the norm bound."""

    Q: np.ndarray  # M x M
    R11: np.ndarray  # M x M, upper triangular
    R12: np.ndarray  # M x (R~ - M)
    R11_inv_R12: np.ndarray
    V1: np.ndarray  # n* x (R~ - M)


def eliminate(p: ConstrainedLSProblem) -> EliminationFactors:
    _, R, M = p.dims
    Q, RC = scipy.linalg.qr(p.constraint, mode="full")
    R11, R12 = RC[:, :M], RC[:, M:]
    diag = np.abs(np.diag(R11))
    if M and (diag.min() <= diag.max() * M * _EPS):
        raise SingularityError("R11 is singular: mock nodes are not unisolvent for degree m")
    X = scipy.linalg.solve_triangular(R11, R12)
    V1 = p.design[:, M:] - p.design[:, :M] @ X
    return EliminationFactors(Q, R11, R12, X, V1)


def solve_elimination(p: ConstrainedLSProblem, factors: EliminationFactors | None = None) -> FitResult:
    """Direct elimination with the reduced least-squares problem solved by QR."""
    _, R, M = p.dims
    f = eliminate(p) if factors is None else factors
    y = scipy.linalg.solve_triangular(f.R11, f.Q.T @ p.d)
    if R > M:
        b1 = p.b - p.design[:, :M] @ y
        Qv, Rv = np.linalg.qr(f.V1)
        a2 = scipy.linalg.solve_triangular(Rv, Qv.T @ b1)
    else:
        a2 = np.zeros(0)
    a1 = y - f.R11_inv_R12 @ a2
    a = np.concatenate([a1, a2])
    return FitResult(a, "elimination", _diagnostics(p, a), factors=f)


def _norm1(a) -> float:
    a = np.asarray(a)
    return float(np.abs(a).sum(axis=0).max()) if a.size else 0.0


@lru_cache(maxsize=8)
def _dense_sup(rtilde: int, m: int | None, nr: int, nt: int) -> tuple[float, ...]:
    basis = build_basis(rtilde)
    r = np.linspace(0.0, 1.0, nr)
    theta = np.linspace(0.0, 2 * np.pi, nt, endpoint=False)
    rr, tt = np.meshgrid(r, theta, indexing="ij")
    rr, tt = rr.ravel(), tt.ravel()
    if m is not None:
        nodes = bos_array(m)
        rr = np.concatenate([rr, nodes.r])
        tt = np.concatenate([tt, nodes.theta])
    sup = np.zeros(len(basis))
    for start in range(0, rr.size, 8192):
        chunk = basis.evaluate_polar(rr[start:start + 8192], tt[start:start + 8192])
        np.maximum(sup, np.abs(chunk).max(axis=0), out=sup)
    return tuple(sup)


def sup_norm_estimate(rtilde: int, m: int | None = None, nr: int = 401, nt: int = 401) -> np.ndarray:
    """``max |u_i|`` over a polar ``nr x nt`` grid plus the Bos nodes of degree ``m``."""
    return np.array(_dense_sup(rtilde, m, nr, nt))


def norm_bound_constants(p: ConstrainedLSProblem, factors: EliminationFactors | None = None):
    """Return ``(K1, K2, bound)`` for the operator-norm estimate.

    ``K2 = ||pinv(V1)||_1 (n* + M ||M1 R11^-1 Q^T||_1)`` and
    ``K1 = ||R11^-1||_1 (M ||Q^T||_1 + ||R12||_1 K2)``; the bound multiplies
    ``K1 + K2`` by the largest basis sup-norm.
    """
    if p.basis is None:
        raise StateError("norm bound needs the basis the problem was assembled with")
    n_star, R, M = p.dims
    f = eliminate(p) if factors is None else factors
    R11_inv = scipy.linalg.solve_triangular(f.R11, np.eye(M))
    if R > M:
        # literal (V1^T V1)^-1 V1^T; equals the pseudo-inverse at full column rank
        pinv_V1 = np.linalg.pinv(f.V1)
        G = p.design[:, :M] @ (R11_inv @ f.Q.T)
        K2 = _norm1(pinv_V1) * (n_star + M * _norm1(G))
    else:
        K2 = 0.0
    K1 = _norm1(R11_inv) * (M * _norm1(f.Q.T) + _norm1(f.R12) * K2)
    rtilde = p.basis.entries[R - 1].m
    sup = sup_norm_estimate(rtilde, p.m)[:R].max()
    return K1, K2, float(sup * (K1 + K2))

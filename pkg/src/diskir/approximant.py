"""The interpolation-regression operator as a fitted, evaluable model.

:func:`fit_operator` runs the full pipeline: Bos array of degree ``m``,
greedy mock-node selection in the sampling set, assembly of the constrained
least-squares problem in the degree-``rtilde`` Zernike basis, and a solve.
:func:`interpolate_only` gives the plain degree-``m`` interpolants used as
baselines.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .clsq import (
    ConstrainedLSProblem,
    Diagnostics,
    FitResult,
    assemble,
    norm_bound_constants,
    solve_elimination,
    solve_kkt,
)
from .errors import CardinalityError, SingularityError, StateError, ValidationError
from .mock_select import select_mock_nodes
from .nodesets import NodeSet, bos_array, cond_inf
from .zernike import DiskPoint, GradedZernikeBasis, basis_dimension, build_basis

__all__ = [
    "ApproxModel",
    "fit_operator",
    "refit",
    "fit_problem",
    "interpolate_only",
    "evaluate",
    "polar_eval_grid",
    "max_error",
    "sample_values",
]


@dataclass
class ApproxModel:
    """``sum_i a_i u_i`` in a graded Zernike basis."""

    basis: GradedZernikeBasis
    coefficients: np.ndarray
    config: dict = field(default_factory=dict)
    fit: FitResult | None = field(default=None, repr=False)
    problem: ConstrainedLSProblem | None = field(default=None, repr=False)

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=float)
        if self.coefficients.shape != (len(self.basis),):
            raise ValidationError(
                f"{self.coefficients.size} coefficients for a basis of {len(self.basis)}"
            )

    @property
    def degree(self) -> int:
        return self.basis.max_degree

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = self.evaluate_polar(np.hypot(x, y), np.arctan2(y, x))
        return out.reshape(np.broadcast(x, y).shape)

    def evaluate_polar(self, r, theta) -> np.ndarray:
        r = np.ravel(r)
        theta = np.ravel(theta)
        out = np.empty(r.size)
        for s in range(0, r.size, 8192):
            out[s:s + 8192] = self.basis.evaluate_polar(r[s:s + 8192], theta[s:s + 8192]) @ self.coefficients
        return out

    def to_json(self) -> str:
        cfg = {k: v for k, v in self.config.items() if isinstance(v, (int, float, str, type(None)))}
        payload = {
            "degree": self.degree,
            "config": cfg,
            "coefficients": [float(f"{c:.17g}") for c in self.coefficients],
        }
        if self.fit is not None:
            payload["diagnostics"] = json.loads(self.fit.diagnostics.to_json())
        return json.dumps(payload, indent=2)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())

    @classmethod
    def from_json(cls, text: str) -> "ApproxModel":
        payload = json.loads(text)
        basis = build_basis(int(payload["degree"]))
        return cls(basis, np.array(payload["coefficients"], dtype=float), payload.get("config", {}))

    @classmethod
    def load(cls, path) -> "ApproxModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())


def evaluate(model: ApproxModel, p) -> float:
    """Value of ``model`` at a :class:`DiskPoint` or an ``(x, y)`` pair."""
    if not isinstance(p, DiskPoint):
        p = DiskPoint.from_cartesian(*p)
    return float(model.evaluate_polar([p.r], [p.theta])[0])


def sample_values(f, nodes: NodeSet) -> np.ndarray:
    return np.asarray(f(nodes.x, nodes.y), dtype=float) * np.ones(len(nodes))


def fit_problem(problem: ConstrainedLSProblem, method: str = "elimination",
                compute_bound: bool = False, compute_cond: bool = True) -> FitResult:
    method = {"elim": "elimination"}.get(method, method)
    if method == "kkt":
        res = solve_kkt(problem, compute_cond=compute_cond)
    elif method == "elimination":
        res = solve_elimination(problem)
    else:
        raise ValidationError(f"unknown method {method!r}")
    if compute_bound:
        K1, K2, bound = norm_bound_constants(problem, res.factors)
        res.diagnostics.K1, res.diagnostics.K2, res.diagnostics.norm_bound = K1, K2, bound
    return res


def fit_operator(
    samples: NodeSet,
    f_values,
    m: int,
    rtilde: int,
    method: str = "elimination",
    metric: str = "l1",
    *,
    compute_bound: bool = False,
    compute_cond: bool = True,
    check_rank: bool = True,
) -> ApproxModel:
    """Fit the interpolation-regression operator to ``f_values`` on ``samples``.

    ``f_values`` may be an array aligned with ``samples`` or a callable
    ``f(x, y)``.  ``compute_cond`` only affects the ``kkt`` method, whose
    diagnostics then carry the infinity-norm condition number.
    """
    if callable(f_values):
        f_values = sample_values(f_values, samples)
    if rtilde <= m:
        raise ValidationError(f"rtilde={rtilde} must exceed m={m}")
    if basis_dimension(rtilde) >= len(samples):
        raise ValidationError(
            f"{len(samples)} samples are too few for degree {rtilde} "
            f"({basis_dimension(rtilde)} unknowns)"
        )
    optimal = bos_array(m)
    _, mock_index = select_mock_nodes(samples, optimal, metric)
    basis = build_basis(rtilde)
    problem = assemble(samples, mock_index, f_values, basis, m, rtilde, check_rank=check_rank)
    res = fit_problem(problem, method, compute_bound=compute_bound, compute_cond=compute_cond)
    config = {
        "m": m,
        "rtilde": rtilde,
        "n_star": len(samples),
        "provenance": samples.provenance,
        "metric": metric,
        "method": res.method,
        **{k: v for k, v in samples.params.items()},
    }
    return ApproxModel(basis, res.a_hat, config, res, problem)


def refit(model: ApproxModel, values) -> ApproxModel:
    """Fit new sample values with the nodes, degrees and factorizations of ``model``."""
    if model.problem is None or model.fit is None:
        raise StateError("model carries no assembled problem to reuse")
    problem = model.problem.with_values(values)
    if model.fit.method == "elimination":
        res = solve_elimination(problem, model.fit.factors)
    else:
        res = solve_kkt(problem, compute_cond=False)
    return ApproxModel(model.basis, res.a_hat, dict(model.config), res, problem)


def interpolate_only(nodes: NodeSet, f_values, m: int) -> ApproxModel:
    """Degree-``m`` interpolant on exactly ``(m+1)(m+2)/2`` nodes."""
    if callable(f_values):
        f_values = sample_values(f_values, nodes)
    M = basis_dimension(m)
    if len(nodes) != M:
        raise CardinalityError(f"interpolation of degree {m} needs {M} nodes, got {len(nodes)}")
    basis = build_basis(m)
    A = basis.evaluate_polar(nodes.r, nodes.theta)
    try:
        kappa = cond_inf(A)
    except SingularityError as exc:
        raise SingularityError(f"interpolation nodes are degenerate for degree {m}") from exc
    a = scipy.linalg.solve(A, np.asarray(f_values, dtype=float))
    diag = Diagnostics(M, M, M, constraint_residual=float(np.max(np.abs(A @ a - f_values))))
    config = {"m": m, "rtilde": m, "provenance": nodes.provenance, "gram_cond_inf": kappa}
    return ApproxModel(basis, a, config, FitResult(a, "interpolation", diag))


def polar_eval_grid(nr: int = 201, nt: int = 201) -> tuple[np.ndarray, np.ndarray]:
    """Polar test grid: ``nr`` radii uniform on ``[0, 1]`` times ``nt`` angles on ``[0, 2 pi)``.

    Returns Cartesian ``(x, y)`` arrays, flattened.
    """
    r = np.linspace(0.0, 1.0, nr)
    theta = np.linspace(0.0, 2 * np.pi, nt, endpoint=False)
    rr, tt = np.meshgrid(r, theta, indexing="ij")
    return (rr * np.cos(tt)).ravel(), (rr * np.sin(tt)).ravel()


def max_error(model, f, grid=None) -> float:
    """``max |f - model|`` over ``grid`` (default: 201 x 201 polar grid)."""
    x, y = polar_eval_grid() if grid is None else grid
    x, y = np.ravel(x), np.ravel(y)
    if x.size == 0:
        raise ValidationError("empty evaluation grid")
    return float(np.max(np.abs(np.asarray(f(x, y)) - model(x, y))))

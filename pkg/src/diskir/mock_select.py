"""Greedy selection of mock-optimal nodes from a sampling set.

Each optimal node, taken in order, grabs the closest sampling node that has
not been taken yet.  Ties go to the lowest remaining sample index.  This is
a sequential greedy pass, not an optimal assignment.
"""

from __future__ import annotations

import numpy as np

from .errors import CardinalityError, ValidationError
from .nodesets import NodeSet

__all__ = ["select_mock_nodes", "regression_index"]


def select_mock_nodes(samples: NodeSet, optimal: NodeSet, metric: str = "l1"):
    """Pick one distinct sampling node per optimal node.

    Parameters
    ----------
    samples : NodeSet
        Candidate pool, at least as large as ``optimal``.
    optimal : NodeSet
        Target nodes, processed in their stored order.
    metric : {"l1", "l2"}
        ``l1`` uses ``|dx| + |dy|``; ``l2`` the Euclidean distance.

    Returns
    -------
    mock : NodeSet
        The selected nodes (provenance ``mock_optimal``) in optimal-node order.
    index : ndarray of int
        ``index[j]`` is the position in ``samples`` of the ``j``-th mock node.
    """
    metric = metric.lower()
    if metric not in ("l1", "l2"):
        raise ValidationError(f"metric must be 'l1' or 'l2', got {metric!r}")
    if len(samples) < len(optimal):
        raise CardinalityError(
            f"{len(samples)} samples cannot host {len(optimal)} distinct mock nodes"
        )
    sx, sy = samples.x, samples.y
    taken = np.zeros(len(samples), dtype=bool)
    index = np.empty(len(optimal), dtype=int)
    for j, (px, py) in enumerate(zip(optimal.x, optimal.y)):
        dx, dy = np.abs(sx - px), np.abs(sy - py)
        d = dx + dy if metric == "l1" else np.hypot(dx, dy)
        # masking keeps the relative order of the survivors, so argmin's
        # first-hit rule matches deleting rows from the pool
        d[taken] = np.inf
        i = int(np.argmin(d))
        index[j] = i
        taken[i] = True
    mock = samples.subset(index, "mock_optimal", metric=metric, **optimal.params)
    return mock, index


def regression_index(n_samples: int, mock_index) -> np.ndarray:
    """Sample positions not used as mock nodes, in increasing order."""
    keep = np.ones(n_samples, dtype=bool)
    keep[np.asarray(mock_index, dtype=int)] = False
    return np.flatnonzero(keep)

"""Weighted communication graphs and the spectral quantities behind every terminal-time bound.

A graph is stored as a dense non-negative adjacency matrix with zero
diagonal.  From it we derive the graph Laplacian, connectivity flags,
detail-balance weights for directed graphs, and the two constrained
Rayleigh-quotient minima:

* ``lambda2``      -- smallest Rayleigh quotient orthogonal to the all-ones
  vector (the algebraic connectivity of a symmetric Laplacian),
* ``lambda_omega`` -- smallest Rayleigh quotient orthogonal to a positive
  weight vector, which generalizes ``lambda2`` to detail-balanced digraphs.

Dense storage throughout: the systems of interest have a handful of agents.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

SYMMETRY_RTOL = 1e-12
BALANCE_RTOL = 1e-9


class GraphError(ValueError):
    """Base class for graph construction and spectral-precondition errors."""


class NotSymmetric(GraphError):
    pass


class NotStronglyConnected(GraphError):
    pass


class NotDetailBalanced(GraphError):
    pass


class InvalidWeights(GraphError):
    pass


class GraphNotConnected(GraphError):
    pass


@dataclass(frozen=True, eq=False)
class CommGraph:
    """Communication topology of an N-agent ensemble.

    ``adjacency[i, j] > 0`` means agent i receives state from agent j with
    coupling weight ``adjacency[i, j]``.  The diagonal is zero.
    """

    adjacency: np.ndarray

    def __post_init__(self):
        a = np.array(self.adjacency, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise GraphError(f"adjacency must be square, got shape {a.shape}")
        if a.shape[0] < 2:
            raise GraphError("need at least 2 agents")
        if np.any(a < 0) or not np.all(np.isfinite(a)):
            raise GraphError("adjacency entries must be finite and non-negative")
        if np.any(np.diag(a) != 0):
            raise GraphError("adjacency diagonal must be zero")
        a.flags.writeable = False
        object.__setattr__(self, "adjacency", a)

    @property
    def n_agents(self) -> int:
        return self.adjacency.shape[0]

    def is_symmetric(self) -> bool:
        a = self.adjacency
        return bool(np.array_equal(a, a.T))


@dataclass(frozen=True, eq=False)
class BalanceWeights:
    """Positive weights with ``omega[i]*a[i,j] == omega[j]*a[j,i]``, normalized to omega[0] = 1."""

    omega: np.ndarray

    def __post_init__(self):
        w = np.array(self.omega, dtype=float)
        if w.ndim != 1 or np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise InvalidWeights("weights must be a 1-D vector of strictly positive reals")
        w.flags.writeable = False
        object.__setattr__(self, "omega", w)


def laplacian(graph: CommGraph) -> np.ndarray:
    """Graph Laplacian: off-diagonal -a_ij, diagonal the row sum of a.

    The diagonal is computed as the negated off-diagonal row sum, so rows
    sum to zero exactly in floating point.
    """
    a = graph.adjacency
    lap = -a.copy()
    np.fill_diagonal(lap, a.sum(axis=1))
    return lap


def _reachable_from(support: np.ndarray, root: int = 0) -> np.ndarray:
    n = support.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[root] = True
    queue = deque([root])
    while queue:
        i = queue.popleft()
        for j in range(n):
            if support[i, j] and not seen[j]:
                seen[j] = True
                queue.append(j)
    return seen


def is_undirected_connected(graph: CommGraph) -> bool:
    """True iff the adjacency is symmetric and all nodes are reachable from node 0."""
    if not graph.is_symmetric():
        return False
    return bool(_reachable_from(graph.adjacency > 0).all())


def is_strongly_connected(graph: CommGraph) -> bool:
    """True iff every node reaches every other along directed positive-weight edges."""
    support = graph.adjacency > 0
    return bool(_reachable_from(support).all() and _reachable_from(support.T).all())


def detail_balance_weights(graph: CommGraph) -> BalanceWeights:
    """Positive weights making the scaled adjacency (omega_i * a_ij) symmetric.

    Weights are propagated over a breadth-first spanning tree of the
    symmetrized support graph rooted at node 0 (children visited in index
    order), then every edge is checked for consistency.

    Raises:
        NotStronglyConnected: the graph is not strongly connected.
        NotDetailBalanced: some edge is one-sided (a_ij > 0, a_ji = 0) or
            fails the consistency check at relative tolerance 1e-9.
    """
    if not is_strongly_connected(graph):
        raise NotStronglyConnected("detail-balance weights need a strongly connected graph")
    a = graph.adjacency
    n = graph.n_agents
    one_sided = (a > 0) & (a.T == 0)
    if one_sided.any():
        i, j = np.argwhere(one_sided)[0]
        raise NotDetailBalanced(f"edge ({i}, {j}) has a_ij > 0 but a_ji = 0")

    omega = np.full(n, np.nan)
    omega[0] = 1.0
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in range(n):
            if np.isnan(omega[j]) and min(a[i, j], a[j, i]) > 0:
                omega[j] = omega[i] * a[i, j] / a[j, i]
                queue.append(j)
    # strong connectivity of a two-sided support graph guarantees full coverage
    assert not np.any(np.isnan(omega))

    scaled = omega[:, None] * a
    mismatch = np.abs(scaled - scaled.T)
    tol = BALANCE_RTOL * np.maximum(np.abs(scaled), np.abs(scaled.T))
    bad = mismatch > np.maximum(tol, 0.0)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise NotDetailBalanced(
            f"edge ({i}, {j}) violates detail balance: "
            f"omega_i*a_ij={scaled[i, j]:.12g} vs omega_j*a_ji={scaled[j, i]:.12g}"
        )
    return BalanceWeights(omega)


def elementwise_power(graph: CommGraph, exponent: float) -> CommGraph:
    """Entry-wise power of the positive adjacency entries; zeros stay zero."""
    if exponent <= 0:
        raise GraphError(f"exponent must be positive, got {exponent}")
    a = graph.adjacency
    return CommGraph(np.where(a > 0, a, 1.0) ** exponent * (a > 0))


def scaled_graph(graph: CommGraph, weights: BalanceWeights) -> CommGraph:
    """Adjacency with row i multiplied by omega_i (symmetric when detail-balanced)."""
    return CommGraph(weights.omega[:, None] * graph.adjacency)


def _require_symmetric(lap: np.ndarray) -> np.ndarray:
    lap = np.asarray(lap, dtype=float)
    scale = np.abs(lap).max()
    if np.abs(lap - lap.T).max() > SYMMETRY_RTOL * max(scale, 1.0):
        raise NotSymmetric("matrix is not symmetric; eigenvalue bounds need a symmetric argument")
    return lap


def lambda2(lap: np.ndarray) -> float:
    """Second-smallest eigenvalue of a symmetric Laplacian (algebraic connectivity)."""
    lap = _require_symmetric(lap)
    return float(np.linalg.eigvalsh(lap)[1])


def orthonormal_complement(vector: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the hyperplane orthogonal to ``vector``, via a Householder reflector.

    Returns an (N, N-1) matrix whose columns span {x : <x, vector> = 0}.
    """
    q = np.asarray(vector, dtype=float)
    q = q / np.linalg.norm(q)
    v = q.copy()
    v[0] += 1.0 if q[0] >= 0 else -1.0
    house = np.eye(len(q)) - 2.0 * np.outer(v, v) / (v @ v)
    return house[:, 1:]


def lambda_omega(lap: np.ndarray, weights: BalanceWeights) -> float:
    """Minimum Rayleigh quotient of a symmetric Laplacian over vectors orthogonal to omega.

    Computed exactly by restricting the matrix to the (N-1)-dimensional
    orthogonal complement of omega and taking the smallest eigenvalue of
    the restriction.  Equals ``lambda2`` when omega is the all-ones vector.
    """
    lap = _require_symmetric(lap)
    basis = orthonormal_complement(weights.omega)
    reduced = basis.T @ lap @ basis
    return float(np.linalg.eigvalsh(reduced)[0])

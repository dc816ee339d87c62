"""Pairwise distances, symmetrized k-NN graphs, geodesic shortest paths."""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components, shortest_path

from .errors import ContractViolation, DisconnectedGraphError, InvalidParameter

# Smallest admissible edge weight: duplicate points would otherwise produce
# zero-weight edges, which the graph contract forbids.
_MIN_WEIGHT = np.finfo(float).tiny


@dataclass
class NeighborGraph:
    """Undirected weighted graph; edges stored once with i < j."""

    n: int
    edges_i: np.ndarray
    edges_j: np.ndarray
    weights: np.ndarray

    def validate(self):
        if np.any(self.edges_i >= self.edges_j):
            raise ContractViolation("edges must satisfy i < j (no self-loops)")
        if np.any(self.weights <= 0):
            raise ContractViolation("edge weights must be positive")

    def to_sparse(self):
        m = sp.coo_matrix(
            (self.weights, (self.edges_i, self.edges_j)), shape=(self.n, self.n)
        )
        return (m + m.T).tocsr()

    def component_labels(self):
        count, labels = connected_components(self.to_sparse(), directed=False)
        return count, labels


def pairwise_distances(X, norm="l2"):
    """Dense symmetric Euclidean (or L1) distance matrix with a zero diagonal."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ContractViolation("expected a 2-D sample matrix")
    if not np.all(np.isfinite(X)):
        raise ContractViolation("samples must be finite")
    n = X.shape[0]
    if norm == "l1":
        d = np.zeros((n, n))
        for col in range(X.shape[1]):
            d += np.abs(X[:, col][:, None] - X[:, col][None, :])
    elif norm == "l2":
        sq = np.sum(X * X, axis=1)
        d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
        np.clip(d2, 0.0, None, out=d2)
        d = np.sqrt(d2)
    else:
        raise InvalidParameter(f"unknown norm {norm!r}")
    # Exact symmetry: take the elementwise min of the two float orderings.
    d = np.minimum(d, d.T)
    np.fill_diagonal(d, 0.0)
    return d


def knn_indices(D, k):
    """Row-wise indices of the k nearest neighbors (self excluded).

    Ties at the k-th position break toward the lower index: the stable
    argsort preserves index order among equal distances.
    """
    n = D.shape[0]
    if not 1 <= k < n:
        raise InvalidParameter(f"k must satisfy 1 <= k < n={n}, got {k}")
    work = D.copy()
    np.fill_diagonal(work, np.inf)
    order = np.argsort(work, axis=1, kind="stable")
    return order[:, :k]


def knn_graph(D, k):
    """Union-symmetrized k-NN graph over a distance matrix.

    Edge (i, j) is present iff j is among i's k nearest or i among j's.
    Weights are the distances, floored at a tiny positive value so that
    duplicate points cannot produce zero-weight edges.
    """
    D = np.asarray(D, dtype=float)
    n = D.shape[0]
    nbr = knn_indices(D, k)
    rows = np.repeat(np.arange(n), k)
    cols = nbr.ravel()
    lo = np.minimum(rows, cols)
    hi = np.maximum(rows, cols)
    keys = np.unique(lo.astype(np.int64) * n + hi)
    i = (keys // n).astype(np.int64)
    j = (keys % n).astype(np.int64)
    w = np.maximum(D[i, j], _MIN_WEIGHT)
    return NeighborGraph(n=n, edges_i=i, edges_j=j, weights=w)


def geodesic_distances(graph):
    """All-pairs shortest-path distances over the graph's edge weights.

    Raises DisconnectedGraphError (naming the component count) when the
    graph is not connected.
    """
    count, _ = graph.component_labels()
    if count != 1:
        raise DisconnectedGraphError(count)
    dist = shortest_path(graph.to_sparse(), method="D", directed=False)
    dist = (dist + dist.T) / 2.0
    np.fill_diagonal(dist, 0.0)
    return dist


def bridge_components(graph, D):
    """Connect a disconnected graph by adding shortest inter-component edges.

    Components are joined along a minimum-spanning tree over the pairwise
    closest component gaps, one edge per joined pair.  Returns a new graph
    and the number of edges added (0 when already connected).
    """
    count, labels = graph.component_labels()
    if count == 1:
        return graph, 0
    comp_members = [np.where(labels == c)[0] for c in range(count)]
    # Closest point pair between every component pair.
    best = {}
    for a in range(count):
        for b in range(a + 1, count):
            sub = D[np.ix_(comp_members[a], comp_members[b])]
            flat = np.argmin(sub)
            ia, ib = np.unravel_index(flat, sub.shape)
            best[(a, b)] = (
                float(sub[ia, ib]),
                int(comp_members[a][ia]),
                int(comp_members[b][ib]),
            )
    # Prim's algorithm over components.
    in_tree = {0}
    new_i, new_j, new_w = [], [], []
    while len(in_tree) < count:
        cand = None
        for (a, b), (dist, pa, pb) in sorted(best.items()):
            if (a in in_tree) == (b in in_tree):
                continue
            if cand is None or dist < cand[0]:
                cand = (dist, a, b, pa, pb)
        dist, a, b, pa, pb = cand
        in_tree.add(b if a in in_tree else a)
        lo, hi = min(pa, pb), max(pa, pb)
        new_i.append(lo)
        new_j.append(hi)
        new_w.append(max(dist, _MIN_WEIGHT))
    merged = NeighborGraph(
        n=graph.n,
        edges_i=np.concatenate([graph.edges_i, np.array(new_i, dtype=np.int64)]),
        edges_j=np.concatenate([graph.edges_j, np.array(new_j, dtype=np.int64)]),
        weights=np.concatenate([graph.weights, np.array(new_w)]),
    )
    return merged, len(new_i)

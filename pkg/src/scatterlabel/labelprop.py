"""Graph label propagation: affinity build, symmetric normalization,
fixed-point iteration, and hardening to class ids.

W and S are kept as dense arrays.  That is a deliberate trade: the n×n
kernel and its normalization are where the method's quadratic cost lives,
and the benchmark suite measures exactly that growth.  A memory guard in
`bench` keeps oversized instances from being attempted.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DivergenceError,
    InvalidBandwidth,
    InvalidParameter,
    NormalizationError,
)
from .distances import knn_indices, pairwise_distances


@dataclass
class AffinityGraph:
    W: np.ndarray
    S: np.ndarray
    gamma: float
    k: int
    degrees: np.ndarray = field(default=None)


def build_affinity(X, k=10, gamma=None):
    """Gaussian kernel W_ij = exp(−γ‖x_i − x_j‖) on union-symmetrized k-NN edges.

    gamma=None selects the automatic bandwidth 1/median(retained edge
    distances).  Returns the graph with W built and S not yet computed
    (see `normalize`).
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    D = pairwise_distances(X)
    nbr = knn_indices(D, k)
    mask = np.zeros((n, n), dtype=bool)
    rows = np.repeat(np.arange(n), k)
    mask[rows, nbr.ravel()] = True
    mask |= mask.T
    np.fill_diagonal(mask, False)

    edge_dists = D[mask]
    if gamma is None:
        med = float(np.median(edge_dists)) if edge_dists.size else 0.0
        if med <= 0:
            raise InvalidBandwidth(
                "cannot infer a bandwidth: all retained edge distances are zero"
            )
        gamma = 1.0 / med
    elif gamma <= 0:
        raise InvalidParameter("gamma must be positive")

    # Reuse the distance buffer: W = exp(−γD) masked to the retained edges.
    np.multiply(D, -gamma, out=D)
    np.exp(D, out=D)
    D[~mask] = 0.0
    np.fill_diagonal(D, 0.0)
    return AffinityGraph(W=D, S=None, gamma=float(gamma), k=k)


def normalize(graph):
    """S = D^{−1/2} W D^{−1/2}; errors if any vertex has zero degree."""
    W = graph.W
    deg = W.sum(axis=1)
    isolated = np.where(deg <= 0)[0]
    if isolated.size:
        raise NormalizationError(isolated)
    inv_sqrt = 1.0 / np.sqrt(deg)
    S = W * inv_sqrt[:, None]
    S *= inv_sqrt[None, :]
    S = np.minimum(S, S.T)
    graph.S = S
    graph.degrees = deg
    return graph


@dataclass
class SoftLabelMatrix:
    F: np.ndarray
    iterations: int
    converged: bool
    step_norms: list = field(default_factory=list)


def _one_hot_seeds(n, p, split, seed_labels):
    Q = np.zeros((n, p))
    Q[split.labeled, np.asarray(seed_labels, dtype=int)] = 1.0
    return Q


def propagate(graph, split, seed_labels, class_count, lam=0.99, eps=1e-6, max_iter=10000):
    """Iterate f ← λSf + (1−λ)Q until the Frobenius step drops below eps.

    Soft iteration: seed rows are pulled toward Q by the (1−λ) term but not
    clamped; `harden` restores the given seed labels afterwards.  eps=0
    disables the early exit so exactly max_iter sweeps run (used to pin the
    iteration count when timing).
    """
    if not 0 < lam < 1:
        raise InvalidParameter("lambda must be in (0, 1)")
    if eps < 0:
        raise InvalidParameter("epsilon must be >= 0")
    if graph.S is None:
        normalize(graph)
    S = graph.S
    n = S.shape[0]
    Q = _one_hot_seeds(n, class_count, split, seed_labels)
    base = (1.0 - lam) * Q
    F = Q.copy()
    steps = []
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        F_next = lam * (S @ F) + base
        if not np.all(np.isfinite(F_next)):
            raise DivergenceError(f"non-finite values at iteration {it}")
        step = float(np.linalg.norm(F_next - F))
        steps.append(step)
        F = F_next
        if step < eps:
            converged = True
            break
    return SoftLabelMatrix(F=F, iterations=it, converged=converged, step_norms=steps)


def harden(soft, split, seed_labels):
    """Class ids from soft scores: argmax with ties to the lowest id.

    Seed samples keep their given labels.  All-zero rows are assigned class
    0 and counted as unreached.
    """
    F = soft.F
    labels = np.argmax(F, axis=1).astype(np.int32)
    unreached = int(np.sum(np.all(F == 0.0, axis=1)))
    labels[split.labeled] = np.asarray(seed_labels, dtype=np.int32)
    return labels, unreached


def run_label_propagation(X, split, seed_labels, class_count, k=10, gamma=None,
                          lam=0.99, eps=1e-6, max_iter=10000):
    """Convenience pipeline: affinity → normalize → propagate → harden."""
    graph = normalize(build_affinity(X, k=k, gamma=gamma))
    soft = propagate(graph, split, seed_labels, class_count, lam=lam, eps=eps,
                     max_iter=max_iter)
    labels, unreached = harden(soft, split, seed_labels)
    return labels, soft, unreached

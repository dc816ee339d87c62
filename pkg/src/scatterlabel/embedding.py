"""2-D embeddings: classical MDS, ISOMAP, and exact t-SNE.

Every embedding carries a lineage — the ordered list of (method, params,
subset) steps that produced it — so that views re-derived over subsets
remain reproducible and self-describing.
"""

from dataclasses import dataclass, field

import numpy as np

from .distances import bridge_components, geodesic_distances, knn_graph, pairwise_distances
from .errors import (
    CalibrationError,
    ContractViolation,
    DegenerateEmbedding,
    DisconnectedGraphError,
    InvalidParameter,
)
from .linalg import top_eigenpairs
from .rng import make_rng, normals


@dataclass
class Embedding:
    coords: np.ndarray
    lineage: list = field(default_factory=list)

    def extended(self, method, params, subset_size):
        """Lineage for a child embedding derived from this one."""
        return list(self.lineage) + [(method, dict(params), subset_size)]


def classical_mds(D, d):
    """Classical (Torgerson) MDS of a distance matrix.

    Double-centers the squared distances into a Gram matrix, takes the top-d
    eigenpairs, and scales eigenvectors by sqrt of their (non-negative)
    eigenvalues.  Negative eigenvalues are clamped to zero; if no positive
    eigenvalue exists the embedding is degenerate.
    """
    D = np.asarray(D, dtype=float)
    n = D.shape[0]
    if d < 1:
        raise InvalidParameter("d must be >= 1")
    if D.shape != (n, n):
        raise ContractViolation("distance matrix must be square")
    sq = D * D
    row_mean = sq.mean(axis=1)
    grand = row_mean.mean()
    B = -0.5 * (sq - row_mean[:, None] - row_mean[None, :] + grand)
    B = (B + B.T) / 2.0
    scale = np.linalg.norm(B)
    vals, vecs = top_eigenpairs(B, d)
    if scale == 0.0 or vals[0] <= 1e-12 * scale:
        raise DegenerateEmbedding("no positive eigenvalue in the Gram matrix")
    vals = np.clip(vals[:d], 0.0, None)
    coords = vecs[:, :d] * np.sqrt(vals)[None, :]
    # Deterministic sign: largest-magnitude coordinate of each axis positive.
    for j in range(coords.shape[1]):
        col = coords[:, j]
        lead = np.argmax(np.abs(col))
        if col[lead] < 0:
            coords[:, j] = -col
    return coords


def isomap(X, k, d, on_disconnect="bridge"):
    """ISOMAP: k-NN graph → geodesic distances → classical MDS.

    A disconnected neighbor graph either raises (on_disconnect="error",
    with a remediation hint) or is repaired by adding one shortest edge per
    component pair along a spanning tree (on_disconnect="bridge", the
    default).  The number of bridge edges is recorded in the lineage.
    """
    X = np.asarray(X, dtype=float)
    D = pairwise_distances(X)
    graph = knn_graph(D, k)
    count, _ = graph.component_labels()
    bridged = 0
    if count != 1:
        if on_disconnect == "error":
            raise DisconnectedGraphError(count, hint="increase k")
        graph, bridged = bridge_components(graph, D)
    G = geodesic_distances(graph)
    coords = classical_mds(G, d)
    lineage = [("isomap", {"k": k, "d": d, "bridged_edges": bridged}, X.shape[0])]
    return Embedding(coords=coords, lineage=lineage)


def _calibrate_affinities(D2, perplexity, max_steps=50, tol=1e-5):
    """Per-point Gaussian bandwidths by bisection to the target perplexity.

    Works on squared distances; returns the row-normalized conditional
    affinity matrix.  Raises CalibrationError naming the first point whose
    entropy never reaches log(perplexity) within max_steps.
    """
    n = D2.shape[0]
    target = np.log(perplexity)
    beta = np.ones(n)
    lo = np.full(n, -np.inf)
    hi = np.full(n, np.inf)
    mask = ~np.eye(n, dtype=bool)
    P = np.zeros((n, n))
    done = np.zeros(n, dtype=bool)
    for _ in range(max_steps):
        expo = np.exp(-D2 * beta[:, None])
        expo[~mask] = 0.0
        sums = expo.sum(axis=1)
        sums = np.maximum(sums, 1e-300)
        # Shannon entropy of each row: H = log Z + beta * <d²>.
        weighted = (expo * D2).sum(axis=1) / sums
        H = np.log(sums) + beta * weighted
        P = expo / sums[:, None]
        diff = H - target
        newly = np.abs(diff) < tol
        done |= newly
        if np.all(done):
            break
        too_high = (diff > 0) & ~done
        too_low = (diff < 0) & ~done
        lo[too_high] = beta[too_high]
        hi[too_low] = beta[too_low]
        grow = too_high & np.isinf(hi)
        shrink = too_low & np.isinf(lo)
        beta[grow] *= 2.0
        beta[shrink] /= 2.0
        mid = ~done & ~grow & ~shrink
        beta[mid] = (lo[mid] + hi[mid]) / 2.0
    if not np.all(done):
        raise CalibrationError(int(np.argmin(done)), max_steps)
    return P


def tsne(
    X,
    perplexity=30.0,
    iterations=500,
    learning_rate=200.0,
    seed=0,
    early_exaggeration=4.0,
    exaggeration_iters=50,
    momentum_switch=250,
    record_objective=False,
):
    """Exact t-SNE: full-gradient descent on the KL divergence.

    Conditional affinities are perplexity-calibrated per point, symmetrized
    to the joint P = (P + Pᵀ)/(2n), and matched against Student-t low-
    dimensional affinities.  Deterministic given the seed.  When
    record_objective is set, the per-iteration KL value is returned on the
    embedding's `objective_trace` attribute.
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if not 1.0 < perplexity < n / 3.0:
        raise InvalidParameter(f"perplexity must be in (1, n/3); got {perplexity} for n={n}")
    if iterations < 1:
        raise InvalidParameter("iterations must be >= 1")

    D = pairwise_distances(X)
    P_cond = _calibrate_affinities(D * D, perplexity)
    P = (P_cond + P_cond.T) / (2.0 * n)
    np.clip(P, 1e-12, None, out=P)

    rng = make_rng(seed)
    Y = 1e-4 * normals(rng, (n, 2))
    velocity = np.zeros_like(Y)
    gains = np.ones_like(Y)
    min_gain = 0.01
    trace = []

    P_run = P * early_exaggeration
    for it in range(iterations):
        if it == exaggeration_iters:
            P_run = P
        sq = np.sum(Y * Y, axis=1)
        num = sq[:, None] + sq[None, :] - 2.0 * (Y @ Y.T)
        num += 1.0
        np.reciprocal(num, out=num)
        np.fill_diagonal(num, 0.0)
        Z = num.sum()
        PQ = P_run - num / Z
        W = PQ * num
        grad = 4.0 * (W.sum(axis=1)[:, None] * Y - W @ Y)

        momentum = 0.5 if it < momentum_switch else 0.8
        flip = np.sign(grad) != np.sign(velocity)
        gains[flip] += 0.2
        gains[~flip] *= 0.8
        np.clip(gains, min_gain, None, out=gains)
        velocity = momentum * velocity - learning_rate * (gains * grad)
        Y = Y + velocity
        Y = Y - Y.mean(axis=0)

        if record_objective:
            Q = np.maximum(num / Z, 1e-12)
            kl = float(np.sum(P_run * np.log(np.maximum(P_run, 1e-300) / Q)))
            trace.append(kl)

    emb = Embedding(
        coords=Y,
        lineage=[(
            "tsne",
            {
                "perplexity": perplexity,
                "iterations": iterations,
                "learning_rate": learning_rate,
                "seed": seed,
            },
            n,
        )],
    )
    if record_objective:
        emb.objective_trace = trace
    return emb


def pca_embedding(X, d=2):
    """PCA as an Embedding (the workbench's cheapest 2-D view)."""
    from .linalg import pca_project

    _, projected = pca_project(X, d)
    return Embedding(coords=projected, lineage=[("pca", {"d": d}, X.shape[0])])

"""Dense symmetric linear algebra: covariance, eigendecomposition, PCA.

The eigensolver is a cyclic Jacobi scheme written here rather than a LAPACK
call: rotations are applied until the off-diagonal Frobenius norm falls
below 1e-12·‖A‖.  For the large Gram matrices of classical MDS only the
leading eigenpairs matter, so `top_eigenpairs` runs a shifted orthogonal
(block power) iteration instead of a full decomposition.
"""

import numpy as np

from .errors import ContractViolation, DegenerateInput, InvalidParameter

_JACOBI_TOL = 1e-12
_MAX_SWEEPS = 64


def covariance_matrix(X):
    """Sample covariance (n−1 denominator) of rows of X; D×D symmetric PSD."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ContractViolation("expected a 2-D sample matrix")
    n = X.shape[0]
    if n < 2:
        raise DegenerateInput(f"need at least 2 samples, got {n}")
    centered = X - X.mean(axis=0)
    cov = centered.T @ centered / (n - 1)
    return (cov + cov.T) / 2.0


def sym_eigendecompose(A, tol=_JACOBI_TOL):
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.

    Returns (eigenvalues descending, eigenvector matrix with matching
    columns).  Convergence target: off-diagonal Frobenius norm ≤ tol·‖A‖.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ContractViolation("input must be a square matrix")
    scale = np.max(np.abs(A)) or 1.0
    if np.max(np.abs(A - A.T)) > 1e-9 * scale:
        raise ContractViolation("input must be symmetric within 1e-9 relative")
    n = A.shape[0]
    M = (A + A.T) / 2.0
    V = np.eye(n)
    if n == 1:
        return np.array([M[0, 0]]), V

    anorm = np.linalg.norm(M)
    target = tol * anorm if anorm > 0 else 0.0
    for _ in range(_MAX_SWEEPS):
        off = np.sqrt(max(np.sum(M * M) - np.sum(np.diag(M) ** 2), 0.0))
        if off <= target:
            break
        # Rotations below this contribute nothing at the current scale.
        skip = off / (n * n) * 1e-3
        for p in range(n - 1):
            row = M[p]
            for q in range(p + 1, n):
                apq = row[q]
                if abs(apq) <= skip:
                    continue
                app = M[p, p]
                aqq = M[q, q]
                theta = (aqq - app) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(1.0 + theta * theta))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # M ← JᵀMJ with the rotation in the (p,q) plane.
                col_p = M[:, p].copy()
                col_q = M[:, q].copy()
                M[:, p] = c * col_p - s * col_q
                M[:, q] = s * col_p + c * col_q
                row_p = M[p, :].copy()
                row_q = M[q, :].copy()
                M[p, :] = c * row_p - s * row_q
                M[q, :] = s * row_p + c * row_q
                M[p, q] = 0.0
                M[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
                row = M[p]

    eigenvalues = np.diag(M).copy()
    order = np.argsort(-eigenvalues, kind="stable")
    return eigenvalues[order], V[:, order]


def top_eigenpairs(A, m, tol=1e-11, max_iter=2000):
    """Leading m algebraic eigenpairs of symmetric A by orthogonal iteration.

    A Gershgorin shift keeps the iteration tracking the algebraically
    largest eigenvalues even when large negative ones exist.  Deterministic:
    the starting block comes from a fixed-seed generator.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    m = min(m, n)
    if n <= 64:
        vals, vecs = sym_eigendecompose(A)
        return vals[:m], vecs[:, :m]
    shift = float(np.max(np.sum(np.abs(A), axis=1)))
    block = min(m + 6, n)
    from .rng import make_rng, normals

    Q = np.linalg.qr(normals(make_rng(0x5EED), (n, block)))[0]
    anorm = np.linalg.norm(A) or 1.0
    last = None
    for _ in range(max_iter):
        Z = A @ Q + shift * Q
        Q, _ = np.linalg.qr(Z)
        T = Q.T @ (A @ Q)
        T = (T + T.T) / 2.0
        ritz = np.sort(np.diag(T))[::-1]
        if last is not None and np.max(np.abs(ritz - last)) <= tol * anorm:
            break
        last = ritz
    T = Q.T @ (A @ Q)
    T = (T + T.T) / 2.0
    tvals, tvecs = sym_eigendecompose(T)
    vals = tvals[:m]
    vecs = Q @ tvecs[:, :m]
    return vals, vecs


def pca_project(X, d):
    """Principal-component projection.

    Returns (basis, projected): basis columns are the top-d eigenvectors of
    the sample covariance; projected = centered X · basis.  Eigenvector sign
    is fixed so the largest-magnitude entry of each column is positive,
    making the projection deterministic.
    """
    X = np.asarray(X, dtype=float)
    n, D = X.shape
    if not 1 <= d <= D:
        raise InvalidParameter(f"d must be in [1, {D}], got {d}")
    cov = covariance_matrix(X)
    eigenvalues, vectors = sym_eigendecompose(cov)
    basis = vectors[:, :d].copy()
    for j in range(d):
        col = basis[:, j]
        lead = np.argmax(np.abs(col))
        if col[lead] < 0:
            basis[:, j] = -col
    projected = (X - X.mean(axis=0)) @ basis
    return basis, projected

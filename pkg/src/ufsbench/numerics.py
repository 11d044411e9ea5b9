"""Dense numerical kernels: exact kNN, graph Laplacians, a symmetric
eigensolver, and an L1-regularized (LARS/lasso) regression path.

Everything here is deterministic: distances are computed by one fixed
reduction order, ties break on the lower row index, and no randomized or
multi-threaded code paths exist.  Matrix sizes are desk scale (thousands),
so brute force is both fast enough and exactly reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class NumericsError(ValueError):
    pass


@dataclass(frozen=True)
class Tolerances:
    """All numeric thresholds in one record so tests can override them."""

    symmetry: float = 1e-10        # max allowed |A - A.T| entry (input check)
    eig_residual: float = 1e-8     # ||A v - lambda v||_inf per ||A||_inf
    eig_unit: float = 1e-10        # deviation of eigenvector norms from 1
    eig_ortho: float = 1e-8        # max |v_i . v_j| for i != j
    jacobi_off: float = 1e-13      # off-diagonal stop level per max|A|
    jacobi_max_n: int = 128        # above this, delegate to LAPACK
    lars_corr: float = 1e-10       # residual correlation considered zero
    degree_floor: float = 1e-12    # isolated-node guard in normalized Laplacian


TOLERANCES = Tolerances()

_CHUNK_ROWS = 256


def squared_distances(queries: np.ndarray, points: np.ndarray) -> np.ndarray:
    """All pairwise squared Euclidean distances, queries x points.

    Computed as sum((a-b)^2) along the feature axis in chunks; the
    per-pair reduction order is fixed, so results are bitwise stable.
    """
    queries = np.asarray(queries, dtype=np.float64)
    points = np.asarray(points, dtype=np.float64)
    m = queries.shape[0]
    out = np.empty((m, points.shape[0]))
    for start in range(0, m, _CHUNK_ROWS):
        stop = min(start + _CHUNK_ROWS, m)
        diff = queries[start:stop, None, :] - points[None, :, :]
        # .sum over the contiguous last axis: bit-identical to summing each
        # pair's difference vector on its own
        out[start:stop] = (diff * diff).sum(axis=2)
    return out


def knn_indices(queries: np.ndarray, points: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Indices and squared distances of the k nearest points per query.

    Ties break toward the lower point index (stable sort on distance).
    """
    if k < 1 or k > points.shape[0]:
        raise NumericsError(f"k={k} out of range for {points.shape[0]} points")
    d2 = squared_distances(queries, points)
    order = np.argsort(d2, axis=1, kind="stable")[:, :k]
    rows = np.arange(d2.shape[0])[:, None]
    return order, d2[rows, order]


@dataclass(frozen=True)
class KnnGraph:
    """k-nearest-neighbor structure over one point set (self excluded)."""

    indices: np.ndarray   # (n, k) neighbor row indices
    sq_dists: np.ndarray  # (n, k) squared distances, ascending per row

    @property
    def n(self) -> int:
        return self.indices.shape[0]

    @property
    def k(self) -> int:
        return self.indices.shape[1]

    def adjacency(self, edge_weights: np.ndarray | None = None) -> np.ndarray:
        """Dense symmetric adjacency W = max(W_directed, W_directed.T).

        edge_weights gives the weight of each directed edge (same shape as
        indices); by default every edge weighs 1.  The diagonal is zero.
        """
        n, k = self.indices.shape
        if edge_weights is None:
            edge_weights = np.ones((n, k))
        W = np.zeros((n, n))
        rows = np.repeat(np.arange(n), k)
        W[rows, self.indices.ravel()] = edge_weights.ravel()
        W = np.maximum(W, W.T)
        np.fill_diagonal(W, 0.0)
        return W


def knn_search(X: np.ndarray, k: int, metric: str = "euclidean") -> KnnGraph:
    """Exact k nearest neighbors of every row among the other rows.

    Brute-force distance matrix; ties broken by lower row index; a point is
    never its own neighbor.
    """
    if metric != "euclidean":
        raise NumericsError(f"unsupported metric '{metric}'")
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if k < 1 or k >= n:
        raise NumericsError(f"k={k} out of range for n={n} points")
    d2 = squared_distances(X, X)
    np.fill_diagonal(d2, np.inf)
    order = np.argsort(d2, axis=1, kind="stable")[:, :k]
    rows = np.arange(n)[:, None]
    return KnnGraph(indices=order, sq_dists=d2[rows, order])


def graph_laplacian(
    W: np.ndarray, kind: str = "unnormalized", tol: Tolerances = TOLERANCES
) -> tuple[np.ndarray, np.ndarray]:
    """Graph Laplacian of a symmetric weighted adjacency matrix.

    Returns (L, D) with D the diagonal degree matrix.  'unnormalized' gives
    L = D - W; 'normalized' gives D^{-1/2} (D - W) D^{-1/2} with degrees
    floored to avoid dividing by zero on isolated nodes.
    """
    W = np.asarray(W, dtype=np.float64)
    deg = W.sum(axis=1)
    D = np.diag(deg)
    L = D - W
    if kind == "unnormalized":
        return L, D
    if kind == "normalized":
        inv_sqrt = 1.0 / np.sqrt(np.maximum(deg, tol.degree_floor))
        return L * inv_sqrt[:, None] * inv_sqrt[None, :], D
    raise NumericsError(f"unknown laplacian kind '{kind}'")


@dataclass(frozen=True)
class EigenPairs:
    values: np.ndarray   # (m,) ascending
    vectors: np.ndarray  # (n, m) orthonormal columns


def _jacobi_eigh(A: np.ndarray, tol: Tolerances) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi diagonalization with vectorized plane rotations."""
    A = A.copy()
    n = A.shape[0]
    V = np.eye(n)
    scale = np.abs(A).max()
    if scale == 0.0:
        return np.zeros(n), V
    stop = tol.jacobi_off * scale
    # rotations below this level cannot move the off-diagonal mass enough
    # to matter, so skipping them only saves sweeps
    skip = stop / max(n, 2)
    for _ in range(60):
        off = np.abs(A - np.diag(np.diag(A))).max()
        if off <= stop:
            break
        for p in range(n - 1):
            row = A[p, p + 1 :]
            for q_off in np.flatnonzero(np.abs(row) > skip):
                q = p + 1 + q_off
                apq = A[p, q]
                if abs(apq) <= skip:
                    continue
                app, aqq = A[p, p], A[q, q]
                tau = (aqq - app) / (2.0 * apq)
                t = np.sign(tau) / (abs(tau) + np.hypot(1.0, tau)) if tau != 0 else 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                col_p = A[:, p].copy()
                col_q = A[:, q].copy()
                A[:, p] = c * col_p - s * col_q
                A[:, q] = s * col_p + c * col_q
                row_p = A[p, :].copy()
                row_q = A[q, :].copy()
                A[p, :] = c * row_p - s * row_q
                A[q, :] = s * row_p + c * row_q
                A[p, p] = app - t * apq
                A[q, q] = aqq + t * apq
                A[p, q] = 0.0
                A[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    else:
        raise NumericsError("Jacobi iteration failed to converge")
    return np.diag(A).copy(), V


def eigh_smallest(
    A: np.ndarray, m: int, tol: Tolerances = TOLERANCES
) -> EigenPairs:
    """The m smallest eigenpairs of a symmetric matrix, values ascending.

    Uses cyclic Jacobi diagonalization up to ``tol.jacobi_max_n`` and the
    LAPACK symmetric solver beyond that; either way the returned pairs are
    checked against the residual and orthonormality bounds.
    """
    A = np.asarray(A, dtype=np.float64)
    n = A.shape[0]
    if A.ndim != 2 or A.shape[1] != n:
        raise NumericsError("matrix must be square")
    if not 1 <= m <= n:
        raise NumericsError(f"m={m} out of range for n={n}")
    asym = np.abs(A - A.T).max()
    if asym > tol.symmetry * max(1.0, np.abs(A).max()):
        raise NumericsError(f"matrix not symmetric (max asymmetry {asym:g})")
    A = 0.5 * (A + A.T)
    if n <= tol.jacobi_max_n:
        values, vectors = _jacobi_eigh(A, tol)
        order = np.argsort(values, kind="stable")
        values, vectors = values[order], vectors[:, order]
    else:
        values, vectors = np.linalg.eigh(A)
    pairs = EigenPairs(values=values[:m].copy(), vectors=vectors[:, :m].copy())
    _check_eigenpairs(A, pairs, tol)
    return pairs


def _check_eigenpairs(A: np.ndarray, pairs: EigenPairs, tol: Tolerances) -> None:
    V = pairs.vectors
    residual = np.abs(A @ V - V * pairs.values[None, :]).max()
    bound = tol.eig_residual * max(np.abs(A).max(), np.finfo(float).tiny)
    if residual > bound:
        raise NumericsError(f"eigenpair residual {residual:g} exceeds {bound:g}")
    gram = V.T @ V
    if np.abs(np.diag(gram) - 1.0).max() > tol.eig_unit:
        raise NumericsError("eigenvectors not unit length")
    off = np.abs(gram - np.diag(np.diag(gram))).max() if gram.shape[0] > 1 else 0.0
    if off > tol.eig_ortho:
        raise NumericsError(f"eigenvectors not orthogonal (max dot {off:g})")


def lars_path(
    X: np.ndarray,
    y: np.ndarray,
    max_active: int,
    tol: Tolerances = TOLERANCES,
    trace: list | None = None,
) -> list[tuple[int, float]]:
    """LARS with the lasso modification, stopped by active-set size.

    Columns of X are centered and scaled to unit norm internally;
    coefficients refer to that standardized design.  The path runs until
    ``max_active`` features are active or all residual correlations fall
    below ``tol.lars_corr``.  Returns (feature index, coefficient) pairs in
    activation order.  When ``trace`` is a list, the (active tuple,
    coefficient vector) after every step is appended to it.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, n_feat = X.shape
    if max_active < 1:
        raise NumericsError("max_active must be at least 1")
    max_active = min(max_active, n_feat)

    Xc = X - X.mean(axis=0)
    norms = np.sqrt((Xc**2).sum(axis=0))
    usable = norms > 1e-12
    Xs = np.where(usable[None, :], Xc / np.where(usable, norms, 1.0), 0.0)

    beta = np.zeros(n_feat)
    active: list[int] = []
    signs: dict[int, float] = {}
    in_active = np.zeros(n_feat, dtype=bool)
    dropped = False
    tiny = np.finfo(float).tiny

    for _ in range(8 * n_feat + 8):
        corr = Xs.T @ (y - Xs @ beta)
        corr[~usable] = 0.0
        C = np.abs(corr).max() if n_feat else 0.0
        if C < tol.lars_corr:
            break
        if not dropped:
            if len(active) == max_active:
                break
            candidates = np.where(in_active | ~usable, -np.inf, np.abs(corr))
            j = int(np.argmax(candidates))
            if not np.isfinite(candidates[j]):
                break
            active.append(j)
            in_active[j] = True
            signs[j] = 1.0 if corr[j] >= 0 else -1.0

        idx = np.array(active)
        s = np.array([signs[j] for j in active])
        G = Xs[:, idx].T @ Xs[:, idx]
        try:
            w_un = np.linalg.solve(G, s)
        except np.linalg.LinAlgError:
            w_un = np.linalg.solve(G + 1e-10 * np.eye(len(idx)), s)
        denom = float(s @ w_un)
        if denom <= 0:
            w_un = np.linalg.solve(G + 1e-10 * np.eye(len(idx)), s)
            denom = max(float(s @ w_un), tiny)
        norm_const = 1.0 / np.sqrt(denom)
        w = norm_const * w_un                      # equiangular coefficient step
        a = Xs.T @ (Xs[:, idx] @ w)
        a[~usable] = 0.0

        gamma = C / norm_const
        mask = ~in_active & usable
        for num, den in (
            (C - corr[mask], norm_const - a[mask]),
            (C + corr[mask], norm_const + a[mask]),
        ):
            ok = den > tiny
            vals = num[ok] / den[ok]
            vals = vals[vals > tiny]
            if vals.size:
                gamma = min(gamma, vals.min())

        # lasso condition: stop at the first active coefficient crossing zero
        z = np.where(np.abs(w) > tiny, -beta[idx] / np.where(w == 0, 1.0, w), np.inf)
        z = np.where(z > tiny, z, np.inf)
        z_min = z.min()
        drop_now = z_min < gamma
        if drop_now:
            gamma = z_min

        beta[idx] = beta[idx] + gamma * w
        if drop_now:
            for pos in np.flatnonzero(z == z_min)[::-1]:
                j = active[pos]
                beta[j] = 0.0
                in_active[j] = False
                del signs[j]
                active.pop(pos)
        dropped = drop_now
        if trace is not None:
            trace.append((tuple(active), beta.copy()))

    return [(j, float(beta[j])) for j in active]

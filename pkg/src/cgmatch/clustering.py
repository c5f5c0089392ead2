"""Graph-level clustering: pairwise distances -> classical MDS -> k-means -> ARI."""
from __future__ import annotations

import numpy as np

from .graphs import Graph
from .rng import RngSeed

_KMEANS_MAX_ITERS = 300


def pairwise_distances(gs: list[Graph]) -> np.ndarray:
    """Inter-graph Frobenius distance matrix D[i, j] = ||A_i - A_j||_F."""
    if len(gs) < 2:
        raise ValueError("need at least two graphs")
    n = gs[0].n
    if any(g.n != n for g in gs):
        raise ValueError("graphs must share a vertex count")
    m = len(gs)
    d = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            d[i, j] = d[j, i] = np.linalg.norm(gs[i].weights - gs[j].weights)
    return d


def _double_centered(d: np.ndarray) -> np.ndarray:
    m = d.shape[0]
    j = np.eye(m) - np.full((m, m), 1.0 / m)
    return -0.5 * j @ (d * d) @ j


def cmds_embed(d: np.ndarray, dim: int) -> np.ndarray:
    """Classical multidimensional scaling into `dim` coordinates.

    Negative eigenvalues of the double-centered matrix are clamped to zero
    (graph distance matrices need not be Euclidean).  When D is realizable in
    `dim` dimensions the embedding reproduces it exactly.
    """
    d = np.asarray(d, dtype=float)
    m = d.shape[0]
    if d.shape != (m, m) or not np.array_equal(d, d.T) or np.any(np.diagonal(d) != 0):
        raise ValueError("distance matrix must be square, symmetric, zero-diagonal")
    if not 1 <= dim <= m:
        raise ValueError(f"embedding dimension must be in [1, {m}]")
    b = _double_centered(d)
    vals, vecs = np.linalg.eigh(b)
    order = np.argsort(-vals)[:dim]
    top_vals = np.clip(vals[order], 0.0, None)
    top_vecs = vecs[:, order]
    for col in range(dim):  # deterministic sign
        pivot = np.argmax(np.abs(top_vecs[:, col]))
        if top_vecs[pivot, col] < 0:
            top_vecs[:, col] = -top_vecs[:, col]
    return top_vecs * np.sqrt(top_vals)


def _furthest_point_centers(x: np.ndarray, k: int, gen: np.random.Generator) -> np.ndarray:
    m = x.shape[0]
    first = int(gen.integers(m))
    centers = [first]
    dist2 = ((x - x[first]) ** 2).sum(axis=1)
    for _ in range(1, k):
        nxt = int(np.argmax(dist2))  # greedy furthest point; ties -> lowest index
        centers.append(nxt)
        dist2 = np.minimum(dist2, ((x - x[nxt]) ** 2).sum(axis=1))
    return x[centers].copy()


def _lloyd(x: np.ndarray, centers: np.ndarray) -> tuple[np.ndarray, float]:
    labels = None
    for _ in range(_KMEANS_MAX_ITERS):
        d2 = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = np.argmin(d2, axis=1)
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for c in range(centers.shape[0]):
            members = x[labels == c]
            if len(members):  # empty clusters keep their center
                centers[c] = members.mean(axis=0)
    d2 = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    wcss = float(d2[np.arange(len(x)), labels].sum())
    return labels, wcss


def kmeans(x: np.ndarray, k: int, restarts: int = 25, rng: RngSeed | None = None) -> np.ndarray:
    """Best-of-restarts Lloyd clustering; deterministic given the rng."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ValueError("points must form an m x d matrix")
    m = x.shape[0]
    if not 1 <= k <= m:
        raise ValueError(f"k must be in [1, {m}]")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    rng = rng or RngSeed(0)
    best_labels, best_wcss = None, np.inf
    for r in range(restarts):
        centers = _furthest_point_centers(x, k, rng.child(r).generator())
        labels, wcss = _lloyd(x, centers)
        if wcss < best_wcss:
            best_labels, best_wcss = labels, wcss
    return best_labels.astype(np.int64)


def adjusted_rand_index(a, b) -> float:
    """Chance-corrected partition agreement; 1 iff the partitions coincide."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("labelings must be equal-length vectors")
    m = len(a)
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    table = np.zeros((ai.max() + 1, bi.max() + 1), dtype=np.int64)
    np.add.at(table, (ai, bi), 1)

    def comb2(x):
        return x * (x - 1) / 2.0

    sum_ij = comb2(table).sum()
    sum_a = comb2(table.sum(axis=1)).sum()
    sum_b = comb2(table.sum(axis=0)).sum()
    total = comb2(m)
    expected = sum_a * sum_b / total if total > 0 else 0.0
    max_index = (sum_a + sum_b) / 2.0
    if max_index == expected:  # both trivial partitions: identical by convention
        return 1.0
    return float((sum_ij - expected) / (max_index - expected))


def elbow_dimension(d: np.ndarray, max_dim: int) -> int:
    """Profile-likelihood elbow of the double-centered spectrum (single elbow).

    Splits the sorted spectrum into two Gaussian groups with pooled variance
    and returns the split maximizing the likelihood; degenerate all-equal
    spectra return 1.
    """
    d = np.asarray(d, dtype=float)
    m = d.shape[0]
    if not 1 <= max_dim <= m:
        raise ValueError(f"max_dim must be in [1, {m}]")
    vals = np.sort(np.linalg.eigvalsh(_double_centered(d)))[::-1]
    if np.allclose(vals, vals[0]):
        return 1
    positive = vals[vals > 1e-9 * max(1.0, abs(vals[0]))]
    if len(positive) and np.allclose(positive, positive[0]):
        return 1  # flat positive spectrum: no elbow structure
    best_q, best_ll = 1, -np.inf
    count = len(vals)
    for q in range(1, max_dim + 1):
        g1, g2 = vals[:q], vals[q:]
        mu1 = g1.mean()
        mu2 = g2.mean() if len(g2) else 0.0
        ss = ((g1 - mu1) ** 2).sum() + (((g2 - mu2) ** 2).sum() if len(g2) else 0.0)
        var = ss / count
        if var <= 0:
            return q  # perfect two-group split
        ll = -0.5 * count * np.log(2 * np.pi * var) - 0.5 * ss / var
        if ll > best_ll:
            best_q, best_ll = q, ll
    return best_q

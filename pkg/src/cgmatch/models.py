"""Seedable generators for every random graph model used here, plus their
closed-form edge-level quantities.

All samplers draw the upper-triangle entries in one vectorized pass from a
counter-based stream, so results are bit-identical across runs and thread
counts.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import BINARY, Graph, WeightedMean, as_matrix
from .rng import RngSeed


def _upper(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(n, 1)


def _symmetrize(n: int, upper_values: np.ndarray) -> np.ndarray:
    w = np.zeros((n, n))
    iu = _upper(n)
    w[iu] = upper_values
    return w + w.T


def sample_edges(probabilities: np.ndarray, rng: RngSeed) -> Graph:
    """Sample an edge-independent graph from a symmetric probability matrix."""
    p = np.asarray(probabilities, dtype=float)
    n = p.shape[0]
    if p.shape != (n, n) or not np.array_equal(p, p.T):
        raise ValueError("probability matrix must be square and symmetric")
    iu = _upper(n)
    pu = p[iu]
    if np.any(pu < 0) or np.any(pu > 1):
        raise ValueError("edge probabilities must lie in [0, 1]")
    draws = rng.generator().random(len(pu)) < pu
    return Graph(_symmetrize(n, draws.astype(float)), BINARY)


def sample_er(n: int, p: float, rng: RngSeed) -> Graph:
    """Erdos-Renyi: every pair independently present with probability p."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 <= p <= 1:
        raise ValueError(f"edge probability must be in [0, 1], got {p}")
    draws = rng.generator().random(n * (n - 1) // 2) < p
    return Graph(_symmetrize(n, draws.astype(float)), BINARY)


@dataclass(frozen=True)
class SbmSpec:
    """Stochastic blockmodel: contiguous blocks of the given sizes, edge
    probability lambda[b(u), b(v)] between blocks."""

    sizes: tuple[int, ...]
    lam: np.ndarray

    def __post_init__(self) -> None:
        sizes = tuple(int(s) for s in self.sizes)
        object.__setattr__(self, "sizes", sizes)
        lam = np.array(self.lam, dtype=float)
        lam.setflags(write=False)
        object.__setattr__(self, "lam", lam)
        if not sizes or any(s <= 0 for s in sizes):
            raise ValueError("block sizes must be positive")
        k = len(sizes)
        if lam.shape != (k, k):
            raise ValueError(f"lambda must be {k}x{k} for {k} blocks")
        if not np.array_equal(lam, lam.T):
            raise ValueError("lambda must be symmetric")
        if np.any(lam < 0) or np.any(lam > 1):
            raise ValueError("lambda entries must lie in [0, 1]")

    @property
    def n(self) -> int:
        return sum(self.sizes)

    def membership(self) -> np.ndarray:
        """Block index of each vertex (block 0 holds the first sizes[0] vertices)."""
        return np.repeat(np.arange(len(self.sizes)), self.sizes)


def sample_sbm(spec: SbmSpec, rng: RngSeed) -> Graph:
    mem = spec.membership()
    probs = spec.lam[np.ix_(mem, mem)]
    return sample_edges(probs, rng)


@dataclass(frozen=True)
class CosieSpec:
    """Common-subspace independent-edge model: probabilities U R_i U^T.

    The default constructor rejects specs whose probabilities leave [0, 1];
    :meth:`estimated` skips that check for specs recovered from data, where
    sampling then clips into [0, 1].
    """

    u: np.ndarray
    scores: tuple[np.ndarray, ...]
    validated: bool = True

    def __post_init__(self) -> None:
        u = np.array(self.u, dtype=float)
        u.setflags(write=False)
        object.__setattr__(self, "u", u)
        scores = tuple(np.array(r, dtype=float) for r in self.scores)
        for r in scores:
            r.setflags(write=False)
        object.__setattr__(self, "scores", scores)
        if u.ndim != 2 or u.shape[0] < u.shape[1]:
            raise ValueError("U must be n x d with d <= n")
        d = u.shape[1]
        if np.abs(u.T @ u - np.eye(d)).max() > 1e-10:
            raise ValueError("U must have orthonormal columns (to 1e-10)")
        if not scores:
            raise ValueError("at least one score matrix required")
        for r in scores:
            if r.shape != (d, d):
                raise ValueError(f"score matrices must be {d}x{d}")
            if np.abs(r - r.T).max() > 1e-10:
                raise ValueError("score matrices must be symmetric")
        if self.validated:
            for i in range(len(scores)):
                probs = self.edge_probabilities(i, clip=False)
                off = probs[~np.eye(self.n, dtype=bool)]
                if off.min() < -1e-9 or off.max() > 1 + 1e-9:
                    raise ValueError(
                        f"score matrix {i} yields probabilities outside [0, 1] "
                        f"(range [{off.min():.6g}, {off.max():.6g}])"
                    )

    @property
    def n(self) -> int:
        return self.u.shape[0]

    @property
    def d(self) -> int:
        return self.u.shape[1]

    @property
    def graph_count(self) -> int:
        return len(self.scores)

    def edge_probabilities(self, index: int, clip: bool = True) -> np.ndarray:
        probs = self.u @ self.scores[index] @ self.u.T
        probs = (probs + probs.T) / 2.0
        if clip:
            probs = np.clip(probs, 0.0, 1.0)
        np.fill_diagonal(probs, 0.0)
        return probs

    @classmethod
    def estimated(cls, u, scores) -> "CosieSpec":
        """Spec recovered from data; probability range is not enforced."""
        return cls(u, tuple(scores), validated=False)


def sample_cosie(spec: CosieSpec, index: int, rng: RngSeed) -> Graph:
    if not 0 <= index < spec.graph_count:
        raise ValueError(f"graph index {index} out of range")
    return sample_edges(spec.edge_probabilities(index), rng)


def _noise_upper(g: Graph, noise) -> np.ndarray:
    """Per-pair flip probabilities for the upper triangle."""
    if np.isscalar(noise):
        q = float(noise)
        if not 0 <= q <= 1:
            raise ValueError(f"flip probability must be in [0, 1], got {q}")
        return np.full(g.n * (g.n - 1) // 2, q)
    qm = as_matrix(noise)
    if qm.shape != (g.n, g.n):
        raise ValueError("noise matrix size must match the graph")
    if not np.array_equal(qm, qm.T):
        raise ValueError("noise matrix must be symmetric")
    qu = qm[_upper(g.n)]
    if np.any(qu < 0) or np.any(qu > 1):
        raise ValueError("noise entries must lie in [0, 1]")
    return qu


def bitflip(g: Graph, noise, rng: RngSeed) -> Graph:
    """Independently toggle each potential edge with its flip probability.

    The diagonal is untouched; a matrix-valued noise uses only its
    off-diagonal entries.
    """
    if g.kind != BINARY:
        raise ValueError("bit-flip noise is only defined for binary graphs")
    qu = _noise_upper(g, noise)
    iu = _upper(g.n)
    flips = rng.generator().random(len(qu)) < qu
    upper = np.where(flips, 1.0 - g.weights[iu], g.weights[iu])
    return Graph(_symmetrize(g.n, upper), BINARY)


def expected_bitflip(g_or_probabilities, p: float) -> WeightedMean:
    """Entry-wise mean of a bit-flipped graph: lambda (1 - 2p) + p off-diagonal."""
    if not 0 <= p <= 1:
        raise ValueError(f"flip probability must be in [0, 1], got {p}")
    lam = as_matrix(g_or_probabilities)
    if np.any(lam < 0) or np.any(lam > 1):
        raise ValueError("entries must lie in [0, 1]")
    out = lam * (1 - 2 * p) + p
    np.fill_diagonal(out, 0.0)
    return WeightedMean(out)


def er_pair_correlation(p: float, s: float) -> float:
    """Edge-wise correlation of two independent flips of a shared ER graph."""
    if not 0 <= p <= 1 or not 0 <= s <= 1:
        raise ValueError("p and s must lie in [0, 1]")
    marginal = p + s - 2 * s * p
    denom = marginal * (1 - marginal)
    if denom <= 0:
        raise ValueError("degenerate (p, s): flipped edge marginal is deterministic")
    return p * (1 - p) * (1 - 2 * s) ** 2 / denom


def mase_embed(gs: list[Graph], d: int) -> CosieSpec:
    """Joint spectral embedding of a graph collection.

    Stacks each graph's top-d scaled eigenvector embedding, takes the leading
    d left singular vectors as the shared basis U, and scores each graph as
    R_i = U^T A_i U, the Frobenius-optimal representation within that
    subspace.  Column signs are fixed so output is deterministic.
    """
    if not gs:
        raise ValueError("at least one graph required")
    n = gs[0].n
    if any(g.n != n for g in gs):
        raise ValueError("graphs must share a vertex count")
    if not 1 <= d <= n:
        raise ValueError(f"embedding dimension must be in [1, {n}], got {d}")
    blocks = []
    for g in gs:
        vals, vecs = np.linalg.eigh(g.weights)
        top = np.argsort(-np.abs(vals))[:d]
        blocks.append(vecs[:, top] * np.sqrt(np.abs(vals[top])))
    stacked = np.hstack(blocks)
    u, _, _ = np.linalg.svd(stacked, full_matrices=False)
    u = u[:, :d]
    # sign convention: largest-magnitude entry of each column is positive
    for col in range(d):
        pivot = np.argmax(np.abs(u[:, col]))
        if u[pivot, col] < 0:
            u[:, col] = -u[:, col]
    scores = []
    for g in gs:
        r = u.T @ g.weights @ u
        scores.append((r + r.T) / 2.0)  # kill float asymmetry
    return CosieSpec.estimated(u, scores)

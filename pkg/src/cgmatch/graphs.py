"""Core graph and permutation values plus the algebra every other module builds on.

Graphs are dense, undirected, loop-free adjacency matrices; permutations carry
both matching results and ground-truth shuffles.  The one orientation
convention used everywhere: relabeling a graph by permutation ``p`` places
entry ``[i, j]`` at ``[p(i), p(j)]`` (matrix form ``P g P^T`` with
``P[p(i), i] = 1``).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

BINARY = "binary"
WEIGHTED = "weighted"


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


def _check_adjacency(w: np.ndarray, what: str) -> None:
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValueError(f"{what} must be a square matrix, got shape {w.shape}")
    if w.shape[0] < 1:
        raise ValueError(f"{what} must have at least one vertex")
    if not np.isfinite(w).all():
        raise ValueError(f"{what} must have finite entries")
    if not np.array_equal(w, w.T):
        raise ValueError(f"{what} must be symmetric")
    if np.any(np.diagonal(w) != 0):
        raise ValueError(f"{what} must have a zero diagonal (no self-loops)")


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected loop-free graph stored as a dense symmetric hollow matrix.

    ``kind`` is ``"binary"`` (entries in {0, 1}) or ``"weighted"``.
    Instances are immutable and safe to share across workers.
    """

    weights: np.ndarray
    kind: str = BINARY

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", _frozen_array(self.weights))
        _check_adjacency(self.weights, "graph adjacency")
        if self.kind not in (BINARY, WEIGHTED):
            raise ValueError(f"unknown graph kind {self.kind!r}")
        if self.kind == BINARY and not np.isin(self.weights, (0.0, 1.0)).all():
            raise ValueError("binary graph entries must be 0 or 1")

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def edge_count(self) -> int:
        return int(np.count_nonzero(np.triu(self.weights, 1)))

    @classmethod
    def binary(cls, matrix) -> "Graph":
        return cls(matrix, BINARY)

    @classmethod
    def weighted(cls, matrix) -> "Graph":
        return cls(matrix, WEIGHTED)

    @classmethod
    def from_matrix(cls, matrix) -> "Graph":
        """Build a graph, inferring kind from the entries."""
        arr = np.asarray(matrix, dtype=float)
        kind = BINARY if np.isin(arr, (0.0, 1.0)).all() else WEIGHTED
        return cls(arr, kind)

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(np.zeros((n, n)), BINARY)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(np.ones((n, n)) - np.eye(n), BINARY)

    @classmethod
    def from_edges(cls, n: int, edges, kind: str = BINARY) -> "Graph":
        w = np.zeros((n, n))
        for u, v, *rest in edges:
            weight = rest[0] if rest else 1.0
            w[u, v] = weight
            w[v, u] = weight
        return cls(w, kind)


@dataclass(frozen=True, eq=False)
class WeightedMean:
    """Entry-wise average of graphs: symmetric, hollow, nonnegative entries."""

    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _frozen_array(self.values))
        _check_adjacency(self.values, "weighted mean")
        if np.any(self.values < 0):
            raise ValueError("weighted mean entries must be nonnegative")

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class Permutation:
    """Bijection on {0, ..., n-1}; ``mapping[i]`` is the image of vertex i."""

    mapping: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "mapping", _frozen_array(self.mapping, dtype=np.int64))
        m = self.mapping
        if m.ndim != 1 or m.size < 1:
            raise ValueError("permutation mapping must be a nonempty 1-d array")
        n = m.size
        if not np.array_equal(np.sort(m), np.arange(n)):
            raise ValueError("mapping is not a bijection on {0, ..., n-1}")

    @property
    def n(self) -> int:
        return self.mapping.size

    def __call__(self, i: int) -> int:
        return int(self.mapping[i])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Permutation):
            return NotImplemented
        return np.array_equal(self.mapping, other.mapping)

    def __hash__(self) -> int:
        return hash(tuple(self.mapping.tolist()))

    def matrix(self) -> np.ndarray:
        """Matrix P with P[mapping[i], i] = 1, so that P g P^T relabels i -> mapping[i]."""
        n = self.n
        p = np.zeros((n, n))
        p[self.mapping, np.arange(n)] = 1.0
        return p

    def inverse(self) -> "Permutation":
        inv = np.empty(self.n, dtype=np.int64)
        inv[self.mapping] = np.arange(self.n)
        return Permutation(inv)

    def compose(self, other: "Permutation") -> "Permutation":
        """self after other: (self.compose(other))(i) == self(other(i))."""
        if self.n != other.n:
            raise ValueError("permutation sizes differ")
        return Permutation(self.mapping[other.mapping])

    def moved_count(self) -> int:
        return int(np.count_nonzero(self.mapping != np.arange(self.n)))

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(np.arange(n))

    @classmethod
    def random(cls, n: int, rng) -> "Permutation":
        """Uniform random permutation from an RngSeed."""
        return cls(rng.generator().permutation(n))


def as_matrix(x) -> np.ndarray:
    """Coerce a Graph, WeightedMean or array-like to a square ndarray."""
    if isinstance(x, Graph):
        return x.weights
    if isinstance(x, WeightedMean):
        return x.values
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def permute_graph(g: Graph, p: Permutation) -> Graph:
    """Relabel vertices: result[p(i), p(j)] == g[i, j] (result = P g P^T)."""
    if p.n != g.n:
        raise ValueError(f"permutation size {p.n} != graph size {g.n}")
    out = np.empty_like(g.weights)
    idx = np.ix_(p.mapping, p.mapping)
    out[idx] = g.weights
    return Graph(out, g.kind)


def permute_matrix(m, p: Permutation) -> np.ndarray:
    """Same relabeling for a raw matrix."""
    m = as_matrix(m)
    if p.n != m.shape[0]:
        raise ValueError(f"permutation size {p.n} != matrix size {m.shape[0]}")
    out = np.empty_like(m)
    out[np.ix_(p.mapping, p.mapping)] = m
    return out


def frobenius_distance(a, b) -> float:
    """Frobenius norm of the difference of two equal-shape matrices."""
    am, bm = as_matrix(a), as_matrix(b)
    if am.shape != bm.shape:
        raise ValueError(f"shape mismatch: {am.shape} vs {bm.shape}")
    return float(np.linalg.norm(am - bm))


def trace_objective(a, b, p: Permutation) -> float:
    """tr(b . P a P^T): the trace form of the matching objective.

    For symmetric a, b the permutation maximizing this trace is the one
    minimizing ||b - P a P^T||_F, since the norm terms are invariant.
    """
    am, bm = as_matrix(a), as_matrix(b)
    if am.shape != bm.shape:
        raise ValueError(f"shape mismatch: {am.shape} vs {bm.shape}")
    permuted = permute_matrix(am, p)
    return float((bm * permuted.T).sum())


def complement_graph(g: Graph) -> Graph:
    """Flip every off-diagonal entry of a binary graph."""
    if g.kind != BINARY:
        raise ValueError("complement is only defined for binary graphs")
    w = 1.0 - g.weights
    np.fill_diagonal(w, 0.0)
    return Graph(w, BINARY)


def mean_graph(gs: list[Graph], weights=None) -> WeightedMean:
    """Entry-wise (optionally weighted) average of a nonempty graph list."""
    if not gs:
        raise ValueError("cannot average an empty list of graphs")
    n = gs[0].n
    for g in gs:
        if g.n != n:
            raise ValueError("graphs must share a vertex count")
    if weights is not None:
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (len(gs),):
            raise ValueError("one weight per graph required")
        if np.any(weights < 0) or weights.sum() <= 0:
            raise ValueError("weights must be nonnegative with positive sum")
        acc = np.zeros((n, n))
        for g, w in zip(gs, weights):
            acc += w * g.weights
        return WeightedMean(acc / weights.sum())
    acc = np.zeros((n, n))
    for g in gs:
        acc += g.weights
    return WeightedMean(acc / len(gs))


def certify_asymmetric(g: Graph, limit: int = 8) -> bool:
    """Brute-force check that g has no nontrivial automorphism (n <= limit)."""
    if g.n > limit:
        raise ValueError(f"asymmetry certification is exhaustive; n must be <= {limit}")
    w = g.weights
    for perm in itertools.permutations(range(g.n)):
        idx = np.array(perm)
        if np.array_equal(idx, np.arange(g.n)):
            continue
        if np.array_equal(w[np.ix_(idx, idx)], w):
            return False
    return True

"""Seeded approximate matching of one graph to a reference matrix.

The solver relaxes the permutation search to the doubly-stochastic polytope
and runs Frank-Wolfe with exact line search: seeds are pinned in a leading
block, each step solves a linear assignment on the gradient, and the final
iterate is projected back to a permutation through the last gradient.  A
brute-force oracle covers small instances.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .assignment import solve_lap
from .graphs import Graph, Permutation, as_matrix, frobenius_distance, permute_matrix, trace_objective
from .rng import RngSeed

BARYCENTER = "barycenter"
IDENTITY = "identity"
RANDOM = "random"

_QAP_FREE_LIMIT = 9


@dataclass(frozen=True)
class SeedSet:
    """A priori known correspondences: target vertex i matches reference vertex j."""

    pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        pairs = tuple((int(i), int(j)) for i, j in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        lefts = [i for i, _ in pairs]
        rights = [j for _, j in pairs]
        if len(set(lefts)) != len(lefts) or len(set(rights)) != len(rights):
            raise ValueError("contradictory seeds: repeated target or reference vertex")

    def __len__(self) -> int:
        return len(self.pairs)

    def validate_for(self, n: int) -> None:
        for i, j in self.pairs:
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"seed pair ({i}, {j}) out of range for n={n}")

    @classmethod
    def empty(cls) -> "SeedSet":
        return cls(())


@dataclass(frozen=True)
class SgmOptions:
    """Solver knobs; the defaults mirror single-run usage."""

    max_iters: int = 30
    tol: float = 1e-6
    restarts: int = 1
    init: str = BARYCENTER
    rng: RngSeed = field(default_factory=lambda: RngSeed(0))

    def __post_init__(self) -> None:
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.tol < 0:
            raise ValueError("tol must be nonnegative")
        if self.init not in (BARYCENTER, IDENTITY, RANDOM):
            raise ValueError(f"unknown init {self.init!r}")


@dataclass(frozen=True)
class MatchResult:
    """One matching outcome: permutation, objectives and solver diagnostics."""

    perm: Permutation
    objective: float
    trace_value: float
    iters: int
    converged: bool
    trace_path: tuple[float, ...] = ()


def _sinkhorn(m: np.ndarray, iters: int = 200, tol: float = 1e-8) -> np.ndarray:
    for _ in range(iters):
        m = m / m.sum(axis=1, keepdims=True)
        m = m / m.sum(axis=0, keepdims=True)
        if (np.abs(m.sum(axis=1) - 1) < tol).all():
            break
    return m


def _initial_iterate(f: int, init: str, rng: RngSeed) -> np.ndarray:
    bary = np.full((f, f), 1.0 / f)
    if init == BARYCENTER:
        return bary
    if init == IDENTITY:
        return np.eye(f)
    noise = _sinkhorn(rng.generator().random((f, f)) + 1e-3)
    return (bary + noise) / 2.0


def _assemble(perm_t: np.ndarray, perm_r: np.ndarray, s: int, free_map: np.ndarray) -> Permutation:
    n = len(perm_t)
    full = np.empty(n, dtype=np.int64)
    full[perm_t[:s]] = perm_r[:s]
    full[perm_t[s:]] = perm_r[s + free_map]
    return Permutation(full)


def sgm_match(target: Graph, reference, seeds: SeedSet, opts: SgmOptions | None = None) -> MatchResult:
    """Match ``target`` onto ``reference`` honoring the seed correspondences.

    Maximizes tr(reference . P target P^T) over permutations that extend the
    seeds; reports the Frobenius objective ||reference - P target P^T||_F of
    the best iterate over restarts.
    """
    opts = opts or SgmOptions()
    ref = as_matrix(reference)
    n = target.n
    if ref.shape[0] != n:
        raise ValueError(f"target has {n} vertices but reference is {ref.shape[0]}x{ref.shape[1]}")
    seeds.validate_for(n)
    s = len(seeds)

    seed_t = np.array([i for i, _ in seeds.pairs], dtype=np.int64)
    seed_r = np.array([j for _, j in seeds.pairs], dtype=np.int64)
    free_t = np.setdiff1d(np.arange(n), seed_t)
    free_r = np.setdiff1d(np.arange(n), seed_r)
    perm_t = np.concatenate([seed_t, free_t]).astype(np.int64)
    perm_r = np.concatenate([seed_r, free_r]).astype(np.int64)

    if s == n:
        perm = _assemble(perm_t, perm_r, s, np.empty(0, dtype=np.int64))
        return _finalize(target, ref, perm, iters=0, converged=True, path=())

    t = target.weights[np.ix_(perm_t, perm_t)]
    r = ref[np.ix_(perm_r, perm_r)]
    t12, t21, t22 = t[:s, s:], t[s:, :s], t[s:, s:]
    r12, r21, r22 = r[:s, s:], r[s:, :s], r[s:, s:]
    # linear coefficient of the seed-cross terms tr(R12 Q T21) + tr(R21 T12 Q^T)
    lin_coef = r12.T @ t21.T + r21 @ t12

    def lin(m: np.ndarray) -> float:
        return float((lin_coef * m).sum())

    def quad(m1: np.ndarray, m2: np.ndarray) -> float:
        return float(((r22 @ m1 @ t22) * m2).sum())

    def grad(q: np.ndarray) -> np.ndarray:
        return lin_coef + r22.T @ q @ t22.T + r22 @ q @ t22

    best: MatchResult | None = None
    for restart in range(opts.restarts):
        init = opts.init if restart == 0 else RANDOM
        q = _initial_iterate(n - s, init, opts.rng.child(restart))
        path = [lin(q) + quad(q, q)]
        converged = False
        iters = 0
        for iters in range(1, opts.max_iters + 1):
            g = grad(q)
            direction, _ = solve_lap(g, sense="max")
            d = np.eye(n - s)[direction.mapping]  # ones at (k, direction(k)): the argmax vertex
            u = d - q
            a = quad(u, u)
            b = lin(u) + quad(q, u) + quad(u, q)
            if a < 0:
                alpha = min(1.0, max(0.0, -b / (2 * a)))
            else:
                alpha = 1.0 if a + b > 0 else 0.0
            if alpha == 0.0:
                converged = True
                break
            q = q + alpha * u
            value = lin(q) + quad(q, q)
            rel = abs(value - path[-1]) / max(1.0, abs(value))
            path.append(value)
            if rel < opts.tol:
                converged = True
                break
        # the projected LAP solution reads rows->columns; assembly wants the
        # P[p(i), i] = 1 convention, which is its inverse
        free_perm = _project_free(q, grad(q)).inverse()
        perm = _assemble(perm_t, perm_r, s, free_perm.mapping)
        result = _finalize(target, ref, perm, iters, converged, tuple(path))
        if best is None or result.trace_value > best.trace_value:
            best = result
    return best


def _finalize(target: Graph, ref: np.ndarray, perm: Permutation,
              iters: int, converged: bool, path: tuple[float, ...]) -> MatchResult:
    trace_value = trace_objective(target, ref, perm)
    objective = frobenius_distance(ref, permute_matrix(target, perm))
    return MatchResult(perm, objective, trace_value, iters, converged, path)


def _project_free(q: np.ndarray, g: np.ndarray) -> Permutation:
    perm, _ = solve_lap(g, sense="max")
    return perm


def project_to_permutation(d, gradient) -> Permutation:
    """Project a doubly-stochastic iterate to a permutation via its gradient.

    Solves a max-sense assignment on the gradient; deterministic through the
    assignment solver's tie-break.
    """
    dm = np.asarray(d, dtype=float)
    if dm.ndim != 2 or dm.shape[0] != dm.shape[1]:
        raise ValueError("doubly-stochastic iterate must be square")
    if np.any(dm < -1e-9):
        raise ValueError("doubly-stochastic iterate has negative entries")
    if (np.abs(dm.sum(axis=0) - 1) > 1e-6).any() or (np.abs(dm.sum(axis=1) - 1) > 1e-6).any():
        raise ValueError("input rows/columns must sum to 1 within 1e-6")
    gm = np.asarray(gradient, dtype=float)
    if gm.shape != dm.shape:
        raise ValueError("gradient shape must match the iterate")
    perm, _ = solve_lap(gm, sense="max")
    return perm


def brute_force_qap(target: Graph, reference, seeds: SeedSet) -> MatchResult:
    """Exact matching oracle: exhaustive over assignments of the free vertices."""
    ref = as_matrix(reference)
    n = target.n
    if ref.shape[0] != n:
        raise ValueError(f"target has {n} vertices but reference is {ref.shape[0]}x{ref.shape[1]}")
    seeds.validate_for(n)
    s = len(seeds)
    free = n - s
    if free > _QAP_FREE_LIMIT:
        raise ValueError(f"brute force limited to {_QAP_FREE_LIMIT} free vertices, got {free}")

    seed_t = np.array([i for i, _ in seeds.pairs], dtype=np.int64)
    seed_r = np.array([j for _, j in seeds.pairs], dtype=np.int64)
    free_t = np.setdiff1d(np.arange(n), seed_t)
    free_r = np.setdiff1d(np.arange(n), seed_r)

    best_perm = None
    best_value = None
    full = np.empty(n, dtype=np.int64)
    full[seed_t] = seed_r
    for assignment in itertools.permutations(range(free)):
        full[free_t] = free_r[np.array(assignment, dtype=np.int64)]
        perm = Permutation(full)
        value = trace_objective(target, ref, perm)
        if best_value is None or value > best_value:
            best_value = value
            best_perm = perm
    return _finalize(target, ref, best_perm, iters=0, converged=True, path=())

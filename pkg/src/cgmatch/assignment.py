"""Exact linear assignment: the inner kernel of every Frank-Wolfe step.

``solve_lap`` delegates the optimization to scipy's shortest-augmenting-path
solver (Jonker-Volgenant family, O(n^3)) and then enforces a deterministic
tie-break: among all optimal assignments, return the lexicographically
smallest one.  Ties are detected through optimal dual variables, so the
refinement costs nothing on generic (tie-free) instances.
"""
from __future__ import annotations

import itertools

import numpy as np
from scipy.optimize import linear_sum_assignment

from .graphs import Permutation

MIN = "min"
MAX = "max"

_BRUTE_FORCE_LIMIT = 9


def _validate(cost) -> np.ndarray:
    c = np.asarray(cost, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValueError(f"cost matrix must be square, got shape {c.shape}")
    if not np.isfinite(c).all():
        raise ValueError("cost matrix entries must be finite")
    return c


def _total(c: np.ndarray, sigma: np.ndarray) -> float:
    return float(np.sum(c[np.arange(len(sigma)), sigma]))


def solve_lap(cost, sense: str = MIN) -> tuple[Permutation, float]:
    """Exactly optimize sum_i cost[i, sigma(i)].

    Returns the lexicographically smallest optimal assignment and its total.
    """
    c = _validate(cost)
    if sense not in (MIN, MAX):
        raise ValueError(f"sense must be 'min' or 'max', got {sense!r}")
    work = -c if sense == MAX else c
    _, cols = linear_sum_assignment(work)
    sigma = _lex_min_optimal(work, cols)
    return Permutation(sigma), _total(c, sigma)


def brute_force_lap(cost, sense: str = MIN) -> tuple[Permutation, float]:
    """Exhaustive assignment oracle with the same tie-break as solve_lap."""
    c = _validate(cost)
    if sense not in (MIN, MAX):
        raise ValueError(f"sense must be 'min' or 'max', got {sense!r}")
    n = c.shape[0]
    if n > _BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force limited to n <= {_BRUTE_FORCE_LIMIT}, got {n}")
    best_sigma = None
    best = None
    for perm in itertools.permutations(range(n)):
        sigma = np.array(perm)
        total = _total(c, sigma)
        better = best is None or (total < best if sense == MIN else total > best)
        if better:
            best, best_sigma = total, sigma
    return Permutation(best_sigma), best


def _dual_potentials(c: np.ndarray, sigma: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Optimal duals (u, v) for a min-sense LAP given an optimal assignment.

    Complementary slackness forces v[j] - v[sigma(i)] <= c[i, j] - c[i, sigma(i)];
    Bellman-Ford relaxation over that column graph finds feasible potentials
    (no negative cycle exists because sigma is optimal).
    """
    n = len(sigma)
    rows_of = np.empty(n, dtype=int)
    rows_of[sigma] = np.arange(n)  # rows_of[k] = row matched to column k
    # arcs k -> j weighted c[rows_of[k], j] - c[rows_of[k], k]
    arc = c[rows_of] - c[rows_of, np.arange(n)][:, None]
    v = np.zeros(n)
    for _ in range(n):
        relaxed = np.minimum(v, (v[:, None] + arc).min(axis=0))
        if np.array_equal(relaxed, v):
            break
        v = relaxed
    u = c[np.arange(n), sigma] - v[sigma]
    return u, v


def _lex_min_optimal(c: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    scale = max(1.0, float(np.abs(c).max()))
    tol = 1e-9 * scale
    u, v = _dual_potentials(c, sigma)
    reduced = c - u[:, None] - v[None, :]
    if reduced.min() < -tol:
        # duals did not certify (numerically degenerate input); keep the solver's answer
        return np.asarray(sigma, dtype=np.int64)
    admissible = reduced <= tol
    if bool((admissible.sum(axis=1) == 1).all()):
        return np.asarray(sigma, dtype=np.int64)  # unique optimum, nothing to break
    return _lex_min_matching(admissible, np.asarray(sigma, dtype=np.int64))


def _lex_min_matching(adm: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Lexicographically smallest perfect matching inside the admissible graph.

    Every optimal assignment lies in the admissible (zero reduced cost) graph,
    and every perfect matching of that graph is optimal, so a greedy row scan
    with single-augmentation feasibility checks yields the lex-min optimum.
    """
    n = len(sigma)
    match_row = sigma.copy()
    match_col = np.empty(n, dtype=np.int64)
    match_col[match_row] = np.arange(n)
    adj = [np.flatnonzero(adm[i]) for i in range(n)]

    def try_augment(row: int, fixed_cols: set, visited: set) -> bool:
        for j in adj[row]:
            j = int(j)
            if j in fixed_cols or j in visited:
                continue
            visited.add(j)
            owner = int(match_col[j])
            if owner == -1 or try_augment(owner, fixed_cols, visited):
                match_col[j] = row
                match_row[row] = j
                return True
        return False

    fixed: set = set()
    for i in range(n):
        for j in adj[i]:
            j = int(j)
            if j == match_row[i]:
                break  # current assignment already lex-minimal for this row
            if j in fixed or j > match_row[i]:
                continue
            owner = int(match_col[j])
            saved_row, saved_col = match_row.copy(), match_col.copy()
            match_col[match_row[i]] = -1
            match_col[j] = i
            match_row[i] = j
            if try_augment(owner, fixed | {j}, set()):
                break
            match_row[:], match_col[:] = saved_row, saved_col
        fixed.add(int(match_row[i]))
    return match_row

"""Exact finite-n moments and validators for the matching-gap statistic.

Everything here conditions on two (or k) fixed background graphs and studies
f(P) - f(P*), the trace-objective gap between a candidate relabeling and the
truth, under independent bit-flip noise.  One convention ties the module
together: sigma denotes the relabeling P (P*)^T in the ``result[p(i), p(j)] =
g[i, j]`` orientation used by :func:`cgmatch.graphs.permute_graph`, and every
formula below is stated (and tested) in terms of that sigma.

The full trace objective counts each unordered vertex pair twice, so the
moment formulas derived per unordered pair carry an explicit factor 2 (mean)
and 4 (variance).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .graphs import BINARY, Graph, Permutation, as_matrix, permute_matrix
from .rng import RngSeed

_PATTERNS = tuple(itertools.product((0, 1), repeat=4))


def sigma_of(p: Permutation, p_star: Permutation) -> Permutation:
    """The relabeling sigma = p o p_star^{-1} that the gap statistics condition on."""
    if p.n != p_star.n:
        raise ValueError("permutation sizes differ")
    return p.compose(p_star.inverse())


def trace_overlap_gap(bi: Graph, bj: Graph, p: Permutation, p_star: Permutation) -> float:
    """tr(bi . sigma-relabeled bj) - tr(bi . bj) for sigma = p (p*)^T.

    Zero when p == p*; strictly negative for bi == bj asymmetric and p != p*.
    """
    if bi.n != bj.n:
        raise ValueError("graph sizes differ")
    if p.n != bi.n or p_star.n != bi.n:
        raise ValueError("permutation size must match the graphs")
    sigma = sigma_of(p, p_star)
    relabeled = permute_matrix(bj.weights, sigma)
    return float((bi.weights * relabeled).sum() - (bi.weights * bj.weights).sum())


def expected_gap(backgrounds: list[Graph], counts, flips, p_target: float,
                 p: Permutation, p_star: Permutation) -> float:
    """Exact conditional mean of f(P) - f(P*) given the backgrounds.

    ``backgrounds[0]`` is the class the shuffled graph was drawn from, with
    flip rate ``p_target``; class h contributes ``counts[h]`` graphs at flip
    rate ``flips[h]``.
    """
    if not backgrounds:
        raise ValueError("at least one background required")
    counts = list(counts)
    flips = list(flips)
    if len(counts) != len(backgrounds) or len(flips) != len(backgrounds):
        raise ValueError("need one count and one flip rate per background")
    terms = [
        m_h * (1 - 2 * p_target) * (1 - 2 * p_h)
        * trace_overlap_gap(b_h, backgrounds[0], p, p_star)
        for b_h, m_h, p_h in zip(backgrounds, counts, flips)
    ]
    return math.fsum(terms)


@dataclass(frozen=True)
class PatternCounts:
    """Counts of vertex pairs by the 4-bit pattern
    (b1[sigma(h), sigma(l)], b1[h, l], b2[sigma(h), sigma(l)], b2[h, l])."""

    counts: dict[tuple[int, int, int, int], int]
    n: int

    def __getitem__(self, key) -> int:
        if isinstance(key, str):
            key = tuple(int(c) for c in key)
        return self.counts[tuple(key)]

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def group(self, *keys) -> int:
        return sum(self[k] for k in keys)


def pattern_counts(b1: Graph, b2: Graph, sigma: Permutation) -> PatternCounts:
    """Tabulate all C(n, 2) vertex pairs by their 4-bit background pattern."""
    if b1.kind != BINARY or b2.kind != BINARY:
        raise ValueError("pattern counts require binary graphs")
    if b1.n != b2.n or sigma.n != b1.n:
        raise ValueError("graphs and permutation must share a vertex count")
    h, l = np.triu_indices(b1.n, 1)
    sh, sl = sigma.mapping[h], sigma.mapping[l]
    code = (8 * b1.weights[sh, sl] + 4 * b1.weights[h, l]
            + 2 * b2.weights[sh, sl] + b2.weights[h, l]).astype(int)
    bins = np.bincount(code, minlength=16)
    return PatternCounts({pat: int(bins[i]) for i, pat in enumerate(_PATTERNS)}, b1.n)


@dataclass(frozen=True)
class GapMoments:
    """Exact conditional mean and variance of f(P) - f(P*)."""

    mean: float
    variance: float
    k_shuffled: int


def _moved_pairs(n: int, sigma: Permutation):
    """Upper-triangle pairs whose unordered sigma-image differs, plus images."""
    h, l = np.triu_indices(n, 1)
    sh, sl = sigma.mapping[h], sigma.mapping[l]
    lo, hi = np.minimum(sh, sl), np.maximum(sh, sl)
    moved = ~((lo == h) & (hi == l))
    return h[moved], l[moved], lo[moved], hi[moved]


def _pair_moments(b1: Graph, b2: Graph, m1: int, m2: int, p: float, sigma: Permutation):
    h, l, ih, il = _moved_pairs(b1.n, sigma)
    w1, w2 = b1.weights, b2.weights
    lam1, lam2 = (1 - 2 * p) * w1[h, l] + p, (1 - 2 * p) * w2[h, l] + p
    e_alpha = m1 * lam1 + m2 * lam2
    e_alpha_img = m1 * ((1 - 2 * p) * w1[ih, il] + p) + m2 * ((1 - 2 * p) * w2[ih, il] + p)
    # beta = A[sigma-pair] - A[pair]: second moment depends on whether the
    # background entries agree across the pair and its image
    e_beta_sq = np.where(w1[h, l] == w1[ih, il], 2 * p * (1 - p), p * p + (1 - p) ** 2)
    return h, l, ih, il, lam1, lam2, e_alpha, e_alpha_img, e_beta_sq


def exact_gap_variance(b1: Graph, b2: Graph, m1: int, m2: int, p: float,
                       sigma: Permutation) -> GapMoments:
    """Closed-form Var(f(P) - f(P*)) for two backgrounds at a common flip rate.

    Per unordered moved pair, Var(alpha beta) = E(beta^2) Var(alpha) +
    Var(beta) E(alpha)^2 and the only cross-pair covariance couples each pair
    with its sigma-image; the trace counts every pair twice, hence the
    factor 4.
    """
    if b1.kind != BINARY or b2.kind != BINARY:
        raise ValueError("exact moments require binary backgrounds")
    if b1.n != b2.n or sigma.n != b1.n:
        raise ValueError("graphs and permutation must share a vertex count")
    if not 0 < p < 1:
        raise ValueError("flip probability must lie strictly inside (0, 1)")
    if m1 < 0 or m2 < 0 or m1 + m2 == 0:
        raise ValueError("class counts must be nonnegative with a positive total")
    _, _, _, _, _, _, e_alpha, e_alpha_img, e_beta_sq = _pair_moments(b1, b2, m1, m2, p, sigma)
    var_alpha = (m1 + m2) * p * (1 - p)
    var_beta = 2 * p * (1 - p)
    v1 = math.fsum((e_beta_sq * var_alpha + var_beta * e_alpha ** 2).tolist())
    c2 = -2 * p * (1 - p) * math.fsum((e_alpha * e_alpha_img).tolist())
    identity = Permutation.identity(b1.n)
    mean = expected_gap([b1, b2], [m1, m2], [p, p], p, sigma, identity)
    return GapMoments(mean=mean, variance=4.0 * (v1 + c2), k_shuffled=sigma.moved_count())


def simulate_gap_samples(b1: Graph, b2: Graph, m1: int, m2: int, p: float,
                         sigma: Permutation, reps: int, rng: RngSeed,
                         batch: int = 2000) -> np.ndarray:
    """Draw f(P) - f(P*) by simulating the bit-flip noise directly.

    Only the sigma-moved pairs matter: the gap equals
    2 sum_pairs A[h, l] (alpha at the sigma-image pair - alpha at the pair).
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    h, l, ih, il, lam1, lam2, _, _, _ = _pair_moments(b1, b2, m1, m2, p, sigma)
    npairs = len(h)
    if npairs == 0:
        return np.zeros(reps)
    position = {(int(a), int(b)): i for i, (a, b) in enumerate(zip(h, l))}
    image = np.array([position[(int(a), int(b))] for a, b in zip(ih, il)])
    a_prob = (1 - 2 * p) * b1.weights[h, l] + p
    gen = rng.generator()
    out = np.empty(reps)
    done = 0
    while done < reps:
        take = min(batch, reps - done)
        alpha = (gen.binomial(m1, lam1, size=(take, npairs))
                 + gen.binomial(m2, lam2, size=(take, npairs))).astype(float)
        a_vals = (gen.random((take, npairs)) < a_prob).astype(float)
        out[done:done + take] = 2.0 * (a_vals * (alpha[:, image] - alpha)).sum(axis=1)
        done += take
    return out


def standardized_gap_samples(b1: Graph, b2: Graph, m1: int, m2: int, p: float,
                             sigma: Permutation, reps: int, rng: RngSeed) -> np.ndarray:
    """Simulated gaps centered by the exact mean and scaled by the exact sd."""
    moments = exact_gap_variance(b1, b2, m1, m2, p, sigma)
    if moments.variance <= 0:
        raise ValueError("gap variance is zero for this relabeling")
    samples = simulate_gap_samples(b1, b2, m1, m2, p, sigma, reps, rng)
    return (samples - moments.mean) / math.sqrt(moments.variance)


def expected_trace_sbm(lambdas, sizes, class_counts, class_flips, target_flip: float,
                       block_sigma: Permutation, target_class: int = 0) -> float:
    """Leading n^2 coefficient of E tr(A . relabeled global mean) for blockmodel
    backgrounds under a block-rigid relabeling.

    Block pairs fixed by sigma share the target background with the shuffled
    graph, so they take the exact second moment; all other block pairs (and
    all other classes) factor into products of means.  Averaged over classes
    by their in-sample counts; the coefficient is relative to the squared
    common block size.
    """
    lambdas = [np.asarray(lam, dtype=float) for lam in lambdas]
    sizes = [int(s) for s in sizes]
    counts = [int(c) for c in class_counts]
    flips = [float(f) for f in class_flips]
    if not lambdas:
        raise ValueError("at least one class lambda required")
    k_blocks = len(sizes)
    for lam in lambdas:
        if lam.shape != (k_blocks, k_blocks) or not np.array_equal(lam, lam.T):
            raise ValueError("each lambda must be symmetric over the common blocks")
        if np.any(lam < 0) or np.any(lam > 1):
            raise ValueError("lambda entries must lie in [0, 1]")
    if len(counts) != len(lambdas) or len(flips) != len(lambdas):
        raise ValueError("need one count and one flip rate per class")
    if sum(counts) <= 0:
        raise ValueError("total in-sample count must be positive")
    if not 0 <= target_class < len(lambdas):
        raise ValueError("target_class out of range")
    if block_sigma.n != k_blocks:
        raise ValueError("block relabeling must act on the blocks")
    for c in range(k_blocks):
        if sizes[block_sigma(c)] != sizes[c]:
            raise ValueError("relabeling maps blocks of unequal sizes onto each other")
    if len(set(sizes)) != 1:
        raise ValueError("leading-order coefficient requires equal block sizes")

    p_t = float(target_flip)
    inv = block_sigma.inverse()
    m_total = sum(counts)
    lam_t = lambdas[target_class]
    terms = []
    for j, (lam_j, m_j, p_j) in enumerate(zip(lambdas, counts, flips)):
        if m_j == 0:
            continue
        cell_terms = []
        for c in range(k_blocks):
            for d in range(k_blocks):
                lt = lam_t[c, d]
                if j == target_class and block_sigma(c) == c and block_sigma(d) == d:
                    value = lt * (1 - p_t) * (1 - p_j) + (1 - lt) * p_t * p_j
                else:
                    mean_t = (1 - 2 * p_t) * lt + p_t
                    mean_j = (1 - 2 * p_j) * lam_j[inv(c), inv(d)] + p_j
                    value = mean_t * mean_j
                cell_terms.append(value)
        terms.append(m_j / m_total * math.fsum(cell_terms))
    return math.fsum(terms)


@dataclass(frozen=True)
class MisalignmentCheck:
    """Outcome of the synchronized-misalignment sufficient condition."""

    hypothesis_holds: bool
    conclusion_holds: bool
    epsilon: float


def _as_diag(r, name: str) -> np.ndarray:
    arr = np.asarray(r, dtype=float)
    if arr.ndim == 2:
        if not np.array_equal(arr, np.diag(np.diagonal(arr))):
            raise ValueError(f"{name} must be diagonal")
        arr = np.diagonal(arr).copy()
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a diagonal matrix or a vector of diagonals")
    if np.any(arr < 0):
        raise ValueError(f"{name} must have nonnegative diagonal entries")
    return arr


def scores_misalignment_check(r1, rj, q: Permutation, u: np.ndarray,
                              p: Permutation) -> MisalignmentCheck:
    """Certify the wrong-class-graphs-misalign-in-synchrony condition.

    ``hypothesis_holds`` verifies (by brute force over the d! score
    relabelings, d <= 5) that q strictly beats the identity as the score
    alignment, and that the score traces satisfy
    tr(R1 Q RJ Q^T) > tr(R1 RJ) / (1 - 2 eps) with
    eps = ||U^T P U - Q||_F < 1/2.  ``conclusion_holds`` tests the implied
    misalignment of the expected adjacency matrices.
    """
    d1 = _as_diag(r1, "r1")
    dj = _as_diag(rj, "rj")
    d = len(d1)
    if len(dj) != d:
        raise ValueError("score matrices must have a common dimension")
    if np.any(np.diff(d1) < 0):
        raise ValueError("r1 diagonal must be non-decreasing")
    if d > 5:
        raise ValueError("argmin certification is exhaustive; d must be <= 5")
    if q.n != d:
        raise ValueError("q must act on the score dimension")
    u = np.asarray(u, dtype=float)
    if u.ndim != 2 or u.shape[1] != d:
        raise ValueError("u must be n x d")
    n = u.shape[0]
    if np.abs(u.T @ u - np.eye(d)).max() > 1e-8:
        raise ValueError("u must have orthonormal columns")
    if p.n != n:
        raise ValueError("p must act on the n vertices")

    q_mat = q.matrix()
    epsilon = float(np.linalg.norm(u.T @ p.matrix() @ u - q_mat))
    if epsilon >= 0.5:
        raise ValueError(f"epsilon = {epsilon:.4f} >= 1/2: instance cannot be certified")

    # brute-force the optimal score alignments: argmax over Pi_d of
    # tr(R1 V RJ V^T), evaluated with the same matrix convention as q_mat
    def score_trace(v_mat: np.ndarray) -> float:
        return float(np.trace(np.diag(d1) @ v_mat @ np.diag(dj) @ v_mat.T))

    best = -np.inf
    values = []
    for perm in itertools.permutations(range(d)):
        v = np.zeros((d, d))
        v[np.array(perm), np.arange(d)] = 1.0
        val = score_trace(v)
        values.append((perm, val))
        best = max(best, val)
    tol = 1e-12 * max(1.0, abs(best))
    argmax = {perm for perm, val in values if val >= best - tol}
    q_tuple = tuple(int(q(a)) for a in range(d))
    ident = tuple(range(d))
    q_optimal = q_tuple in argmax
    identity_not_optimal = ident not in argmax

    tr_q = score_trace(q_mat)
    tr_i = float(np.dot(d1, dj))
    trace_condition = tr_q > tr_i / (1 - 2 * epsilon)
    hypothesis = q_optimal and identity_not_optimal and trace_condition

    e1 = u @ np.diag(d1) @ u.T
    ej = u @ np.diag(dj) @ u.T
    p_mat = p.matrix()
    conclusion = float(np.trace(p_mat.T @ e1 @ p_mat @ ej)) > float(np.trace(e1 @ ej))
    return MisalignmentCheck(hypothesis, conclusion, epsilon)

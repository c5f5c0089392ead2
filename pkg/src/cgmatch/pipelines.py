"""The three matching granularities and the joint classify-and-label contract.

Coarse matching aligns a shuffled graph with the global average of the
in-sample collection; clustered matching aligns it with every class average
and classifies by the smallest objective; fine matching aligns it with every
individual in-sample graph.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .graphs import Graph, Permutation, mean_graph
from .matching import MatchResult, SeedSet, SgmOptions, sgm_match

COARSE = "coarse"
CLUSTERED = "clustered"
FINE = "fine"


@dataclass(frozen=True)
class GranularityReport:
    """Result of one coarse or fine matching run."""

    mode: str
    perm: Permutation
    objective: float
    source: int | None = None
    accuracy: float | None = None

    def __post_init__(self) -> None:
        if self.accuracy is not None and not 0 <= self.accuracy <= 1:
            raise ValueError("accuracy must lie in [0, 1]")


@dataclass(frozen=True)
class ClassifiedMatch:
    """Per-class objectives, the winning class and its permutation."""

    deltas: tuple[float, ...]
    winner: int
    perm: Permutation
    per_class_perms: tuple[Permutation, ...] | None = None
    per_class_results: tuple[MatchResult, ...] | None = None


def match_accuracy(found: Permutation, truth: Permutation) -> float:
    """Fraction of all vertices whose recovered label is correct."""
    if found.n != truth.n:
        raise ValueError("permutation sizes differ")
    return float(np.mean(found.mapping == truth.mapping))


def match_to_reference(r: Graph, reference, seeds: SeedSet, opts: SgmOptions) -> MatchResult:
    """One seeded matching run of r against reference (any matrix-like)."""
    return sgm_match(r, reference, seeds, opts)


def clustered_match(r: Graph, classes: list[list[Graph]], seeds: SeedSet,
                    opts: SgmOptions | None = None) -> ClassifiedMatch:
    """Match r to every class average; classify by the smallest objective.

    The winner is the lowest class index among ties.  Each class match uses
    an independent sub-stream of opts.rng so results do not depend on the
    order classes are processed.
    """
    opts = opts or SgmOptions()
    if not classes or any(len(c) == 0 for c in classes):
        raise ValueError("every class must contain at least one graph")
    results = []
    for idx, graphs in enumerate(classes):
        class_mean = mean_graph(graphs)
        class_opts = replace(opts, rng=opts.rng.child(idx))
        results.append(match_to_reference(r, class_mean, seeds, class_opts))
    deltas = tuple(res.objective for res in results)
    winner = int(np.argmin(deltas))
    return ClassifiedMatch(
        deltas=deltas,
        winner=winner,
        perm=results[winner].perm,
        per_class_perms=tuple(res.perm for res in results),
        per_class_results=tuple(results),
    )


def coarse_match(r: Graph, in_sample: list[Graph], seeds: SeedSet,
                 opts: SgmOptions | None = None,
                 truth: Permutation | None = None) -> GranularityReport:
    """Match r to the global average of the in-sample collection."""
    classified = clustered_match(r, [list(in_sample)], seeds, opts)
    res = classified.per_class_results[0]
    acc = match_accuracy(res.perm, truth) if truth is not None else None
    return GranularityReport(COARSE, res.perm, res.objective, source=None, accuracy=acc)


def fine_match(r: Graph, in_sample: list[Graph], seeds: SeedSet,
               opts: SgmOptions | None = None,
               truth: Permutation | None = None) -> GranularityReport:
    """Match r to every in-sample graph; report the best (lowest index on ties)."""
    opts = opts or SgmOptions()
    if not in_sample:
        raise ValueError("in_sample must be nonempty")
    best_idx, best_res = None, None
    for idx, g in enumerate(in_sample):
        graph_opts = replace(opts, rng=opts.rng.child(idx))
        res = match_to_reference(r, g, seeds, graph_opts)
        if best_res is None or res.objective < best_res.objective:
            best_idx, best_res = idx, res
    acc = match_accuracy(best_res.perm, truth) if truth is not None else None
    return GranularityReport(FINE, best_res.perm, best_res.objective,
                             source=best_idx, accuracy=acc)

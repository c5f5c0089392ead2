"""HTTP service wrapping the single-shot operations of the core package.

Sampling, flipping, matching, clustering and the exact-moment calculators are
all request/response shaped; experiment grids stay on the CLI where their
file outputs and determinism contracts live.
"""
from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException

from . import __version__
from .clustering import adjusted_rand_index, cmds_embed, elbow_dimension, kmeans, pairwise_distances
from .gapstats import exact_gap_variance, expected_trace_sbm
from .graphs import Graph, Permutation
from .matching import SeedSet, SgmOptions
from .models import SbmSpec, bitflip, sample_er, sample_sbm
from .pipelines import clustered_match, coarse_match, fine_match, match_accuracy
from .rng import RngSeed
from .schemas import (ClusterRequest, ClusterResponse, FlipRequest,
                      GapMomentsRequest, GapMomentsResponse, GraphModel,
                      MatchRequest, MatchResponse, SampleRequest,
                      SbmTraceRequest, SbmTraceResponse)

app = FastAPI(title="cgmatch", version=__version__,
              description="Shuffled-graph label recovery and classification")


def _bad_request(exc: Exception) -> HTTPException:
    return HTTPException(status_code=422, detail=str(exc))


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/graphs/sample", response_model=GraphModel)
def sample(req: SampleRequest) -> GraphModel:
    rng = RngSeed(req.seed, req.stream)
    try:
        if req.model == "er":
            g = sample_er(req.n, req.p, rng)
        else:
            if req.sizes is None or req.block_probabilities is None:
                raise ValueError("sbm model needs sizes and block_probabilities")
            g = sample_sbm(SbmSpec(tuple(req.sizes),
                                   np.asarray(req.block_probabilities, dtype=float)), rng)
    except ValueError as exc:
        raise _bad_request(exc) from exc
    return GraphModel.from_graph(g)


@app.post("/graphs/flip", response_model=GraphModel)
def flip(req: FlipRequest) -> GraphModel:
    try:
        g = bitflip(req.graph.to_graph(), req.q, RngSeed(req.seed, req.stream))
    except ValueError as exc:
        raise _bad_request(exc) from exc
    return GraphModel.from_graph(g)


@app.post("/match", response_model=MatchResponse)
def match(req: MatchRequest) -> MatchResponse:
    try:
        target = req.target.to_graph()
        refs = [g.to_graph() for g in req.references]
        seeds = SeedSet(tuple(req.seed_pairs))
        truth = Permutation(req.truth) if req.truth is not None else None
        opts = SgmOptions(max_iters=req.options.max_iters, tol=req.options.tol,
                          restarts=req.options.restarts, init=req.options.init,
                          rng=RngSeed(req.options.seed))
        if req.mode == "coarse":
            report = coarse_match(target, refs, seeds, opts, truth=truth)
            return MatchResponse(mode=req.mode, permutation=report.perm.mapping.tolist(),
                                 objective=report.objective, accuracy=report.accuracy)
        if req.mode == "fine":
            report = fine_match(target, refs, seeds, opts, truth=truth)
            return MatchResponse(mode=req.mode, permutation=report.perm.mapping.tolist(),
                                 objective=report.objective, accuracy=report.accuracy,
                                 source=report.source)
        labels = req.class_labels or list(range(len(refs)))
        if len(labels) != len(refs):
            raise ValueError("class_labels must label every reference")
        classes: dict[int, list[Graph]] = {}
        for label, g in zip(labels, refs):
            classes.setdefault(label, []).append(g)
        ordered_keys = sorted(classes)
        result = clustered_match(target, [classes[k] for k in ordered_keys], seeds, opts)
        accuracy = match_accuracy(result.perm, truth) if truth is not None else None
        return MatchResponse(mode=req.mode, permutation=result.perm.mapping.tolist(),
                             objective=result.deltas[result.winner],
                             accuracy=accuracy, winner=ordered_keys[result.winner],
                             deltas=list(result.deltas))
    except ValueError as exc:
        raise _bad_request(exc) from exc


@app.post("/cluster", response_model=ClusterResponse)
def cluster(req: ClusterRequest) -> ClusterResponse:
    try:
        graphs = [g.to_graph() for g in req.graphs]
        distances = pairwise_distances(graphs)
        dim = (elbow_dimension(distances, min(len(graphs), 30))
               if req.dim == "auto" else int(req.dim))
        labels = kmeans(cmds_embed(distances, dim), req.k,
                        restarts=req.restarts, rng=RngSeed(req.seed))
        ari = (adjusted_rand_index(labels, np.asarray(req.truth))
               if req.truth is not None else None)
    except ValueError as exc:
        raise _bad_request(exc) from exc
    return ClusterResponse(labels=labels.tolist(), dim=dim, ari=ari)


@app.post("/theory/sbm-trace", response_model=SbmTraceResponse)
def sbm_trace(req: SbmTraceRequest) -> SbmTraceResponse:
    try:
        value = expected_trace_sbm(
            [np.asarray(lam, dtype=float) for lam in req.lambdas],
            req.sizes, req.class_counts, req.class_flips, req.target_flip,
            Permutation(req.block_sigma), req.target_class)
    except ValueError as exc:
        raise _bad_request(exc) from exc
    return SbmTraceResponse(coefficient=value)


@app.post("/theory/gap-moments", response_model=GapMomentsResponse)
def gap_moments(req: GapMomentsRequest) -> GapMomentsResponse:
    try:
        moments = exact_gap_variance(req.b1.to_graph(), req.b2.to_graph(),
                                     req.m1, req.m2, req.p, Permutation(req.sigma))
    except ValueError as exc:
        raise _bad_request(exc) from exc
    return GapMomentsResponse(mean=moments.mean, variance=moments.variance,
                              k_shuffled=moments.k_shuffled)

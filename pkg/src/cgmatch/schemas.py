"""Pydantic request/response models for the HTTP service."""
from __future__ import annotations

from typing import Literal

import numpy as np
from pydantic import BaseModel, Field

from .graphs import Graph


class GraphModel(BaseModel):
    """Wire form of a graph: dense symmetric hollow matrix."""

    n: int
    kind: Literal["binary", "weighted"] = "binary"
    rows: list[list[float]]

    @classmethod
    def from_graph(cls, g: Graph) -> "GraphModel":
        return cls(n=g.n, kind=g.kind, rows=g.weights.tolist())

    def to_graph(self) -> Graph:
        return Graph(np.asarray(self.rows, dtype=float), self.kind)


class SampleRequest(BaseModel):
    model: Literal["er", "sbm"] = "er"
    n: int = 50
    p: float = 0.5
    sizes: list[int] | None = None
    block_probabilities: list[list[float]] | None = None
    seed: int = 0
    stream: int = 0


class FlipRequest(BaseModel):
    graph: GraphModel
    q: float = Field(ge=0.0, le=1.0)
    seed: int = 0
    stream: int = 0


class MatchOptions(BaseModel):
    max_iters: int = 30
    tol: float = 1e-6
    restarts: int = 1
    init: Literal["barycenter", "identity", "random"] = "barycenter"
    seed: int = 0


class MatchRequest(BaseModel):
    target: GraphModel
    references: list[GraphModel]
    mode: Literal["coarse", "clustered", "fine"] = "coarse"
    class_labels: list[int] | None = None
    seed_pairs: list[tuple[int, int]] = Field(default_factory=list)
    truth: list[int] | None = None
    options: MatchOptions = Field(default_factory=MatchOptions)


class MatchResponse(BaseModel):
    mode: str
    permutation: list[int]
    objective: float
    accuracy: float | None = None
    source: int | None = None
    winner: int | None = None
    deltas: list[float] | None = None


class ClusterRequest(BaseModel):
    graphs: list[GraphModel]
    k: int
    dim: int | Literal["auto"] = "auto"
    restarts: int = 25
    seed: int = 0
    truth: list[int] | None = None


class ClusterResponse(BaseModel):
    labels: list[int]
    dim: int
    ari: float | None = None


class SbmTraceRequest(BaseModel):
    lambdas: list[list[list[float]]]
    sizes: list[int]
    class_counts: list[int]
    class_flips: list[float]
    target_flip: float
    block_sigma: list[int]
    target_class: int = 0


class SbmTraceResponse(BaseModel):
    coefficient: float


class GapMomentsRequest(BaseModel):
    b1: GraphModel
    b2: GraphModel
    m1: int
    m2: int
    p: float
    sigma: list[int]


class GapMomentsResponse(BaseModel):
    mean: float
    variance: float
    k_shuffled: int

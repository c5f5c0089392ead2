"""Command-line front end.

Subcommands: ``gen`` (sample graphs), ``flip`` (bit-flip noise), ``match``
(coarse/clustered/fine), ``cluster`` (distance -> CMDS -> k-means pipeline),
``theory`` (exact-moment calculators), ``experiment`` (full runs from a JSON
config) and ``serve`` (HTTP service).

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .clustering import adjusted_rand_index, cmds_embed, elbow_dimension, kmeans, pairwise_distances
from .experiments import ConfigError, ExperimentConfig, NumericalError, run_experiment
from .gapstats import exact_gap_variance, expected_trace_sbm, standardized_gap_samples
from .graphio import GraphFormatError, load_graph, save_graph
from .graphs import Graph, Permutation
from .matching import SeedSet, SgmOptions
from .models import SbmSpec, bitflip, sample_er, sample_sbm
from .pipelines import clustered_match, coarse_match, fine_match, match_accuracy
from .rng import RngSeed

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERICAL = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cgmatch",
        description="Shuffled-graph label recovery and classification by matching",
    )
    parser.add_argument("--rng-seed", type=int, default=0, help="root random seed")
    parser.add_argument("--threads", type=int, default=1, help="worker threads")
    parser.add_argument("--out", type=Path, default=Path("."), help="output directory")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="sample a graph from a random model")
    gen.add_argument("--model", choices=("er", "sbm"), default="er")
    gen.add_argument("--n", type=int, default=50)
    gen.add_argument("--p", type=float, default=0.5, help="ER edge probability")
    gen.add_argument("--sbm-sizes", type=str, help="comma-separated block sizes")
    gen.add_argument("--sbm-lambda", type=str,
                     help="path to a JSON file holding the block probability matrix")
    gen.add_argument("--output", type=Path, required=True)
    gen.add_argument("--format", choices=("dense", "edges"), default=None)

    flip = sub.add_parser("flip", help="apply bit-flip noise to a graph")
    flip.add_argument("--input", type=Path, required=True)
    flip.add_argument("--q", type=float, required=True)
    flip.add_argument("--output", type=Path, required=True)
    flip.add_argument("--format", choices=("dense", "edges"), default=None)

    match = sub.add_parser("match", help="match a shuffled graph to references")
    match.add_argument("--target", type=Path, required=True)
    match.add_argument("--refs", type=Path, nargs="+", required=True)
    match.add_argument("--mode", choices=("coarse", "clustered", "fine"), default="coarse")
    match.add_argument("--classes", type=str,
                       help="comma-separated class label per reference (clustered mode)")
    match.add_argument("--seeds", type=str, default="",
                       help="seed pairs 'i:j,i:j,...' fixing target i to reference j")
    match.add_argument("--truth", type=str,
                       help="comma-separated true permutation for accuracy reporting")
    match.add_argument("--restarts", type=int, default=1)
    match.add_argument("--max-iters", type=int, default=30)
    match.add_argument("--output", type=Path, help="write the result JSON here")

    cluster = sub.add_parser("cluster", help="cluster a graph collection")
    cluster.add_argument("--graphs", type=Path, nargs="+", required=True)
    cluster.add_argument("--k", type=int, required=True)
    cluster.add_argument("--dim", type=str, default="auto",
                         help="embedding dimension or 'auto' for the spectrum elbow")
    cluster.add_argument("--restarts", type=int, default=25)
    cluster.add_argument("--truth", type=str, help="comma-separated true labels")
    cluster.add_argument("--output", type=Path, help="write the labels JSON here")

    theory = sub.add_parser("theory", help="exact-moment calculators")
    theory.add_argument("op", choices=("sbm-trace", "gap-moments", "normality"))
    theory.add_argument("--config", type=Path, required=True,
                        help="JSON file with the operation inputs")
    theory.add_argument("--output", type=Path, help="write the result JSON here")

    experiment = sub.add_parser("experiment", help="run a configured experiment")
    experiment.add_argument("--config", type=Path, required=True)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _parse_seed_pairs(text: str) -> SeedSet:
    if not text:
        return SeedSet.empty()
    pairs = []
    for chunk in text.split(","):
        try:
            i, j = chunk.split(":")
            pairs.append((int(i), int(j)))
        except ValueError as exc:
            raise ConfigError(f"bad seed pair {chunk!r}; expected 'i:j'") from exc
    return SeedSet(tuple(pairs))


def _emit(payload: dict, output: Path | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if output is not None:
        output.write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _cmd_gen(args) -> dict:
    rng = RngSeed(args.rng_seed)
    if args.model == "er":
        g = sample_er(args.n, args.p, rng)
    else:
        if not args.sbm_sizes or not args.sbm_lambda:
            raise ConfigError("sbm model needs --sbm-sizes and --sbm-lambda")
        sizes = tuple(int(x) for x in args.sbm_sizes.split(","))
        lam = np.asarray(json.loads(Path(args.sbm_lambda).read_text()), dtype=float)
        g = sample_sbm(SbmSpec(sizes, lam), rng)
    save_graph(g, args.output, args.format)
    return {"model": args.model, "n": g.n, "edges": g.edge_count,
            "path": str(args.output)}


def _cmd_flip(args) -> dict:
    g = load_graph(args.input)
    flipped = bitflip(g, args.q, RngSeed(args.rng_seed))
    save_graph(flipped, args.output, args.format)
    changed = int(np.abs(flipped.weights - g.weights).sum() / 2)
    return {"n": g.n, "q": args.q, "pairs_flipped": changed, "path": str(args.output)}


def _cmd_match(args) -> dict:
    target = load_graph(args.target)
    refs = [load_graph(p) for p in args.refs]
    seeds = _parse_seed_pairs(args.seeds)
    truth = None
    if args.truth:
        truth = Permutation([int(x) for x in args.truth.split(",")])
    opts = SgmOptions(max_iters=args.max_iters, restarts=args.restarts,
                      rng=RngSeed(args.rng_seed))
    payload: dict = {"mode": args.mode}
    if args.mode == "coarse":
        report = coarse_match(target, refs, seeds, opts, truth=truth)
        payload.update(objective=report.objective,
                       permutation=report.perm.mapping.tolist(),
                       accuracy=report.accuracy)
    elif args.mode == "fine":
        report = fine_match(target, refs, seeds, opts, truth=truth)
        payload.update(objective=report.objective, source=report.source,
                       permutation=report.perm.mapping.tolist(),
                       accuracy=report.accuracy)
    else:
        if args.classes:
            labels = [int(x) for x in args.classes.split(",")]
            if len(labels) != len(refs):
                raise ConfigError("--classes must label every reference")
        else:
            labels = list(range(len(refs)))
        classes: dict[int, list[Graph]] = {}
        for label, g in zip(labels, refs):
            classes.setdefault(label, []).append(g)
        ordered = [classes[key] for key in sorted(classes)]
        result = clustered_match(target, ordered, seeds, opts)
        payload.update(winner=sorted(classes)[result.winner],
                       deltas=list(result.deltas),
                       permutation=result.perm.mapping.tolist())
        if truth is not None:
            payload["accuracy"] = match_accuracy(result.perm, truth)
    return payload


def _cmd_cluster(args) -> dict:
    graphs = [load_graph(p) for p in args.graphs]
    distances = pairwise_distances(graphs)
    if args.dim == "auto":
        dim = elbow_dimension(distances, min(len(graphs), 30))
    else:
        dim = int(args.dim)
    embedded = cmds_embed(distances, dim)
    labels = kmeans(embedded, args.k, restarts=args.restarts,
                    rng=RngSeed(args.rng_seed))
    payload = {"k": args.k, "dim": dim, "labels": labels.tolist()}
    if args.truth:
        truth = [int(x) for x in args.truth.split(",")]
        payload["ari"] = adjusted_rand_index(labels, np.array(truth))
    return payload


def _cmd_theory(args) -> dict:
    spec = json.loads(Path(args.config).read_text(encoding="utf-8"))
    if args.op == "sbm-trace":
        value = expected_trace_sbm(
            [np.asarray(lam, dtype=float) for lam in spec["lambdas"]],
            spec["sizes"], spec["class_counts"], spec["class_flips"],
            spec["target_flip"], Permutation(spec["block_sigma"]),
            int(spec.get("target_class", 0)))
        return {"op": args.op, "coefficient": value}
    b1 = load_graph(spec["b1"])
    b2 = load_graph(spec["b2"])
    sigma = Permutation(spec["sigma"])
    if args.op == "gap-moments":
        moments = exact_gap_variance(b1, b2, int(spec["m1"]), int(spec["m2"]),
                                     float(spec["p"]), sigma)
        return {"op": args.op, "mean": moments.mean, "variance": moments.variance,
                "k_shuffled": moments.k_shuffled}
    samples = standardized_gap_samples(
        b1, b2, int(spec["m1"]), int(spec["m2"]), float(spec["p"]), sigma,
        int(spec.get("reps", 10000)), RngSeed(args.rng_seed))
    return {"op": args.op, "reps": len(samples),
            "sample_mean": float(samples.mean()),
            "sample_std": float(samples.std(ddof=1))}


def _cmd_experiment(args) -> dict:
    cfg = ExperimentConfig.from_file(args.config)
    rows = run_experiment(cfg, args.out, threads=args.threads)
    return {"experiment": cfg.name, "rows": len(rows), "out": str(args.out)}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "gen":
            _emit(_cmd_gen(args), None)
        elif args.command == "flip":
            _emit(_cmd_flip(args), None)
        elif args.command == "match":
            _emit(_cmd_match(args), args.output)
        elif args.command == "cluster":
            _emit(_cmd_cluster(args), args.output)
        elif args.command == "theory":
            _emit(_cmd_theory(args), args.output)
        elif args.command == "experiment":
            _emit(_cmd_experiment(args), None)
        elif args.command == "serve":
            import uvicorn

            from .service import app
            uvicorn.run(app, host=args.host, port=args.port)
    except GraphFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (NumericalError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

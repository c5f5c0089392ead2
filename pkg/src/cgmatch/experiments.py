"""Configuration-driven experiment runner.

Each experiment expands into an ordered list of tasks; tasks draw all
randomness from streams derived per (grid point, replicate), so scheduling
and worker count never change the output.  Results land in ``results.csv``
(byte-identical across reruns), per-figure plot CSVs, ``timings.csv`` (the
one file that legitimately varies run to run) and ``manifest.json``.
"""
from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from . import __version__ as _VERSION
from .clustering import adjusted_rand_index, cmds_embed, elbow_dimension, kmeans, pairwise_distances
from .gapstats import (exact_gap_variance, expected_gap, expected_trace_sbm,
                       pattern_counts, scores_misalignment_check,
                       simulate_gap_samples, standardized_gap_samples)
from .graphs import Graph, Permutation, WeightedMean, mean_graph, permute_graph
from .matching import SeedSet, SgmOptions
from .models import bitflip, mase_embed, sample_edges, sample_er
from .pipelines import match_accuracy, match_to_reference
from .rng import RngSeed

EXPERIMENT_NAMES = ("single-er", "two-er", "cosie-grid", "connectome-surrogate",
                    "cluster-pipeline", "theory-suite")


class ConfigError(ValueError):
    """Invalid experiment configuration."""


class NumericalError(RuntimeError):
    """A computation failed numerically."""


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    rng_seed: int = 0
    parameters: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.name not in EXPERIMENT_NAMES:
            raise ConfigError(f"unknown experiment {self.name!r}; expected one of {EXPERIMENT_NAMES}")
        if not isinstance(self.parameters, dict):
            raise ConfigError("parameters must be a mapping")

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
        if not isinstance(raw, dict) or "name" not in raw:
            raise ConfigError(f"{path}: config must be an object with a 'name' field")
        return cls(raw["name"], int(raw.get("rng_seed", 0)), dict(raw.get("parameters", {})))


@dataclass(frozen=True)
class ResultRow:
    experiment: str
    replicate: int
    params: tuple[tuple[str, object], ...]
    granularity: str
    source: object = None
    winner: object = None
    objective: float | None = None
    accuracy: float | None = None

    def value(self, key: str):
        for k, v in self.params:
            if k == key:
                return v
        raise KeyError(key)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _probs(cfg_params: dict, defaults: dict) -> dict:
    merged = dict(defaults)
    for key, value in cfg_params.items():
        if key not in defaults:
            raise ConfigError(f"unknown parameter {key!r}; expected a subset of {sorted(defaults)}")
        merged[key] = value
    for key, value in merged.items():
        if key in {"p", "p1", "p2", "q", "flip", "er_p"} and not 0 <= float(value) <= 1:
            raise ConfigError(f"parameter {key}={value} must be a probability")
        if key.endswith("grid") and any(not 0 <= float(v) <= 1 for v in value):
            raise ConfigError(f"parameter {key} must contain probabilities")
        if key == "replicates" and int(value) < 1:
            raise ConfigError("replicates must be >= 1")
    return merged


def _seed_pairs(truth: Permutation, count: int, st: RngSeed) -> SeedSet:
    chosen = st.generator().permutation(truth.n)[:count]
    inverse = truth.inverse()
    return SeedSet(tuple((int(inverse(v)), int(v)) for v in chosen))


def _shuffled(target: Graph, st: RngSeed, seed_count: int):
    truth = Permutation.random(target.n, st.child(0))
    shuffled = permute_graph(target, truth.inverse())
    seeds = _seed_pairs(truth, seed_count, st.child(1))
    return shuffled, truth, seeds


def _flip_mean(background: Graph, q: float, count: int, st: RngSeed) -> WeightedMean:
    acc = np.zeros_like(background.weights)
    for i in range(count):
        acc += bitflip(background, q, st.child(i)).weights
    return WeightedMean(acc / count)


# ---------------------------------------------------------------------------
# experiment task builders: each returns an ordered list of thunks, each thunk
# producing its rows independently of every other task


def _single_er_tasks(cfg, root):
    p = _probs(cfg.parameters, {
        "n": 50, "m": 10, "p": 1 / 3, "seeds": 5, "replicates": 10,
        "q_grid": [round(0.025 * i, 3) for i in range(21)],
    })
    n, m, edge_p, s = int(p["n"]), int(p["m"]), float(p["p"]), int(p["seeds"])
    tasks = []
    for qi, q in enumerate(p["q_grid"]):
        for rep in range(int(p["replicates"])):
            st = root.child(qi).child(rep)

            def thunk(q=float(q), rep=rep, st=st):
                background = sample_er(n, edge_p, st.child(0))
                flips = st.child(1)
                reference = _flip_mean(background, q, m, flips)
                target = bitflip(background, q, st.child(2))
                shuffled, truth, seeds = _shuffled(target, st.child(3), s)
                res = match_to_reference(shuffled, reference, seeds,
                                         SgmOptions(rng=st.child(4)))
                return [ResultRow("single-er", rep, (("n", n), ("m", m), ("q", q)),
                                  "coarse", objective=res.objective,
                                  accuracy=match_accuracy(res.perm, truth))]

            tasks.append(thunk)
    return tasks


def _two_er_tasks(cfg, root):
    p = _probs(cfg.parameters, {
        "n": 80, "p1": 0.2, "p2": 0.4, "m1": 200, "m2": 2000,
        "seeds": 5, "replicates": 10, "q_grid": [0.1, 0.2, 0.3, 0.4, 0.5],
    })
    n, s = int(p["n"]), int(p["seeds"])
    m1, m2 = int(p["m1"]), int(p["m2"])
    tasks = []
    for qi, q in enumerate(p["q_grid"]):
        for rep in range(int(p["replicates"])):
            st = root.child(qi).child(rep)

            def thunk(q=float(q), rep=rep, st=st):
                b = [sample_er(n, float(p["p1"]), st.child(0)),
                     sample_er(n, float(p["p2"]), st.child(1))]
                means = [_flip_mean(b[0], q, m1, st.child(2)),
                         _flip_mean(b[1], q, m2, st.child(3))]
                global_mean = WeightedMean(
                    (m1 * means[0].values + m2 * means[1].values) / (m1 + m2))
                rows = []
                for cls in (0, 1):
                    target = bitflip(b[cls], q, st.child(4 + cls))
                    shuffled, truth, seeds = _shuffled(target, st.child(6 + cls), s)
                    runs = (("coarse", global_mean), ("clustered", means[cls]),
                            ("misclustered", means[1 - cls]))
                    deltas = {}
                    for gi, (strategy, reference) in enumerate(runs):
                        res = match_to_reference(shuffled, reference, seeds,
                                                 SgmOptions(rng=st.child(10 + 3 * cls + gi)))
                        deltas[strategy] = res.objective
                        rows.append(ResultRow(
                            "two-er", rep, (("q", q), ("target_class", cls + 1)),
                            strategy, objective=res.objective,
                            accuracy=match_accuracy(res.perm, truth)))
                    own, wrong = deltas["clustered"], deltas["misclustered"]
                    winner = cls + 1 if own <= wrong else 2 - cls
                    rows.append(ResultRow(
                        "two-er", rep, (("q", q), ("target_class", cls + 1)),
                        "classify", winner=winner,
                        accuracy=1.0 if winner == cls + 1 else 0.0))
                return rows

            tasks.append(thunk)
    return tasks


def _cosie_grid_tasks(cfg, root):
    p = _probs(cfg.parameters, {
        "n": 100, "k": 10, "d": 10, "er_p": 0.5, "flip": 0.1,
        "l_target": 10, "l_other": 5, "seeds": 5, "replicates": 3,
    })
    n, k, d = int(p["n"]), int(p["k"]), int(p["d"])
    flip, s = float(p["flip"]), int(p["seeds"])
    l_target, l_other = int(p["l_target"]), int(p["l_other"])
    tasks = []
    for rep in range(int(p["replicates"])):
        st = root.child(rep)

        def thunk(rep=rep, st=st):
            raw = [sample_er(n, float(p["er_p"]), st.child(i)) for i in range(k)]
            spec = mase_embed(raw, d)
            backgrounds = [
                sample_edges(spec.edge_probabilities(i), st.child(100 + i))
                for i in range(k)
            ]
            pool_sums = []
            pool_sizes = []
            for i in range(k):
                size = l_target if i == 0 else l_other
                acc = np.zeros((n, n))
                for j in range(size):
                    acc += bitflip(backgrounds[i], flip, st.child(1000 + 100 * i + j)).weights
                pool_sums.append(acc)
                pool_sizes.append(size)
            target = bitflip(backgrounds[0], flip, st.child(5000))
            shuffled, truth, seeds = _shuffled(target, st.child(5001), s)
            rows = []
            cell = 0
            for a in range(1, k):
                for b_idx in range(a + 1, k):
                    total = pool_sums[0] + pool_sums[a] + pool_sums[b_idx]
                    count = pool_sizes[0] + pool_sizes[a] + pool_sizes[b_idx]
                    reference = WeightedMean(total / count)
                    res = match_to_reference(shuffled, reference, seeds,
                                             SgmOptions(rng=st.child(6000 + cell)))
                    rows.append(ResultRow(
                        "cosie-grid", rep, (("a", a + 1), ("b", b_idx + 1)),
                        "coarse", objective=res.objective,
                        accuracy=match_accuracy(res.perm, truth)))
                    cell += 1
            return rows

        tasks.append(thunk)
    return tasks


def _connectome_tasks(cfg, root):
    p = _probs(cfg.parameters, {
        "classes": 15, "n": 70, "er_p": 0.3, "q": 0.05, "scans": 10,
        "seeds": 5, "replicates": 1,
        "modes": ["fine", "clustered", "coarse", "classify"],
    })
    k, n, scans = int(p["classes"]), int(p["n"]), int(p["scans"])
    q, s = float(p["q"]), int(p["seeds"])
    modes = set(p["modes"])
    unknown_modes = modes - {"fine", "clustered", "coarse", "classify"}
    if unknown_modes:
        raise ConfigError(f"unknown connectome modes: {sorted(unknown_modes)}")
    tasks = []
    for rep in range(int(p["replicates"])):
        data_stream = root.child(rep)

        def build_data(st=data_stream):
            in_sample, out_sample, labels = [], [], []
            for c in range(k):
                background = sample_er(n, float(p["er_p"]), st.child(c))
                scans_c = [bitflip(background, q, st.child(1000 + scans * c + i))
                           for i in range(scans)]
                in_sample.extend(scans_c[:-1])
                labels.extend([c] * (scans - 1))
                out_sample.append(scans_c[-1])
            return in_sample, labels, out_sample

        for out_idx in range(k):
            st = data_stream.child(77000 + out_idx)

            def thunk(rep=rep, out_idx=out_idx, st=st, build=build_data):
                in_sample, labels, out_sample = build()
                target = out_sample[out_idx]
                shuffled, truth, seeds = _shuffled(target, st.child(0), s)
                rows = []
                params = (("out", out_idx),)
                class_means = [
                    mean_graph([g for g, c in zip(in_sample, labels) if c == cls])
                    for cls in range(k)
                ]
                if "fine" in modes:
                    for gi, g in enumerate(in_sample):
                        res = match_to_reference(shuffled, g, seeds,
                                                 SgmOptions(rng=st.child(100 + gi)))
                        rows.append(ResultRow("connectome-surrogate", rep, params,
                                              "fine", source=gi,
                                              objective=res.objective,
                                              accuracy=match_accuracy(res.perm, truth)))
                if "clustered" in modes:
                    res = match_to_reference(shuffled, class_means[out_idx], seeds,
                                             SgmOptions(rng=st.child(1)))
                    rows.append(ResultRow("connectome-surrogate", rep, params,
                                          "clustered", source=out_idx,
                                          objective=res.objective,
                                          accuracy=match_accuracy(res.perm, truth)))
                if "coarse" in modes:
                    res = match_to_reference(shuffled, mean_graph(in_sample), seeds,
                                             SgmOptions(rng=st.child(2)))
                    rows.append(ResultRow("connectome-surrogate", rep, params,
                                          "coarse",
                                          objective=res.objective,
                                          accuracy=match_accuracy(res.perm, truth)))
                if "classify" in modes:
                    deltas = []
                    per_class = []
                    for cls in range(k):
                        res = match_to_reference(shuffled, class_means[cls], seeds,
                                                 SgmOptions(rng=st.child(500 + cls)))
                        deltas.append(res.objective)
                        per_class.append(res)
                    winner = int(np.argmin(deltas))
                    for cls in range(k):
                        rows.append(ResultRow(
                            "connectome-surrogate", rep, params, "classify",
                            source=cls, winner=winner,
                            objective=deltas[cls],
                            accuracy=match_accuracy(per_class[cls].perm, truth)))
                return rows

            tasks.append(thunk)
    return tasks


def _cluster_pipeline_tasks(cfg, root):
    p = _probs(cfg.parameters, {
        "classes": 15, "per_class": 9, "n": 70, "er_p": 0.3, "q": 0.05,
        "dim": 14, "kmeans_k": 15, "kmeans_restarts": 25, "max_dim": 30,
    })
    k, per_class, n = int(p["classes"]), int(p["per_class"]), int(p["n"])

    def thunk(st=root.child(0)):
        graphs, truth = [], []
        for c in range(k):
            background = sample_er(n, float(p["er_p"]), st.child(c))
            for i in range(per_class):
                graphs.append(bitflip(background, float(p["q"]),
                                      st.child(1000 + per_class * c + i)))
                truth.append(c)
        distances = pairwise_distances(graphs)
        elbow = elbow_dimension(distances, min(int(p["max_dim"]), len(graphs)))
        dim = elbow if p["dim"] == "auto" else int(p["dim"])
        embedded = cmds_embed(distances, dim)
        labels = kmeans(embedded, int(p["kmeans_k"]),
                        restarts=int(p["kmeans_restarts"]), rng=st.child(50000))
        ari = adjusted_rand_index(labels, np.array(truth))
        rows = []
        for gi, (label, true_label) in enumerate(zip(labels, truth)):
            rows.append(ResultRow(
                "cluster-pipeline", 0,
                (("dim", dim), ("elbow", elbow), ("ari", float(ari))),
                "cluster", source=gi, winner=int(label),
                accuracy=float(true_label == label and 1.0)))
        return rows

    return [thunk]


def _theory_suite_tasks(cfg, root):
    p = _probs(cfg.parameters, {
        "parity_instances": 100, "equivalence_instances": 100,
        "variance_fixtures": 5, "variance_reps": 20000,
        "normality_n": 300, "normality_moved": 10, "normality_reps": 10000,
        "misalignment_instances": 1000,
    })

    def check_row(name, metric, value, passed):
        return ResultRow("theory-suite", 0, (("check", name), ("metric", metric)),
                         "check", objective=float(value),
                         accuracy=1.0 if passed else 0.0)

    def sbm_trace(st):
        a, eps, r, flip_p, flip_q = 0.3, 0.5, 0.1, 0.4, 0.1
        lam1 = np.full((3, 3), r); lam1[0, 0] = a
        lam2 = np.full((3, 3), r); lam2[1, 1] = a + eps
        lam3 = np.full((3, 3), r); lam3[2, 2] = a + eps
        lams, sizes, flips = [lam1, lam2, lam3], [50, 50, 50], [flip_p, flip_q, flip_q]
        ident, swap = Permutation.identity(3), Permutation([1, 0, 2])
        cases = [("sbm-trace-identity-skew", [1, 2, 0], ident, 1.168533),
                 ("sbm-trace-swap-skew", [1, 2, 0], swap, 1.171733),
                 ("sbm-trace-identity-equal", [1, 1, 1], ident, 1.168533),
                 ("sbm-trace-swap-equal", [1, 1, 1], swap, 1.164267)]
        rows = []
        for name, mix, sigma, expected in cases:
            value = expected_trace_sbm(lams, sizes, mix, flips, flip_p, sigma)
            rows.append(check_row(name, "abs-error", abs(value - expected),
                                  abs(value - expected) <= 1e-6))
        return rows

    def parity(st):
        bad = 0
        for t in range(int(p["parity_instances"])):
            gen = st.child(t).generator()
            n = int(gen.integers(5, 13))
            b1 = sample_er(n, 0.5, st.child(1000 + t))
            b2 = sample_er(n, 0.5, st.child(2000 + t))
            sigma = Permutation.random(n, st.child(3000 + t))
            c = pattern_counts(b1, b2, sigma)
            ok = (c.group("0110", "0111", "0100", "0101")
                  == c.group("1010", "1011", "1000", "1001")
                  and c.group("0001", "1101", "1001", "0101")
                  == c.group("0010", "1110", "1010", "0110"))
            bad += not ok
        return [check_row("parity-identities", "violations", bad, bad == 0)]

    def equivalence(st):
        bad = 0
        for t in range(int(p["equivalence_instances"])):
            gen = st.child(t).generator()
            n = int(gen.integers(5, 13))
            b1 = sample_er(n, 0.5, st.child(1000 + t))
            b2 = sample_er(n, 0.5, st.child(2000 + t))
            sigma = Permutation.random(n, st.child(3000 + t))
            m1, m2 = int(gen.integers(1, 9)), int(gen.integers(1, 9))
            flip = float(gen.uniform(0.05, 0.45))
            gap = expected_gap([b1, b2], [m1, m2], [flip, flip], flip, sigma,
                               Permutation.identity(n))
            c = pattern_counts(b1, b2, sigma)
            lhs = m2 * (c["0110"] + c["1110"] - c["0101"] - c["1101"])
            rhs = m1 * c.group("0110", "0111", "0100", "0101")
            ok = ((gap > 0) == (lhs > rhs)) and ((gap < 0) == (lhs < rhs))
            bad += not ok
        return [check_row("gap-sign-equivalence", "violations", bad, bad == 0)]

    def variance(st):
        worst = 0.0
        for t in range(int(p["variance_fixtures"])):
            gen = st.child(t).generator()
            n = int(gen.integers(20, 41))
            b1 = sample_er(n, 0.5, st.child(1000 + t))
            b2 = sample_er(n, 0.5, st.child(2000 + t))
            mapping = np.arange(n)
            moved = gen.permutation(n)[:int(gen.integers(2, 7))]
            mapping[np.sort(moved)] = np.roll(np.sort(moved), 1)
            sigma = Permutation(mapping)
            m1, m2 = int(gen.integers(2, 8)), int(gen.integers(2, 8))
            flip = float(gen.uniform(0.15, 0.45))
            moments = exact_gap_variance(b1, b2, m1, m2, flip, sigma)
            samples = simulate_gap_samples(b1, b2, m1, m2, flip, sigma,
                                           int(p["variance_reps"]), st.child(3000 + t))
            rel = abs(samples.var(ddof=1) - moments.variance) / moments.variance
            worst = max(worst, rel)
        return [check_row("gap-variance-mc", "max-rel-error", worst, worst <= 0.05)]

    def normality(st):
        n = int(p["normality_n"])
        moved = int(p["normality_moved"])
        b1 = sample_er(n, 0.5, st.child(0))
        b2 = sample_er(n, 0.5, st.child(1))
        mapping = np.arange(n)
        mapping[:moved] = np.roll(np.arange(moved), 1)
        sigma = Permutation(mapping)
        z = standardized_gap_samples(b1, b2, 5, 5, 0.3, sigma,
                                     int(p["normality_reps"]), st.child(2))
        ks = float(stats.kstest(z, "norm").statistic)
        return [check_row("gap-normality-ks", "ks-distance", ks, ks <= 0.05)]

    def misalignment(st):
        target = int(p["misalignment_instances"])
        certified = violations = trials = 0
        while certified < target and trials < 20 * target:
            trials += 1
            gen = st.child(trials).generator()
            d = int(gen.integers(2, 5))
            n = int(gen.integers(4 * d, 41))
            try:
                d1, dj, q_perm, u, perm = _misalignment_instance(st.child(10 ** 6 + trials), d, n)
                out = scores_misalignment_check(d1, dj, q_perm, u, perm)
            except ValueError:
                continue
            if out.hypothesis_holds:
                certified += 1
                violations += not out.conclusion_holds
        if certified < target:
            raise NumericalError("could not generate enough certified instances")
        return [check_row("misalignment-property", "violations", violations,
                          violations == 0)]

    builders = [sbm_trace, parity, equivalence, variance, normality, misalignment]
    return [(lambda fn=fn, st=root.child(i): fn(st)) for i, fn in enumerate(builders)]


def _misalignment_instance(rng: RngSeed, d: int, n: int, noise: float = 0.02):
    """Block-indicator subspace plus noise; the block-rigid relabeling tracks q."""
    gen = rng.generator()
    block = n // d
    n = block * d
    u0 = np.zeros((n, d))
    for c in range(d):
        u0[c * block:(c + 1) * block, c] = 1.0
    u, _ = np.linalg.qr(u0 + noise * gen.standard_normal((n, d)))
    for col in range(d):
        if u[np.argmax(np.abs(u[:, col])), col] < 0:
            u[:, col] = -u[:, col]
    d1 = np.sort(gen.uniform(0.5, 3.0, d))
    while True:
        q_map = gen.permutation(d)
        if not np.array_equal(q_map, np.arange(d)):
            break
    q = Permutation(q_map)
    dj = d1[q_map]
    block_perm = np.empty(n, dtype=int)
    for c in range(d):
        src = np.arange(c * block, (c + 1) * block)
        block_perm[src] = np.arange(q_map[c] * block, (q_map[c] + 1) * block)
    return d1, dj, q, u, Permutation(block_perm)


_BUILDERS = {
    "single-er": _single_er_tasks,
    "two-er": _two_er_tasks,
    "cosie-grid": _cosie_grid_tasks,
    "connectome-surrogate": _connectome_tasks,
    "cluster-pipeline": _cluster_pipeline_tasks,
    "theory-suite": _theory_suite_tasks,
}


def run_experiment(cfg: ExperimentConfig, out_dir, threads: int = 1) -> list[ResultRow]:
    """Run one experiment; writes results.csv, plot CSVs, timings and manifest."""
    if threads < 1:
        raise ConfigError("threads must be >= 1")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    root = RngSeed(cfg.rng_seed)
    tasks = _BUILDERS[cfg.name](cfg, root)

    def timed(index_thunk):
        index, thunk = index_thunk
        start = time.perf_counter()
        rows = thunk()
        elapsed_ms = int(round(1000 * (time.perf_counter() - start)))
        return index, rows, elapsed_ms

    indexed = list(enumerate(tasks))
    if threads == 1:
        outcomes = [timed(it) for it in indexed]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(timed, indexed))
    outcomes.sort(key=lambda item: item[0])

    rows: list[ResultRow] = []
    timings: list[tuple[int, int]] = []
    for index, task_rows, elapsed_ms in outcomes:
        rows.extend(task_rows)
        timings.append((index, elapsed_ms))

    _write_results(rows, out / "results.csv")
    with open(out / "timings.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["task", "elapsed_ms"])
        writer.writerows(timings)
    manifest = {
        "experiment": cfg.name,
        "rng_seed": cfg.rng_seed,
        "parameters": cfg.parameters,
        "version": _VERSION,
        "rows": len(rows),
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    emit_plot_data(rows, cfg.name, out)
    return rows


def _write_results(rows: list[ResultRow], path: Path) -> None:
    param_keys = [k for k, _ in rows[0].params] if rows else []
    header = ["experiment", "replicate", *param_keys,
              "granularity", "source", "winner_class", "objective", "accuracy"]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            values = dict(row.params)
            writer.writerow([row.experiment, row.replicate,
                             *[_fmt(values.get(k)) for k in param_keys],
                             row.granularity, _fmt(row.source), _fmt(row.winner),
                             _fmt(row.objective), _fmt(row.accuracy)])


def _mean(values) -> float:
    values = list(values)
    return math.fsum(values) / len(values)


def emit_plot_data(rows: list[ResultRow], name: str, out_dir) -> list[Path]:
    """Write tidy per-figure CSVs for external plotting."""
    if not rows:
        raise ConfigError("no rows to plot")
    out = Path(out_dir)
    written: list[Path] = []

    def write(filename: str, header: list[str], table: list[list]) -> None:
        path = out / filename
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for record in table:
                writer.writerow([_fmt(x) for x in record])
        written.append(path)

    if name == "single-er":
        qs = sorted({row.value("q") for row in rows})
        table = []
        for q in qs:
            subset = [r for r in rows if r.value("q") == q]
            table.append([q, _mean(r.objective for r in subset),
                          _mean(r.accuracy for r in subset)])
        write("single_er_curves.csv", ["q", "mean_objective", "mean_accuracy"], table)
    elif name == "two-er":
        qs = sorted({row.value("q") for row in rows})
        table = []
        for q in qs:
            for cls in (1, 2):
                for strategy in ("coarse", "clustered", "misclustered"):
                    subset = [r for r in rows
                              if r.value("q") == q and r.value("target_class") == cls
                              and r.granularity == strategy]
                    if subset:
                        table.append([q, cls, strategy,
                                      _mean(r.objective for r in subset),
                                      _mean(r.accuracy for r in subset)])
        write("two_er_curves.csv",
              ["q", "target_class", "strategy", "mean_objective", "mean_accuracy"],
              table)
    elif name == "cosie-grid":
        labels = sorted({row.value("a") for row in rows} | {row.value("b") for row in rows})
        for metric, filename in (("objective", "cosie_objective_heatmap.csv"),
                                 ("error", "cosie_error_heatmap.csv")):
            table = []
            for a in labels:
                record = [a]
                for b in labels:
                    lo, hi = min(a, b), max(a, b)
                    subset = [r for r in rows
                              if r.value("a") == lo and r.value("b") == hi]
                    if a == b or not subset:
                        record.append(None)  # blank diagonal
                    elif metric == "objective":
                        record.append(_mean(r.objective for r in subset))
                    else:
                        record.append(_mean(1.0 - r.accuracy for r in subset))
                table.append(record)
            write(filename, ["class", *[str(x) for x in labels]], table)
    elif name == "connectome-surrogate":
        outs = sorted({row.value("out") for row in rows})
        fine_sources = sorted({r.source for r in rows if r.granularity == "fine"})
        for metric, filename in (("objective", "connectome_objective_matrix.csv"),
                                 ("error", "connectome_error_matrix.csv")):
            def cell(row):
                return row.objective if metric == "objective" else 1.0 - row.accuracy

            table = []
            by_key = {}
            for r in rows:
                if r.granularity in ("fine", "clustered", "coarse"):
                    key = (r.granularity, r.source, r.value("out"))
                    by_key.setdefault(key, []).append(r)
            for gi in fine_sources:
                record = [f"fine-{gi}"]
                for o in outs:
                    subset = by_key.get(("fine", gi, o), [])
                    record.append(_mean(cell(r) for r in subset) if subset else None)
                table.append(record)
            for label, granularity in (("clustered", "clustered"), ("coarse", "coarse")):
                record = [label]
                for o in outs:
                    subset = [r for r in rows
                              if r.granularity == granularity and r.value("out") == o]
                    record.append(_mean(cell(r) for r in subset) if subset else None)
                table.append(record)
            if len(table[0]) > 1:
                write(filename, ["row", *[f"out-{o}" for o in outs]], table)
        classify = [r for r in rows if r.granularity == "classify"]
        if classify:
            table = []
            for cls in sorted({r.source for r in classify}):
                record = [f"class-{cls}"]
                for o in outs:
                    subset = [r for r in classify
                              if r.source == cls and r.value("out") == o]
                    record.append(_mean(r.objective for r in subset) if subset else None)
                table.append(record)
            write("connectome_classify_matrix.csv",
                  ["row", *[f"out-{o}" for o in outs]], table)
    elif name == "cluster-pipeline":
        table = [[r.source, r.winner, r.accuracy] for r in rows]
        write("cluster_labels.csv", ["graph", "cluster", "correct"], table)
    elif name == "theory-suite":
        table = [[r.value("check"), r.value("metric"), r.objective,
                  "pass" if r.accuracy == 1.0 else "fail"] for r in rows]
        write("theory_checks.csv", ["check", "metric", "value", "status"], table)
    else:
        raise ConfigError(f"unknown plot spec {name!r}")
    return written

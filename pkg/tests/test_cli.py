"""CLI surface: subcommands, exit codes, round trips."""
import json

import numpy as np
import pytest

from cgmatch import load_graph
from cgmatch.cli import EXIT_CONFIG, EXIT_IO, EXIT_OK, main


def test_gen_flip_match_roundtrip(tmp_path, capsys):
    g_path = tmp_path / "g.csv"
    assert main(["--rng-seed", "4", "gen", "--model", "er", "--n", "30",
                 "--p", "0.4", "--output", str(g_path)]) == EXIT_OK
    g = load_graph(g_path)
    assert g.n == 30

    f_path = tmp_path / "f.csv"
    assert main(["--rng-seed", "5", "flip", "--input", str(g_path),
                 "--q", "0.1", "--output", str(f_path)]) == EXIT_OK
    flipped = load_graph(f_path)
    assert flipped.n == 30

    out = tmp_path / "match.json"
    assert main(["match", "--target", str(f_path), "--refs", str(g_path),
                 "--mode", "coarse", "--seeds", "0:0,1:1,2:2",
                 "--truth", ",".join(str(i) for i in range(30)),
                 "--output", str(out)]) == EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["mode"] == "coarse"
    assert payload["accuracy"] == 1.0


def test_gen_sbm(tmp_path, capsys):
    lam_path = tmp_path / "lam.json"
    lam_path.write_text(json.dumps([[0.5, 0.1], [0.1, 0.5]]))
    g_path = tmp_path / "sbm.csv"
    assert main(["--rng-seed", "1", "gen", "--model", "sbm",
                 "--sbm-sizes", "20,20", "--sbm-lambda", str(lam_path),
                 "--output", str(g_path)]) == EXIT_OK
    assert load_graph(g_path).n == 40


def test_clustered_match_cli(tmp_path):
    from cgmatch import RngSeed, bitflip, sample_er, save_graph
    rng = RngSeed(9)
    b1 = sample_er(20, 0.2, rng.child(0))
    b2 = sample_er(20, 0.5, rng.child(1))
    paths = []
    labels = []
    for i, b in enumerate((b1, b2)):
        for j in range(3):
            p = tmp_path / f"c{i}_{j}.csv"
            save_graph(bitflip(b, 0.05, rng.child(10 + 3 * i + j)), p)
            paths.append(str(p))
            labels.append(i)
    target = tmp_path / "target.csv"
    save_graph(bitflip(b2, 0.05, rng.child(50)), target)
    out = tmp_path / "result.json"
    assert main(["match", "--target", str(target), "--refs", *paths,
                 "--mode", "clustered", "--classes", ",".join(map(str, labels)),
                 "--seeds", "0:0,1:1", "--output", str(out)]) == EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["winner"] == 1
    assert len(payload["deltas"]) == 2


def test_cluster_cli(tmp_path):
    from cgmatch import RngSeed, bitflip, sample_er, save_graph
    rng = RngSeed(11)
    paths, truth = [], []
    for c in range(3):
        b = sample_er(25, 0.3, rng.child(c))
        for j in range(4):
            p = tmp_path / f"g{c}_{j}.csv"
            save_graph(bitflip(b, 0.05, rng.child(100 + 4 * c + j)), p)
            paths.append(str(p))
            truth.append(c)
    out = tmp_path / "labels.json"
    assert main(["cluster", "--graphs", *paths, "--k", "3",
                 "--truth", ",".join(map(str, truth)),
                 "--output", str(out)]) == EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["ari"] == 1.0


def test_theory_sbm_trace_cli(tmp_path):
    spec = {
        "lambdas": [[[0.3, 0.1, 0.1], [0.1, 0.1, 0.1], [0.1, 0.1, 0.1]],
                    [[0.1, 0.1, 0.1], [0.1, 0.8, 0.1], [0.1, 0.1, 0.1]],
                    [[0.1, 0.1, 0.1], [0.1, 0.1, 0.1], [0.1, 0.1, 0.8]]],
        "sizes": [50, 50, 50],
        "class_counts": [1, 2, 0],
        "class_flips": [0.4, 0.1, 0.1],
        "target_flip": 0.4,
        "block_sigma": [0, 1, 2],
    }
    cfg = tmp_path / "trace.json"
    cfg.write_text(json.dumps(spec))
    out = tmp_path / "result.json"
    assert main(["theory", "sbm-trace", "--config", str(cfg),
                 "--output", str(out)]) == EXIT_OK
    payload = json.loads(out.read_text())
    assert abs(payload["coefficient"] - 1.168533) <= 1e-6


def test_experiment_cli(tmp_path):
    cfg = tmp_path / "exp.json"
    cfg.write_text(json.dumps({
        "name": "single-er", "rng_seed": 3,
        "parameters": {"q_grid": [0.0, 0.1], "replicates": 2},
    }))
    out_dir = tmp_path / "run"
    assert main(["--out", str(out_dir), "experiment", "--config", str(cfg)]) == EXIT_OK
    assert (out_dir / "results.csv").exists()
    assert (out_dir / "manifest.json").exists()
    assert (out_dir / "single_er_curves.csv").exists()
    manifest = json.loads((out_dir / "manifest.json").read_text())
    assert manifest["experiment"] == "single-er"


def test_exit_codes(tmp_path):
    # config error: bad experiment name
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"name": "nope"}))
    assert main(["experiment", "--config", str(cfg)]) == EXIT_CONFIG
    # I/O error: malformed graph file
    bad_graph = tmp_path / "bad.csv"
    bad_graph.write_text("nonsense\n")
    assert main(["flip", "--input", str(bad_graph), "--q", "0.1",
                 "--output", str(tmp_path / "out.csv")]) == EXIT_IO
    # I/O error: missing file
    assert main(["flip", "--input", str(tmp_path / "missing.csv"), "--q", "0.1",
                 "--output", str(tmp_path / "out.csv")]) == EXIT_IO
    # config error: invalid probability
    g_path = tmp_path / "g.csv"
    main(["gen", "--n", "5", "--p", "0.5", "--output", str(g_path)])
    assert main(["flip", "--input", str(g_path), "--q", "1.5",
                 "--output", str(tmp_path / "out.csv")]) == EXIT_CONFIG

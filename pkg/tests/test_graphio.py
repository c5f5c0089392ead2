"""File format round trips and diagnostics."""
import numpy as np
import pytest

from cgmatch import Graph, GraphFormatError, RngSeed, load_graph, sample_er, save_graph
from cgmatch.graphs import WEIGHTED


def test_roundtrip_binary_both_formats(tmp_path):
    rng = RngSeed(31)
    for i in range(10):
        g = sample_er(12, 0.4, rng.child(i))
        for name, fmt in ((f"g{i}.csv", None), (f"g{i}.tsv", None)):
            path = tmp_path / name
            save_graph(g, path, fmt)
            back = load_graph(path)
            assert back.kind == g.kind
            assert np.array_equal(back.weights, g.weights)


def test_roundtrip_weighted_exact(tmp_path):
    gen = RngSeed(37).generator()
    w = gen.random((9, 9))
    w = (w + w.T) / 2
    np.fill_diagonal(w, 0)
    g = Graph.weighted(w)
    for name in ("w.csv", "w.tsv"):
        path = tmp_path / name
        save_graph(g, path)
        back = load_graph(path)
        assert back.kind == WEIGHTED
        assert np.abs(back.weights - g.weights).max() < 1e-12


def test_weighted_70_vertex_dense(tmp_path):
    # synthetic connectome-style fixture: weighted, 70 vertices
    gen = RngSeed(41).generator()
    w = gen.poisson(3.0, (70, 70)).astype(float)
    w = np.triu(w, 1)
    w = w + w.T
    g = Graph.from_matrix(w)
    path = tmp_path / "connectome.csv"
    save_graph(g, path)
    back = load_graph(path)
    assert back.kind == WEIGHTED
    assert back.n == 70
    assert np.array_equal(back.weights, g.weights)


def test_malformed_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("vertices=3\n0,0,0\n0,0,0\n0,0,0\n")
    with pytest.raises(GraphFormatError, match="header"):
        load_graph(path)


def test_asymmetric_dense_rejected(tmp_path):
    path = tmp_path / "asym.csv"
    path.write_text("n=2,kind=binary\n0,1\n0,0\n")
    with pytest.raises(GraphFormatError, match="asymmetric"):
        load_graph(path)


def test_duplicate_edge_rejected(tmp_path):
    path = tmp_path / "dup.tsv"
    path.write_text("n=3\n0\t1\t1\n1\t0\t1\n")
    with pytest.raises(GraphFormatError, match="duplicate"):
        load_graph(path)


def test_out_of_range_index_rejected(tmp_path):
    path = tmp_path / "range.tsv"
    path.write_text("n=3\n0\t5\t1\n")
    with pytest.raises(GraphFormatError, match="out of range"):
        load_graph(path)


def test_self_loop_rejected(tmp_path):
    path = tmp_path / "loop.tsv"
    path.write_text("n=3\n1\t1\t1\n")
    with pytest.raises(GraphFormatError, match="self-loop"):
        load_graph(path)


def test_binary_kind_with_fractional_entry_rejected(tmp_path):
    path = tmp_path / "frac.csv"
    path.write_text("n=2,kind=binary\n0,0.5\n0.5,0\n")
    with pytest.raises(GraphFormatError, match="0/1"):
        load_graph(path)

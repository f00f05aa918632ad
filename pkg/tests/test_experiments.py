import math

import numpy as np
import pytest

from graphtest import build_graph, generate
from graphtest.experiments import (BoundaryConfig, PowerConfig, run_boundary_experiment,
                                   run_enrichment, run_power_comparison, set_graph)
from graphtest.io import GeneSet
from graphtest.rng import substream


def test_boundary_small_grid_deterministic_and_shaped():
    cfg = BoundaryConfig(family="erdos_renyi", n=40, p=0.3, grid=4, replicates=8, B=100, seed=3)
    a = run_boundary_experiment(cfg)
    b = run_boundary_experiment(cfg, workers=4)
    np.testing.assert_array_equal(a.rejection_freq, b.rejection_freq)
    assert a.rejection_freq.shape == (4, 4)
    # the largest energies are detected almost always where feasible
    top = a.rejection_freq[-1]
    assert np.nanmin(top) >= 0.9
    assert a.infeasible_cells == int(np.isnan(a.rejection_freq).sum())
    assert len(list(a.rows())) == 16


def test_boundary_config_validation():
    with pytest.raises(ValueError):
        BoundaryConfig(replicates=0)
    full = BoundaryConfig.full()
    assert full.grid == 50 and full.replicates == 500


def test_power_comparison_rows():
    g = generate("cycle", 30)
    cfg = PowerConfig(("t_max", "chi2"), (0.0, 1.2), (-math.inf, 5.0), replicates=30, B=100, seed=1)
    rows = run_power_comparison(g, cfg)
    assert len(rows) == 2 * 2 * 2
    infeasible = [r for r in rows if r["xi2"] == 5.0]
    assert all(math.isnan(r["power"]) and r["replicates"] == 0 for r in infeasible)
    strong = [r for r in rows if r["xi1"] == 1.2 and r["xi2"] == -math.inf]
    assert all(r["power"] > 0.8 for r in strong)


def test_set_graph_ignores_foreign_edges():
    gs = GeneSet("A", "", ("x", "y", "z"))
    g = set_graph(gs, [("x", "y"), ("y", "w"), ("z", "x")])
    assert g == build_graph(3, [(0, 1), (0, 2)])


def test_enrichment_flags_shifted_set():
    rng = substream(4, 5)
    scores = {f"g{i}": float(v) for i, v in enumerate(rng.standard_normal(200))}
    for i in range(10):
        scores[f"g{i}"] += 2.0
    sets = [GeneSet("hit", "", tuple(f"g{i}" for i in range(10)) + ("missing",)),
            GeneSet("null", "", tuple(f"g{i}" for i in range(100, 110))),
            GeneSet("empty", "", ("nope",))]
    edges = {"hit": [(f"g{i}", f"g{i + 1}") for i in range(9)]}
    recs = run_enrichment(sets, scores, edges, B=199, seed=2)
    by = {r.name: r for r in recs}
    assert set(by) == {"hit", "null"}
    assert by["hit"].dropped == ["missing"] and by["hit"].n_genes == 10
    assert by["hit"].rejected and by["hit"].p_value == pytest.approx(1 / 200)
    assert not by["null"].rejected
    again = run_enrichment(sets, scores, edges, B=199, seed=2, workers=4)
    assert [(r.name, r.value, r.p_value) for r in again] == [(r.name, r.value, r.p_value) for r in recs]

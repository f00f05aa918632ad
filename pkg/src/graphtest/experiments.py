"""Simulation harnesses: detection-boundary grids, power comparisons and
gene-set enrichment runs."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from graphtest import rng as streams
from graphtest.calibration import (bh_fdr, critical_value, mc_null, p_value,
                                   randomization_null, observed_statistic)
from graphtest.errors import DataError, InfeasibleError
from graphtest.graph import Graph, build_graph, generate, graph_spectrum
from graphtest.io import GeneSet, restrict_gene_set
from graphtest.signal import draw_effect, solve_weights
from graphtest.statistics import STATISTICS, evaluate


def _pmap(fn, items, workers):
    if workers <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class BoundaryConfig:
    family: str = "erdos_renyi"
    n: int | None = 200
    p: float | None = 0.2
    m: int | None = None
    d: int | None = None
    grid: int = 25
    replicates: int = 100
    B: int = 1000
    alpha: float = 0.05
    seed: int = 0
    xi1_range: tuple[float, float] = (0.0, 2.0)
    xi2_range: tuple[float, float] = (-0.2, 0.8)

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be at least 1")
        if self.grid < 2:
            raise ValueError("grid must have at least 2 points per axis")

    @classmethod
    def full(cls, **kw) -> "BoundaryConfig":
        """Figure-scale settings: 50x50 grid, 500 replicates."""
        kw.setdefault("grid", 50)
        kw.setdefault("replicates", 500)
        return cls(**kw)

    def describe(self) -> dict:
        return {"family": self.family, "n": self.n, "p": self.p, "m": self.m, "d": self.d,
                "grid": self.grid, "replicates": self.replicates, "B": self.B,
                "alpha": self.alpha, "seed": self.seed,
                "xi1_range": list(self.xi1_range), "xi2_range": list(self.xi2_range)}


@dataclass
class BoundaryGrid:
    config: BoundaryConfig
    xi1_values: np.ndarray
    xi2_values: np.ndarray
    rejection_freq: np.ndarray  # (len(xi1), len(xi2)); nan where infeasible
    n_feasible: np.ndarray

    @property
    def infeasible_cells(self) -> int:
        return int(np.count_nonzero(self.n_feasible == 0))

    def rows(self):
        for i, a in enumerate(self.xi1_values):
            for j, b in enumerate(self.xi2_values):
                yield float(a), float(b), float(self.rejection_freq[i, j]), int(self.n_feasible[i, j])


def _make_graph(cfg: BoundaryConfig, replicate: int) -> Graph:
    if cfg.family == "erdos_renyi":
        return generate("erdos_renyi", cfg.n, p=cfg.p,
                        rng=streams.substream(cfg.seed, streams.GRAPH, replicate))
    return generate(cfg.family, cfg.n, m=cfg.m, d=cfg.d)


def run_boundary_experiment(cfg: BoundaryConfig, workers: int = 1) -> BoundaryGrid:
    """Rejection frequency of the adaptive test over an (xi1, xi2) grid.

    Erdos-Renyi graphs are redrawn for every replicate; replicate ``r`` uses
    the same graph in every cell. Deterministic families reuse one graph.
    Each graph gets its own Monte Carlo critical value.
    """
    xi1 = np.linspace(*cfg.xi1_range, cfg.grid)
    xi2 = np.linspace(*cfg.xi2_range, cfg.grid)
    fixed = None
    if cfg.family != "erdos_renyi":
        g = _make_graph(cfg, 0)
        s = graph_spectrum(g)
        q = critical_value(mc_null("t_max", g, cfg.B, cfg.seed, spec=s, keys=(0,)), cfg.alpha)
        fixed = (g, s, q)

    def replicate(r):
        if fixed is None:
            g = _make_graph(cfg, r)
            s = graph_spectrum(g)
            q = critical_value(mc_null("t_max", g, cfg.B, cfg.seed, spec=s, keys=(r,)), cfg.alpha)
        else:
            g, s, q = fixed
        out = np.full((xi1.size, xi2.size), -1, dtype=np.int8)
        cells, rows = [], []
        for i, a in enumerate(xi1):
            for j, b in enumerate(xi2):
                try:
                    u = solve_weights(s, a, b)[2]
                except InfeasibleError:
                    continue
                mu = draw_effect(s, u, streams.substream(cfg.seed, streams.EFFECT, i, j, r))
                noise = streams.substream(cfg.seed, streams.NOISE, i, j, r).standard_normal(g.n)
                cells.append((i, j))
                rows.append(mu + noise)
        if rows:
            stat = evaluate("t_max", np.stack(rows), spec=s)
            for (i, j), t in zip(cells, stat):
                out[i, j] = int(t > q)
        return out

    per_rep = _pmap(replicate, range(cfg.replicates), workers)
    stack = np.stack(per_rep)
    feasible = stack >= 0
    n_feas = feasible.sum(axis=0)
    hits = np.where(feasible, stack, 0).sum(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        freq = np.where(n_feas > 0, hits / np.maximum(n_feas, 1), np.nan)
    return BoundaryGrid(cfg, xi1, xi2, freq, n_feas)


@dataclass(frozen=True)
class PowerConfig:
    statistics: tuple[str, ...] = ("t_max", "maxmean", "meanabs", "chi2")
    xi1_values: tuple[float, ...] = (0.5, 1.0)
    xi2_values: tuple[float, ...] = (-math.inf,)
    replicates: int = 500
    B: int = 1000
    alpha: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if not self.statistics:
            raise ValueError("at least one statistic is required")
        for st in self.statistics:
            if st not in STATISTICS:
                raise DataError(f"unknown statistic {st!r}")
        if self.replicates < 1:
            raise ValueError("replicates must be at least 1")


def run_power_comparison(g: Graph, cfg: PowerConfig, workers: int = 1) -> list[dict]:
    """Power of each statistic per (xi1, xi2) cell, each calibrated by its own
    Monte Carlo null. ``xi2 = -inf`` requests effects constant on components."""
    s = graph_spectrum(g)
    crit = {st: critical_value(mc_null(st, g, cfg.B, cfg.seed, spec=s, workers=workers), cfg.alpha)
            for st in cfg.statistics}
    cells = [(i, j, a, b) for i, a in enumerate(cfg.xi1_values) for j, b in enumerate(cfg.xi2_values)]

    def cell(item):
        i, j, a, b = item
        try:
            u = solve_weights(s, a, b)[2]
        except InfeasibleError:
            return [{"xi1": a, "xi2": b, "statistic": st, "power": math.nan, "replicates": 0}
                    for st in cfg.statistics]
        X = np.stack([
            draw_effect(s, u, streams.substream(cfg.seed, streams.EFFECT, i, j, r))
            + streams.substream(cfg.seed, streams.NOISE, i, j, r).standard_normal(g.n)
            for r in range(cfg.replicates)])
        out = []
        for st in cfg.statistics:
            vals = evaluate(st, X, graph=g, spec=s)
            out.append({"xi1": a, "xi2": b, "statistic": st,
                        "power": float(np.mean(vals > crit[st])), "replicates": cfg.replicates})
        return out

    return [row for rows in _pmap(cell, cells, workers) for row in rows]


@dataclass
class EnrichmentRecord:
    name: str
    n_genes: int
    dropped: list[str]
    value: float
    lambda_star: float | None
    p_value: float
    rejected: bool = False


def set_graph(gs: GeneSet, edges: list[tuple[str, str]]) -> Graph:
    """Pathway graph on the members of ``gs`` (node ``k`` is member ``k``).

    Edges touching genes outside the set are ignored.
    """
    index = {g: k for k, g in enumerate(gs.members)}
    kept = [(index[a], index[b]) for a, b in edges if a in index and b in index and a != b]
    return build_graph(len(gs.members), kept)


def run_enrichment(sets: list[GeneSet], scores: dict[str, float],
                   set_edges: dict[str, list[tuple[str, str]]], stat: str = "t_max",
                   B: int = 1000, seed: int = 0, q: float = 0.05,
                   workers: int = 1) -> list[EnrichmentRecord]:
    """Test every gene set against a gene-randomization null drawn from all
    scored genes, then apply Benjamini-Hochberg across sets.

    Members without a score are dropped (and reported); sets left empty are
    skipped.
    """
    universe = np.array([scores[k] for k in sorted(scores)])
    records = []
    for k, gs in enumerate(sets):
        reduced, dropped = restrict_gene_set(gs, scores)
        if not reduced.members:
            continue
        g = set_graph(reduced, set_edges.get(gs.name, []))
        x = np.array([scores[m] for m in reduced.members])
        spec = graph_spectrum(g) if stat == "t_max" else None
        value, lam = observed_statistic(stat, g, x, spec)
        ns = randomization_null(stat, g, universe, B, _set_seed(seed, k), spec=spec, workers=workers)
        records.append(EnrichmentRecord(gs.name, g.n, dropped, value, lam, p_value(ns, value)))
    rejected = bh_fdr([(r.name, r.p_value) for r in records], q) if records else set()
    for r in records:
        r.rejected = r.name in rejected
    return records


def _set_seed(seed: int, k: int) -> int:
    # distinct, reproducible randomization stream per gene set
    return int(np.random.SeedSequence(entropy=seed, spawn_key=(k,)).generate_state(1)[0])

"""Null calibration, empirical p-values and Benjamini-Hochberg FDR."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from graphtest import rng as streams
from graphtest.errors import DataError
from graphtest.graph import Graph, Spectrum, graph_spectrum
from graphtest.statistics import (DEFAULT_OPTIMIZER, STATISTICS, OptimizerConfig,
                                  evaluate, project_scores, t_max)

# Replicates are evaluated in fixed-size chunks so that the floating-point
# path of every replicate is independent of the worker count.
CHUNK = 128


@dataclass(frozen=True)
class NullSample:
    values: np.ndarray
    statistic: str
    seed: int
    B: int

    def __post_init__(self):
        if self.B < 1 or self.values.size != self.B:
            raise ValueError("null sample must hold B >= 1 draws")


@dataclass(frozen=True)
class TestResult:
    statistic: str
    value: float
    p_value: float
    B: int
    seed: int
    lambda_star: float | None = None
    q_alpha: float | None = None
    alpha: float | None = None

    __test__ = False  # not a pytest class

    def to_record(self, set_name: str = "") -> dict:
        lam = self.lambda_star
        if lam is not None and math.isinf(lam):
            lam = "inf"
        return {"set": set_name, "statistic": self.statistic, "value": self.value,
                "lambda_star": lam, "p_value": self.p_value, "B": self.B,
                "seed": self.seed, "alpha": self.alpha, "q_alpha": self.q_alpha}


def _check_stat(stat):
    if stat not in STATISTICS:
        raise DataError(f"unknown statistic {stat!r}; expected one of {STATISTICS}")


def run_chunked(draw_row: Callable[[int], np.ndarray], score: Callable[[np.ndarray], np.ndarray],
                B: int, workers: int = 1) -> np.ndarray:
    """Evaluate ``score`` on ``B`` rows produced by ``draw_row(i)``.

    Rows are grouped into chunks of ``CHUNK`` consecutive replicates; chunks
    may run on a thread pool but are reassembled in replicate order.
    """
    def job(start):
        stop = min(start + CHUNK, B)
        X = np.stack([draw_row(i) for i in range(start, stop)])
        return score(X)

    starts = range(0, B, CHUNK)
    if workers <= 1:
        parts = [job(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, starts))
    return np.concatenate(parts)


def _scorer(stat, g, spec, opt):
    if stat == "t_max" and spec is None:
        spec = graph_spectrum(g)
    return lambda X: evaluate(stat, X, graph=g, spec=spec, opt=opt)


def mc_null(stat: str, g: Graph, B: int, seed: int, *, spec: Spectrum | None = None,
            workers: int = 1, keys: Sequence[int] = (),
            opt: OptimizerConfig = DEFAULT_OPTIMIZER) -> NullSample:
    """Draw ``B`` values of ``stat`` under ``X ~ N(0, I_n)``.

    Replicate ``i`` uses the substream ``(seed, NULL, *keys, i)``.
    """
    _check_stat(stat)
    if B < 1:
        raise ValueError(f"B must be at least 1, got {B}")
    keys = tuple(keys)
    values = run_chunked(
        lambda i: streams.substream(seed, streams.NULL, *keys, i).standard_normal(g.n),
        _scorer(stat, g, spec, opt), B, workers)
    return NullSample(values, stat, seed, B)


def randomization_null(stat: str, g: Graph, universe, B: int, seed: int, *,
                       spec: Spectrum | None = None, workers: int = 1,
                       opt: OptimizerConfig = DEFAULT_OPTIMIZER) -> NullSample:
    """Gene-randomization null: each draw places ``n`` scores sampled without
    replacement from ``universe`` onto the nodes in random order."""
    _check_stat(stat)
    universe = np.asarray(universe, dtype=float)
    if universe.size < g.n:
        raise DataError(f"score universe has {universe.size} values, need at least {g.n}")
    if B < 1:
        raise ValueError(f"B must be at least 1, got {B}")
    values = run_chunked(
        lambda i: streams.substream(seed, streams.RANDOMIZATION, i).choice(
            universe, size=g.n, replace=False),
        _scorer(stat, g, spec, opt), B, workers)
    return NullSample(values, stat, seed, B)


def critical_value(ns: NullSample, alpha: float) -> float:
    """Upper-``alpha`` empirical quantile: order statistic ``ceil((1-alpha)(B+1))``."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    k = math.ceil((1.0 - alpha) * (ns.B + 1) - 1e-9)
    k = min(max(k, 1), ns.B)
    return float(np.sort(ns.values)[k - 1])


def p_value(ns: NullSample, observed: float) -> float:
    """Add-one Monte Carlo p-value; ties count against the observation."""
    return (1 + int(np.count_nonzero(ns.values >= observed))) / (ns.B + 1)


def observed_statistic(stat: str, g: Graph, x, spec: Spectrum | None = None,
                       opt: OptimizerConfig = DEFAULT_OPTIMIZER) -> tuple[float, float | None]:
    """Statistic value and, for ``t_max``, the maximizing lambda."""
    _check_stat(stat)
    x = np.asarray(x, dtype=float)
    if stat == "t_max":
        spec = spec if spec is not None else graph_spectrum(g)
        res = t_max(project_scores(spec, x), spec, opt)
        return res.value, res.lambda_star
    return float(evaluate(stat, x, graph=g, spec=spec, opt=opt)[0]), None


def run_test(stat: str, g: Graph, x, B: int, seed: int, *, alpha: float | None = 0.05,
             universe=None, spec: Spectrum | None = None, workers: int = 1,
             opt: OptimizerConfig = DEFAULT_OPTIMIZER) -> TestResult:
    """Observed statistic plus Monte Carlo (or randomization) calibration."""
    if stat == "t_max" and spec is None:
        spec = graph_spectrum(g)
    value, lam = observed_statistic(stat, g, x, spec, opt)
    if universe is None:
        ns = mc_null(stat, g, B, seed, spec=spec, workers=workers, opt=opt)
    else:
        ns = randomization_null(stat, g, universe, B, seed, spec=spec, workers=workers, opt=opt)
    q = critical_value(ns, alpha) if alpha is not None else None
    return TestResult(stat, value, p_value(ns, value), B, seed, lam, q, alpha)


def bh_fdr(pvals: Iterable[tuple[object, float]], q: float) -> set:
    """Benjamini-Hochberg step-up; returns the rejected ids."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    items = list(pvals)
    for ident, p in items:
        if not 0.0 <= p <= 1.0 or math.isnan(p):
            raise ValueError(f"p-value for {ident!r} outside [0, 1]: {p}")
    m = len(items)
    order = sorted(range(m), key=lambda i: (items[i][1], i))
    k_star = 0
    for rank, i in enumerate(order, start=1):
        if items[i][1] <= q * rank / m:
            k_star = rank
    return {items[i][0] for i in order[:k_star]}

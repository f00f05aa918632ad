"""Test statistics for a score vector observed on the nodes of a graph.

The Laplacian-regularized statistic is evaluated in the Laplacian eigenbasis:
with projected coefficients ``c_k = <w_k, x>`` and shrinkage weights
``a_k = 1 / (1 + lam * lambda_k)``,

    T(lam) = (sum a_k c_k^2 - sum a_k) / sqrt(sum a_k^2)

and only per-distinct-eigenvalue sums of ``c_k^2`` are needed. The adaptive
statistic maximizes ``T`` over ``lam`` in ``[0, inf]`` after the change of
variable ``t = lam / (1 + lam)``, which maps the half-line onto ``[0, 1]``
with ``t = 1`` standing for ``lam = inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from graphtest.errors import DataError
from graphtest.graph import Graph, Spectrum, components

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

STATISTICS = ("t_max", "chi2", "z", "meanabs", "meansq", "maxmean", "r")


@dataclass(frozen=True)
class OptimizerConfig:
    grid_points: int = 513
    tol: float = 1e-10

    def __post_init__(self):
        if self.grid_points < 3:
            raise ValueError("grid_points must be at least 3")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


DEFAULT_OPTIMIZER = OptimizerConfig()


@dataclass(frozen=True)
class ProjectedScores:
    coeffs: np.ndarray
    collapsed: np.ndarray


@dataclass(frozen=True)
class TmaxResult:
    value: float
    lambda_star: float
    t_at_zero: float
    t_at_infinity: float


def _as_scores(x, n=None) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise DataError("scores must be a nonempty 1-d vector")
    if n is not None and x.size != n:
        raise DataError(f"score vector has length {x.size}, graph has {n} nodes")
    if not np.all(np.isfinite(x)):
        raise DataError("scores must be finite")
    return x


def _collapse(sq: np.ndarray, s: Spectrum) -> np.ndarray:
    starts = np.flatnonzero(np.r_[True, np.diff(s.group) != 0])
    return np.add.reduceat(sq, starts, axis=-1)


def project_scores(s: Spectrum, x) -> ProjectedScores:
    x = _as_scores(x, s.n)
    coeffs = s.eigenvectors.T @ x
    return ProjectedScores(coeffs, _collapse(coeffs ** 2, s))


def project_batch(s: Spectrum, X: np.ndarray) -> np.ndarray:
    """Collapsed squared coefficients for each row of ``X``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != s.n:
        raise DataError(f"score rows have length {X.shape[1]}, graph has {s.n} nodes")
    return _collapse((X @ s.eigenvectors) ** 2, s)


def _weights_at_t(t, rho):
    """Shrinkage weights ``1/(1+lam*rho)`` at ``t = lam/(1+lam)``.

    Broadcasts ``t[..., None]`` against ``rho``; zero eigenvalues keep weight 1
    for every t, including t = 1.
    """
    t = np.asarray(t, dtype=float)[..., None]
    with np.errstate(invalid="ignore", divide="ignore"):
        a = (1.0 - t) / ((1.0 - t) + t * rho)
    return np.where(rho == 0.0, 1.0, a)


def _t_from_weights(S, a, mult):
    num = np.sum(S * a, axis=-1) - np.sum(mult * a, axis=-1)
    den = np.sqrt(np.sum(mult * a * a, axis=-1))
    return num / den


def t_lambda(p: ProjectedScores, s: Spectrum, lam: float) -> float:
    if lam < 0 or math.isnan(lam):
        raise ValueError(f"lambda must be non-negative, got {lam}")
    if math.isinf(lam):
        a = (s.distinct == 0.0).astype(float)
    else:
        a = 1.0 / (1.0 + lam * s.distinct)
    return float(_t_from_weights(p.collapsed, a, s.multiplicity))


def t_max_batch(S: np.ndarray, s: Spectrum, opt: OptimizerConfig = DEFAULT_OPTIMIZER):
    """Adaptive maximum for each row of collapsed squares ``S``.

    Returns ``(value, t_star, t0, t_inf)`` arrays. A uniform grid in ``t``
    locates the best cell, then golden-section search refines inside the
    two neighbouring grid intervals.
    """
    S = np.atleast_2d(S)
    rho, mult = s.distinct, s.multiplicity
    grid = np.linspace(0.0, 1.0, opt.grid_points)
    A = _weights_at_t(grid, rho)  # (G, Nd)
    vals = (S @ A.T - (A @ mult)[None, :]) / np.sqrt((A * A) @ mult)[None, :]
    best = np.argmax(vals, axis=1)
    rows = np.arange(S.shape[0])
    best_val = vals[rows, best]
    best_t = grid[best]

    lo = grid[np.maximum(best - 1, 0)]
    hi = grid[np.minimum(best + 1, grid.size - 1)]

    def f(t):
        return _t_from_weights(S, _weights_at_t(t, rho), mult)

    width = float(np.max(hi - lo))
    steps = 0
    if width > opt.tol:
        steps = int(math.ceil(math.log(opt.tol / width) / math.log(INV_PHI)))
    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(steps):
        left = fc > fd  # maximum lies in [lo, d]
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
        new_c = np.where(left, hi - INV_PHI * (hi - lo), d)
        new_d = np.where(left, c, lo + INV_PHI * (hi - lo))
        f_new = f(np.where(left, new_c, new_d))
        fc, fd = np.where(left, f_new, fd), np.where(left, fc, f_new)
        c, d = new_c, new_d
    for cand_t, cand_v in ((c, fc), (d, fd)):
        better = cand_v > best_val
        best_val = np.where(better, cand_v, best_val)
        best_t = np.where(better, cand_t, best_t)
    return best_val, best_t, vals[:, 0], vals[:, -1]


def _lambda_from_t(t: float) -> float:
    return math.inf if t >= 1.0 else t / (1.0 - t)


def t_max(p: ProjectedScores, s: Spectrum, opt: OptimizerConfig = DEFAULT_OPTIMIZER) -> TmaxResult:
    value, t_star, t0, t_inf = t_max_batch(p.collapsed[None, :], s, opt)
    return TmaxResult(float(value[0]), _lambda_from_t(float(t_star[0])), float(t0[0]), float(t_inf[0]))


def r_statistic(g: Graph, x) -> float:
    """Likelihood-ratio statistic for effects constant on each component."""
    x = _as_scores(x, g.n)
    return float(_r_batch(g, x[None, :])[0])


def _r_batch(g: Graph, X: np.ndarray) -> np.ndarray:
    k, labels = components(g)
    sums = np.zeros((X.shape[0], k))
    np.add.at(sums.T, labels, X.T)
    sizes = np.bincount(labels, minlength=k)
    return np.sum(sums ** 2 / sizes, axis=1)


def chi2_statistic(x) -> float:
    x = _as_scores(x)
    return float(np.dot(x, x))


def z_statistic(x) -> float:
    x = _as_scores(x)
    return float(math.sqrt(x.size) * x.mean())


def meanabs_statistic(x) -> float:
    return float(np.mean(np.abs(_as_scores(x))))


def meansq_statistic(x) -> float:
    x = _as_scores(x)
    return float(np.dot(x, x) / x.size)


def maxmean_statistic(x) -> float:
    """Larger of the positive-part mean and the negative-part mean."""
    x = _as_scores(x)
    return float(max(np.maximum(x, 0.0).mean(), np.maximum(-x, 0.0).mean()))


def smooth_scores(s: Spectrum, x, lam: float) -> np.ndarray:
    """Apply ``(I + lam L)^{-1}`` to ``x`` through the eigenbasis.

    ``lam = inf`` gives the limit, the projection onto component-wise means.
    """
    if lam < 0 or math.isnan(lam):
        raise ValueError(f"lambda must be non-negative, got {lam}")
    x = _as_scores(x, s.n)
    if math.isinf(lam):
        shrink = (s.eigenvalues == 0.0).astype(float)
    else:
        shrink = 1.0 / (1.0 + lam * s.eigenvalues)
    W = s.eigenvectors
    return W @ (shrink * (W.T @ x))


def evaluate(name: str, X: np.ndarray, *, graph: Graph | None = None,
             spec: Spectrum | None = None, opt: OptimizerConfig = DEFAULT_OPTIMIZER) -> np.ndarray:
    """Statistic ``name`` for every row of ``X``.

    ``t_max`` needs ``spec``; ``r`` needs ``graph``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n = X.shape[1]
    if name == "t_max":
        if spec is None:
            raise ValueError("t_max needs the Laplacian spectrum")
        return t_max_batch(project_batch(spec, X), spec, opt)[0]
    if name == "chi2":
        return np.einsum("ij,ij->i", X, X)
    if name == "meansq":
        return np.einsum("ij,ij->i", X, X) / n
    if name == "z":
        return math.sqrt(n) * X.mean(axis=1)
    if name == "meanabs":
        return np.abs(X).mean(axis=1)
    if name == "maxmean":
        return np.maximum(np.maximum(X, 0.0).mean(axis=1), np.maximum(-X, 0.0).mean(axis=1))
    if name == "r":
        if graph is None:
            raise ValueError("r needs the graph")
        return _r_batch(graph, X)
    raise DataError(f"unknown statistic {name!r}; expected one of {STATISTICS}")

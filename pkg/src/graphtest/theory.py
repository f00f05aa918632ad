"""Asymptotic laws and detection-rate functions.

Covers the large-n limit of the adaptive statistic on complete and
Erdos-Renyi graphs, the general performance bound obtained from the
master equation ``x^2 = loglog(n) * trace[(I + x L / (2 eta^2))^-2]``, and
the piecewise detection rates for specific graph families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from graphtest import rng as streams
from graphtest.errors import DataError
from graphtest.graph import Spectrum

LOGLOG_FLOOR = 0.1


@dataclass(frozen=True)
class AsymptoticParams:
    delta1: float = 0.0
    delta2: float = 0.0

    def __post_init__(self):
        if not (self.delta1 >= 0 and math.isfinite(self.delta1) and math.isfinite(self.delta2)):
            raise ValueError("delta1 must be finite and >= 0, delta2 finite")


def limit_statistic(y1, y2):
    """Map ``(Y1, Y2)`` to the limiting value of the adaptive statistic."""
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    w2 = y2 * y2 - 1.0
    both = (y1 > 0) & (w2 > 0)
    return np.where(both, np.sqrt(2.0 * y1 * y1 + w2 * w2), np.maximum(math.sqrt(2.0) * y1, w2))


def asymptotic_tmax_draw(params: AsymptoticParams, rng: np.random.Generator, size=None):
    """Draw from the limit law with ``Y1 ~ N(delta1^2, 1)``, ``Y2 ~ N(delta2, 1)``."""
    y1 = params.delta1 ** 2 + rng.standard_normal(size)
    y2 = params.delta2 + rng.standard_normal(size)
    out = limit_statistic(y1, y2)
    return float(out) if size is None else out


@dataclass(frozen=True)
class PowerPoint:
    delta1: float
    delta2: float
    power_tmax: float
    power_z: float
    power_chi2: float

    @property
    def ratio_z(self) -> float:
        return self.power_tmax / self.power_z

    @property
    def ratio_chi2(self) -> float:
        return self.power_tmax / self.power_chi2


class PowerSurface:
    """Monte Carlo power of the adaptive test and its z / chi-square analogs.

    One set of standard normal pairs ``(Z1, Z2)`` is shared by every grid
    point (common random numbers): ``Y1 = delta1^2 + Z1``, ``Y2 = delta2 + Z2``.
    The adaptive test rejects above the upper-alpha quantile of the limit law
    at ``delta = 0``, estimated from an independent stream; the z analog
    rejects when ``Y2^2`` exceeds the chi-square(1) quantile and the
    chi-square analog when ``Y1`` exceeds the normal quantile.
    """

    def __init__(self, alpha: float = 0.05, B: int = 100_000, seed: int = 0):
        if not 0 < alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        self.alpha, self.B, self.seed = alpha, B, seed
        null = asymptotic_tmax_draw(AsymptoticParams(), streams.substream(seed, streams.THEORY, 0), B)
        self.q_tmax = float(np.quantile(null, 1.0 - alpha, method="inverted_cdf"))
        self.q_z = float(stats.chi2.ppf(1.0 - alpha, 1))
        self.q_chi2 = float(stats.norm.ppf(1.0 - alpha))
        g = streams.substream(seed, streams.THEORY, 1)
        self._z1 = g.standard_normal(B)
        self._z2 = g.standard_normal(B)

    def point(self, delta1: float, delta2: float) -> PowerPoint:
        AsymptoticParams(delta1, delta2)
        y1 = delta1 ** 2 + self._z1
        y2 = delta2 + self._z2
        return PowerPoint(
            delta1, delta2,
            float(np.mean(limit_statistic(y1, y2) > self.q_tmax)),
            float(np.mean(y2 * y2 > self.q_z)),
            float(np.mean(y1 > self.q_chi2)),
        )

    def grid(self, delta1_values, delta2_values) -> list[PowerPoint]:
        return [self.point(float(a), float(b)) for a in delta1_values for b in delta2_values]


def asymptotic_power(params: AsymptoticParams, alpha: float = 0.05, B: int = 100_000,
                     seed: int = 0) -> float:
    return PowerSurface(alpha, B, seed).point(params.delta1, params.delta2).power_tmax


def power_grid(step: float = 0.05, delta1_max: float = 3.0, delta2_max: float = 4.0):
    """Adopted ``(delta1, delta2)`` lattice for the power-ratio comparison."""
    d1 = np.round(np.arange(0.0, delta1_max + step / 2, step), 10)
    d2 = np.round(np.arange(0.0, delta2_max + step / 2, step), 10)
    return d1, d2


def loglog(n: int) -> float:
    """``log log n`` floored at 0.1 so tiny graphs keep a positive factor."""
    if n < 3:
        raise DataError(f"log log n needs n >= 3, got {n}")
    return max(math.log(math.log(n)), LOGLOG_FLOOR)


def _eigenvalues(s) -> np.ndarray:
    return np.asarray(s.eigenvalues if isinstance(s, Spectrum) else s, dtype=float)


def master_rhs(x: float, eigenvalues: np.ndarray, eta2: float, ll: float) -> float:
    if eta2 == 0.0:
        return ll * float(np.count_nonzero(eigenvalues == 0.0)) if x > 0 else ll * eigenvalues.size
    return ll * float(np.sum((1.0 + x * eigenvalues / (2.0 * eta2)) ** -2))


def master_root(s, eta2: float, rtol: float = 1e-10) -> float:
    """Unique positive root of the master equation, by bisection.

    ``s`` is a :class:`Spectrum` or a plain array of Laplacian eigenvalues.
    """
    lam = _eigenvalues(s)
    if eta2 < 0 or math.isnan(eta2):
        raise ValueError(f"eta2 must be non-negative, got {eta2}")
    n = lam.size
    ll = loglog(n)
    if eta2 == 0.0:
        return math.sqrt(ll * np.count_nonzero(lam == 0.0))
    lo, hi = 0.0, math.sqrt(n * ll)
    if hi * hi - master_rhs(hi, lam, eta2, ll) <= 0.0:
        return hi
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if mid * mid - master_rhs(mid, lam, eta2, ll) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


RATE_FAMILIES = ("er", "star", "cycle", "lattice")


@dataclass(frozen=True)
class RateQuery:
    family: str
    n: int
    eta2: float
    d: int = 1

    def __post_init__(self):
        if self.n < 2 or self.eta2 < 0:
            raise ValueError("rate query needs n >= 2 and eta2 >= 0")


def rate_function(q: RateQuery) -> float:
    """Squared-norm detection rate for a graph family at smoothness ``eta2``."""
    n = q.n
    eta = math.sqrt(q.eta2)
    if q.family == "er":
        if eta >= n ** 0.75:
            return math.sqrt(n)
        if eta >= math.sqrt(n):
            return q.eta2 / n
        return 1.0
    if q.family == "star":
        if eta >= n ** 0.25:
            return math.sqrt(n)
        if eta >= 1.0:
            return q.eta2
        return 1.0
    if q.family in ("cycle", "lattice"):
        d = 1 if q.family == "cycle" else q.d
        if d < 1:
            raise ValueError("lattice dimension must be positive")
        ll = loglog(n)
        if eta >= (n * ll) ** 0.25:
            return math.sqrt(n * ll)
        if eta >= n ** (-1.0 / d) * ll ** 0.25:
            return eta ** (2.0 * d / (4 + d)) * (n * ll) ** (2.0 / (4 + d))
        return math.sqrt(ll)
    raise DataError(f"no rate function for family {q.family!r}; expected one of {RATE_FAMILIES}")


def xi_coordinates(n: int, energy: float, smoothness: float) -> tuple[float, float]:
    """Diagram coordinates ``(log_n energy, log_n smoothness)``."""
    return math.log(energy) / math.log(n), math.log(smoothness) / math.log(n)

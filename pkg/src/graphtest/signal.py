"""Effect vectors with prescribed energy and Laplacian smoothness.

An effect is built in the Laplacian eigenbasis as ``mu = sum_k e_k u_k w_k``
with Rademacher signs ``e_k`` and weights ``u_k^2 = z1 * max(1 - z2*lambda_k, 0)``.
``z2`` fixes the smoothness-to-energy ratio ``sum lambda_k u_k^2 / sum u_k^2``
and ``z1`` the total energy. The ratio is strictly decreasing in ``z2``
and sweeps ``(0, tr(L^2)/tr(L))``, so targets outside that interval are
rejected with :class:`InfeasibleError`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from graphtest.errors import DataError, InfeasibleError
from graphtest.graph import Graph, Spectrum

MAX_BISECTIONS = 4000


@dataclass(frozen=True)
class EffectSpec:
    xi1: float
    xi2: float
    zeta1: float
    zeta2: float
    u: np.ndarray
    mu: np.ndarray
    achieved_energy: float
    achieved_smoothness: float
    seed: int | None = None

    def sidecar(self) -> dict:
        return {"xi1": self.xi1, "xi2": _jsonable(self.xi2), "zeta1": self.zeta1,
                "zeta2": _jsonable(self.zeta2), "achieved_energy": self.achieved_energy,
                "achieved_smoothness": self.achieved_smoothness, "seed": self.seed}


def _jsonable(v):
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _ratio(z2: float, lam: np.ndarray) -> float:
    w = np.maximum(1.0 - z2 * lam, 0.0)
    return float(np.dot(lam, w) / np.sum(w))


def feasible_ratio_sup(s: Spectrum) -> float:
    lam = s.eigenvalues
    tr = float(lam.sum())
    return float(np.dot(lam, lam) / tr) if tr > 0 else 0.0


def solve_weights(s: Spectrum, xi1: float, xi2: float, rtol: float = 1e-10):
    """Find ``(zeta1, zeta2, u)`` hitting ``||mu||^2 = n^xi1`` and
    ``mu' L mu = n^xi2``.

    ``xi2 = -inf`` asks for an exactly smooth effect: all weight goes to the
    zero eigenvalues, shared equally, and ``zeta2`` is reported as ``inf``.
    """
    lam = s.eigenvalues
    n = lam.size
    energy = float(n) ** xi1
    if math.isinf(xi2) and xi2 < 0:
        u2 = np.where(lam == 0.0, energy / s.zero_multiplicity, 0.0)
        return energy / s.zero_multiplicity, math.inf, np.sqrt(u2)
    target = float(n) ** (xi2 - xi1)
    sup = feasible_ratio_sup(s)
    if sup == 0.0:
        raise InfeasibleError("graph has no edges; only perfectly smooth effects exist")
    if not 0.0 < target < sup:
        raise InfeasibleError(
            f"smoothness/energy ratio {target:.6g} outside the attainable interval (0, {sup:.6g})")

    hi = 1.0 / s.lambda_min_nonzero  # ratio is 0 here
    lo = -1.0
    while _ratio(lo, lam) <= target:
        lo *= 2.0
        if lo < -1e300:
            raise InfeasibleError(f"ratio {target:.6g} too close to its supremum {sup:.6g}")
    _check_monotone(lo, hi, lam)
    z2 = 0.5 * (lo + hi)
    for _ in range(MAX_BISECTIONS):
        z2 = 0.5 * (lo + hi)
        r = _ratio(z2, lam)
        if abs(r - target) <= rtol * target or not lo < z2 < hi:
            break
        if r > target:
            lo = z2
        else:
            hi = z2
    w = np.maximum(1.0 - z2 * lam, 0.0)
    z1 = energy / float(np.sum(w))
    return z1, z2, np.sqrt(z1 * w)


def _check_monotone(lo, hi, lam, points=100):
    zs = np.linspace(lo, hi, points + 2)
    w = np.maximum(1.0 - zs[:, None] * lam[None, :], 0.0)
    r = (w @ lam) / w.sum(axis=1)
    bad = np.diff(r) >= 0.0
    bad[-1] = False  # the ratio reaches exactly zero at the upper end
    if np.any(bad):
        i = int(np.argmax(bad))
        raise ArithmeticError(
            f"smoothness ratio not decreasing between zeta2={zs[i]:.6g} and {zs[i + 1]:.6g}")


def draw_effect(s: Spectrum, u, rng: np.random.Generator) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.size != s.n:
        raise DataError(f"weights have length {u.size}, spectrum has {s.n}")
    signs = np.where(rng.random(s.n) < 0.5, -1.0, 1.0)
    return s.eigenvectors @ (signs * u)


def verify_effect(mu, g: Graph) -> tuple[float, float]:
    """Energy and edgewise smoothness ``sum_(u,v) (mu_u - mu_v)^2``."""
    mu = np.asarray(mu, dtype=float)
    if mu.size != g.n:
        raise DataError(f"effect has length {mu.size}, graph has {g.n} nodes")
    e = g.edge_array()
    diff = mu[e[:, 0]] - mu[e[:, 1]]
    return float(np.dot(mu, mu)), float(np.dot(diff, diff))


def simulate_effect(g: Graph, s: Spectrum, xi1: float, xi2: float,
                    rng: np.random.Generator, seed: int | None = None) -> EffectSpec:
    z1, z2, u = solve_weights(s, xi1, xi2)
    mu = draw_effect(s, u, rng)
    energy, smooth = verify_effect(mu, g)
    return EffectSpec(xi1, xi2, z1, z2, u, mu, energy, smooth, seed)

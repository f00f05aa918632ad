import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import minimize_scalar

from conftest import random_graph
from graphtest import DataError, generate, graph_spectrum
from graphtest.rng import substream
from graphtest.theory import (AsymptoticParams, PowerSurface, RateQuery, asymptotic_power,
                              asymptotic_tmax_draw, limit_statistic, loglog, master_rhs,
                              master_root, power_grid, rate_function, xi_coordinates)


@settings(max_examples=200, deadline=None)
@given(st.floats(-6, 6), st.floats(-6, 6))
def test_limit_statistic_is_theta_maximum(y1, y2):
    # sup over theta in [0, 1] of sqrt(1-theta^2) sqrt2 Y1 + theta (Y2^2 - 1)
    w1, w2 = math.sqrt(2) * y1, y2 * y2 - 1
    h = lambda th: math.sqrt(1 - th * th) * w1 + th * w2
    res = minimize_scalar(lambda th: -h(th), bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-12})
    best = max(h(0.0), h(1.0), -res.fun)
    assert float(limit_statistic(y1, y2)) == pytest.approx(best, abs=1e-8 * (1 + abs(best)))


def test_null_quantile():
    draws = asymptotic_tmax_draw(AsymptoticParams(), substream(1, 6), 200_000)
    assert np.quantile(draws, 0.95) == pytest.approx(3.37, abs=0.05)


def test_power_surface_sanity():
    surf = PowerSurface(B=20_000, seed=3)
    null = surf.point(0.0, 0.0)
    for p in (null.power_tmax, null.power_z, null.power_chi2):
        assert p == pytest.approx(0.05, abs=0.01)
    strong = surf.point(2.5, 3.5)
    assert strong.power_tmax > 0.99
    # monotone in each coordinate because draws are shared
    assert surf.point(1.0, 1.0).power_tmax <= surf.point(1.2, 1.0).power_tmax
    assert surf.point(1.0, 1.0).power_tmax <= surf.point(1.0, 1.3).power_tmax
    assert asymptotic_power(AsymptoticParams(1.0, 1.0), B=20_000, seed=3) == surf.point(1.0, 1.0).power_tmax


def test_power_grid_shape():
    d1, d2 = power_grid()
    assert d1.size == 61 and d2.size == 81
    assert d1[-1] == 3.0 and d2[-1] == 4.0


def test_params_validation():
    with pytest.raises(ValueError):
        AsymptoticParams(-1.0, 0.0)


def test_loglog():
    assert loglog(3) == 0.1  # log log 3 is about 0.094
    assert loglog(10 ** 6) == pytest.approx(math.log(math.log(1e6)))
    with pytest.raises(DataError):
        loglog(2)


def test_master_root_complete_graph_closed_form():
    # K_n: rhs = ll (1 + (n-1)(1 + x n / (2 eta2))^-2)
    n, eta2 = 50, 3.0
    s = graph_spectrum(generate("complete", n))
    x = master_root(s, eta2)
    ll = loglog(n)
    assert x * x == pytest.approx(ll * (1 + (n - 1) / (1 + x * n / (2 * eta2)) ** 2), rel=1e-9)
    assert master_root(s.eigenvalues, eta2) == x
    assert master_root(s, 0.0) == pytest.approx(math.sqrt(ll))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.floats(1e-4, 1e4))
def test_master_root_residual_and_bounds(seed, eta2):
    g = random_graph(seed, (3, 50))
    s = graph_spectrum(g)
    ll = loglog(g.n)
    x = master_root(s, eta2)
    assert abs(x * x - master_rhs(x, s.eigenvalues, eta2, ll)) <= 1e-8 * x * x
    assert math.sqrt(s.zero_multiplicity * ll) - 1e-9 <= x <= math.sqrt(g.n * ll) + 1e-9
    assert master_root(s, eta2 * 2) >= x - 1e-9


def test_master_root_rejects_negative():
    with pytest.raises(ValueError):
        master_root(np.zeros(5), -1.0)


@pytest.mark.parametrize("family,d", [("er", 1), ("star", 1), ("cycle", 1), ("lattice", 2), ("lattice", 3)])
def test_rate_function_continuous_at_breakpoints(family, d):
    n = 10_000
    ll = loglog(n)
    breaks = {"er": [n ** 0.5, n ** 0.75], "star": [1.0, n ** 0.25],
              "cycle": [n ** -1.0 * ll ** 0.25, (n * ll) ** 0.25],
              "lattice": [n ** (-1.0 / d) * ll ** 0.25, (n * ll) ** 0.25]}[family]
    for eta in breaks:
        below = rate_function(RateQuery(family, n, (eta * (1 - 1e-9)) ** 2, d))
        at = rate_function(RateQuery(family, n, eta ** 2, d))
        assert below == pytest.approx(at, rel=1e-6)


@pytest.mark.parametrize("family,d", [("er", 1), ("star", 1), ("cycle", 1), ("lattice", 2)])
def test_rate_function_monotone(family, d):
    etas = np.logspace(-4, 4, 200)
    r = [rate_function(RateQuery(family, 4096, e * e, d)) for e in etas]
    assert np.all(np.diff(r) >= -1e-12)


def test_rate_function_vs_master_root_on_cycle():
    n = 10_000
    k = np.arange(n)  # closed-form cycle spectrum; a dense solve at this size is slow
    lam = 4 * np.sin(np.pi * k / n) ** 2
    lam[0] = 0.0
    for eta2 in (1e-2, 1.0, 1e2, 1e4):
        ratio = master_root(lam, eta2) / rate_function(RateQuery("cycle", n, eta2))
        assert 0.25 <= ratio <= 4.0


def test_rate_function_unknown_family():
    with pytest.raises(DataError):
        rate_function(RateQuery("tree", 100, 1.0))


def test_xi_coordinates():
    assert xi_coordinates(100, 1000.0, 10.0) == pytest.approx((1.5, 0.5))

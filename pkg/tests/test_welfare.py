import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from hotelling_quality.model import FacilityConfig, Preferences
from hotelling_quality.welfare import (
    GradientMethod,
    Regime,
    finite_difference_gradient,
    interior_welfare,
    welfare,
    welfare_array,
    welfare_closed_form,
    welfare_gradient,
    welfare_quadrature,
)

from conftest import random_configs

SQRT2 = math.sqrt(2.0)


def central_diff(f, x, h=1e-6):
    g = np.zeros(3)
    for k in range(3):
        up, dn = list(x), list(x)
        up[k] += h
        dn[k] -= h
        g[k] = (f(up) - f(dn)) / (2 * h)
    return g


@pytest.mark.parametrize(
    "cfg,theta,gamma,expected",
    [
        ((0.25, 0.75, 0.5), 0.1, 1.0, (24 * 0.1 - 1) / 48),
        ((0.15, 0.65, 0.0), 0.1, 1.0, (48 * 0.01 + 24 * 0.1 - 1) / 48),
        ((0.5, 0.8, 1.0), 0.3, 1.0, (48 * 0.3 - 4) / 48),
        ((0.25, 0.75, 0.5), 0.1, 0.5, (24 * SQRT2 * 0.1 - 1) / 48),
    ],
)
def test_closed_form_matches_proof_values(cfg, theta, gamma, expected):
    assert welfare(FacilityConfig(*cfg), Preferences(theta, gamma)) == pytest.approx(expected, abs=1e-14)


def test_spot_values():
    assert (24 * 0.1 - 1) / 48 == pytest.approx(0.0291667, abs=1e-7)
    assert (48 * 0.01 + 24 * 0.1 - 1) / 48 == pytest.approx(0.0391667, abs=1e-7)
    assert (48 * 0.3 - 4) / 48 == pytest.approx(0.2166667, abs=1e-7)
    assert (24 * SQRT2 * 0.1 - 1) / 48 == pytest.approx(0.0498773, abs=1e-7)


def test_regime_labels():
    prefs = Preferences(0.1)
    assert welfare_closed_form(FacilityConfig(0.25, 0.75, 0.5), prefs).regime is Regime.INTERIOR
    assert welfare_closed_form(FacilityConfig(0.5, 0.5, 0.0), prefs).regime is Regime.ALL_RIGHT
    assert welfare_closed_form(FacilityConfig(0.5, 0.8, 1.0), Preferences(0.3)).regime is Regime.ALL_LEFT
    wv = welfare_closed_form(FacilityConfig(0.4, 0.4, 0.5), prefs)
    assert wv.regime is Regime.DEGENERATE
    assert wv.value == pytest.approx(0.05 - (1 / 3 - 0.4 + 0.16), abs=1e-15)


def test_regime_matches_jhat(rng):
    for cfg in random_configs(rng, 300):
        wv = welfare_closed_form(cfg, Preferences(0.2))
        assert (wv.regime is Regime.INTERIOR) == (0.0 < wv.jhat_used < 1.0)


def test_quadrature_examples():
    prefs = Preferences(0.1)
    assert welfare_quadrature(FacilityConfig(0.25, 0.75, 0.5), prefs, 64).value == pytest.approx(
        (24 * 0.1 - 1) / 48, abs=1e-10
    )
    assert welfare_quadrature(FacilityConfig(0.5, 0.5, 0.5), prefs, 64).value == pytest.approx(
        0.05 - 1 / 12, abs=1e-12
    )
    assert welfare_quadrature(FacilityConfig(0.15, 0.65, 0.0), prefs, 64).value == pytest.approx(
        (48 * 0.01 + 24 * 0.1 - 1) / 48, abs=1e-10
    )
    with pytest.raises(ValueError):
        welfare_quadrature(FacilityConfig(0.15, 0.65, 0.0), prefs, 1)


@pytest.mark.parametrize("gamma", [1.0, 0.5])
@pytest.mark.parametrize("theta", [0.05, 0.1, 0.2, 0.3])
def test_closed_form_equals_quadrature(rng, theta, gamma):
    prefs = Preferences(theta, gamma)
    worst = 0.0
    for cfg in random_configs(rng, 1000):
        worst = max(worst, abs(welfare(cfg, prefs) - welfare_quadrature(cfg, prefs, 8).value))
    assert worst <= 1e-9


def test_quadrature_on_coincident_facilities():
    for a in (0.0, 0.3, 1.0):
        for q in (0.0, 0.2, 0.5, 0.9):
            cfg, prefs = FacilityConfig(a, a, q), Preferences(0.15, 0.5)
            assert welfare(cfg, prefs) == pytest.approx(welfare_quadrature(cfg, prefs).value, abs=1e-12)


def test_array_matches_scalar(rng):
    cfgs = random_configs(rng, 400) + [FacilityConfig(0.3, 0.3, q) for q in (0.0, 0.5, 1.0)]
    a, b, q = (np.array(v) for v in zip(*(c.as_tuple() for c in cfgs)))
    for gamma in (1.0, 0.5):
        prefs = Preferences(0.12, gamma)
        got = welfare_array(a, b, q, prefs.theta, gamma)
        np.testing.assert_allclose(got, [welfare(c, prefs) for c in cfgs], rtol=0, atol=1e-15)


unit = st.floats(0.0, 1.0)


@settings(max_examples=400, deadline=None)
@given(unit, unit, unit, st.floats(0.01, 1.0), st.sampled_from([1.0, 0.5]))
def test_mirror_symmetry(x, y, q, theta, gamma):
    # only configurations whose reflection is exactly representable
    assume(all(1.0 - (1.0 - v) == v for v in (x, y, q)))
    cfg = FacilityConfig(min(x, y), max(x, y), q)
    prefs = Preferences(theta, gamma)
    assert welfare(cfg, prefs) == pytest.approx(welfare(cfg.mirror(), prefs), abs=1e-13)


def interior_sample(rng, gamma, n):
    out = []
    while len(out) < n:
        a, b = np.sort(rng.uniform(0, 1, 2))
        if b - a < 0.05:
            continue
        cfg = FacilityConfig(float(a), float(b), float(rng.uniform(0.02, 0.98)))
        prefs = Preferences(float(rng.uniform(0.01, 0.5)), gamma)
        if 0.01 < welfare_closed_form(cfg, prefs).jhat_used < 0.99:
            out.append((cfg, prefs))
    return out


@pytest.mark.parametrize("gamma", [1.0, 0.5])
def test_analytic_gradient_matches_finite_differences(rng, gamma):
    worst = 0.0
    for cfg, prefs in interior_sample(rng, gamma, 500):
        grad = welfare_gradient(cfg, prefs)
        assert grad.method is GradientMethod.ANALYTIC
        fd = central_diff(lambda p: welfare(FacilityConfig(*p), prefs), cfg.as_tuple())
        worst = max(worst, np.max(np.abs(grad.as_array() - fd)))
    assert worst <= 1e-5


@pytest.mark.parametrize("gamma", [1.0, 0.5])
def test_gradient_vanishes_at_symmetric_point(gamma):
    grad = welfare_gradient(FacilityConfig(0.25, 0.75, 0.5), Preferences(0.1, gamma))
    assert np.max(np.abs(grad.as_array())) <= 1e-8


def test_gradient_example_against_finite_differences():
    cfg, prefs = FacilityConfig(0.2, 0.7, 0.5), Preferences(0.1)
    grad = welfare_gradient(cfg, prefs).as_array()
    fd = central_diff(lambda p: welfare(FacilityConfig(*p), prefs), cfg.as_tuple())
    np.testing.assert_allclose(grad, fd, rtol=1e-6)


def test_gradient_fallbacks():
    grad = welfare_gradient(FacilityConfig(0.2, 0.7, 0.4), Preferences(0.1, 0.7))
    assert grad.method is GradientMethod.FINITE_DIFFERENCE
    grad = welfare_gradient(FacilityConfig(0.15, 0.65, 0.0), Preferences(0.1, 0.5))
    assert grad.method is GradientMethod.FINITE_DIFFERENCE
    fd = finite_difference_gradient(FacilityConfig(0.2, 0.7, 0.4), Preferences(0.1, 0.7))
    assert fd.method is GradientMethod.FINITE_DIFFERENCE


@pytest.mark.parametrize(
    "cfg", [FacilityConfig(0.4, 0.4, 0.3), FacilityConfig(0.5, 0.8, 1.0), FacilityConfig(0.5, 0.5, 0.5)]
)
def test_gradient_rejects_non_interior(cfg):
    with pytest.raises(ValueError):
        welfare_gradient(cfg, Preferences(0.3))


def test_branch_continuity(rng):
    """Interior formula tends to the everyone-at-b formula as the split point reaches 0."""
    for _ in range(20):
        theta, gamma = float(rng.uniform(0.05, 0.3)), float(rng.choice([1.0, 0.5]))
        b, q = float(rng.uniform(0.5, 1.0)), float(rng.uniform(0.0, 0.3))
        d = q**gamma - (1 - q) ** gamma
        gaps = []
        for t in (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6):
            # left location putting the raw split point at t
            disc = (b - t) ** 2 + theta * d
            if disc < 0:
                break
            a = t + math.sqrt(disc)
            if not (0 <= a < b):
                break
            inner = interior_welfare(a, b, q, theta, gamma)
            boundary = theta * (1 - q) ** gamma + b - b * b - 1 / 3
            gaps.append(abs(inner - boundary))
        if len(gaps) >= 3:
            assert all(g2 <= g1 for g1, g2 in zip(gaps, gaps[1:]))
            assert gaps[-1] < 1e-8

"""Aggregate welfare: closed form, quadrature oracle and partial derivatives."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .model import (
    TIE_TOL,
    FacilityConfig,
    Preferences,
    indifferent_point,
    indifferent_point_array,
)

FD_STEP = 1e-6


class Regime(str, Enum):
    INTERIOR = "Interior"
    ALL_LEFT = "AllLeft"  # jhat == 1, everyone uses the facility at a
    ALL_RIGHT = "AllRight"  # jhat == 0, everyone uses the facility at b
    DEGENERATE = "Degenerate"


class GradientMethod(str, Enum):
    ANALYTIC = "Analytic"
    FINITE_DIFFERENCE = "FiniteDifference"


@dataclass(frozen=True)
class WelfareValue:
    value: float
    jhat_used: float
    regime: Regime


@dataclass(frozen=True)
class WelfareGradient:
    d_a: float
    d_b: float
    d_q: float
    method: GradientMethod

    def as_array(self) -> np.ndarray:
        return np.array([self.d_a, self.d_b, self.d_q])


def _spread_cost(x: float) -> float:
    # integral of (i - x)**2 over [0, 1]
    return 1.0 / 3.0 - x + x * x


def interior_welfare(a, b, q, theta: float, gamma: float):
    """Welfare formula valid when the split point lies strictly inside (0, 1).

    Works elementwise on arrays; no branch selection is done here.
    """
    ga = q**gamma
    gb = (1.0 - q) ** gamma
    num = a * a - b * b - theta * (ga - gb)
    return theta * gb - b * b + b - 1.0 / 3.0 - num * num / (4.0 * (a - b))


def _regime_for(jhat: float, degenerate: bool) -> Regime:
    if degenerate:
        return Regime.DEGENERATE
    if jhat <= 0.0:
        return Regime.ALL_RIGHT
    if jhat >= 1.0:
        return Regime.ALL_LEFT
    return Regime.INTERIOR


def welfare_closed_form(config: FacilityConfig, prefs: Preferences) -> WelfareValue:
    a, b, q = config.a, config.b, config.q
    theta = prefs.theta
    ip = indifferent_point(config, prefs)
    regime = _regime_for(ip.jhat, ip.degenerate)
    if regime is Regime.DEGENERATE:
        value = theta * prefs.g(0.5) - _spread_cost(a)
    elif regime is Regime.ALL_RIGHT:
        value = theta * prefs.g(1.0 - q) - _spread_cost(b)
    elif regime is Regime.ALL_LEFT:
        value = theta * prefs.g(q) - _spread_cost(a)
    else:
        value = float(interior_welfare(a, b, q, theta, prefs.gamma))
    return WelfareValue(value, ip.jhat, regime)


def welfare(config: FacilityConfig, prefs: Preferences) -> float:
    """Shorthand for ``welfare_closed_form(config, prefs).value``."""
    return welfare_closed_form(config, prefs).value


def welfare_array(a, b, q, theta: float, gamma: float) -> np.ndarray:
    """Vectorised closed-form welfare over broadcastable ``a, b, q`` arrays.

    Inputs must already satisfy ``a <= b``; no validation is done.
    """
    a, b, q = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (a, b, q)))
    jhat, coincident = indifferent_point_array(a, b, q, theta, gamma)
    degenerate = coincident & (q == 0.5)
    with np.errstate(divide="ignore", invalid="ignore"):
        inner = interior_welfare(a, b, q, theta, gamma)
    right = theta * (1.0 - q) ** gamma - (1.0 / 3.0 - b + b * b)
    left = theta * q**gamma - (1.0 / 3.0 - a + a * a)
    out = np.where(jhat <= 0.0, right, np.where(jhat >= 1.0, left, inner))
    return np.where(degenerate, theta * 0.5**gamma - (1.0 / 3.0 - a + a * a), out)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(2)


def _panel_nodes(lo: float, hi: float, n: int):
    edges = np.linspace(lo, hi, n + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return nodes, weights


def welfare_quadrature(config: FacilityConfig, prefs: Preferences, n: int = 64) -> WelfareValue:
    """Integrate each individual's utility at their chosen facility.

    Two-point Gauss-Legendre on ``n`` panels either side of the split point.
    The rule is exact for cubics and the integrand is quadratic on each side,
    so the result matches the closed form to rounding.
    """
    if n < 2:
        raise ValueError(f"need n >= 2 panels, got {n}")
    ip = indifferent_point(config, prefs)
    jhat = ip.jhat
    nodes, weights = [], []
    for lo, hi in ((0.0, jhat), (jhat, 1.0)):
        if hi > lo:
            x, w = _panel_nodes(lo, hi, n)
            nodes.append(x)
            weights.append(w)
    i = np.concatenate(nodes)
    w = np.concatenate(weights)

    theta = prefs.theta
    ua = theta * prefs.g(config.q) - (i - config.a) ** 2
    ub = theta * prefs.g(1.0 - config.q) - (i - config.b) ** 2
    gap = ua - ub
    use_a = np.where(np.abs(gap) > TIE_TOL, gap > 0, i <= jhat)
    value = float(np.dot(w, np.where(use_a, ua, ub)))
    return WelfareValue(value, jhat, _regime_for(jhat, ip.degenerate))


def _check_interior(config: FacilityConfig, prefs: Preferences) -> None:
    ip = indifferent_point(config, prefs)
    if ip.raw is None or not (0.0 < ip.jhat < 1.0):
        raise ValueError(
            f"gradient needs distinct facilities and an interior split point; got {config}"
        )


def _analytic_gradient(a: float, b: float, q: float, theta: float, gamma: float):
    if gamma == 1.0:
        d = 2.0 * q - 1.0
    else:
        d = math.sqrt(q) - math.sqrt(1.0 - q)
    den = 4.0 * (a - b) ** 2
    num = a * a - b * b - theta * d
    d_a = -num * (3 * a * a - 4 * a * b + b * b + theta * d) / den
    d_b = -((a - 2) * a - (b - 2) * b - theta * d) * (a * a + a * (2 - 4 * b) + b * (3 * b - 2) - theta * d) / den
    if gamma == 1.0:
        d_q = theta * (theta * (1.0 - 2.0 * q) / (a - b) + a + b - 1.0)
    else:
        rq, rp = math.sqrt(q), math.sqrt(1.0 - q)
        d_q = 0.25 * theta * ((1.0 / rq + 1.0 / rp) * num / (a - b) - 2.0 / rp)
    return d_a, d_b, d_q


def finite_difference_gradient(
    config: FacilityConfig, prefs: Preferences, step: float = FD_STEP
) -> WelfareGradient:
    """Central differences of the interior welfare formula.

    Falls back to a one-sided difference in ``q`` at ``q = 0`` or ``q = 1``.
    """
    a, b, q = config.a, config.b, config.q

    def f(aa, bb, qq):
        return float(interior_welfare(aa, bb, qq, prefs.theta, prefs.gamma))

    d_a = (f(a + step, b, q) - f(a - step, b, q)) / (2 * step)
    d_b = (f(a, b + step, q) - f(a, b - step, q)) / (2 * step)
    if q - step < 0.0:
        d_q = (f(a, b, q + step) - f(a, b, q)) / step
    elif q + step > 1.0:
        d_q = (f(a, b, q) - f(a, b, q - step)) / step
    else:
        d_q = (f(a, b, q + step) - f(a, b, q - step)) / (2 * step)
    return WelfareGradient(d_a, d_b, d_q, GradientMethod.FINITE_DIFFERENCE)


def welfare_gradient(config: FacilityConfig, prefs: Preferences) -> WelfareGradient:
    """Partial derivatives of welfare at a configuration with an interior split.

    Closed-form first-order conditions are used for ``gamma`` of 1 or 1/2
    (the latter only for ``0 < q < 1``); otherwise central differences.
    """
    _check_interior(config, prefs)
    gamma = prefs.gamma
    analytic = gamma == 1.0 or (gamma == 0.5 and 0.0 < config.q < 1.0)
    if not analytic:
        return finite_difference_gradient(config, prefs)
    d_a, d_b, d_q = _analytic_gradient(config.a, config.b, config.q, prefs.theta, gamma)
    return WelfareGradient(d_a, d_b, d_q, GradientMethod.ANALYTIC)

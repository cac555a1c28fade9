"""Executable checks of the closed-form optima, plus theta sweeps and thresholds."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

import numpy as np

from .model import FacilityConfig, Preferences, indifferent_point
from .optimize import (
    DEFAULT_RESOLUTION,
    DEFAULT_TOL,
    THEOREM2_THETA_MAX,
    SolveReport,
    Structure,
    classify,
    solve,
)
from .welfare import Regime, welfare, welfare_closed_form

# strict-improvement claims must beat rounding noise by this much
STRICT_MARGIN = 1e-15


class Claim(str, Enum):
    THEOREM1 = "Theorem1"
    THEOREM2 = "Theorem2"
    REMARK = "Remark"
    LEMMA_BOUNDARY = "LemmaBoundary"


@dataclass
class VerificationResult:
    """Outcome of one claim check.

    ``checks`` maps a check name to ``(observed, tolerance)``; a check holds
    when ``observed <= tolerance``.  ``max_discrepancy`` is the worst observed
    value minus its tolerance, so ``passed`` is ``max_discrepancy <= 0``.
    """

    claim: Claim
    theta: float
    gamma: float
    checks: dict[str, tuple[float, float]]
    details: dict = field(default_factory=dict)

    @property
    def max_discrepancy(self) -> float:
        return max(obs - tol for obs, tol in self.checks.values())

    @property
    def passed(self) -> bool:
        return all(obs <= tol for obs, tol in self.checks.values())


@dataclass(frozen=True)
class SweepRow:
    theta: float
    a: float
    b: float
    q: float
    jhat: float
    welfare: float
    regime: str


def theorem1_low_welfare(theta: float) -> float:
    return (48 * theta**2 + 24 * theta - 1) / 48


def corner_welfare(theta: float) -> float:
    return (48 * theta - 4) / 48


def symmetric_welfare(theta: float, gamma: float = 1.0) -> float:
    if gamma == 1.0:
        return (24 * theta - 1) / 48
    if gamma == 0.5:
        return (24 * math.sqrt(2) * theta - 1) / 48
    raise ValueError(f"no closed form for gamma={gamma}")


def _nearest(target: FacilityConfig, report: SolveReport) -> float:
    return min(target.distance(o.config) for o in report.optima)


def verify_theorem1(
    theta: float,
    resolution: int = DEFAULT_RESOLUTION,
    tol: float = DEFAULT_TOL,
    config_tol: float = 1e-6,
    welfare_tol: float = 1e-8,
    report: Optional[SolveReport] = None,
) -> VerificationResult:
    """Compare the solver's optima with the linear-utility closed form.

    Below theta = 1/4 the optima are the two segregated configurations; from
    1/4 on, one facility at 1/2 with all the quality serves everyone.
    """
    prefs = Preferences(theta, 1.0)
    report = report or solve(prefs, resolution, tol)
    checks: dict[str, tuple[float, float]] = {}
    if Fraction(theta) < Fraction(1, 4):
        expected = [
            FacilityConfig(0.25 - theta, 0.75 - theta, 0.0),
            FacilityConfig(0.25 + theta, 0.75 + theta, 1.0),
        ]
        w_expected = theorem1_low_welfare(theta)
        checks["expected_found"] = (max(_nearest(e, report) for e in expected), config_tol)
        checks["no_extra_optima"] = (
            max(min(e.distance(o.config) for e in expected) for o in report.optima),
            config_tol,
        )
        checks["margin_over_symmetric"] = (
            abs(report.welfare_star - symmetric_welfare(theta) - theta**2),
            welfare_tol,
        )
    else:
        w_expected = corner_welfare(theta)
        worst = 0.0
        sides = set()
        for o in report.optima:
            cfg = o.config
            jhat = indifferent_point(cfg, prefs).jhat
            serving = cfg.b if jhat <= 0.5 else cfg.a
            worst = max(
                worst,
                min(cfg.q, 1.0 - cfg.q),
                min(jhat, 1.0 - jhat),
                abs(serving - 0.5),
            )
            sides.add(round(cfg.q))
        checks["corner_structure"] = (worst, config_tol)
        checks["both_mirror_families"] = (0.0 if sides == {0, 1} else math.inf, 0.0)
    checks["welfare"] = (abs(report.welfare_star - w_expected), welfare_tol)
    details = {
        "welfare_star": report.welfare_star,
        "expected_welfare": w_expected,
        "optima": [o.config.as_tuple() for o in report.optima],
        "regime": report.regime,
    }
    return VerificationResult(Claim.THEOREM1, theta, 1.0, checks, details)


def verify_theorem2(
    theta: float,
    resolution: int = DEFAULT_RESOLUTION,
    tol: float = DEFAULT_TOL,
    config_tol: float = 1e-6,
    welfare_tol: float = 1e-8,
    report: Optional[SolveReport] = None,
) -> VerificationResult:
    """Check that (1/4, 3/4, 1/2) is the unique optimum under square-root utility."""
    if not (0 < theta < THEOREM2_THETA_MAX):
        raise ValueError(f"theta must lie in (0, {THEOREM2_THETA_MAX:.6f}), got {theta}")
    prefs = Preferences(theta, 0.5)
    report = report or solve(prefs, resolution, tol)
    target = FacilityConfig(0.25, 0.75, 0.5)
    w_expected = symmetric_welfare(theta, 0.5)
    margin = w_expected - corner_welfare(theta)
    checks = {
        "symmetric_found": (_nearest(target, report), config_tol),
        "unique": (float(len(report.optima) - 1), 0.0),
        "welfare": (abs(report.welfare_star - w_expected), welfare_tol),
        "beats_corner": (-(report.welfare_star - corner_welfare(theta)), -STRICT_MARGIN),
    }
    details = {
        "welfare_star": report.welfare_star,
        "expected_welfare": w_expected,
        "corner_welfare": corner_welfare(theta),
        "margin": margin,
        "optima": [o.config.as_tuple() for o in report.optima],
    }
    return VerificationResult(Claim.THEOREM2, theta, 0.5, checks, details)


def verify_remark(a: float, prefs: Preferences, grid: int = 21) -> VerificationResult:
    """Exhibit a split configuration beating coincident equal-quality facilities at ``a``."""
    base = welfare(FacilityConfig(a, a, 0.5), prefs)
    x = np.arange(grid) / (grid - 1)
    best, best_cfg = -math.inf, None
    for i, ai in enumerate(x):
        for bi in x[i + 1 :]:
            cfg = FacilityConfig(float(ai), float(bi), 0.5)
            w = welfare(cfg, prefs)
            if w > best:
                best, best_cfg = w, cfg
    checks = {"improvement": (base - best, -STRICT_MARGIN)}
    details = {"degenerate_welfare": base, "improved_welfare": best, "improved_config": best_cfg.as_tuple()}
    return VerificationResult(Claim.REMARK, prefs.theta, prefs.gamma, checks, details)


def sample_boundary_configs(prefs: Preferences, n: int, eps: float, rng: np.random.Generator):
    """Configs with a facility pinned to an endpoint and an interior split.

    Alternates ``a = 0`` and ``b = 1``; yields ``(config, inward_perturbed)``.
    """
    out = []
    while len(out) < n:
        other, q = rng.uniform(2 * eps, 1.0), rng.uniform(0.0, 1.0)
        if len(out) % 2 == 0:
            cfg, moved = FacilityConfig(0.0, other, q), FacilityConfig(eps, other, q)
        else:
            cfg, moved = FacilityConfig(1.0 - other, 1.0, q), FacilityConfig(1.0 - other, 1.0 - eps, q)
        if welfare_closed_form(cfg, prefs).regime is Regime.INTERIOR:
            out.append((cfg, moved))
    return out


def verify_lemma_boundary(
    prefs: Preferences,
    n_samples: int = 200,
    eps: float = 1e-3,
    seed: int = 0,
    resolution: Optional[int] = 101,
) -> VerificationResult:
    """An endpoint facility with an interior split can always move inward profitably.

    Also checks that the solver's optima with an interior split keep both
    facilities strictly inside and apart (skipped when ``resolution`` is None).
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    worst = -math.inf
    worst_cfg = None
    for cfg, moved in sample_boundary_configs(prefs, n_samples, eps, rng):
        gap = welfare(cfg, prefs) - welfare(moved, prefs)
        if gap > worst:
            worst, worst_cfg = gap, cfg
    checks = {"inward_improves": (worst, -STRICT_MARGIN)}
    details = {"worst_config": worst_cfg.as_tuple(), "samples": n_samples, "eps": eps}
    if resolution is not None:
        report = solve(prefs, resolution)
        slack = math.inf
        for o in report.optima:
            c = o.config
            if welfare_closed_form(c, prefs).regime is Regime.INTERIOR:
                slack = min(slack, c.a, 1.0 - c.b, c.b - c.a)
        # no interior optimum means nothing to check
        checks["interior_optima_unconstrained"] = (-slack, -STRICT_MARGIN)
        details["optima"] = [o.config.as_tuple() for o in report.optima]
    return VerificationResult(Claim.LEMMA_BOUNDARY, prefs.theta, prefs.gamma, checks, details)


def representative(report: SolveReport) -> FacilityConfig:
    """Mirror-normalised optimum: the first optimum reflected so that ``q <= 1/2``."""
    cfg = report.optima[0].config
    return cfg if cfg.q <= 0.5 else cfg.mirror()


def sweep_row(report: SolveReport) -> SweepRow:
    cfg = representative(report)
    wv = welfare_closed_form(cfg, report.prefs)
    return SweepRow(report.prefs.theta, cfg.a, cfg.b, cfg.q, wv.jhat_used, wv.value, report.regime)


def sweep_theta(
    theta_min: float,
    theta_max: float,
    steps: int,
    gamma: float = 1.0,
    resolution: int = DEFAULT_RESOLUTION,
    tol: float = DEFAULT_TOL,
    workers: Optional[int] = None,
) -> list[SweepRow]:
    if not (0 < theta_min < theta_max):
        raise ValueError("need 0 < theta_min < theta_max")
    if steps < 2:
        raise ValueError("steps must be >= 2")
    thetas = np.linspace(theta_min, theta_max, steps)

    def one(theta):
        return sweep_row(solve(Preferences(float(theta), gamma), resolution, tol))

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, thetas))


def detect_threshold(
    gamma: float,
    bracket: tuple[float, float],
    tol: float = 1e-4,
    resolution: int = DEFAULT_RESOLUTION,
) -> float:
    """Bisect on the structural label of the optimum to locate a regime change.

    The bracket must contain exactly one change; endpoints with the same label
    raise ``ValueError``.
    """
    lo, hi = bracket
    if not (0 < lo < hi):
        raise ValueError(f"bad bracket {bracket}")

    def label(theta: float) -> Structure:
        prefs = Preferences(theta, gamma)
        return classify(solve(prefs, resolution).optima[0].config, prefs)

    label_lo, label_hi = label(lo), label(hi)
    if label_lo == label_hi:
        raise ValueError(f"no regime change in [{lo}, {hi}]: both ends are {label_lo.value}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if label(mid) == label_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)

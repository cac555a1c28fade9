"""Global welfare maximisation over facility configurations.

``solve`` pools three sources: the closed-form stationary candidates (known for
``gamma`` of 1 and 1/2), an exhaustive lattice search, and a derivative-free
polish of the lattice winner.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .model import FacilityConfig, Preferences, indifferent_point
from .welfare import welfare, welfare_array

log = logging.getLogger(__name__)

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
THEOREM2_THETA_MAX = 1.0 / (4.0 * math.sqrt(2.0))
TIE_TOL = 1e-12  # welfare gap below which optima are tied
SAME_CONFIG_TOL = 1e-6
STRUCTURE_TOL = 1e-6
DEFAULT_RESOLUTION = 201
DEFAULT_TOL = 1e-8
MAX_SWEEPS = 5000


class Family(str, Enum):
    INTERIOR_SYMMETRIC = "InteriorSymmetric"  # h=1
    LOW_Q_LEFT = "LowQLeft"  # h=2
    HIGH_Q_LEFT = "HighQLeft"  # h=3
    CORNER_ALL_RIGHT = "CornerAllRight"  # h=4
    CORNER_ALL_LEFT = "CornerAllLeft"  # h=5
    NUMERICAL = "Numerical"  # lattice search + refinement


FAMILY_INDEX = {
    Family.INTERIOR_SYMMETRIC: 1,
    Family.LOW_Q_LEFT: 2,
    Family.HIGH_Q_LEFT: 3,
    Family.CORNER_ALL_RIGHT: 4,
    Family.CORNER_ALL_LEFT: 5,
}


class Structure(str, Enum):
    SEGREGATED = "Segregated"
    SINGLE_FACILITY = "SingleFacility"
    SYMMETRIC = "Symmetric"
    ASYMMETRIC = "Asymmetric"


@dataclass(frozen=True)
class Candidate:
    """A stationary or numerically found configuration.

    For the corner families, ``config`` is the canonical member with both
    facilities at 1/2 and ``free_range`` is the interval swept by the empty
    facility (``a`` for CornerAllRight, ``b`` for CornerAllLeft) over which
    welfare is constant.
    """

    config: FacilityConfig
    family: Family
    welfare: float
    valid_for_theta: tuple[float, float] = (0.0, math.inf)
    free_range: Optional[tuple[float, float]] = None
    converged: bool = True

    def mirror(self) -> "Candidate":
        mirrored = {
            Family.LOW_Q_LEFT: Family.HIGH_Q_LEFT,
            Family.HIGH_Q_LEFT: Family.LOW_Q_LEFT,
            Family.CORNER_ALL_RIGHT: Family.CORNER_ALL_LEFT,
            Family.CORNER_ALL_LEFT: Family.CORNER_ALL_RIGHT,
        }.get(self.family, self.family)
        free = None
        if self.free_range is not None:
            free = (1.0 - self.free_range[1], 1.0 - self.free_range[0])
        return Candidate(
            self.config.mirror(), mirrored, self.welfare, self.valid_for_theta, free, self.converged
        )


@dataclass
class SolveReport:
    prefs: Preferences
    optima: list[Candidate]
    welfare_star: float
    oracle_config: FacilityConfig
    oracle_welfare: float
    agreement: float
    refined: Candidate
    structure: Structure
    regime: str
    candidates: list[Candidate] = field(default_factory=list)

    @property
    def best(self) -> Candidate:
        return self.optima[0]


def has_analytic_candidates(gamma: float) -> bool:
    return gamma in (1.0, 0.5)


def _corner_free_range(theta: float) -> tuple[float, float]:
    # the empty facility at a serves nobody only while a**2 >= 1/4 - theta
    return (math.sqrt(max(0.0, 0.25 - theta)), 0.5)


def candidate_stationary(prefs: Preferences) -> list[Candidate]:
    """Closed-form solutions of the first-order conditions.

    Returns an empty list when ``gamma`` is neither 1 nor 1/2; callers then
    rely on the numerical search alone.
    """
    if not has_analytic_candidates(prefs.gamma):
        return []
    theta = prefs.theta

    def make(a, b, q, family, valid=(0.0, math.inf), free=None):
        cfg = FacilityConfig(a, b, q)
        return Candidate(cfg, family, welfare(cfg, prefs), valid, free)

    out = [make(0.25, 0.75, 0.5, Family.INTERIOR_SYMMETRIC)]
    if prefs.gamma == 1.0 and theta < 0.25:
        out.append(make(0.25 - theta, 0.75 - theta, 0.0, Family.LOW_Q_LEFT, (0.0, 0.25)))
        out.append(make(0.25 + theta, 0.75 + theta, 1.0, Family.HIGH_Q_LEFT, (0.0, 0.25)))
    lo, hi = _corner_free_range(theta)
    out.append(make(0.5, 0.5, 0.0, Family.CORNER_ALL_RIGHT, free=(lo, hi)))
    out.append(make(0.5, 0.5, 1.0, Family.CORNER_ALL_LEFT, free=(1.0 - hi, 1.0 - lo)))
    return out


def lattice(resolution: int) -> np.ndarray:
    return np.arange(resolution, dtype=float) / (resolution - 1)


def grid_search(
    prefs: Preferences, resolution: int = DEFAULT_RESOLUTION, workers: Optional[int] = None
) -> Candidate:
    """Best lattice point with ``a <= b``; ties go to the smallest ``(a, b, q)``.

    Rows of constant ``a`` are evaluated concurrently and reduced in order, so
    the answer does not depend on scheduling.
    """
    if resolution < 3:
        raise ValueError(f"resolution must be >= 3, got {resolution}")
    x = lattice(resolution)
    theta, gamma = prefs.theta, prefs.gamma

    def row(ia: int):
        w = welfare_array(x[ia], x[ia:, None], x[None, :], theta, gamma)
        k = int(np.argmax(w))
        ib, iq = divmod(k, resolution)
        return float(w.flat[k]), ia, ia + ib, iq

    workers = workers or min(8, os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(row, range(resolution)))
    best = rows[0]
    for r in rows[1:]:
        if r[0] > best[0]:
            best = r
    w, ia, ib, iq = best
    cfg = FacilityConfig(float(x[ia]), float(x[ib]), float(x[iq]))
    return Candidate(cfg, Family.NUMERICAL, welfare(cfg, prefs))


def golden_max(f, lo: float, hi: float, tol: float, max_iter: int = 200):
    """Maximise ``f`` on ``[lo, hi]`` by golden-section search.

    The endpoints are compared with the interior result, so a maximum sitting
    on the boundary is returned exactly.  Returns ``(x, f(x))``.
    """
    x1 = hi - INV_PHI * (hi - lo)
    x2 = lo + INV_PHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    a, b = lo, hi
    it = 0
    while b - a > tol and it < max_iter:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
        it += 1
    best = (x1, f1) if f1 >= f2 else (x2, f2)
    for edge in (lo, hi):
        fe = f(edge)
        if fe > best[1]:
            best = (edge, fe)
    return best


def _project(x: list[float]) -> list[float]:
    a = min(1.0, max(0.0, x[0]))
    b = min(1.0, max(a, x[1]))
    q = min(1.0, max(0.0, x[2]))
    return [a, b, q]


def refine(
    prefs: Preferences,
    start: FacilityConfig,
    tol: float = DEFAULT_TOL,
    max_sweeps: int = MAX_SWEEPS,
) -> Candidate:
    """Local derivative-free ascent from ``start``.

    Each sweep runs a golden-section search on ``a``, ``b`` and ``q`` in turn
    within a window around the current point, clipped to the feasible box,
    followed by a line search along the sweep's net displacement to cut down
    zig-zagging along ridges.  Stops once a sweep moves no coordinate by more
    than ``tol``; if ``max_sweeps`` is hit first the best point so far is
    returned with ``converged=False``.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")

    def w(p):
        return welfare(FacilityConfig(*p), prefs)

    x = list(start.as_tuple())
    fx = w(x)
    window = 0.05
    converged = False
    for _ in range(max_sweeps):
        x_old = list(x)
        for k in range(3):
            lo = (0.0, x[0], 0.0)[k]
            hi = (x[1], 1.0, 1.0)[k]
            left, right = max(lo, x[k] - window), min(hi, x[k] + window)
            if right - left <= 0.0:
                continue

            def along(t, k=k):
                y = list(x)
                y[k] = t
                return w(y)

            t, ft = golden_max(along, left, right, tol * 0.1)
            if ft > fx:
                x[k], fx = t, ft
        step = [xi - oi for xi, oi in zip(x, x_old)]
        moved = max(abs(s) for s in step)
        if moved <= tol:
            converged = True
            break
        base = list(x)

        def extrapolate(t):
            return w(_project([bi + t * si for bi, si in zip(base, step)]))

        t, ft = golden_max(extrapolate, 0.0, 4.0, tol)
        if ft > fx:
            x, fx = _project([bi + t * si for bi, si in zip(base, step)]), ft
        window = min(0.25, max(4.0 * moved, 10.0 * tol))
    else:
        log.warning("refine hit the sweep cap (%d) before reaching tol=%g", max_sweeps, tol)
    cfg = FacilityConfig(*x)
    return Candidate(cfg, Family.NUMERICAL, welfare(cfg, prefs), converged=converged)


def _all_served(c: Candidate, prefs: Preferences):
    """``(side, q, location)`` when one facility serves everyone, else ``None``."""
    jhat = indifferent_point(c.config, prefs).jhat
    if jhat <= 0.0:
        return ("B", c.config.q, c.config.b)
    if jhat >= 1.0:
        return ("A", c.config.q, c.config.a)
    return None


def _same_optimum(c1: Candidate, c2: Candidate, prefs: Preferences) -> bool:
    if c1.config.distance(c2.config) <= SAME_CONFIG_TOL:
        return True
    s1, s2 = _all_served(c1, prefs), _all_served(c2, prefs)
    if s1 is None or s2 is None:
        return False
    return (
        s1[0] == s2[0]
        and abs(s1[1] - s2[1]) <= SAME_CONFIG_TOL
        and abs(s1[2] - s2[2]) <= SAME_CONFIG_TOL
    )


def classify(config: FacilityConfig, prefs: Preferences) -> Structure:
    """Structural label of a configuration, robust to refinement noise."""
    jhat = indifferent_point(config, prefs).jhat
    if jhat <= STRUCTURE_TOL or jhat >= 1.0 - STRUCTURE_TOL:
        return Structure.SINGLE_FACILITY
    if config.q <= STRUCTURE_TOL or config.q >= 1.0 - STRUCTURE_TOL:
        return Structure.SEGREGATED
    if abs(config.q - 0.5) <= STRUCTURE_TOL and abs(config.a + config.b - 1.0) <= STRUCTURE_TOL:
        return Structure.SYMMETRIC
    return Structure.ASYMMETRIC


def characterized(prefs: Preferences) -> bool:
    """Whether a closed-form optimum is known for these preferences."""
    if prefs.gamma == 1.0:
        return True
    return prefs.gamma == 0.5 and prefs.theta < THEOREM2_THETA_MAX - 1e-12


def solve(
    prefs: Preferences,
    resolution: int = DEFAULT_RESOLUTION,
    tol: float = DEFAULT_TOL,
    workers: Optional[int] = None,
) -> SolveReport:
    cands = candidate_stationary(prefs)
    grid = grid_search(prefs, resolution, workers)
    refined = refine(prefs, grid.config, tol)
    pool = cands + [refined, refined.mirror()]
    w_star = max(c.welfare for c in pool)
    optima: list[Candidate] = []
    for c in pool:
        if c.welfare < w_star - TIE_TOL:
            continue
        if not any(_same_optimum(c, o, prefs) for o in optima):
            optima.append(c)
    structure = classify(optima[0].config, prefs)
    regime = structure.value if characterized(prefs) else "Empirical"
    log.debug("theta=%g gamma=%g: %d optima, W*=%.15g", prefs.theta, prefs.gamma, len(optima), w_star)
    return SolveReport(
        prefs=prefs,
        optima=optima,
        welfare_star=w_star,
        oracle_config=grid.config,
        oracle_welfare=grid.welfare,
        agreement=abs(w_star - grid.welfare),
        refined=refined,
        structure=structure,
        regime=regime,
        candidates=cands,
    )

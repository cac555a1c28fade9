"""Domain types, individual utility and the indifferent individual.

Individuals are spread uniformly over [0, 1].  Two facilities sit at ``a <= b``
with qualities ``q`` and ``1 - q``; an individual at ``i`` who uses the facility
at ``x`` with quality ``qx`` gets ``theta * qx**gamma - (i - x)**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

# |a - b| below this is treated as coincident facilities
COINCIDENT_TOL = 1e-12
# utility gaps below this count as indifference in assign()
TIE_TOL = 1e-12


class Facility(str, Enum):
    A = "A"
    B = "B"


@dataclass(frozen=True)
class Preferences:
    """Common quality valuation ``theta`` and quality exponent ``gamma``.

    ``gamma = 1`` is linear utility in quality, ``gamma = 0.5`` the square-root
    case.  Other exponents in (0, 1) are supported but nothing is known about
    their optima in closed form.
    """

    theta: float
    gamma: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.theta) and self.theta > 0):
            raise ValueError(f"theta must be positive, got {self.theta!r}")
        if not (0 < self.gamma <= 1):
            raise ValueError(f"gamma must lie in (0, 1], got {self.gamma!r}")

    def g(self, q: float) -> float:
        """Quality response ``q**gamma`` (with ``0**gamma == 0``)."""
        return q**self.gamma


@dataclass(frozen=True)
class FacilityConfig:
    a: float
    b: float
    q: float

    def __post_init__(self):
        if not (0.0 <= self.a <= self.b <= 1.0):
            raise ValueError(f"need 0 <= a <= b <= 1, got a={self.a!r}, b={self.b!r}")
        if not (0.0 <= self.q <= 1.0):
            raise ValueError(f"need 0 <= q <= 1, got q={self.q!r}")

    def mirror(self) -> "FacilityConfig":
        """Reflection ``i -> 1 - i``; swaps the roles of the two facilities."""
        return FacilityConfig(1.0 - self.b, 1.0 - self.a, 1.0 - self.q)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.q)

    def distance(self, other: "FacilityConfig") -> float:
        return max(abs(self.a - other.a), abs(self.b - other.b), abs(self.q - other.q))


@dataclass(frozen=True)
class IndifferencePoint:
    jhat: float
    raw: Optional[float] = None
    degenerate: bool = False


def _check_unit(name: str, value: float) -> None:
    if not (0.0 <= value <= 1.0):
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")


def utility(i: float, x: float, qx: float, prefs: Preferences) -> float:
    """Utility of the individual at ``i`` using a facility at ``x`` of quality ``qx``."""
    _check_unit("i", i)
    _check_unit("x", x)
    _check_unit("qx", qx)
    return prefs.theta * prefs.g(qx) - (i - x) ** 2


def raw_indifference(config: FacilityConfig, prefs: Preferences) -> Optional[float]:
    """Unclamped solution of ``u(i, a) == u(i, b)``; ``None`` when the facilities coincide."""
    a, b, q = config.a, config.b, config.q
    if abs(a - b) < COINCIDENT_TOL:
        return None
    d = prefs.g(q) - prefs.g(1.0 - q)
    return (a * a - b * b - prefs.theta * d) / (2.0 * (a - b))


def indifferent_point(config: FacilityConfig, prefs: Preferences) -> IndifferencePoint:
    """Split point between the two catchment areas.

    Individuals in ``[0, jhat]`` use the facility at ``a`` and those in
    ``[jhat, 1]`` the facility at ``b``.  For coincident facilities everyone goes
    to the better one.  Coincident facilities of equal quality have no unique
    split; ``jhat = 0`` is returned with ``degenerate=True``.
    """
    raw = raw_indifference(config, prefs)
    if raw is None:
        if config.q < 0.5:
            return IndifferencePoint(0.0)
        if config.q > 0.5:
            return IndifferencePoint(1.0)
        return IndifferencePoint(0.0, degenerate=True)
    return IndifferencePoint(min(1.0, max(0.0, raw)), raw=raw)


def indifferent_point_array(a, b, q, theta: float, gamma: float):
    """Vectorised ``jhat`` (same branch rules as :func:`indifferent_point`).

    Returns ``(jhat, coincident)`` arrays; degenerate entries get ``jhat = 0``.
    """
    a, b, q = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (a, b, q)))
    coincident = np.abs(a - b) < COINCIDENT_TOL
    d = q**gamma - (1.0 - q) ** gamma
    denom = np.where(coincident, 1.0, 2.0 * (a - b))
    raw = (a * a - b * b - theta * d) / denom
    jhat = np.clip(raw, 0.0, 1.0)
    jhat = np.where(coincident, np.where(q > 0.5, 1.0, 0.0), jhat)
    return jhat, coincident


def assign(i: float, config: FacilityConfig, prefs: Preferences) -> Facility:
    """Facility chosen by the individual at ``i``.

    Utility gaps within ``TIE_TOL`` are ties, resolved towards ``A`` iff
    ``i <= jhat`` so that assignment agrees with the integration bounds.
    """
    ua = utility(i, config.a, config.q, prefs)
    ub = utility(i, config.b, 1.0 - config.q, prefs)
    if ua - ub > TIE_TOL:
        return Facility.A
    if ub - ua > TIE_TOL:
        return Facility.B
    return Facility.A if i <= indifferent_point(config, prefs).jhat else Facility.B

"""Welfare-maximising location and quality of two public facilities on [0, 1]."""

from .model import (
    Facility,
    FacilityConfig,
    IndifferencePoint,
    Preferences,
    assign,
    indifferent_point,
    utility,
)
from .optimize import Candidate, Family, SolveReport, candidate_stationary, grid_search, refine, solve
from .theorems import (
    detect_threshold,
    sweep_theta,
    verify_lemma_boundary,
    verify_remark,
    verify_theorem1,
    verify_theorem2,
)
from .welfare import (
    WelfareGradient,
    WelfareValue,
    welfare,
    welfare_closed_form,
    welfare_gradient,
    welfare_quadrature,
)

__version__ = "0.1.0"

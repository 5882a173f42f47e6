"""Transition probabilities for non-self-adjoint Hamiltonians under three metrics."""

from .dynamics import (
    Metric,
    ProbabilityCurve,
    StateExpansion,
    Term,
    evolve,
    inner_metric,
    norm_metric,
    probability_curve,
    spectral_coefficients,
    to_polygauss,
    transition_probability,
)
from .errors import DIVERGENT, is_divergent
from .models import MODELS, EqhoParams, LandauParams, SwansonParams

__version__ = "0.1.0"

__all__ = [
    "Metric",
    "ProbabilityCurve",
    "StateExpansion",
    "Term",
    "evolve",
    "inner_metric",
    "norm_metric",
    "probability_curve",
    "spectral_coefficients",
    "to_polygauss",
    "transition_probability",
    "DIVERGENT",
    "is_divergent",
    "MODELS",
    "EqhoParams",
    "SwansonParams",
    "LandauParams",
]

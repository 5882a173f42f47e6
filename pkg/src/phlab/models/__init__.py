"""Concrete non-self-adjoint models."""

from .eqho import EqhoParams
from .landau import LandauParams
from .swanson import SwansonParams

MODELS = {
    "eqho": EqhoParams,
    "swanson": SwansonParams,
    "landau": LandauParams,
}

__all__ = ["EqhoParams", "SwansonParams", "LandauParams", "MODELS"]

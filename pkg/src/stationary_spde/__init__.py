"""Stationary solutions of linear SPDEs defined through symbol functions."""

from .densities import Atom, ConeComponent, SourceTerm, SpectralDensity, matern_density, white_density
from .models import ModelSpec, build_model, model_from_dict, solution_spectral_density
from .symbols import FrequencyPoint, Symbol, evolution_symbol

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "ConeComponent",
    "FrequencyPoint",
    "ModelSpec",
    "SourceTerm",
    "SpectralDensity",
    "Symbol",
    "build_model",
    "evolution_symbol",
    "matern_density",
    "model_from_dict",
    "solution_spectral_density",
    "white_density",
]

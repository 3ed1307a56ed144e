"""Six gradient-free optimizers behind one ask-tell interface.

All constructors share the signature
``(dim, hyperparams, bounds, seed, x0=None)`` with ``bounds`` a
(lower, upper) pair of physical vectors; candidates are asked and told in
physical units while the algorithms run in the normalized unit cube.
"""

from __future__ import annotations

from dataclasses import asdict, fields

from .annealing import AnnealingParams, SimulatedAnnealingOptimizer
from .base import AskTellOptimizer, clamp_to_bounds
from .cmaes import CmaesOptimizer, CmaesParams, default_population_size
from .differential_evolution import (
    DifferentialEvolutionOptimizer,
    DifferentialEvolutionParams,
)
from .nelder_mead import NelderMeadOptimizer, NelderMeadParams
from .one_plus_one import OnePlusOneOptimizer, OnePlusOneParams
from .powell import PowellOptimizer, PowellParams

ALGORITHMS = {
    "cmaes": (CmaesOptimizer, CmaesParams),
    "nelder_mead": (NelderMeadOptimizer, NelderMeadParams),
    "powell": (PowellOptimizer, PowellParams),
    "one_plus_one": (OnePlusOneOptimizer, OnePlusOneParams),
    "differential_evolution": (DifferentialEvolutionOptimizer, DifferentialEvolutionParams),
    "simulated_annealing": (SimulatedAnnealingOptimizer, AnnealingParams),
}

DISPLAY_NAMES = {
    "cmaes": "CMA-ES",
    "nelder_mead": "Nelder-Mead",
    "powell": "Powell",
    "one_plus_one": "1+1-ES",
    "differential_evolution": "DE",
    "simulated_annealing": "SA",
}


def hyperparams_class(algorithm: str):
    try:
        return ALGORITHMS[algorithm][1]
    except KeyError:
        raise ValueError(f"unknown algorithm {algorithm!r}") from None


def make_hyperparams(algorithm: str, **overrides):
    return hyperparams_class(algorithm)(**overrides)


def hyperparams_to_dict(params) -> dict:
    return asdict(params)


def hyperparams_field_names(algorithm: str) -> tuple:
    return tuple(f.name for f in fields(hyperparams_class(algorithm)))


def make_optimizer(
    algorithm: str, dim, bounds, seed, x0=None, hyperparams=None
) -> AskTellOptimizer:
    """Construct a seeded optimizer; hyperparams may be an instance or dict."""
    try:
        cls, params_cls = ALGORITHMS[algorithm]
    except KeyError:
        raise ValueError(f"unknown algorithm {algorithm!r}") from None
    if hyperparams is None:
        hyperparams = params_cls()
    elif isinstance(hyperparams, dict):
        hyperparams = params_cls(**hyperparams)
    elif not isinstance(hyperparams, params_cls):
        raise TypeError(f"{algorithm} expects {params_cls.__name__}")
    lower, upper = bounds
    return cls(dim, lower, upper, seed, x0=x0, params=hyperparams)


def cmaes_new(dim, hyperparams, bounds, seed, x0=None):
    return make_optimizer("cmaes", dim, bounds, seed, x0, hyperparams)


def nelder_mead_new(dim, hyperparams, bounds, seed, x0=None):
    return make_optimizer("nelder_mead", dim, bounds, seed, x0, hyperparams)


def powell_new(dim, bounds, seed, x0=None):
    return make_optimizer("powell", dim, bounds, seed, x0, PowellParams())


def one_plus_one_es_new(dim, hyperparams, bounds, seed, x0=None):
    return make_optimizer("one_plus_one", dim, bounds, seed, x0, hyperparams)


def differential_evolution_new(dim, hyperparams, bounds, seed, x0=None):
    return make_optimizer("differential_evolution", dim, bounds, seed, x0, hyperparams)


def simulated_annealing_new(dim, hyperparams, bounds, seed, x0=None):
    return make_optimizer("simulated_annealing", dim, bounds, seed, x0, hyperparams)


__all__ = [
    "ALGORITHMS",
    "DISPLAY_NAMES",
    "AskTellOptimizer",
    "AnnealingParams",
    "CmaesParams",
    "DifferentialEvolutionParams",
    "NelderMeadParams",
    "OnePlusOneParams",
    "PowellParams",
    "clamp_to_bounds",
    "cmaes_new",
    "default_population_size",
    "differential_evolution_new",
    "hyperparams_class",
    "hyperparams_field_names",
    "hyperparams_to_dict",
    "make_hyperparams",
    "make_optimizer",
    "nelder_mead_new",
    "one_plus_one_es_new",
    "powell_new",
    "simulated_annealing_new",
]

"""Analytical benchmark functions for fast optimizer checks.

A small stand-in suite covering the failure modes that matter for
calibration: a convex baseline (sphere), a curved narrow valley
(Rosenbrock), dense local minima (Rastrigin), a nearly flat outer region
(Ackley), and additive Gaussian noise (noisy sphere).  Domains follow the
usual black-box-benchmarking conventions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

DIMENSIONS = (2, 10, 82)


@dataclass(frozen=True)
class AnalyticFunction:
    name: str
    dimension: int
    lower: np.ndarray
    upper: np.ndarray
    global_minimum_location: np.ndarray
    global_minimum_value: float
    evaluate: Callable[[np.ndarray], float] = field(repr=False)
    noise_sigma: float = 0.0


def sphere(x):
    x = np.asarray(x, dtype=float)
    return float(np.sum(x**2))


def rosenbrock(x):
    x = np.asarray(x, dtype=float)
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))


def rastrigin(x):
    x = np.asarray(x, dtype=float)
    return float(10.0 * x.size + np.sum(x**2 - 10.0 * np.cos(2.0 * np.pi * x)))


def ackley(x):
    x = np.asarray(x, dtype=float)
    return float(
        -20.0 * np.exp(-0.2 * np.sqrt(np.mean(x**2)))
        - np.exp(np.mean(np.cos(2.0 * np.pi * x)))
        + 20.0
        + np.e
    )


def evaluate_with_noise(f, x, noise_sigma, rng: np.random.Generator) -> float:
    """f(x) plus one scaled standard-normal draw."""
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be >= 0")
    value = f(x) if callable(f) else f.evaluate(x)
    if noise_sigma == 0.0:
        return float(value)
    return float(value + noise_sigma * rng.standard_normal())


def _box(dim, half):
    return np.full(dim, -half), np.full(dim, half)


def _make(name, dim, lower, upper, fn, noise_sigma=0.0, minimum=None, min_value=0.0):
    return AnalyticFunction(
        name=name,
        dimension=dim,
        lower=np.asarray(lower, dtype=float),
        upper=np.asarray(upper, dtype=float),
        global_minimum_location=(
            np.zeros(dim) if minimum is None else np.asarray(minimum, dtype=float)
        ),
        global_minimum_value=min_value,
        evaluate=fn,
        noise_sigma=noise_sigma,
    )


def suite(dimensions=DIMENSIONS) -> list:
    """All functions at each requested dimension."""
    functions = []
    for d in dimensions:
        functions.append(
            _make("sphere", d, np.full(d, -5.0), np.full(d, 10.0), sphere)
        )
        functions.append(
            _make(
                "rosenbrock",
                d,
                np.full(d, -5.0),
                np.full(d, 10.0),
                rosenbrock,
                minimum=np.ones(d),
            )
        )
        functions.append(_make("rastrigin", d, *_box(d, 5.12), rastrigin))
        functions.append(_make("ackley", d, *_box(d, 32.768), ackley))
        functions.append(
            _make(
                "noisy_sphere",
                d,
                np.full(d, -5.0),
                np.full(d, 10.0),
                sphere,
                noise_sigma=0.1,
            )
        )
    return functions


def by_name(name: str, dimension: int) -> AnalyticFunction:
    for f in suite((dimension,)):
        if f.name == name:
            return f
    raise ValueError(f"unknown analytic function {name!r}")

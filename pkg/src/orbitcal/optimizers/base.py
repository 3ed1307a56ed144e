"""Ask-tell optimizer base: normalized box, batching, deterministic seeding.

Every algorithm runs in the normalized cube [0,1]^dim; physical bounds
enter only through the affine map applied at the ask/tell boundary, so
step-size hyperparameters are dimensionless and comparable across search
spaces.  Candidates outside the cube are clamped (counted per run).

Algorithms are written as generators that yield candidate batches (in
normalized coordinates) and receive the corresponding losses back at the
yield point; the base class drives the generator and enforces the strict
ask/tell alternation.
"""

from __future__ import annotations

import csv

import numpy as np


class AskTellOptimizer:
    """Base class; subclasses implement the ``_run`` generator."""

    def __init__(self, dim, lower, upper, seed, x0=None):
        if dim < 1:
            raise ValueError("dimension must be >= 1")
        self.dimension = int(dim)
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        if self.lower.shape != (dim,) or self.upper.shape != (dim,):
            raise ValueError("bounds must be length-dim vectors")
        if not np.all(np.isfinite(self.lower)) or not np.all(np.isfinite(self.upper)):
            raise ValueError("bounds must be finite")
        if np.any(self.lower >= self.upper):
            raise ValueError("lower bounds must be strictly below upper bounds")
        self._rng = np.random.default_rng(seed)
        if x0 is None:
            self._u0 = np.full(dim, 0.5)
        else:
            x0 = np.asarray(x0, dtype=float)
            self._u0 = np.clip(self._to_unit(x0), 0.0, 1.0)
        self.evals_used = 0
        self.clamp_events = 0
        self.warning_flags = []
        self.diagnostics = []  # per-iteration internals, see record_diagnostics
        self._best_loss = np.inf
        self._best_x = None
        self._gen = self._run()
        self._pending = None
        self._awaiting_tell = False
        self._started = False

    # -- affine map ---------------------------------------------------
    def _to_unit(self, x):
        return (x - self.lower) / (self.upper - self.lower)

    def _to_physical(self, u):
        return self.lower + u * (self.upper - self.lower)

    def _clamp_unit(self, u):
        """Clip one candidate into the cube, counting clamp events."""
        clipped = np.clip(u, 0.0, 1.0)
        if not np.array_equal(clipped, u):
            self.clamp_events += 1
        return clipped

    # -- ask/tell contract --------------------------------------------
    def ask(self) -> np.ndarray:
        """Next candidate batch, shape (batch, dim), in physical units."""
        if self._awaiting_tell:
            raise RuntimeError("ask() called again before tell()")
        if not self._started:
            self._pending = np.atleast_2d(next(self._gen))
            self._started = True
        self._awaiting_tell = True
        return self._to_physical(self._pending)

    def tell(self, candidates, losses) -> None:
        if not self._awaiting_tell:
            raise RuntimeError("tell() without a preceding ask()")
        candidates = np.atleast_2d(np.asarray(candidates, dtype=float))
        losses = np.asarray(losses, dtype=float).reshape(-1)
        if candidates.shape != (self._pending.shape[0], self.dimension):
            raise ValueError("candidates do not match the last asked batch")
        if losses.size != candidates.shape[0]:
            raise ValueError("one loss per candidate required")
        for x, f in zip(candidates, losses):
            self.evals_used += 1
            if f < self._best_loss:
                self._best_loss = f
                self._best_x = x.copy()
        self._awaiting_tell = False
        self._pending = np.atleast_2d(self._gen.send(losses))

    def recommend(self) -> np.ndarray:
        """Best candidate told so far (physical units)."""
        if self._best_x is None:
            raise RuntimeError("recommend() before any tell()")
        return self._best_x.copy()

    @property
    def best_loss(self) -> float:
        return self._best_loss

    def _flag(self, message: str) -> None:
        self.warning_flags.append(message)

    def record_diagnostics(self, **values) -> None:
        self.diagnostics.append({"evals_used": self.evals_used, **values})

    def write_diagnostics_csv(self, path) -> None:
        """Per-iteration internals (step sizes, temperatures, ...) as CSV."""
        if not self.diagnostics:
            raise ValueError("no diagnostics recorded yet")
        names = list(self.diagnostics[0])
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(names)
            for row in self.diagnostics:
                writer.writerow([repr(row.get(n)) for n in names])

    def _run(self):
        raise NotImplementedError

    # helper for single-candidate algorithms: ``loss = yield from self._eval(u)``
    def _eval(self, u):
        losses = yield u[None, :]
        return float(losses[0])


def clamp_to_bounds(x, bounds):
    """Coordinate-wise clamp of x into (lower, upper)."""
    lower, upper = bounds
    return np.clip(np.asarray(x, dtype=float), lower, upper)

"""Control-pulse parameterizations and the optimizer-facing parameter space.

Two pulse families are supported: a Gaussian envelope with a
derivative-shaped quadrature correction (DRAG, low-dimensional) and a
piecewise-constant envelope pair (PWC, 41 in-phase + 41 quadrature steps,
82 free values).  Amplitudes are drive strengths in rad/s (they enter the
Hamiltonian directly); envelope times are seconds, carrier frequencies
linear Hz, phases radians.

Single-qubit gates reuse one base pulse: the phase selects the rotation
axis (X: +0, Y: +pi/2), a sign flip selects negative rotations, and pi
rotations double the amplitude.  The identity is the zero signal of the
same duration.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

TWO_PI = 2.0 * np.pi

# atomic gate tag -> (amplitude scale, phase offset)
GATE_MAP = {
    "Id": (0.0, 0.0),
    "X90p": (1.0, 0.0),
    "X90m": (-1.0, 0.0),
    "Y90p": (1.0, np.pi / 2),
    "Y90m": (-1.0, np.pi / 2),
    "X180": (2.0, 0.0),
    "Y180": (2.0, np.pi / 2),
}

ATOMIC_GATES = tuple(GATE_MAP)


@dataclass(frozen=True)
class DragParams:
    """Gaussian-with-derivative-correction pulse.

    ``drag_coeff`` has units of time: the quadrature is
    drag_coeff * amplitude * (envelope derivative), i.e. the coefficient
    absorbs the inverse anharmonicity.
    """

    amplitude: float
    drag_coeff: float
    drive_freq: float
    phase: float
    gate_time: float
    gauss_width: float

    def __post_init__(self):
        if self.gate_time <= 0:
            raise ValueError("gate_time must be positive")
        if self.gauss_width <= 0:
            raise ValueError("gauss_width must be positive")
        if not np.isfinite(self.amplitude):
            raise ValueError("amplitude must be finite")


@dataclass(frozen=True)
class PwcParams:
    """Piecewise-constant in-phase/quadrature envelope pair."""

    inphase_steps: np.ndarray
    quadrature_steps: np.ndarray
    drive_freq: float
    phase: float
    gate_time: float

    def __post_init__(self):
        object.__setattr__(
            self, "inphase_steps", np.asarray(self.inphase_steps, dtype=float)
        )
        object.__setattr__(
            self, "quadrature_steps", np.asarray(self.quadrature_steps, dtype=float)
        )
        if self.inphase_steps.ndim != 1 or self.inphase_steps.size == 0:
            raise ValueError("inphase_steps must be a non-empty vector")
        if self.inphase_steps.shape != self.quadrature_steps.shape:
            raise ValueError("in-phase and quadrature step counts must match")
        if self.gate_time <= 0:
            raise ValueError("gate_time must be positive")

    @property
    def num_steps(self) -> int:
        return self.inphase_steps.size


def _check_window(t, gate_time):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0) or np.any(t > gate_time):
        raise ValueError(f"time outside the pulse window [0, {gate_time}]")
    return t


def gaussian_envelope(t, p: DragParams):
    """Boundary-nulled Gaussian envelope: 0 at the edges, 1 at the center."""
    t = _check_window(t, p.gate_time)
    base = np.exp(-((t - p.gate_time / 2) ** 2) / (2 * p.gauss_width**2))
    floor = np.exp(-(p.gate_time**2) / (8 * p.gauss_width**2))
    return (base - floor) / (1.0 - floor)


def envelope_derivative(t, p: DragParams):
    """Analytic time derivative of the boundary-nulled Gaussian."""
    t = _check_window(t, p.gate_time)
    base = np.exp(-((t - p.gate_time / 2) ** 2) / (2 * p.gauss_width**2))
    floor = np.exp(-(p.gate_time**2) / (8 * p.gauss_width**2))
    return -(t - p.gate_time / 2) / p.gauss_width**2 * base / (1.0 - floor)


def drag_signal(t, p: DragParams):
    """In-phase Gaussian drive plus derivative-shaped quadrature."""
    carrier = TWO_PI * p.drive_freq
    t = _check_window(t, p.gate_time)
    inphase = p.amplitude * gaussian_envelope(t, p) * np.cos(carrier * t + p.phase)
    quad = (
        p.drag_coeff
        * p.amplitude
        * envelope_derivative(t, p)
        * np.sin(carrier * t + p.phase)
    )
    return inphase + quad


def pwc_signal(t, p: PwcParams):
    """Stepped in-phase/quadrature drive; step k covers [k, k+1)*gate_time/n."""
    t = _check_window(t, p.gate_time)
    n = p.num_steps
    k = np.clip((n * t / p.gate_time).astype(int), 0, n - 1)
    carrier = TWO_PI * p.drive_freq
    return p.inphase_steps[k] * np.cos(carrier * t + p.phase) + p.quadrature_steps[
        k
    ] * np.sin(carrier * t + p.phase)


def step_midpoints(gate_time: float, num_steps: int) -> np.ndarray:
    return gate_time * ((np.arange(num_steps) + 0.5) / num_steps)


def discretize_drag(p: DragParams, num_steps: int = 41) -> PwcParams:
    """Sample the DRAG envelopes at step midpoints into a PWC pulse."""
    mid = step_midpoints(p.gate_time, num_steps)
    return PwcParams(
        inphase_steps=p.amplitude * gaussian_envelope(mid, p),
        quadrature_steps=p.drag_coeff * p.amplitude * envelope_derivative(mid, p),
        drive_freq=p.drive_freq,
        phase=p.phase,
        gate_time=p.gate_time,
    )


def gate_pulse(gate: str, base):
    """Pulse parameters for one atomic gate derived from the base pulse.

    X gates keep the base phase, Y gates offset it by pi/2; negative
    rotations flip the amplitude sign; pi rotations double it; the
    identity zeroes it.
    """
    try:
        scale, offset = GATE_MAP[gate]
    except KeyError:
        raise ValueError(f"unknown atomic gate tag {gate!r}") from None
    if isinstance(base, DragParams):
        return replace(base, amplitude=scale * base.amplitude, phase=base.phase + offset)
    if isinstance(base, PwcParams):
        return replace(
            base,
            inphase_steps=scale * base.inphase_steps,
            quadrature_steps=scale * base.quadrature_steps,
            phase=base.phase + offset,
        )
    raise TypeError(f"unsupported pulse parameter type {type(base).__name__}")


def sample_signal(p, num_samples: int) -> np.ndarray:
    """Midpoint-sampled control values on a uniform grid over the gate."""
    t = p.gate_time * ((np.arange(num_samples) + 0.5) / num_samples)
    if isinstance(p, DragParams):
        return drag_signal(t, p)
    if isinstance(p, PwcParams):
        return pwc_signal(t, p)
    raise TypeError(f"unsupported pulse parameter type {type(p).__name__}")


@dataclass(frozen=True)
class ParameterSpace:
    """Search space: bounds, nominal point, and the vector <-> pulse map.

    DRAG mode exposes (amplitude, drag_coeff, detuning); detuning is the
    drive offset from the qubit frequency in Hz.  PWC mode exposes the
    2n step values with carrier settings inherited from the base pulse.
    """

    mode: str
    names: tuple
    lower: np.ndarray
    upper: np.ndarray
    nominal: np.ndarray
    base: DragParams | PwcParams
    qubit_frequency: float

    def __post_init__(self):
        for field in ("lower", "upper", "nominal"):
            object.__setattr__(self, field, np.asarray(getattr(self, field), float))
        if not (len(self.names) == self.lower.size == self.upper.size == self.nominal.size):
            raise ValueError("names, bounds and nominal must have equal length")
        if np.any(self.lower >= self.upper):
            raise ValueError("lower bounds must be strictly below upper bounds")
        if np.any(self.nominal < self.lower) or np.any(self.nominal > self.upper):
            raise ValueError("nominal point must lie within bounds")
        if self.mode not in ("drag", "pwc"):
            raise ValueError(f"unknown parameter-space mode {self.mode!r}")

    @property
    def dimension(self) -> int:
        return len(self.names)

    def clamp(self, x: np.ndarray) -> np.ndarray:
        return np.clip(np.asarray(x, dtype=float), self.lower, self.upper)

    def from_vector(self, x: np.ndarray):
        """Flat parameter vector -> pulse parameters for the base gate."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dimension,):
            raise ValueError(f"expected a length-{self.dimension} vector")
        if self.mode == "drag":
            return replace(
                self.base,
                amplitude=x[0],
                drag_coeff=x[1],
                drive_freq=self.qubit_frequency + x[2],
            )
        n = self.dimension // 2
        return replace(
            self.base, inphase_steps=x[:n].copy(), quadrature_steps=x[n:].copy()
        )

    def to_vector(self, p) -> np.ndarray:
        """Inverse of from_vector."""
        if self.mode == "drag":
            return np.array(
                [p.amplitude, p.drag_coeff, p.drive_freq - self.qubit_frequency]
            )
        return np.concatenate([p.inphase_steps, p.quadrature_steps])


def drag_parameter_space(
    base: DragParams,
    qubit_frequency: float,
    amplitude_bounds=(0.0, 8.0e8),
    drag_bounds=(-4.0e-9, 4.0e-9),
    detuning_bounds=(-2.0e7, 2.0e7),
) -> ParameterSpace:
    nominal = np.array(
        [base.amplitude, base.drag_coeff, base.drive_freq - qubit_frequency]
    )
    return ParameterSpace(
        mode="drag",
        names=("amplitude", "drag_coeff", "detuning"),
        lower=np.array([amplitude_bounds[0], drag_bounds[0], detuning_bounds[0]]),
        upper=np.array([amplitude_bounds[1], drag_bounds[1], detuning_bounds[1]]),
        nominal=nominal,
        base=base,
        qubit_frequency=qubit_frequency,
    )


def pwc_parameter_space(
    drag_base: DragParams,
    qubit_frequency: float,
    num_steps: int = 41,
    halfwidth_frac: float = 0.4,
) -> ParameterSpace:
    """82-dimensional space around the discretized DRAG solution.

    Bounds are a per-step box of half-width ``halfwidth_frac * |amplitude|``
    centered on the discretized nominal steps.
    """
    pwc = discretize_drag(drag_base, num_steps)
    nominal = np.concatenate([pwc.inphase_steps, pwc.quadrature_steps])
    halfwidth = halfwidth_frac * abs(drag_base.amplitude)
    if halfwidth <= 0:
        raise ValueError("PWC bounds require a nonzero base amplitude")
    names = tuple(
        f"step_i_{k:02d}" for k in range(num_steps)
    ) + tuple(f"step_q_{k:02d}" for k in range(num_steps))
    return ParameterSpace(
        mode="pwc",
        names=names,
        lower=nominal - halfwidth,
        upper=nominal + halfwidth,
        nominal=nominal,
        base=pwc,
        qubit_frequency=qubit_frequency,
    )

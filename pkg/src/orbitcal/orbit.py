"""ORBIT log-infidelity loss: random Clifford sequences closed to a target.

One loss evaluation compiles N fixed random Clifford sequences into atomic
pulses at the candidate parameters, propagates |0> through the three-level
physical gates, and returns ln(max(1 - mean survival, floor)).  Within a
run the sequences are drawn once from ``sequence_seed`` and reused for
every evaluation, so the loss is a deterministic function of the
parameters (modulo optional shot sampling); a resample-each-call mode
exists for noise-resistance studies.

Leakage is an error: the final three-level state is not renormalized, so
population in |2> simply never reaches the target projector.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field

import numpy as np

from .clifford import clifford_table, compile_sequence, generate_orbit_sequence
from .pulses import ATOMIC_GATES, ParameterSpace, gate_pulse, sample_signal
from .system import SystemConfig, drift_propagator, propagate_batch

TARGET_LEVEL = {"ground": 0, "excited": 1}


@dataclass(frozen=True)
class OrbitConfig:
    num_sequences: int = 20
    sequence_length: int = 20
    target: str = "ground"
    shots: int | None = None  # None: exact measurement
    sequence_seed: int = 7
    infidelity_floor: float = 1e-9
    resample_sequences: bool = False

    def __post_init__(self):
        if self.num_sequences < 1:
            raise ValueError("num_sequences must be >= 1")
        if self.sequence_length < 1:
            raise ValueError("sequence_length must be >= 1")
        if self.target not in TARGET_LEVEL:
            raise ValueError(f"unknown target {self.target!r}")
        if self.shots is not None and self.shots < 1:
            raise ValueError("shots must be >= 1 when finite")
        if not 0.0 < self.infidelity_floor < 1.0:
            raise ValueError("infidelity_floor must be in (0, 1)")


@dataclass(frozen=True)
class LossEvaluation:
    x: np.ndarray
    loss: float
    eval_index: int
    wall_time: float
    clamped: bool = False


def measure_population(psi: np.ndarray, target: str) -> float:
    """|<target|psi>|^2 with target in {ground, excited}; no renormalization."""
    return float(np.abs(psi[TARGET_LEVEL[target]]) ** 2)


def sample_shots(p: float, shots: int, rng: np.random.Generator) -> float:
    """Binomial estimate k/shots of a probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("probability must lie in [0, 1]")
    return float(rng.binomial(shots, p)) / shots


def draw_sequences(cfg: OrbitConfig, rng: np.random.Generator | None = None) -> list:
    rng = rng if rng is not None else np.random.default_rng(
        np.random.SeedSequence(cfg.sequence_seed)
    )
    return [
        generate_orbit_sequence(cfg.sequence_length, cfg.target, rng)
        for _ in range(cfg.num_sequences)
    ]


class OrbitLossEvaluator:
    """Reusable evaluator: fixed sequences, cached step grid and operators."""

    def __init__(self, cfg: OrbitConfig, space: ParameterSpace, system: SystemConfig):
        self.cfg = cfg
        self.space = space
        self.system = system
        gate_time = space.base.gate_time
        self.num_steps = max(1, int(round(gate_time / system.dt)))
        self._gate_time = gate_time
        self._id_gate = drift_propagator(system, gate_time)
        self._driven_tags = tuple(g for g in ATOMIC_GATES if g != "Id")
        self._sequences = None if cfg.resample_sequences else draw_sequences(cfg)
        self._decomps = tuple(e.decomposition for e in clifford_table())
        self.evals_used = 0

    def atomic_unitaries(self, x: np.ndarray) -> dict:
        """Propagators of the 7 atomic gates at (clamped) parameters x."""
        params = self.space.from_vector(self.space.clamp(x))
        signals = np.stack(
            [
                sample_signal(gate_pulse(tag, params), self.num_steps)
                for tag in self._driven_tags
            ]
        )
        gates = propagate_batch(self.system, signals, self._gate_time)
        out = {"Id": self._id_gate}
        out.update(zip(self._driven_tags, gates))
        return out

    def clifford_unitaries(self, x: np.ndarray) -> np.ndarray:
        """Physical 3x3 propagators of all 24 Cliffords at parameters x."""
        atomic = self.atomic_unitaries(x)
        out = np.empty((24, 3, 3), dtype=complex)
        for i, decomp in enumerate(self._decomps):
            u = atomic[decomp[0]]
            for tag in decomp[1:]:
                u = atomic[tag] @ u
            out[i] = u
        return out

    def survivals(self, sequences, cliff_u: np.ndarray) -> np.ndarray:
        """Target-state population after each sequence, ground start."""
        pops = np.empty(len(sequences))
        level = TARGET_LEVEL[self.cfg.target]
        for n, seq in enumerate(sequences):
            psi = np.zeros(3, dtype=complex)
            psi[0] = 1.0
            for k in seq.clifford_indices:
                psi = cliff_u[k] @ psi
            pops[n] = np.abs(psi[level]) ** 2
        return pops

    def evaluate(self, x: np.ndarray, rng: np.random.Generator | None = None) -> LossEvaluation:
        """Full loss evaluation; rng feeds shots and sequence resampling."""
        start = time.perf_counter()
        x = np.asarray(x, dtype=float)
        clamped = bool(np.any(x < self.space.lower) or np.any(x > self.space.upper))
        if self.cfg.resample_sequences:
            if rng is None:
                raise ValueError("resample_sequences mode requires an rng")
            sequences = draw_sequences(self.cfg, rng)
        else:
            sequences = self._sequences
        pops = self.survivals(sequences, self.clifford_unitaries(x))
        p_mean = float(np.clip(np.mean(pops), 0.0, 1.0))
        if self.cfg.shots is not None:
            if rng is None:
                raise ValueError("finite shots require an rng")
            p_mean = sample_shots(p_mean, self.cfg.shots, rng)
        loss = float(np.log(max(1.0 - p_mean, self.cfg.infidelity_floor)))
        self.evals_used += 1
        return LossEvaluation(
            x=x,
            loss=loss,
            eval_index=self.evals_used - 1,
            wall_time=time.perf_counter() - start,
            clamped=clamped,
        )


def orbit_loss(
    x: np.ndarray,
    cfg: OrbitConfig,
    space: ParameterSpace,
    system: SystemConfig,
    rng: np.random.Generator | None = None,
) -> LossEvaluation:
    """One-shot evaluation; prefer OrbitLossEvaluator for repeated calls."""
    return OrbitLossEvaluator(cfg, space, system).evaluate(x, rng)


@dataclass(frozen=True)
class LandscapeScan:
    param_a: str
    param_b: str
    values_a: np.ndarray
    values_b: np.ndarray
    loss: np.ndarray = field(repr=False)  # shape (len(values_a), len(values_b))


def landscape_scan(
    param_a: str,
    param_b: str,
    values_a,
    values_b,
    cfg: OrbitConfig,
    space: ParameterSpace,
    system: SystemConfig,
    rng: np.random.Generator | None = None,
) -> LandscapeScan:
    """Loss on the outer-product grid; all other parameters at nominal."""
    values_a = np.asarray(values_a, dtype=float)
    values_b = np.asarray(values_b, dtype=float)
    if values_a.size == 0 or values_b.size == 0:
        raise ValueError("landscape grid must be non-empty")
    names = list(space.names)
    ia, ib = names.index(param_a), names.index(param_b)
    if ia == ib:
        raise ValueError("scan parameters must differ")
    evaluator = OrbitLossEvaluator(cfg, space, system)
    loss = np.empty((values_a.size, values_b.size))
    for i, a in enumerate(values_a):
        for j, b in enumerate(values_b):
            x = space.nominal.copy()
            x[ia] = a
            x[ib] = b
            loss[i, j] = evaluator.evaluate(x, rng).loss
    return LandscapeScan(param_a, param_b, values_a, values_b, loss)


def write_landscape_csv(scan: LandscapeScan, path) -> None:
    """Row-major (param_a, param_b, loss) triples."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([scan.param_a, scan.param_b, "loss"])
        for i, a in enumerate(scan.values_a):
            for j, b in enumerate(scan.values_b):
                writer.writerow([repr(float(a)), repr(float(b)), repr(float(scan.loss[i, j]))])

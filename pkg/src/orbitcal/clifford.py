"""Single-qubit Clifford group, atomic-gate decompositions, ORBIT sequences.

The 24-element group is generated numerically as the closure of
{X90p, Y90p} under multiplication (global-phase-invariant matching), and
each element is decomposed into the shortest product over the atomic
alphabet {X90p, X90m, Y90p, Y90m, X180, Y180} (at most 3 gates; the
identity maps to the zero-amplitude Id gate).  The ideal representation
is 2x2 on the qubit subspace so that sequence inversion is exact and
leakage-free; physical imperfection is what the loss measures.

Sign convention: with the drive c(t) = A W(t) cos(w_d t + phi) entering
H with a plus sign, a phase-offset +pi/2 pulse implements
exp(+i theta/2 sigma_y); the tag Y90p denotes that matrix here.  All
group arithmetic is generated from the same table, so every sequence
identity below is internally consistent with the simulator.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .pulses import ATOMIC_GATES

PHASE_TOL = 1e-10

_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)


def _rot(axis: np.ndarray, angle: float) -> np.ndarray:
    return np.cos(angle / 2) * np.eye(2) - 1j * np.sin(angle / 2) * axis


ATOMIC_SU2 = {
    "Id": np.eye(2, dtype=complex),
    "X90p": _rot(_SX, np.pi / 2),
    "X90m": _rot(_SX, -np.pi / 2),
    "X180": _rot(_SX, np.pi),
    "Y90p": _rot(_SY, -np.pi / 2),
    "Y90m": _rot(_SY, np.pi / 2),
    "Y180": _rot(_SY, -np.pi),
}


def su2_fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """Global-phase-invariant overlap |tr(a' b)| / 2."""
    return abs(np.trace(np.conjugate(a.T) @ b)) / 2.0


def same_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = PHASE_TOL) -> bool:
    return su2_fidelity(a, b) > 1.0 - tol


@dataclass(frozen=True)
class CliffordElement:
    index: int
    ideal_su2: np.ndarray
    decomposition: tuple


@dataclass(frozen=True)
class OrbitSequence:
    """Clifford indices whose ideal product maps |0> to the target."""

    clifford_indices: tuple
    target: str

    def __post_init__(self):
        if self.target not in ("ground", "excited"):
            raise ValueError(f"unknown target {self.target!r}")

    @property
    def length(self) -> int:
        return len(self.clifford_indices)


def ideal_product(indices, table=None) -> np.ndarray:
    """Time-ordered ideal product: later gates multiply from the left."""
    table = table if table is not None else clifford_table()
    u = np.eye(2, dtype=complex)
    for k in indices:
        u = table[k].ideal_su2 @ u
    return u


def _closure(generators: dict) -> list:
    """BFS closure under multiplication, identity first, deterministic order."""
    elements = [np.eye(2, dtype=complex)]
    frontier = [np.eye(2, dtype=complex)]
    while frontier:
        new_frontier = []
        for u in frontier:
            for g in generators.values():
                cand = g @ u
                if not any(same_up_to_phase(cand, e) for e in elements):
                    elements.append(cand)
                    new_frontier.append(cand)
        frontier = new_frontier
    return elements


def _shortest_decompositions(elements: list) -> list:
    """BFS over atomic products; shortest tag tuple per element."""
    alphabet = [g for g in ATOMIC_GATES if g != "Id"]
    decomp = [None] * len(elements)

    def match(u):
        for i, e in enumerate(elements):
            if same_up_to_phase(u, e):
                return i
        raise RuntimeError("product left the group; table is inconsistent")

    decomp[match(np.eye(2))] = ("Id",)
    frontier = [((), np.eye(2, dtype=complex))]
    depth = 0
    while any(d is None for d in decomp):
        depth += 1
        if depth > 4:
            raise RuntimeError("some Clifford needs more than 4 atomic gates")
        new_frontier = []
        for tags, u in frontier:
            for g in alphabet:
                cand_tags = tags + (g,)
                cand = ATOMIC_SU2[g] @ u
                idx = match(cand)
                if decomp[idx] is None:
                    decomp[idx] = cand_tags
                    new_frontier.append((cand_tags, cand))
        frontier = new_frontier
    return decomp


@lru_cache(maxsize=1)
def _tables():
    elements = _closure({"X90p": ATOMIC_SU2["X90p"], "Y90p": ATOMIC_SU2["Y90p"]})
    if len(elements) != 24:
        raise RuntimeError(f"Clifford closure produced {len(elements)} elements")
    decomp = _shortest_decompositions(elements)
    table = tuple(
        CliffordElement(index=i, ideal_su2=elements[i], decomposition=decomp[i])
        for i in range(24)
    )

    def match(u):
        for e in table:
            if same_up_to_phase(u, e.ideal_su2):
                return e.index
        raise RuntimeError("product left the group; table is inconsistent")

    mult = np.empty((24, 24), dtype=np.int8)
    for a in range(24):
        for b in range(24):
            mult[a, b] = match(table[a].ideal_su2 @ table[b].ideal_su2)
    inv = np.empty(24, dtype=np.int8)
    for a in range(24):
        inv[a] = int(np.nonzero(mult[a] == 0)[0][0])
    # lowest-index Clifford flipping |0> -> |1> after element k
    flip = np.empty(24, dtype=np.int8)
    for k in range(24):
        for f in range(24):
            u = table[f].ideal_su2 @ table[k].ideal_su2
            if abs(u[1, 0]) > 1.0 - 1e-9:
                flip[k] = f
                break
        else:
            raise RuntimeError("no flipping Clifford found; table is inconsistent")
    return table, mult, inv, flip


def clifford_table() -> tuple:
    """The 24 CliffordElements, index 0 = identity."""
    return _tables()[0]


def multiply(a: int, b: int) -> int:
    """Index of (a applied after b), i.e. the product U_a @ U_b."""
    return int(_tables()[1][a, b])


def inverse(a: int) -> int:
    return int(_tables()[2][a])


def generate_orbit_sequence(l: int, target: str, rng: np.random.Generator) -> OrbitSequence:
    """l-1 uniform random Cliffords closed by the gate reaching the target.

    Ground target: the closing gate is the exact group inverse of the
    running product.  Excited target: the lowest-index Clifford whose
    composition with the running product maps |0> to |1> up to phase.
    """
    if l < 1:
        raise ValueError("sequence length must be >= 1")
    _, mult, inv, flip = _tables()
    random_part = rng.integers(0, 24, size=l - 1)
    acc = 0
    for k in random_part:
        acc = int(mult[k, acc])
    if target == "ground":
        closing = int(inv[acc])
    elif target == "excited":
        closing = int(flip[acc])
    else:
        raise ValueError(f"unknown target {target!r}")
    return OrbitSequence(
        clifford_indices=tuple(int(k) for k in random_part) + (closing,),
        target=target,
    )


def compile_sequence(seq: OrbitSequence) -> list:
    """Concatenated atomic-gate tags, in execution order."""
    table = clifford_table()
    gates = []
    for k in seq.clifford_indices:
        gates.extend(table[k].decomposition)
    return gates


def average_gates_per_clifford() -> float:
    return float(np.mean([len(e.decomposition) for e in clifford_table()]))


def dump_decomposition_csv(path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "gates"])
        for e in clifford_table():
            writer.writerow([e.index, " ".join(e.decomposition)])

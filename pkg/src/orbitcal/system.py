"""Three-level driven Duffing-oscillator simulator.

The model is the lowest three levels of an anharmonic (transmon-like)
oscillator with an X-quadrature drive,

    H(t) = w a'a + (d/2)(a'a - 1)a'a + c(t)(a' + a),

in angular units (rad/s).  Configuration frequencies are plain Hz and are
converted internally.  Propagation is done in the lab frame: the control
c(t) carries the full microwave carrier, sampled piecewise-constant at
interval midpoints, with one exact 3x3 matrix exponential per step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi

# Relative eigenvalue-gap threshold below which the closed-form propagator
# step falls back to numpy's eigh (divided differences lose accuracy).
_DEGENERACY_CUTOFF = 1e-6


@dataclass(frozen=True)
class SystemConfig:
    """Physical parameters of the simulated three-level system.

    Frequencies are linear (Hz).  ``anharmonicity`` is the 1->2 transition
    offset and is negative for a transmon; the default follows the
    transmon convention.  ``dt`` is the integration step and must resolve
    the carrier (w * dt < 0.1 cycles).
    """

    qubit_frequency: float = 4.8e9
    anharmonicity: float = -200e6
    levels: int = 3
    dt: float = 1.0 / (64 * 4.8e9)

    def __post_init__(self):
        if self.levels != 3:
            raise ValueError(f"only 3-level systems are supported, got {self.levels}")
        if self.qubit_frequency < 0:
            raise ValueError("qubit_frequency must be >= 0")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.qubit_frequency * self.dt >= 0.1:
            raise ValueError(
                "dt too coarse to resolve the carrier: need qubit_frequency*dt < 0.1"
            )


def build_drift_hamiltonian(cfg: SystemConfig) -> np.ndarray:
    """Drift Hamiltonian w a'a + (d/2)(a'a - 1)a'a in rad/s.

    Diagonal in the Fock basis with entries {0, w, 2w + d} (angular).
    """
    w = TWO_PI * cfg.qubit_frequency
    d = TWO_PI * cfg.anharmonicity
    n = np.arange(3, dtype=float)
    return np.diag(w * n + 0.5 * d * (n - 1.0) * n).astype(complex)


def build_drive_operator() -> np.ndarray:
    """Drive operator (a' + a) truncated to 3 levels."""
    x = np.zeros((3, 3), dtype=complex)
    x[0, 1] = x[1, 0] = 1.0
    x[1, 2] = x[2, 1] = np.sqrt(2.0)
    return x


def _eigvals_hermitian_3x3(h: np.ndarray) -> np.ndarray:
    """Eigenvalues of a stack of 3x3 Hermitian matrices, shape (K, 3).

    Trigonometric solution of the characteristic cubic; exact for
    Hermitian input (all roots real).  Order is unspecified.
    """
    q = np.real(h[..., 0, 0] + h[..., 1, 1] + h[..., 2, 2]) / 3.0
    a = h.copy()
    a[..., 0, 0] -= q
    a[..., 1, 1] -= q
    a[..., 2, 2] -= q
    # tr(A^2) = sum |A_ij|^2 for Hermitian A
    p2 = np.sum(np.abs(a) ** 2, axis=(-2, -1)) / 6.0
    p = np.sqrt(p2)
    det = np.real(
        a[..., 0, 0] * (a[..., 1, 1] * a[..., 2, 2] - a[..., 1, 2] * a[..., 2, 1])
        - a[..., 0, 1] * (a[..., 1, 0] * a[..., 2, 2] - a[..., 1, 2] * a[..., 2, 0])
        + a[..., 0, 2] * (a[..., 1, 0] * a[..., 2, 1] - a[..., 1, 1] * a[..., 2, 0])
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        cos3phi = np.where(p > 0, det / (2.0 * p2 * p), 1.0)
    phi = np.arccos(np.clip(cos3phi, -1.0, 1.0)) / 3.0
    lam = np.stack(
        [
            q + 2.0 * p * np.cos(phi),
            q + 2.0 * p * np.cos(phi + 2.0 * np.pi / 3.0),
            q + 2.0 * p * np.cos(phi + 4.0 * np.pi / 3.0),
        ],
        axis=-1,
    )
    return lam


def expm_step_batch(h: np.ndarray, dt: float) -> np.ndarray:
    """exp(-i h dt) for a stack of 3x3 Hermitian matrices, shape (K, 3, 3).

    Closed-form Cayley-Hamilton evaluation from the analytic eigenvalues
    (Newton divided differences of exp on the spectrum); steps with
    near-degenerate spectra fall back to an eigendecomposition.
    """
    h = np.asarray(h, dtype=complex)
    scalar_input = h.ndim == 2
    if scalar_input:
        h = h[None]
    lam = _eigvals_hermitian_3x3(h)
    span = lam.max(axis=-1) - lam.min(axis=-1)
    gaps = np.stack(
        [
            np.abs(lam[:, 0] - lam[:, 1]),
            np.abs(lam[:, 1] - lam[:, 2]),
            np.abs(lam[:, 0] - lam[:, 2]),
        ],
        axis=-1,
    ).min(axis=-1)
    degenerate = gaps <= _DEGENERACY_CUTOFF * np.maximum(span, 1.0 / abs(dt))

    l0, l1, l2 = lam[:, 0], lam[:, 1], lam[:, 2]
    f0 = np.exp(-1j * l0 * dt)
    f1 = np.exp(-1j * l1 * dt)
    f2 = np.exp(-1j * l2 * dt)
    # Newton divided differences of f(x) = exp(-i x dt) on {l0, l1, l2}
    with np.errstate(divide="ignore", invalid="ignore"):
        d01 = (f1 - f0) / (l1 - l0)
        d12 = (f2 - f1) / (l2 - l1)
        d012 = (d12 - d01) / (l2 - l0)
    c0 = f0 - d01 * l0 + d012 * l0 * l1
    c1 = d01 - d012 * (l0 + l1)
    c2 = d012
    eye = np.eye(3, dtype=complex)
    u = (
        c0[:, None, None] * eye
        + c1[:, None, None] * h
        + c2[:, None, None] * (h @ h)
    )

    if degenerate.any():
        idx = np.nonzero(degenerate)[0]
        w, v = np.linalg.eigh(h[idx])
        ph = np.exp(-1j * w * dt)
        u[idx] = (v * ph[:, None, :]) @ np.conjugate(np.swapaxes(v, -1, -2))

    return u[0] if scalar_input else u


def product_reduce(u: np.ndarray) -> np.ndarray:
    """Ordered product u[..., K-1, :, :] @ ... @ u[..., 0, :, :].

    Pairwise-tree reduction along axis -3; leading axes are batched.
    """
    u = np.asarray(u)
    while u.shape[-3] > 1:
        m = u.shape[-3] // 2
        tail = u[..., 2 * m :, :, :]
        u = np.matmul(u[..., 1 : 2 * m : 2, :, :], u[..., 0 : 2 * m : 2, :, :])
        if tail.shape[-3]:
            u = np.concatenate([u, tail], axis=-3)
    return u[..., 0, :, :]


def step_propagators(cfg: SystemConfig, signals: np.ndarray, dt: float) -> np.ndarray:
    """exp(-i (H0 + c X) dt) for an array of control samples c.

    Exploits the fixed structure of the step Hamiltonian — real symmetric
    tridiagonal with diagonal (0, E1, E2) and off-diagonals (c, sqrt(2) c)
    — so eigenvalues, the Cayley-Hamilton coefficients, and the 9 entries
    of the exponential are all plain vector arithmetic.  Input may have
    any shape; output appends (3, 3).  Near-degenerate steps fall back to
    the general path.
    """
    c = np.asarray(signals, dtype=float)
    shape = c.shape
    c = c.reshape(-1)
    w = TWO_PI * cfg.qubit_frequency
    d = TWO_PI * cfg.anharmonicity
    e1 = w
    e2 = 2.0 * w + d
    c2 = c * c

    # eigenvalues of the shifted matrix A = H - (tr/3) I via the
    # trigonometric solution of the characteristic cubic
    tr = e1 + e2
    q = tr / 3.0
    a0, a1, a2 = -q, e1 - q, e2 - q
    p2 = (a0 * a0 + a1 * a1 + a2 * a2 + 6.0 * c2) / 6.0
    p = np.sqrt(p2)
    det_a = a0 * (a1 * a2 - 2.0 * c2) - c2 * a2
    with np.errstate(divide="ignore", invalid="ignore"):
        cos3phi = np.where(p > 0, det_a / (2.0 * p2 * p), 1.0)
    phi = np.arccos(np.clip(cos3phi, -1.0, 1.0)) / 3.0
    l0 = q + 2.0 * p * np.cos(phi)
    l1 = q + 2.0 * p * np.cos(phi + 2.0 * np.pi / 3.0)
    l2 = q + 2.0 * p * np.cos(phi + 4.0 * np.pi / 3.0)

    span = np.maximum(np.maximum(l0, l1), l2) - np.minimum(np.minimum(l0, l1), l2)
    gaps = np.minimum(
        np.minimum(np.abs(l0 - l1), np.abs(l1 - l2)), np.abs(l0 - l2)
    )
    degenerate = gaps <= _DEGENERACY_CUTOFF * np.maximum(span, 1.0 / abs(dt))

    f0 = np.exp(-1j * l0 * dt)
    f1 = np.exp(-1j * l1 * dt)
    f2 = np.exp(-1j * l2 * dt)
    with np.errstate(divide="ignore", invalid="ignore"):
        d01 = (f1 - f0) / (l1 - l0)
        d12 = (f2 - f1) / (l2 - l1)
        d012 = (d12 - d01) / (l2 - l0)
    k0 = f0 - d01 * l0 + d012 * (l0 * l1)
    k1 = d01 - d012 * (l0 + l1)
    k2 = d012

    # U = k0 I + k1 H + k2 H^2 with H^2 entries written out
    sq2 = np.sqrt(2.0)
    u = np.empty((c.size, 3, 3), dtype=complex)
    u[:, 0, 0] = k0 + k2 * c2
    u[:, 0, 1] = u[:, 1, 0] = c * (k1 + k2 * e1)
    u[:, 0, 2] = u[:, 2, 0] = sq2 * c2 * k2
    u[:, 1, 1] = k0 + k1 * e1 + k2 * (e1 * e1 + 3.0 * c2)
    u[:, 1, 2] = u[:, 2, 1] = sq2 * c * (k1 + k2 * tr)
    u[:, 2, 2] = k0 + k1 * e2 + k2 * (e2 * e2 + 2.0 * c2)

    if degenerate.any():
        idx = np.nonzero(degenerate)[0]
        h0 = build_drift_hamiltonian(cfg)
        x = build_drive_operator()
        steps = h0[None, :, :] + c[idx, None, None] * x[None, :, :]
        u[idx] = expm_step_batch(steps, dt)

    return u.reshape(shape + (3, 3))


def propagate_batch(cfg: SystemConfig, signals: np.ndarray, duration: float) -> np.ndarray:
    """Time-ordered propagators for a batch of sampled controls.

    ``signals`` has shape (..., K): K midpoint samples per control over
    [0, duration].  Returns the (..., 3, 3) unitaries
    prod_k exp(-i (H0 + c_k X) dt), ordered right-to-left in time.
    """
    signals = np.asarray(signals, dtype=float)
    if signals.shape[-1] == 0:
        raise ValueError("empty control grid")
    if duration <= 0:
        raise ValueError("duration must be positive")
    dt = duration / signals.shape[-1]
    return product_reduce(step_propagators(cfg, signals, dt))


def propagate(cfg: SystemConfig, signal: np.ndarray, duration: float) -> np.ndarray:
    """Time-ordered propagator for one sampled control over [0, duration].

    ``signal`` holds c(t_k) on the uniform midpoint grid t_k = (k+1/2)*dt
    with dt = duration/len(signal).
    """
    signal = np.asarray(signal, dtype=float)
    if signal.ndim != 1 or signal.size == 0:
        raise ValueError("empty control grid")
    return propagate_batch(cfg, signal, duration)


def drift_propagator(cfg: SystemConfig, duration: float) -> np.ndarray:
    """exp(-i H0 duration): free evolution, diagonal in the Fock basis."""
    h0 = build_drift_hamiltonian(cfg)
    return np.diag(np.exp(-1j * np.diag(h0).real * duration))


def rotating_frame(cfg: SystemConfig, u: np.ndarray, duration: float) -> np.ndarray:
    """Strip the drift phases accumulated over ``duration`` from ``u``.

    Returns exp(+i H0 duration) @ u, the gate as seen in the frame
    co-rotating with the bare system.
    """
    return np.conjugate(drift_propagator(cfg, duration).T) @ u


def apply(u: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """Apply a propagator to a state vector (no renormalization)."""
    return u @ psi


def basis_state(level: int) -> np.ndarray:
    psi = np.zeros(3, dtype=complex)
    psi[level] = 1.0
    return psi


def unitarity_defect(u: np.ndarray) -> float:
    """Max-abs entry of U'U - 1."""
    return float(np.abs(np.conjugate(u.T) @ u - np.eye(3)).max())

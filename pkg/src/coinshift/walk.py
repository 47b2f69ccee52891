"""The four walk dynamics on the qubit (x) resonator space.

* ``standard``: coin ``Rx(omega_tau)`` then conditional shift
  ``exp(i g_tau a^dagger a sigma_z)``, as two separate applications, with the
  target walk angles ``(2*pi/(r*d), pi/2)``.
* ``exact``: one application of ``exp(i(g_tau a^dagger a sigma_z - omega_tau sigma_x / 2))``.
* ``trotter``: the first-order product of the two exponentials above, at the
  configured frequencies.
* ``decoherent-*``: density-matrix versions of ``exact``/``standard`` with a
  dephasing channel on the coin after every step.

Coin state ``|0>`` rotates the walker by ``+g_tau`` (one site forward at the
nominal hop), ``|1>`` by ``-g_tau``.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .linalg import kron, unitary_exp
from .phase_space import (
    WalkConfig,
    distribution_from_probs,
    initial_state,
    max_separation,
    peak_separation,
    phase_probs,
)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

DYNAMICS = ("exact", "standard", "trotter", "decoherent-exact", "decoherent-standard")


def number_operator(d):
    return np.diag(np.arange(d, dtype=float)).astype(complex)


def coin_rotation(omega_tau):
    """``Rx(omega_tau) = exp(-i omega_tau sigma_x / 2)``."""
    c, s = math.cos(omega_tau / 2), math.sin(omega_tau / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def joint_generator(g_tau, omega_tau, d):
    """Hermitian ``G`` with ``exact_step = exp(iG)``."""
    return g_tau * kron(PAULI_Z, number_operator(d)) - 0.5 * omega_tau * kron(PAULI_X, np.eye(d))


@dataclass(frozen=True)
class StepOperators:
    d: int
    g_tau: float
    omega_tau: float
    coin_rot: np.ndarray = field(repr=False)
    coin: np.ndarray = field(repr=False)
    shift: np.ndarray = field(repr=False)
    exact_step: np.ndarray = field(repr=False)
    trotter_step: np.ndarray = field(repr=False)


def build_operators(cfg: WalkConfig) -> StepOperators:
    d = cfg.d
    coin_rot = coin_rotation(cfg.omega_tau)
    coin = kron(coin_rot, np.eye(d))
    shift = unitary_exp(kron(PAULI_Z, number_operator(d)), cfg.g_tau)
    exact = unitary_exp(joint_generator(cfg.g_tau, cfg.omega_tau, d))
    return StepOperators(d, cfg.g_tau, cfg.omega_tau, coin_rot, coin, shift, exact, shift @ coin)


def standard_step(state, ops: StepOperators):
    return ops.shift @ (ops.coin @ state)


def exact_step(state, ops: StepOperators):
    return ops.exact_step @ state


def trotter_step(state, ops: StepOperators):
    return ops.trotter_step @ state


def dephase_coin(rho, p, d):
    """Coin dephasing: coherences between coin levels shrink by ``1 - p``.

    Equivalent to ``(1 - p/2) rho + (p/2) Z rho Z`` with ``Z = sigma_z (x) I``;
    ``p = 1`` removes the coin coherences entirely.
    """
    out = np.array(rho, dtype=complex, copy=True)
    out[:d, d:] *= 1.0 - p
    out[d:, :d] *= 1.0 - p
    return out


def dephasing_step(rho, ops: StepOperators, p, which="exact"):
    if which == "exact":
        u = ops.exact_step
    elif which == "standard":
        u = ops.shift @ ops.coin
    else:
        raise ValueError(f"unknown dynamics {which!r}")
    rho = u @ rho @ u.conj().T
    rho = dephase_coin(rho, p, ops.d)
    return 0.5 * (rho + rho.conj().T)


# -- blockwise propagation -------------------------------------------------
# Both generators are diagonal in the Fock number n, so every step is a stack
# of d independent 2x2 coin unitaries. Used where many trajectories are needed.


def exact_blocks(g_tau, omega_tau, d):
    """Closed-form ``exp(i(g_tau n sigma_z - omega_tau sigma_x / 2))`` for n = 0..d-1."""
    a = g_tau * np.arange(d)
    b = -0.5 * omega_tau
    theta = np.sqrt(a * a + b * b)
    c = np.cos(theta)
    s = np.sinc(theta / np.pi)
    u = np.empty((d, 2, 2), dtype=complex)
    u[:, 0, 0] = c + 1j * s * a
    u[:, 1, 1] = c - 1j * s * a
    u[:, 0, 1] = 1j * s * b
    u[:, 1, 0] = 1j * s * b
    return u


def product_blocks(g_tau, omega_tau, d):
    """Blocks of ``exp(i g_tau a^dagger a sigma_z) Rx(omega_tau)``."""
    phase = np.exp(1j * g_tau * np.arange(d))
    rot = coin_rotation(omega_tau)
    u = np.empty((d, 2, 2), dtype=complex)
    u[:, 0, :] = phase[:, None] * rot[0]
    u[:, 1, :] = phase.conj()[:, None] * rot[1]
    return u


def blocks_to_dense(blocks):
    d = blocks.shape[0]
    out = np.zeros((2 * d, 2 * d), dtype=complex)
    n = np.arange(d)
    for i in range(2):
        for j in range(2):
            out[i * d + n, j * d + n] = blocks[:, i, j]
    return out


def block_probs(blocks, state, steps):
    """Phase distributions at steps 0..steps, shape ``(steps + 1, d)``."""
    d = blocks.shape[0]
    psi = np.asarray(state, dtype=complex).reshape(2, d)
    out = np.empty((steps + 1, d))
    for t in range(steps + 1):
        if t:
            psi = np.einsum("nij,jn->in", blocks, psi)
        amps = np.fft.fft(psi, axis=1)
        out[t] = np.sum(np.abs(amps) ** 2, axis=0) / d
    return out


# -- trajectories -----------------------------------------------------------


@dataclass
class Trajectory:
    which: str
    cfg: WalkConfig
    probs: np.ndarray
    states: Optional[list] = field(default=None, repr=False)
    crossing: Optional[float] = None
    capped: bool = False

    @property
    def steps(self):
        return self.probs.shape[0] - 1

    @property
    def distributions(self):
        return [distribution_from_probs(p) for p in self.probs]

    @property
    def stds(self):
        return np.array([dist.circular_std for dist in self.distributions])


def _stepper(cfg, which):
    if which not in DYNAMICS:
        raise ValueError(f"unknown dynamics {which!r}; choose from {DYNAMICS}")
    base = which.removeprefix("decoherent-")
    ops = build_operators(cfg.nominal() if base == "standard" else cfg)
    if which.startswith("decoherent-"):
        p = cfg.dephasing_p
        return True, lambda rho: dephasing_step(rho, ops, p, base)
    step = {"exact": exact_step, "standard": standard_step, "trotter": trotter_step}[base]
    return False, lambda psi: step(psi, ops)


def run_trajectory(cfg: WalkConfig, which="exact", keep_states=True) -> Trajectory:
    """Evolve the initial product state for ``cfg.steps`` steps.

    With ``cfg.steps == 0`` the run stops at the first step whose two tallest
    peaks are as far apart as the circle allows (pi, or pi*(1 - 1/d) for odd
    d), capped at ``10 * d`` steps. ``crossing`` holds the linearly
    interpolated fractional step of that event.
    """
    density, step = _stepper(cfg, which)
    x = initial_state(cfg)
    if density:
        x = np.outer(x, x.conj())
    d = cfg.d
    auto = cfg.steps == 0
    limit = 10 * d if auto else cfg.steps
    threshold = max_separation(d) - 1e-12
    probs = [phase_probs(x, d)]
    states = [x] if keep_states else None
    crossing = None
    prev_sep = 0.0
    for t in range(1, limit + 1):
        x = step(x)
        p = phase_probs(x, d)
        probs.append(p)
        if keep_states:
            states.append(x)
        if auto:
            sep = peak_separation(p, d) or 0.0
            if sep >= threshold:
                crossing = t - 1 + (threshold - prev_sep) / (sep - prev_sep)
                break
            prev_sep = sep
    capped = auto and crossing is None
    return Trajectory(which, cfg, np.array(probs), states, crossing, capped)


def pi_separation_step(cfg: WalkConfig, which="standard"):
    """Step at which ``which`` dynamics first shows antipodal peaks."""
    traj = run_trajectory(replace(cfg, steps=0), which, keep_states=False)
    return traj.steps


def trotter_error(g_total, omega_total, d, n):
    """Spectral-norm gap between the exact propagator and its n-slice product.

    ``g_total`` and ``omega_total`` are the dimensionless angles accumulated
    over the whole evolution; each slice uses ``1/n`` of them.
    """
    exact = unitary_exp(joint_generator(g_total, omega_total, d))
    shift = unitary_exp(kron(PAULI_Z, number_operator(d)), g_total / n)
    coin = kron(coin_rotation(omega_total / n), np.eye(d))
    product = np.linalg.matrix_power(shift @ coin, n)
    return float(np.linalg.norm(exact - product, 2))

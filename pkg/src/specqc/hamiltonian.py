"""Internal and rotating-frame Hamiltonians (rad/s) and multiplet line positions.

User-facing frequencies are in Hz; Hamiltonians use angular units, omega = 2*pi*nu.
An RF field only drives spins on its own channel; other channels stay in
their own rotating frames at zero carrier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .operators import bit_table, spin_operator
from .spin_system import SpinSystem, check_label

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class RfField:
    """Continuous RF irradiation on one channel.

    ``amp_rad_s`` is the observer-referenced Rabi frequency; spin ``i`` on the
    channel nutates at ``amp_rad_s * gamma_rel_i``. ``phase_rad = pi/2``
    drives about +y.
    """

    channel: str
    carrier_offset_hz: float
    amp_rad_s: float
    phase_rad: float = math.pi / 2

    def __post_init__(self):
        if not self.amp_rad_s >= 0:
            raise ValueError("amp_rad_s must be >= 0")


def _coupling_diagonal(system: SpinSystem) -> np.ndarray:
    """Diagonal of 2*pi * sum_{i<j} J_ij I_iz I_jz."""
    m = 0.5 - bit_table(system.nspins)
    j = system.j
    # Each unordered pair appears twice in the quadratic form.
    return TWO_PI * 0.5 * np.einsum("bi,ij,bj->b", m, j, m)


def _zeeman_diagonal(system: SpinSystem, coeffs: np.ndarray) -> np.ndarray:
    m = 0.5 - bit_table(system.nspins)
    return m @ coeffs


def internal_hamiltonian(system: SpinSystem) -> np.ndarray:
    """-sum_i omega_i I_iz + 2 pi sum_{i<j} J_ij I_iz I_jz."""
    omega = TWO_PI * system.offsets_hz
    diag = _zeeman_diagonal(system, -omega) + _coupling_diagonal(system)
    return np.diag(diag).astype(complex)


def effective_hamiltonian(system: SpinSystem, rf: RfField) -> np.ndarray:
    """Time-independent Hamiltonian in the frame rotating with ``rf``."""
    on = system.channel_spins(rf.channel)
    coeffs = -TWO_PI * system.offsets_hz
    coeffs[on] += TWO_PI * rf.carrier_offset_hz
    h = np.diag(_zeeman_diagonal(system, coeffs) + _coupling_diagonal(system))
    h = h.astype(complex)
    if rf.amp_rad_s:
        n = system.nspins
        c, s = math.cos(rf.phase_rad), math.sin(rf.phase_rad)
        for i in on:
            rabi = rf.amp_rad_s * system.spins[i].gamma_rel
            h += rabi * (c * spin_operator(i, "x", n) + s * spin_operator(i, "y", n))
    return h


def transition_rf_frequency(system: SpinSystem, register_label: str) -> float:
    """Observer multiplet line (Hz) for the register in state ``register_label``."""
    check_label(system, register_label)
    j0 = system.j[0, 1:]
    bits = np.array([int(b) for b in register_label], dtype=float)
    return float(system.spins[0].offset_hz + np.dot(j0, bits - 0.5))


def observer_field(system: SpinSystem, label: str, amp_rad_s: float,
                   phase_rad: float = math.pi / 2) -> RfField:
    """RF on the observer's channel, on resonance with the ``label`` line."""
    return RfField(system.spins[0].channel, transition_rf_frequency(system, label),
                   amp_rad_s, phase_rad)

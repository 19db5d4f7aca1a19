"""Ideal unitaries and pulse-sequence compilers.

Covers the multiply controlled observer rotation, LPPS preparation (ideal
circuit and pulsed form) and the Bernstein-Vazirani oracle and algorithm.
Register-only unitaries act on ``2**n`` dimensions; use :func:`embed_register`
to lift them to the full system including the observer.
"""

from __future__ import annotations

import math
from functools import reduce

import numpy as np

from .evolution import Gaussian, Gradient, HardPulse, PulseSequence, SoftPulse, rotation
from .hamiltonian import observer_field
from .operators import register_projector, spin_operator
from .spin_system import ConfigError, SpinSystem, check_bits, check_label

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def _kron_all(mats) -> np.ndarray:
    return reduce(np.kron, mats, np.eye(1, dtype=complex))


def embed_register(u: np.ndarray) -> np.ndarray:
    """E_observer (x) u."""
    return np.kron(np.eye(2, dtype=complex), u)


def not_gates(pattern: str) -> np.ndarray:
    """sigma_x on every computational qubit whose pattern bit is 1 (observer untouched)."""
    return _kron_all([np.eye(2)] + [SIGMA_X if b == "1" else np.eye(2) for b in pattern])


def controlled_rotation_direct(n: int, alpha: float, pattern: str) -> np.ndarray:
    """exp(-i alpha I_0y P_pattern) assembled from its block structure."""
    check_bits(pattern, n, "control pattern")
    nspins = n + 1
    proj = register_projector(pattern, nspins)
    c, s = math.cos(alpha / 2), math.sin(alpha / 2)
    ry = c * np.eye(2**nspins) - 2j * s * spin_operator(0, "y", nspins)
    # Rotation on the selected register block, identity elsewhere.
    return proj @ ry + (np.eye(2**nspins) - proj)


def controlled_rotation_unitary(n: int, alpha: float, pattern: str) -> np.ndarray:
    """Observer y-rotation by ``alpha`` conditioned on the register being ``pattern``.

    Built as NOT-sandwich of the all-zeros-controlled gate; the result is
    checked against direct construction from projectors.
    """
    check_bits(pattern, n, "control pattern")
    base = controlled_rotation_direct(n, alpha, "0" * n)
    flips = not_gates(pattern)
    u = flips @ base @ flips
    direct = controlled_rotation_direct(n, alpha, pattern)
    if np.abs(u - direct).max() > 1e-12:
        raise AssertionError("NOT-sandwiched controlled rotation disagrees with direct form")
    return u


def lpps_prep_unitary(n: int, label: str | None = None) -> np.ndarray:
    """R_0y^dagger U_control(pi/2) prod_i R_iy for the LPPS circuit."""
    if n < 1:
        raise ConfigError("need at least one computational qubit")
    label = "0" * n if label is None else check_bits(label, n)
    nspins = n + 1
    r_comp = rotation(range(1, nspins), "y", math.pi / 2, nspins)
    r_obs_inv = rotation([0], "-y", math.pi / 2, nspins)
    return r_obs_inv @ controlled_rotation_unitary(n, math.pi / 2, label) @ r_comp


def lpps_pulse_sequence(system: SpinSystem, label: str, ratio: float,
                        alpha: float = math.pi / 2, envelope=None,
                        gradient_mode: str = "crush_all") -> PulseSequence:
    """Pulsed LPPS preparation with a gradient before and after the selective pulse.

    The soft pulse is on resonance with the ``label`` line at mean Rabi
    frequency ``ratio * pi * J01`` and lasts ``alpha / amp``. An observer
    (pi/2)_-y pulse follows it, so the irradiated line ends up longitudinal
    and every other observer line transverse before the final gradient.
    """
    check_label(system, label)
    if not ratio > 0:
        raise ConfigError("ratio must be > 0")
    j01 = system.j[0, 1]
    if j01 == 0:
        raise ConfigError("J01 is zero; the power ratio is undefined")
    amp = ratio * math.pi * abs(j01)
    envelope = Gaussian() if envelope is None else envelope
    comp = frozenset(range(1, system.nspins))
    return PulseSequence((
        HardPulse(comp, "y", math.pi / 2),
        Gradient(gradient_mode),
        SoftPulse(observer_field(system, label, amp), alpha / amp, envelope),
        HardPulse(frozenset({0}), "-y", math.pi / 2),
        Gradient(gradient_mode),
    ))


def bv_oracle_unitary(a: str) -> np.ndarray:
    """U_a |x> = (-1)^(a.x) |x> on the n-qubit register, as prod_j sigma_z^a_j."""
    check_bits(a, len(a), "a")
    if not a:
        raise ConfigError("a must have at least one bit")
    u = _kron_all([SIGMA_Z if b == "1" else np.eye(2) for b in a])
    x = np.arange(2 ** len(a))
    parity = np.array([bin(int(a, 2) & v).count("1") % 2 for v in x])
    if not np.array_equal(np.diag(u).real, (-1.0) ** parity):
        raise AssertionError("sigma_z product disagrees with (-1)^(a.x)")
    return u


def bv_unitary(a: str) -> np.ndarray:
    """H^n U_a H^n, checked equal to prod_j sigma_x^a_j."""
    oracle = bv_oracle_unitary(a)
    hn = _kron_all([HADAMARD] * len(a))
    u = hn @ oracle @ hn
    flips = _kron_all([SIGMA_X if b == "1" else np.eye(2) for b in a])
    if np.abs(u - flips).max() > 1e-12:
        raise AssertionError("Hadamard-conjugated oracle disagrees with sigma_x product")
    return flips


def bv_pulse_sequence(a: str, nqubits: int | None = None) -> PulseSequence:
    """A pi_x pulse on computational spin i for every a_i = 1."""
    check_bits(a, len(a) if nqubits is None else nqubits, "a")
    return PulseSequence(tuple(
        HardPulse(frozenset({i}), "x", math.pi) for i, b in enumerate(a, start=1) if b == "1"
    ))


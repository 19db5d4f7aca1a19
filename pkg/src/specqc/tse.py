"""Transition-selective excitation (TSE) as a controlled rotation.

A weak pulse on one observer multiplet line gives an exact propagator ``U0``.
That is compared with ``U2 = U_control * U_z``, where ``U_z`` is the
conditional phase picked up by the lines that are not irradiated. Dividing
the Hamiltonian by the pulse amplitude ``Omega0`` gives the dimensionless
parameters

    a_i = (omega_0 - omega_i) / Omega0,  b_i = pi J_0i / Omega0,  c_ij = pi J_ij / Omega0.

The three-spin case also has a closed-form fidelity.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .evolution import propagator
from .gates import controlled_rotation_unitary
from .hamiltonian import TWO_PI, effective_hamiltonian, observer_field
from .operators import projector, spin_operator
from .spin_system import ConfigError, SpinSystem, check_label


@dataclass(frozen=True)
class TseParams:
    """Dimensionless TSE parameters for irradiation of the all-zeros line."""

    a: tuple[float, ...]
    b: tuple[float, ...]
    c: tuple[tuple[float, ...], ...]  # pi J_ij / Omega0 among computational spins
    omega0_rad_s: float
    alpha_rad: float

    def __post_init__(self):
        if not self.omega0_rad_s > 0:
            raise ConfigError("omega0_rad_s must be > 0")
        if len(self.a) != len(self.b) or len(self.c) != len(self.b):
            raise ConfigError("a, b and c must describe the same number of spins")

    @property
    def c1(self) -> float:
        return self.c[0][1]

    @property
    def nqubits(self) -> int:
        return len(self.b)

    @classmethod
    def from_system(cls, system: SpinSystem, ratio: float, alpha: float) -> "TseParams":
        omega0 = power_from_ratio(system, ratio)
        omega = TWO_PI * system.offsets_hz
        j = system.j
        return cls(
            a=tuple((omega[0] - omega[1:]) / omega0),
            b=tuple(math.pi * j[0, 1:] / omega0),
            c=tuple(map(tuple, math.pi * j[1:, 1:] / omega0)),
            omega0_rad_s=omega0,
            alpha_rad=alpha,
        )


@dataclass(frozen=True)
class TsePropagators:
    u0: np.ndarray  # exact, full rotating-frame Hamiltonian
    u1: np.ndarray  # Rabi terms of non-observer spins dropped
    u2: np.ndarray  # U_control * U_z
    omega0_rad_s: float
    duration_s: float


@dataclass(frozen=True)
class FidelityCurve:
    ratios: tuple[float, ...]
    q_values: tuple[float, ...]
    f_u1u2: tuple[float, ...]
    alpha_rad: float
    system_id: str

    def __post_init__(self):
        if not len(self.ratios) == len(self.q_values) == len(self.f_u1u2):
            raise ValueError("curve columns must have equal lengths")
        if any(b <= a for a, b in zip(self.ratios, self.ratios[1:])):
            raise ValueError("ratios must be strictly increasing")

    @property
    def fidelities(self) -> np.ndarray:
        return 1.0 - np.asarray(self.q_values)

    def rows(self):
        for r, q, f1 in zip(self.ratios, self.q_values, self.f_u1u2):
            yield r, q, 1.0 - q, self.alpha_rad, self.system_id, f1


CURVE_HEADER = ("ratio", "Q", "F", "alpha_rad", "system_id", "F_u1u2")


def curves_to_csv(curves: Sequence[FidelityCurve]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CURVE_HEADER)
    for curve in curves:
        for r, q, f, a, sid, f1 in curve.rows():
            w.writerow([_fmt(r), _fmt(q), _fmt(f), _fmt(a), sid, _fmt(f1)])
    return buf.getvalue()


def _fmt(x: float) -> str:
    return f"{x:.15g}"


def power_from_ratio(system: SpinSystem, ratio: float) -> float:
    """Omega0 in rad/s for a power ratio Omega0 / (pi J01)."""
    if not ratio > 0:
        raise ConfigError("ratio must be > 0")
    j01 = system.j[0, 1]
    if j01 == 0:
        raise ConfigError("J01 is zero; the power ratio is undefined")
    return ratio * math.pi * abs(j01)


def gate_fidelity(u: np.ndarray, v: np.ndarray) -> float:
    """|Tr(u^dagger v) / N|^2."""
    if u.shape != v.shape or u.shape[0] != u.shape[1]:
        raise ValueError(f"shape mismatch {u.shape} vs {v.shape}")
    overlap = np.vdot(u, v) / u.shape[0]  # vdot conjugates u and sums u*v = Tr(u^dagger v)
    return float(min(1.0, abs(overlap) ** 2))


# Three-spin closed forms.

def _three_spin_ops():
    n = 3
    i0z, i0y = spin_operator(0, "z", n), spin_operator(0, "y", n)
    i1z, i2z = spin_operator(1, "z", n), spin_operator(2, "z", n)
    p = {(s1, s2): projector(1, s1, n) @ projector(2, s2, n)
         for s1 in ("alpha", "beta") for s2 in ("alpha", "beta")}
    return i0z, i0y, i1z, i2z, p


def h0_terms(params: TseParams) -> dict[str, np.ndarray]:
    """The five mutually commuting pieces of H0_eff / Omega0 for three spins.

    Keys: ``P`` and ``Q--``, ``Q+-``, ``Q-+``, ``Q++`` each multiplied by its
    register projector (``-`` = beta, first sign = spin 1).
    """
    if params.nqubits != 2:
        raise ConfigError("closed form needs exactly 3 spins (observer + 2)")
    (a1, a2), (b1, b2), c1 = params.a, params.b, params.c1
    i0z, i0y, i1z, i2z, p = _three_spin_ops()
    return {
        "P": (a1 - b1 - b2) * i1z + (a2 - b1 - b2) * i2z + 2 * c1 * i1z @ i2z,
        "Q--": (-2 * (b1 + b2) * i0z + i0y) @ p["beta", "beta"],
        "Q+-": (-2 * b2 * i0z + i0y) @ p["alpha", "beta"],
        "Q-+": (-2 * b1 * i0z + i0y) @ p["beta", "alpha"],
        "Q++": i0y @ p["alpha", "alpha"],
    }


def h0_direct(params: TseParams) -> np.ndarray:
    """H0_eff / Omega0 written straight from the rotating-frame Hamiltonian, three spins."""
    (a1, a2), (b1, b2), c1 = params.a, params.b, params.c1
    n = 3
    z = [spin_operator(k, "z", n) for k in range(n)]
    # Carrier on the all-zeros line: (omega_rf - omega_0)/Omega0 = -(b1 + b2).
    offs = [-(b1 + b2), a1 - b1 - b2, a2 - b1 - b2]
    h = sum(o * zk for o, zk in zip(offs, z))
    h = h + 2 * b1 * z[0] @ z[1] + 2 * b2 * z[0] @ z[2] + 2 * c1 * z[1] @ z[2]
    return h + spin_operator(0, "y", n)


def _phase_exp(coeff: float, op_diag: np.ndarray) -> np.ndarray:
    return np.diag(np.exp(-1j * coeff * np.diag(op_diag)))


def conditional_phase_unitary(params: TseParams) -> np.ndarray:
    """U_z(alpha) for three spins from its closed form.

    exp(-i alpha P) times one observer z-phase per non-irradiated register
    block, with effective field sqrt(1 + 4 b^2).
    """
    if params.nqubits != 2:
        raise ConfigError("closed form needs exactly 3 spins (observer + 2)")
    (b1, b2), alpha = params.b, params.alpha_rad
    terms = h0_terms(params)
    i0z, _, _, _, p = _three_spin_ops()
    u = _phase_exp(alpha, terms["P"])
    for bb, proj in (
        (b1 + b2, p["beta", "beta"]),
        (b2, p["alpha", "beta"]),
        (b1, p["beta", "alpha"]),
    ):
        u = u @ _phase_exp(-alpha * math.sqrt(1 + 4 * bb**2), i0z @ proj)
    return u


def tilt_transform(params: TseParams) -> np.ndarray:
    """U_T: rotates each off-resonance observer block onto the z axis."""
    if params.nqubits != 2:
        raise ConfigError("closed form needs exactly 3 spins (observer + 2)")
    b1, b2 = params.b
    _, _, _, _, p = _three_spin_ops()
    i0x = spin_operator(0, "x", 3)
    theta = {
        ("beta", "beta"): math.atan(1 / (2 * b1 + 2 * b2)),
        ("beta", "alpha"): math.atan(1 / (2 * b1)),
        ("alpha", "beta"): math.atan(1 / (2 * b2)),
    }
    u = p["alpha", "alpha"].copy()
    for key, th in theta.items():
        rot = math.cos(th / 2) * np.eye(8) + 2j * math.sin(th / 2) * i0x
        u = u + rot @ p[key]
    return u


def analytic_fidelity_3spin(b1: float, b2: float, alpha: float) -> float:
    """Closed-form F(U1, U2) for three spins."""
    total = 0.0
    for b in (b1 + b2, b2, b1):
        root = math.sqrt(1 + 4 * b * b)
        total += math.sin(alpha / 2 * root) ** 2 * (1 - 2 * b / root)
    return abs(1 - total / 4) ** 2


# General n: extract U_z block by block.

def register_blocks(h: np.ndarray, nspins: int):
    """Yield (register index, observer 2x2 block) of a register-diagonal operator."""
    half = 2 ** (nspins - 1)
    for s in range(half):
        idx = [s, half + s]
        yield s, h[np.ix_(idx, idx)]


def conditional_phase_numeric(h0: np.ndarray, nspins: int, label: str,
                              omega0: float, alpha: float) -> np.ndarray:
    """U_z for any size: each non-irradiated block keeps only its z-tilted field.

    ``h0`` must be block diagonal in the register (Rabi terms only on the
    observer). Within register block ``s`` the observer sees
    ``c + d I_z + Omega0 I_y``; U_z replaces that by
    ``c + sign(d) sqrt(d^2 + Omega0^2) I_z``. The irradiated block gets the
    scalar phase ``c`` only.
    """
    half = 2 ** (nspins - 1)
    reg = np.arange(2 * half) % half
    mixing = h0[reg[:, None] != reg[None, :]]
    if mixing.size and np.abs(mixing).max() > 1e-12 * max(1.0, np.abs(h0).max()):
        raise ValueError("h0 couples different register states")
    target = int(label, 2)
    diag = np.empty(2 * half, dtype=complex)
    t = alpha / omega0
    for s, block in register_blocks(h0, nspins):
        e0, e1 = block[0, 0].real, block[1, 1].real
        c, d = (e0 + e1) / 2, e0 - e1
        if s == target:
            diag[s] = diag[half + s] = np.exp(-1j * c * t)
        else:
            eff = math.copysign(math.hypot(d, omega0), d)
            diag[s] = np.exp(-1j * (c + eff / 2) * t)
            diag[half + s] = np.exp(-1j * (c - eff / 2) * t)
    return np.diag(diag)


def observer_only_hamiltonian(system: SpinSystem, label: str, omega0: float) -> np.ndarray:
    """Rotating-frame Hamiltonian with the Rabi terms of non-observer spins removed."""
    rf = observer_field(system, label, omega0)
    h = effective_hamiltonian(system, rf)
    n = system.nspins
    c, s = math.cos(rf.phase_rad), math.sin(rf.phase_rad)
    for i in system.channel_spins(rf.channel):
        if i == 0:
            continue
        rabi = omega0 * system.spins[i].gamma_rel
        h = h - rabi * (c * spin_operator(i, "x", n) + s * spin_operator(i, "y", n))
    return h


def tse_propagators(system: SpinSystem, label: str, ratio: float,
                    alpha: float) -> TsePropagators:
    """Exact and decomposed propagators of a selective pulse on the ``label`` line."""
    check_label(system, label)
    omega0 = power_from_ratio(system, ratio)
    tau = alpha / omega0
    n = system.nspins
    h_full = effective_hamiltonian(system, observer_field(system, label, omega0))
    h0 = observer_only_hamiltonian(system, label, omega0)
    u0 = propagator(h_full, tau)
    u1 = propagator(h0, tau)
    u_control = controlled_rotation_unitary(n - 1, alpha, label)
    same_channel = all(s.channel == system.spins[0].channel for s in system.spins)
    if n == 3 and label == "00" and same_channel:
        uz = conditional_phase_unitary(TseParams.from_system(system, ratio, alpha))
    else:
        uz = conditional_phase_numeric(h0, n, label, omega0, alpha)
    return TsePropagators(u0, u1, u_control @ uz, omega0, tau)


def fidelity_sweep(system: SpinSystem, alpha: float, ratios: Sequence[float],
                   label: str | None = None, system_id: str = "custom") -> FidelityCurve:
    """Q = 1 - F(U0, U2) over a grid of power ratios Omega0 / (pi J01)."""
    ratios = [float(r) for r in ratios]
    if not ratios:
        raise ConfigError("empty ratio list")
    if any(not r > 0 for r in ratios):
        raise ConfigError("ratios must be positive")
    if any(b <= a for a, b in zip(ratios, ratios[1:])):
        raise ConfigError("ratios must be strictly increasing")
    label = "0" * system.nqubits if label is None else label
    qs, f1s = [], []
    for r in ratios:
        props = tse_propagators(system, label, r, alpha)
        qs.append(1.0 - gate_fidelity(props.u0, props.u2))
        f1s.append(gate_fidelity(props.u1, props.u2))
    return FidelityCurve(tuple(ratios), tuple(qs), tuple(f1s), alpha, system_id)


def default_ratio_grid() -> np.ndarray:
    return np.geomspace(0.01, 2.0, 200)

"""Propagators and pulse-sequence execution on deviation density matrices.

Hard pulses are ideal and instantaneous. Soft pulses evolve under the
rotating-frame Hamiltonian, either with a constant amplitude or as a
piecewise-constant truncated Gaussian. Optional T2 damping acts on
coherences once per timed event.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Optional, Union

import numpy as np

from .hamiltonian import RfField, effective_hamiltonian, internal_hamiltonian
from .operators import PAULI_HALF, bit_table, conjugate
from .spin_system import SpinSystem

AXES = {
    "x": ("x", 1.0),
    "y": ("y", 1.0),
    "-x": ("x", -1.0),
    "-y": ("y", -1.0),
}
GRADIENT_MODES = ("crush_all", "crush_nonzero_order")


class SequenceError(ValueError):
    """Invalid pulse-sequence events or sequence files."""


@dataclass(frozen=True)
class Rectangular:
    pass


@dataclass(frozen=True)
class Gaussian:
    truncation: float = 2.5  # half-width in standard deviations
    n_slices: int = 64

    def __post_init__(self):
        if self.n_slices < 8:
            raise SequenceError("gaussian envelope needs n_slices >= 8")
        if not self.truncation > 0:
            raise SequenceError("gaussian truncation must be > 0")

    def weights(self) -> np.ndarray:
        """Slice amplitudes relative to the mean (they average to exactly 1)."""
        t = (np.arange(self.n_slices) + 0.5) / self.n_slices
        w = np.exp(-0.5 * (self.truncation * (2 * t - 1)) ** 2)
        return w / w.mean()


Envelope = Union[Rectangular, Gaussian]


@dataclass(frozen=True)
class HardPulse:
    targets: frozenset
    axis: str
    angle_rad: float

    def __post_init__(self):
        object.__setattr__(self, "targets", frozenset(int(t) for t in self.targets))
        if self.axis not in AXES:
            raise SequenceError(f"hard pulse axis must be one of {list(AXES)}")
        if not math.isfinite(self.angle_rad):
            raise SequenceError("hard pulse angle must be finite")
        if not self.targets:
            raise SequenceError("hard pulse needs at least one target spin")


@dataclass(frozen=True)
class SoftPulse:
    """Shaped pulse; ``rf.amp_rad_s`` is the mean amplitude over the pulse."""

    rf: RfField
    duration_s: float
    envelope: Envelope = field(default_factory=Rectangular)

    def __post_init__(self):
        if not self.duration_s >= 0:
            raise SequenceError("soft pulse duration must be >= 0")


@dataclass(frozen=True)
class Delay:
    duration_s: float

    def __post_init__(self):
        if not self.duration_s >= 0:
            raise SequenceError("delay duration must be >= 0")


@dataclass(frozen=True)
class Gradient:
    mode: str = "crush_all"

    def __post_init__(self):
        if self.mode not in GRADIENT_MODES:
            raise SequenceError(f"gradient mode must be one of {GRADIENT_MODES}")


SequenceEvent = Union[HardPulse, SoftPulse, Delay, Gradient]


@dataclass(frozen=True)
class PulseSequence:
    events: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))

    def __iter__(self):
        return iter(self.events)

    def __len__(self):
        return len(self.events)

    def __add__(self, other: "PulseSequence") -> "PulseSequence":
        return PulseSequence(self.events + tuple(other.events))


def propagator(h: np.ndarray, t: float) -> np.ndarray:
    """exp(-i h t) for Hermitian ``h`` via eigendecomposition."""
    h = np.asarray(h)
    scale = max(1.0, float(np.abs(h).max(initial=0.0)))
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("propagator needs a square matrix")
    if np.abs(h - h.conj().T).max(initial=0.0) > 1e-10 * scale:
        raise ValueError("propagator needs a Hermitian matrix")
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def rotation(targets: Iterable[int], axis: str, angle: float, nspins: int) -> np.ndarray:
    """exp(-i angle sum_{k in targets} I_k,axis) as a Kronecker product."""
    name, sign = AXES[axis]
    half = angle * sign / 2
    p = 2 * PAULI_HALF[name]
    single = math.cos(half) * np.eye(2) - 1j * math.sin(half) * p
    targets = set(targets)
    bad = [t for t in targets if not 0 <= t < nspins]
    if bad:
        raise SequenceError(f"pulse targets {bad} out of range for {nspins} spins")
    eye = np.eye(2, dtype=complex)
    return reduce(np.kron, [single if k in targets else eye for k in range(nspins)])


def soft_pulse_propagator(system: SpinSystem, pulse: SoftPulse) -> np.ndarray:
    rf = pulse.rf
    if isinstance(pulse.envelope, Gaussian):
        dt = pulse.duration_s / pulse.envelope.n_slices
        u = np.eye(system.dim, dtype=complex)
        for w in pulse.envelope.weights():
            slice_rf = RfField(rf.channel, rf.carrier_offset_hz, rf.amp_rad_s * w, rf.phase_rad)
            u = propagator(effective_hamiltonian(system, slice_rf), dt) @ u
        return u
    return propagator(effective_hamiltonian(system, rf), pulse.duration_s)


def coherence_orders(system: SpinSystem) -> np.ndarray:
    """p[r, c] = sum_i gamma_i (bit_i(c) - bit_i(r))."""
    weighted = bit_table(system.nspins) @ system.gammas
    return weighted[None, :] - weighted[:, None]


def t2_decay(system: SpinSystem, t: float) -> np.ndarray:
    """Entrywise damping factors for a timed event of length ``t``."""
    rates = np.array([0.0 if s.t2_s is None else 1.0 / s.t2_s for s in system.spins])
    table = bit_table(system.nspins)
    differs = table[:, None, :] != table[None, :, :]
    return np.exp(-t * (differs @ rates))


def crush(rho: np.ndarray, system: SpinSystem, mode: str = "crush_all") -> np.ndarray:
    if mode == "crush_all":
        return np.diag(np.diag(rho))
    if mode == "crush_nonzero_order":
        keep = np.abs(coherence_orders(system)) < 1e-9
        return np.where(keep, rho, 0)
    raise SequenceError(f"unknown gradient mode {mode!r}")


def apply_event(rho: np.ndarray, event: SequenceEvent, system: SpinSystem,
                t2: bool = False) -> np.ndarray:
    """Apply one sequence event to ``rho``."""
    if rho.shape != (system.dim, system.dim):
        raise ValueError(
            f"density matrix shape {rho.shape} does not match {system.nspins}-spin system"
        )
    if isinstance(event, HardPulse):
        u = rotation(event.targets, event.axis, event.angle_rad, system.nspins)
        return conjugate(u, rho)
    if isinstance(event, Gradient):
        return crush(rho, system, event.mode)
    if isinstance(event, SoftPulse):
        out = conjugate(soft_pulse_propagator(system, event), rho)
        duration = event.duration_s
    elif isinstance(event, Delay):
        out = conjugate(propagator(internal_hamiltonian(system), event.duration_s), rho)
        duration = event.duration_s
    else:
        raise SequenceError(f"unknown event {event!r}")
    if t2:
        out = out * t2_decay(system, duration)
    return out


def run_sequence(system: SpinSystem, seq: PulseSequence, rho0: np.ndarray,
                 t2: bool = False) -> np.ndarray:
    if not len(seq):
        raise SequenceError("empty sequence")
    rho = np.asarray(rho0, dtype=complex)
    for event in seq:
        rho = apply_event(rho, event, system, t2=t2)
    return rho


# Sequence files: one JSON object per line, '#' starts a comment line.

_ANGLE = re.compile(r"^\s*(?P<sign>[-+]?)\s*(?:(?P<k>\d+(?:\.\d*)?)\s*\*?\s*)?pi\s*(?:/\s*(?P<m>\d+(?:\.\d*)?))?\s*$")


def parse_angle(value) -> float:
    """Angle in radians from a number or a string like ``pi``, ``-pi/2``, ``3pi/2``."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    text = str(value)
    m = _ANGLE.match(text)
    if m:
        k = float(m["k"]) if m["k"] else 1.0
        d = float(m["m"]) if m["m"] else 1.0
        if d == 0:
            raise ValueError(f"bad angle {text!r}")
        return (-1 if m["sign"] == "-" else 1) * k * math.pi / d
    try:
        out = float(text)
    except ValueError:
        raise ValueError(f"bad angle {text!r}; use pi, pi/2 or radians") from None
    if not math.isfinite(out):
        raise ValueError(f"bad angle {text!r}")
    return out


def _event_from_dict(d: dict, system: Optional[SpinSystem]) -> SequenceEvent:
    from .hamiltonian import transition_rf_frequency

    kind = d.get("kind")
    if kind == "hard":
        return HardPulse(frozenset(d["targets"]), d.get("axis", "x"), parse_angle(d["angle"]))
    if kind == "soft":
        if "transition" in d:
            if system is None:
                raise SequenceError("'transition' needs a spin system to resolve")
            carrier = transition_rf_frequency(system, str(d["transition"]))
        else:
            carrier = float(d["carrier_hz"])
        channel = d.get("channel") or (system.spins[0].channel if system else None)
        if channel is None:
            raise SequenceError("soft pulse needs a channel")
        env = d.get("envelope", "rectangular")
        if env == "rectangular":
            envelope = Rectangular()
        elif env == "gaussian":
            envelope = Gaussian(float(d.get("truncation", 2.5)), int(d.get("n_slices", 64)))
        else:
            raise SequenceError(f"unknown envelope {env!r}")
        rf = RfField(channel, carrier, float(d["amp_rad_s"]), parse_angle(d.get("phase", "pi/2")))
        return SoftPulse(rf, float(d["duration_s"]), envelope)
    if kind == "delay":
        return Delay(float(d["duration_s"]))
    if kind == "gradient":
        return Gradient(d.get("mode", "crush_all"))
    raise SequenceError(f"unknown event kind {kind!r}")


def load_sequence(text: str, system: Optional[SpinSystem] = None) -> PulseSequence:
    """Parse a sequence file; errors name the offending line."""
    events = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            d = json.loads(line)
            if not isinstance(d, dict):
                raise SequenceError("each event must be a JSON object")
            events.append(_event_from_dict(d, system))
        except json.JSONDecodeError as exc:
            raise SequenceError(f"line {lineno}: malformed JSON ({exc.msg})") from None
        except KeyError as exc:
            raise SequenceError(f"line {lineno}: missing field {exc.args[0]!r}") from None
        except (TypeError, ValueError) as exc:
            raise SequenceError(f"line {lineno}: {exc}") from None
    if not events:
        raise SequenceError("empty sequence")
    return PulseSequence(tuple(events))


def _event_to_dict(event: SequenceEvent) -> dict:
    if isinstance(event, HardPulse):
        return {"kind": "hard", "targets": sorted(event.targets), "axis": event.axis,
                "angle": event.angle_rad}
    if isinstance(event, SoftPulse):
        d = {"kind": "soft", "channel": event.rf.channel,
             "carrier_hz": event.rf.carrier_offset_hz, "amp_rad_s": event.rf.amp_rad_s,
             "phase": event.rf.phase_rad, "duration_s": event.duration_s}
        if isinstance(event.envelope, Gaussian):
            d.update(envelope="gaussian", truncation=event.envelope.truncation,
                     n_slices=event.envelope.n_slices)
        else:
            d["envelope"] = "rectangular"
        return d
    if isinstance(event, Delay):
        return {"kind": "delay", "duration_s": event.duration_s}
    if isinstance(event, Gradient):
        return {"kind": "gradient", "mode": event.mode}
    raise SequenceError(f"unknown event {event!r}")


def dump_sequence(seq: PulseSequence) -> str:
    return "".join(json.dumps(_event_to_dict(e)) + "\n" for e in seq)

"""Spin-system descriptions: validation, JSON config I/O and presets.

Index 0 is always the observer spin; indices ``1..n`` are the computational
qubits. Offsets are given in Hz within each channel's own rotating frame.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from typing import Any, Optional, Sequence

import numpy as np

# Transmitter frequencies of the spectrometer used for the alanine sample.
PROTON_MHZ = 500.13
CARBON_MHZ = 125.77


class ConfigError(ValueError):
    """Raised for malformed or physically invalid spin-system descriptions."""


@dataclass(frozen=True)
class Spin:
    label: str
    channel: str
    offset_hz: float
    gamma_rel: float = 1.0
    t2_s: Optional[float] = None

    def __post_init__(self):
        if not self.gamma_rel > 0:
            raise ConfigError(f"spin {self.label!r}: gamma_rel must be > 0")
        if self.t2_s is not None and not self.t2_s > 0:
            raise ConfigError(f"spin {self.label!r}: t2_s must be > 0")


@dataclass(frozen=True)
class SpinSystem:
    """Weakly coupled spin-1/2 system with scalar couplings ``j_hz`` (Hz).

    ``j_hz`` is stored as a tuple of tuples so that systems hash and compare
    by value; use :attr:`j` for the array form.
    """

    spins: tuple[Spin, ...]
    j_hz: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "spins", tuple(self.spins))
        object.__setattr__(
            self, "j_hz", tuple(tuple(float(v) for v in row) for row in self.j_hz)
        )
        n = len(self.spins)
        if n < 2:
            raise ConfigError("a spin system needs at least 2 spins")
        if len(self.j_hz) != n or any(len(row) != n for row in self.j_hz):
            raise ConfigError(f"j_hz must be a {n}x{n} matrix")
        j = self.j
        if not np.all(np.isfinite(j)):
            raise ConfigError("j_hz entries must be finite")
        if np.any(np.diag(j) != 0):
            raise ConfigError("j_hz must have a zero diagonal")
        if not np.array_equal(j, j.T):
            bad = np.argwhere(j != j.T)[0]
            raise ConfigError(
                f"j_hz is not symmetric: j_hz[{bad[0]}][{bad[1]}]={j[bad[0], bad[1]]} "
                f"but j_hz[{bad[1]}][{bad[0]}]={j[bad[1], bad[0]]}"
            )
        unresolved = [i for i in range(1, n) if j[0, i] == 0]
        if unresolved:
            warnings.warn(
                f"observer has no J coupling to spin(s) {unresolved}; "
                "their register states will not be resolved in the spectrum",
                stacklevel=3,
            )

    @property
    def nspins(self) -> int:
        return len(self.spins)

    @property
    def nqubits(self) -> int:
        """Number of computational qubits (all spins except the observer)."""
        return len(self.spins) - 1

    @property
    def dim(self) -> int:
        return 2 ** len(self.spins)

    @property
    def j(self) -> np.ndarray:
        return np.array(self.j_hz, dtype=float)

    @property
    def offsets_hz(self) -> np.ndarray:
        return np.array([s.offset_hz for s in self.spins], dtype=float)

    @property
    def gammas(self) -> np.ndarray:
        return np.array([s.gamma_rel for s in self.spins], dtype=float)

    def channel_spins(self, channel: str) -> list[int]:
        idx = [i for i, s in enumerate(self.spins) if s.channel == channel]
        if not idx:
            raise ConfigError(f"no spins on channel {channel!r}")
        return idx

    def subsystem(self, indices: Sequence[int]) -> "SpinSystem":
        """Keep only ``indices`` (in the given order); the first becomes the observer."""
        j = self.j[np.ix_(indices, indices)]
        return SpinSystem(tuple(self.spins[i] for i in indices), tuple(map(tuple, j)))


def _system_from_dict(data: Any) -> SpinSystem:
    if not isinstance(data, dict) or "spins" not in data or "j_hz" not in data:
        raise ConfigError("config needs top-level keys 'spins' and 'j_hz'")
    spins = []
    for k, entry in enumerate(data["spins"]):
        if not isinstance(entry, dict):
            raise ConfigError(f"spins[{k}] must be an object")
        unknown = set(entry) - {"label", "channel", "offset_hz", "gamma_rel", "t2_s"}
        if unknown:
            raise ConfigError(f"spins[{k}]: unknown keys {sorted(unknown)}")
        try:
            spins.append(
                Spin(
                    label=str(entry["label"]),
                    channel=str(entry["channel"]),
                    offset_hz=float(entry["offset_hz"]),
                    gamma_rel=float(entry.get("gamma_rel", 1.0)),
                    t2_s=None if entry.get("t2_s") is None else float(entry["t2_s"]),
                )
            )
        except KeyError as exc:
            raise ConfigError(f"spins[{k}] is missing {exc.args[0]!r}") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"spins[{k}]: {exc}") from None
    try:
        j = [[float(v) for v in row] for row in data["j_hz"]]
    except (TypeError, ValueError):
        raise ConfigError("j_hz must be a square matrix of numbers") from None
    return SpinSystem(tuple(spins), tuple(map(tuple, j)))


def load_system(config_text: str) -> SpinSystem:
    """Parse a JSON spin-system description and validate it."""
    try:
        data = json.loads(config_text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    return _system_from_dict(data)


def dump_system(system: SpinSystem) -> str:
    """Serialize ``system`` to the JSON form read by :func:`load_system`."""
    spins = []
    for s in system.spins:
        entry = {"label": s.label, "channel": s.channel, "offset_hz": s.offset_hz,
                 "gamma_rel": s.gamma_rel}
        if s.t2_s is not None:
            entry["t2_s"] = s.t2_s
        spins.append(entry)
    return json.dumps({"spins": spins, "j_hz": [list(r) for r in system.j_hz]}, indent=2)


def alanine_preset() -> SpinSystem:
    """13C-labeled alanine, four qubits.

    Ordering follows the spin numbers of the measured parameter table rather
    than its row order: C-alpha (observer, 0), C' (1), C-beta (2), H (3).
    The proton offset is relative to the 1H transmitter; its gamma_rel is the
    ratio of the two transmitter frequencies.
    """
    spins = (
        Spin("Ca", "13C", 0.0, 1.0, t2_s=0.41),
        Spin("C'", "13C", -4320.0),
        Spin("Cb", "13C", 15793.0),
        Spin("H", "1H", 1550.0, PROTON_MHZ / CARBON_MHZ),
    )
    j = np.zeros((4, 4))
    for (a, b), v in {
        (0, 1): 34.94, (0, 2): 53.81, (0, 3): 143.21,
        (1, 2): -1.2, (1, 3): 5.5, (2, 3): 5.1,
    }.items():
        j[a, b] = j[b, a] = v
    return SpinSystem(spins, tuple(map(tuple, j)))


def alanine_carbons_preset() -> SpinSystem:
    """Homonuclear three-spin reconstruction: the alanine carbons only.

    Used as the stand-in 3-spin system for fidelity sweeps; the original
    three-spin parameters were never published.
    """
    return alanine_preset().subsystem([0, 1, 2])


PRESETS = {
    "alanine": alanine_preset,
    "alanine-carbons": alanine_carbons_preset,
}


def get_preset(name: str) -> SpinSystem:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ConfigError(
            f"unknown preset {name!r}; choose from {sorted(PRESETS)}"
        ) from None


def check_bits(bits: str, n: int, what: str = "label") -> str:
    """Validate a register bit string of expected length ``n``."""
    if not isinstance(bits, str) or set(bits) - {"0", "1"}:
        raise ConfigError(f"{what} {bits!r} must be a string of 0s and 1s")
    if len(bits) != n:
        raise ConfigError(
            f"{what} length {len(bits)} does not match {n} computational qubits"
        )
    return bits


def check_label(system: SpinSystem, label: str, what: str = "label") -> str:
    return check_bits(label, system.nqubits, what)

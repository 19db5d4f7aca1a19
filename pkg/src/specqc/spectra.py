"""Observer-spin readout: multiplet stick spectra, lineshapes and answer decoding."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .evolution import HardPulse, apply_event
from .hamiltonian import transition_rf_frequency
from .operators import RAISING, register_projector
from .spin_system import SpinSystem


class NoSignalError(ValueError):
    pass


@dataclass(frozen=True)
class SpectralLine:
    register_label: str
    freq_hz: float
    amplitude: complex


@dataclass(frozen=True)
class Spectrum:
    lines: tuple[SpectralLine, ...]
    rendered: Optional[tuple[tuple[float, float], ...]] = None

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([ln.amplitude for ln in self.lines])

    @property
    def labels(self) -> list[str]:
        return [ln.register_label for ln in self.lines]

    def line(self, label: str) -> SpectralLine:
        for ln in self.lines:
            if ln.register_label == label:
                return ln
        raise KeyError(label)


@dataclass(frozen=True)
class Decoded:
    label: str
    confidence: float
    tie: bool = False


def multiplet_amplitudes(rho: np.ndarray, system: SpinSystem) -> Spectrum:
    """Observer single-quantum coherence, resolved by register state.

    Amplitude of line ``s`` is ``2 Tr[(I0+ (x) |s><s|) rho]``. The factor 2
    makes ``I0x (x) rho_out`` map onto the diagonal of ``rho_out`` exactly.
    """
    if rho.shape != (system.dim, system.dim):
        raise ValueError(
            f"density matrix shape {rho.shape} does not match {system.nspins}-spin system"
        )
    n = system.nqubits
    raising = np.kron(RAISING, np.eye(2**n))
    lines = []
    for s in range(2**n):
        label = format(s, f"0{n}b")
        detector = raising @ register_projector(label, system.nspins)
        amp = 2 * np.trace(detector @ rho)
        lines.append(SpectralLine(label, transition_rf_frequency(system, label), complex(amp)))
    return Spectrum(tuple(lines))


def readout_spectrum(rho: np.ndarray, system: SpinSystem) -> Spectrum:
    """Spectrum after an ideal (pi/2)_y pulse on the observer."""
    rho = apply_event(rho, HardPulse(frozenset({0}), "y", math.pi / 2), system)
    return multiplet_amplitudes(rho, system)


def decode_answer(spec: Spectrum, tol: float = 1e-12) -> Decoded:
    """Label of the strongest line and its share of the total |amplitude|."""
    if not spec.lines:
        raise NoSignalError("spectrum has no lines")
    mags = np.abs(spec.amplitudes)
    total = mags.sum()
    if total <= tol:
        raise NoSignalError("no signal")
    best = float(mags.max())
    winners = [k for k, m in enumerate(mags) if best - m <= tol * max(1.0, best)]
    # Lines are ordered by register value, so the first winner is the lowest label.
    k = winners[0]
    return Decoded(spec.lines[k].register_label, best / float(total), len(winners) > 1)


def lorentzian(x: np.ndarray, linewidth_hz: float) -> np.ndarray:
    """Unit-height Lorentzian with full width at half maximum ``linewidth_hz``."""
    return 1.0 / (1.0 + (2.0 * x / linewidth_hz) ** 2)


def frequency_grid(start: float, stop: float, step: float) -> np.ndarray:
    if not step > 0 or not stop >= start:
        raise ValueError("grid needs start <= stop and step > 0")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def default_grid(spec: Spectrum, linewidth_hz: float) -> np.ndarray:
    freqs = [ln.freq_hz for ln in spec.lines]
    pad = 10 * linewidth_hz + 10.0
    step = linewidth_hz / 20
    return frequency_grid(math.floor(min(freqs) - pad), math.ceil(max(freqs) + pad), step)


def render_lorentzian(spec: Spectrum, linewidth_hz: float = 1.0,
                      grid: Optional[np.ndarray] = None) -> Spectrum:
    """Absorptive spectrum: sum of Re(amp) * Lorentzian at each line."""
    if not linewidth_hz > 0:
        raise ValueError("linewidth must be > 0")
    grid = default_grid(spec, linewidth_hz) if grid is None else np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty frequency grid")
    intensity = np.zeros_like(grid)
    for ln in spec.lines:
        intensity += ln.amplitude.real * lorentzian(grid - ln.freq_hz, linewidth_hz)
    rendered = tuple((float(f), float(v)) for f, v in zip(grid, intensity))
    return Spectrum(spec.lines, rendered)


def _fmt(x: float) -> str:
    return f"{x:.15g}"


def sticks_csv(spec: Spectrum) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["register_label", "freq_hz", "re_amp", "im_amp"])
    for ln in spec.lines:
        w.writerow([ln.register_label, _fmt(ln.freq_hz), _fmt(ln.amplitude.real),
                    _fmt(ln.amplitude.imag)])
    return buf.getvalue()


def rendered_csv(spec: Spectrum) -> str:
    if spec.rendered is None:
        raise ValueError("spectrum has not been rendered")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["freq_hz", "intensity"])
    for f, v in spec.rendered:
        w.writerow([_fmt(f), _fmt(v)])
    return buf.getvalue()


def decode_json(spec: Spectrum, decoded: Decoded) -> dict:
    return {
        "answer": decoded.label,
        "confidence": decoded.confidence,
        "tie": decoded.tie,
        "lines": [
            {"register_label": ln.register_label, "freq_hz": ln.freq_hz,
             "re_amp": ln.amplitude.real, "im_amp": ln.amplitude.imag}
            for ln in spec.lines
        ],
    }

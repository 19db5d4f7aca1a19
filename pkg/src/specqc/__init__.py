"""Simulator for spectral-implementation NMR quantum processors.

An observer spin (index 0) is J-coupled to ``n`` computational spins; each of
the observer's ``2**n`` multiplet lines labels one register basis state. The
package prepares labeled pseudo-pure states, analyses transition-selective
controlled rotations, and runs the Bernstein-Vazirani algorithm, reading
answers off the observer spectrum.
"""

from .spin_system import (
    Spin,
    SpinSystem,
    ConfigError,
    alanine_carbons_preset,
    alanine_preset,
    dump_system,
    load_system,
)
from .operators import lpps_state, projector, spin_operator, thermal_equilibrium
from .hamiltonian import (
    RfField,
    effective_hamiltonian,
    internal_hamiltonian,
    transition_rf_frequency,
)
from .evolution import (
    Delay,
    Gaussian,
    Gradient,
    HardPulse,
    PulseSequence,
    Rectangular,
    SoftPulse,
    apply_event,
    propagator,
    run_sequence,
)
from .spectra import (
    Decoded,
    Spectrum,
    SpectralLine,
    decode_answer,
    multiplet_amplitudes,
    readout_spectrum,
    render_lorentzian,
)

__version__ = "0.1.0"

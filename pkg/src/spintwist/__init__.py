"""Collective-spin squeezing and twisting toolkit.

Dicke-basis spin operators, twisting Hamiltonians, Floquet pulse schemes,
open-system evolution, quantum Fisher information and parity readout.
"""

from .spin import (
    BlochAngles, DensityMatrix, PureState, SpinSystem, aghz_state, build_system, coherent_state,
    dicke_state, ghz_state, parity_matrix, rotation_matrix, x_polarized,
)
from .models import Hamiltonian, build_model, h_cavity_oat, h_oat, h_tat, h_tnt, h_xyz
from .propagate import IntegrationError, evolve_lindblad, evolve_unitary, run_pulse_schedule, superradiance
from .floquet import PulseSchedule, build_schedule, effective_hamiltonian, tau_from_alpha
from .metrology import FlatSignalError, parity_expectation, qfi, qfi_optimal, sensitivity
from .loss import lose_particles

__version__ = "0.1.0"

__all__ = [
    "BlochAngles", "DensityMatrix", "PureState", "SpinSystem", "aghz_state", "build_system", "coherent_state",
    "dicke_state", "ghz_state", "parity_matrix", "rotation_matrix", "x_polarized",
    "Hamiltonian", "build_model", "h_cavity_oat", "h_oat", "h_tat", "h_tnt", "h_xyz",
    "IntegrationError", "evolve_lindblad", "evolve_unitary", "run_pulse_schedule", "superradiance",
    "PulseSchedule", "build_schedule", "effective_hamiltonian", "tau_from_alpha",
    "FlatSignalError", "parity_expectation", "qfi", "qfi_optimal", "sensitivity",
    "lose_particles",
]

"""Numerical laboratory for a flux-modulated parametric CZ gate.

Simulates a tunable/fixed transmon pair driven at the |11>-|02> sideband
resonance: device flux response and AC sweet spot, pulse synthesis,
unitary and Lindblad dynamics, instrument-noise coherence experiments,
chevron-based gate calibration, and a full interleaved
randomized-benchmarking statistical pipeline.
"""

__version__ = "0.1.0"

from .device import (CoupledPair, DeviceError, ModulationResponse,
                     NoSweetSpotError, TransmonSpec, average_shift,
                     effective_coupling, frequency_at_flux, modulation_response,
                     pair_from_dict, pair_from_json, q6_spec, q6q7_pair,
                     q7_spec, resonance_offset, sweet_spot_amplitude)
from .pulse import FluxPulse, PulseError, Waveform, pulse_from_dict, synthesize
from .dynamics import (CZ, DecoherenceRates, DensityMatrix, DynamicsError,
                       Superoperator, average_gate_fidelity,
                       build_hamiltonian, computational_unitary, evolve,
                       frame_correction_unitary, gate_superoperator,
                       pauli_transfer_matrix, pulse_unitary)
from .noise import (CoherenceFit, InstrumentPSD, NoiseError, NoiseProfile,
                    amplitude_scale_from_curve, load_psd, noise_realization,
                    simulate_ramsey_under_modulation,
                    simulate_t1_under_modulation)
from .clifford import (CliffordElement, CliffordGroup, NativeSequence,
                       clifford_compose, clifford_group, clifford_invert,
                       clifford_sample, compile_to_native, decompose_with_cz)
from .calibration import (CalibrationError, ChevronDataset, CZCalibration,
                          SearchConfig, calibrate_cz, extract_phases,
                          fit_slice, predicted_resonance, run_chevron)
from .rb import (DecayFit, ECDF, IRBResult, RBConfig, RBDataset, bootstrap_ci,
                 coherence_limited_prediction, ecdf_with_band, fit_decay,
                 irb_estimate, run_rb, run_repeated_irb, stability_test)

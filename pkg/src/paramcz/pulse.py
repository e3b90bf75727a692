"""Parametric flux-pulse description and sampled waveform synthesis.

The drive is a single-frequency carrier under an envelope with a flat top
and symmetric error-function shoulders.  Times in ns, frequencies in MHz,
flux in units of the flux quantum.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import erf


class PulseError(ValueError):
    """Invalid pulse parameters."""


@dataclass(frozen=True)
class FluxPulse:
    """Flux drive: ``dc_bias + envelope(t) * cos(2*pi*mod_freq*t + phase)``.

    ``edge`` is the rise/fall time; the erf shoulders use a width parameter
    of ``edge/4`` so the envelope reaches half amplitude at ``edge/2`` from
    either end and ~2.3%/97.7% at the shoulder boundaries.
    """

    amplitude: float
    mod_freq: float
    duration: float
    edge: float = 0.0
    carrier_phase: float = 0.0
    dc_bias: float = 0.0

    def __post_init__(self):
        if self.duration < 0 or self.edge < 0:
            raise PulseError("times must be non-negative")
        if self.duration < 2 * self.edge:
            raise PulseError(
                f"duration {self.duration} ns shorter than twice the edge {self.edge} ns")

    def envelope(self, t):
        """Envelope value at time ``t`` (ns); vectorized."""
        t = np.asarray(t, dtype=float)
        if self.edge == 0.0:
            out = np.where((t >= 0.0) & (t <= self.duration), self.amplitude, 0.0)
            return out if out.ndim else float(out)
        sigma = self.edge / 4.0
        a = erf((t - self.edge / 2.0) / (np.sqrt(2.0) * sigma))
        b = erf((self.duration - self.edge / 2.0 - t) / (np.sqrt(2.0) * sigma))
        out = 0.5 * self.amplitude * (a + b)
        return out if out.ndim else float(out)

    def flux(self, t):
        """Total applied flux at time ``t`` (ns); vectorized."""
        t = np.asarray(t, dtype=float)
        w = 2e-3 * np.pi * self.mod_freq  # rad/ns
        out = self.dc_bias + self.envelope(t) * np.cos(w * t + self.carrier_phase)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class Waveform:
    """Sampled realization of a flux pulse."""

    sample_rate: float  # samples per ns
    samples: np.ndarray = field(repr=False)

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.samples)) / self.sample_rate

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["time_ns", "flux_phi0"])
            for t, v in zip(self.times, self.samples):
                w.writerow([repr(float(t)), repr(float(v))])


def synthesize(pulse: FluxPulse, sample_rate: float) -> Waveform:
    """Sample the pulse at ``sample_rate`` samples/ns."""
    n = round(pulse.duration * sample_rate)
    if n < 16:
        raise PulseError("sample_rate * duration must give at least 16 samples")
    t = np.arange(n) / sample_rate
    return Waveform(sample_rate=sample_rate, samples=pulse.flux(t))


def pulse_from_dict(d: dict) -> FluxPulse:
    known = {"amplitude", "mod_freq", "duration", "edge", "carrier_phase", "dc_bias"}
    extra = set(d) - known
    if extra:
        raise PulseError(f"unknown pulse keys: {sorted(extra)}")
    return FluxPulse(**d)

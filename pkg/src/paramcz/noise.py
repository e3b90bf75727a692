"""Instrument noise models and Monte-Carlo coherence experiments.

The flux drive inherits noise from the waveform generator: a white floor
(dBm/Hz, converted to a flux PSD through a configurable transfer
coefficient), 1/f amplitude noise on the modulation envelope, optional
spurs, and a slow drift of T1 across repeated experiments.

Dephasing under modulation is simulated with the quasi-static + white
decomposition: per shot, the 1/f band integrates to a static amplitude
offset, while the white component contributes a Gaussian random phase
whose variance grows linearly in time with the cycle-averaged square of
the flux-to-frequency slope.  This reproduces the sweet-spot dip-and-
resurgence shape without integrating GHz-scale dynamics over tens of
microseconds.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import curve_fit

from .device import CoupledPair, TransmonSpec, frequency_at_flux, average_shift

TWOPI = 2.0 * np.pi

# Flux PSD per unit instrument power density.  The wiring chain between the
# generator and the SQUID is not part of the model; this default is chosen
# so that a -150 dBm/Hz floor preserves coherence at the AC sweet spot
# while a 15 dB worse floor degrades it to a partial resurgence.
DEFAULT_FLUX_TRANSFER = 0.2  # Phi0^2/Hz per mW/Hz


class NoiseError(ValueError):
    """Invalid noise configuration or data."""


class PSDParseError(NoiseError):
    """Malformed PSD file."""


class FitError(RuntimeError):
    """Non-convergent coherence fit."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class NoMinimumError(NoiseError):
    """Curve has no interior minimum."""


@dataclass(frozen=True)
class NoiseProfile:
    """Instrument noise description.

    ``white_floor`` in dBm/Hz; ``one_over_f_amp`` in micro-flux-quanta per
    sqrt(Hz) at 1 Hz (amplitude noise on the modulation envelope);
    ``spurs`` as (frequency MHz, power dBm) tones; ``t1_drift`` an optional
    piecewise-constant schedule of T1 multipliers over wall-clock progress.
    """

    white_floor: float = -150.0
    flux_transfer: float = DEFAULT_FLUX_TRANSFER
    one_over_f_amp: float = 10.0
    spurs: tuple = ()
    t1_drift: tuple | None = None

    def __post_init__(self):
        if self.flux_transfer < 0 or self.one_over_f_amp < 0:
            raise NoiseError("noise magnitudes must be non-negative")

    @property
    def white_flux_psd(self) -> float:
        """One-sided white flux PSD in Phi0^2/Hz."""
        return self.flux_transfer * 10.0 ** (self.white_floor / 10.0)  # dBm -> mW

    def amplitude_sigma(self, duration_ns: float, t_experiment_s: float = 1.0) -> float:
        """Quasi-static amplitude offset sigma (Phi0) for one shot.

        Integrates the 1/f amplitude PSD between the inverse experiment
        duration and the inverse shot duration.
        """
        if self.one_over_f_amp == 0:
            return 0.0
        f_lo = 1.0 / t_experiment_s
        f_hi = 1.0 / (duration_ns * 1e-9)
        if f_hi <= f_lo:
            return 0.0
        amp = self.one_over_f_amp * 1e-6
        return amp * np.sqrt(np.log(f_hi / f_lo))

    def t1_multiplier(self, fraction: float) -> float:
        """T1 multiplier at a wall-clock progress fraction in [0, 1]."""
        if not self.t1_drift:
            return 1.0
        idx = min(int(fraction * len(self.t1_drift)), len(self.t1_drift) - 1)
        return self.t1_drift[idx]


@dataclass(frozen=True)
class InstrumentPSD:
    """Measured instrument power spectral density."""

    frequencies: np.ndarray  # MHz
    powers: np.ndarray  # dBm/Hz

    def __post_init__(self):
        if len(self.frequencies) != len(self.powers):
            raise PSDParseError("frequency and power columns differ in length")
        if np.any(np.diff(self.frequencies) <= 0):
            raise PSDParseError("frequency grid must be strictly increasing")

    def white_floor(self, spur_percentile: float = 50.0) -> float:
        """Estimate the white floor (dBm/Hz) as a robust level away from spurs."""
        return float(np.percentile(self.powers, spur_percentile))


def load_psd(path) -> InstrumentPSD:
    """Parse a two-column CSV (frequency MHz, power dBm/Hz)."""
    freqs, powers = [], []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            if lineno == 1 and not _is_number(row[0]):
                continue  # header
            if len(row) < 2 or not (_is_number(row[0]) and _is_number(row[1])):
                raise PSDParseError(f"malformed PSD row at line {lineno}: {row}")
            freqs.append(float(row[0]))
            powers.append(float(row[1]))
    if len(freqs) < 2:
        raise PSDParseError("PSD file needs at least two rows")
    return InstrumentPSD(np.array(freqs), np.array(powers))


def _is_number(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


def noise_realization(profile: NoiseProfile, duration: float, sample_rate: float,
                      rng: np.random.Generator) -> np.ndarray:
    """Sampled flux-offset trace over ``duration`` ns at ``sample_rate``/ns.

    White component: independent Gaussians with variance equal to the flux
    PSD times the Nyquist bandwidth.  1/f component: one quasi-static
    offset per realization.  Spurs: fixed tones with random phase.
    """
    n = max(1, round(duration * sample_rate))
    sigma_w = np.sqrt(profile.white_flux_psd * sample_rate * 1e9 / 2.0)
    trace = rng.normal(0.0, sigma_w, size=n) if sigma_w > 0 else np.zeros(n)
    sigma_q = profile.amplitude_sigma(duration)
    if sigma_q > 0:
        trace = trace + rng.normal(0.0, sigma_q)
    for freq_mhz, power_dbm in profile.spurs:
        amp = np.sqrt(2.0 * profile.flux_transfer * 10.0 ** (power_dbm / 10.0))
        t = np.arange(n) / sample_rate
        trace = trace + amp * np.cos(TWOPI * 1e-3 * freq_mhz * t + rng.uniform(0, TWOPI))
    return trace


# ---------------------------------------------------------------------------
# Cycle-averaged sensitivities of the modulated qubit

def _cycle_slope_sq(spec: TransmonSpec, epsilon: float, dc_bias: float = 0.0,
                    n: int = 2048) -> float:
    """Mean over a modulation cycle of (df/dPhi)^2, in GHz^2/Phi0^2."""
    th = np.linspace(0.0, TWOPI, n, endpoint=False)
    phi = dc_bias + epsilon * np.cos(th)
    h = 1e-6
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        slope = (frequency_at_flux(spec, phi + h) - frequency_at_flux(spec, phi - h)) / (2 * h)
    return float(np.mean(slope ** 2))


def white_dephasing_rate(spec: TransmonSpec, epsilon: float,
                         profile: NoiseProfile, dc_bias: float = 0.0) -> float:
    """Pure dephasing rate (1/ns) from the white flux floor under modulation."""
    s_ns = profile.white_flux_psd * 1e9  # Phi0^2 * ns
    return TWOPI ** 2 * s_ns * _cycle_slope_sq(spec, epsilon, dc_bias) / 4.0


@dataclass
class CoherenceFit:
    """Fitted decay time with a 90% confidence interval (microseconds)."""

    value: float
    ci_low: float
    ci_high: float
    params: dict = field(default_factory=dict)


def _fit_exp_cos(delays_ns, signal, t2_guess_ns, freq_guess_ghz, gaussian=False):
    shape = 2.0 if gaussian else 1.0

    def model(t, a, t2, f, ph, c):
        return a * np.exp(-((t / t2) ** shape)) * np.cos(TWOPI * f * t + ph) + c

    p0 = [0.5, t2_guess_ns, freq_guess_ghz, 0.0, 0.5]
    try:
        popt, pcov = curve_fit(model, delays_ns, signal, p0=p0,
                               bounds=([0, 1.0, 0, -np.pi, 0],
                                       [1, 1e8, 1.0, np.pi, 1]), maxfev=20000)
    except RuntimeError as exc:
        raise FitError(f"Ramsey fit failed: {exc}",
                       residuals=np.asarray(signal)) from exc
    resid = signal - model(delays_ns, *popt)
    err = np.sqrt(max(pcov[1, 1], 0.0))
    if not np.isfinite(err):
        raise FitError("Ramsey fit covariance is singular", residuals=resid)
    return popt, err, resid


def simulate_ramsey_under_modulation(pair: CoupledPair, epsilon: float,
                                     omega_p: float, profile: NoiseProfile,
                                     delays, shots: int, seed: int,
                                     detuning_mhz: float = 0.25,
                                     gaussian_decay: bool = False) -> CoherenceFit:
    """Monte-Carlo Ramsey experiment on the tunable qubit under modulation.

    Each delay replaces free evolution with a flux drive at (epsilon,
    omega_p); every shot draws a fresh quasi-static amplitude offset and a
    white-noise phase, and the fringe is fit to a decaying oscillation.
    Returns the fitted dephasing time in microseconds.
    """
    spec = pair.tunable
    delays = np.asarray(delays, dtype=float)
    t2_ns = spec.t2_star * 1e3
    if delays.max() < 2.0 * t2_ns:
        raise NoiseError("delays must span at least twice the expected T2*")
    rng = np.random.default_rng(seed)
    gamma_w = white_dephasing_rate(spec, epsilon, profile, pair.dc_bias)
    mean_shift = average_shift(spec, epsilon, omega_p, pair.dc_bias) if epsilon else 0.0
    # Interpolate the amplitude-to-shift curve once; per-shot quadrature is
    # far too slow for the Monte Carlo.
    shift_of_eps = None
    sigma_max = profile.amplitude_sigma(max(float(delays.min()), 1.0))
    if epsilon > 0 and sigma_max > 0:
        grid = np.linspace(max(epsilon - 8 * sigma_max, 0.0),
                           epsilon + 8 * sigma_max, 33)
        shift_of_eps = CubicSpline(grid, average_shift(spec, grid, omega_p,
                                                       pair.dc_bias))
    signal = np.empty(len(delays))
    for i, tau in enumerate(delays):
        sigma_q = profile.amplitude_sigma(max(tau, 1.0))
        if shift_of_eps is not None and sigma_q > 0:
            d_eps = rng.normal(0.0, sigma_q, size=shots)
            shifted = shift_of_eps(np.clip(epsilon + d_eps, 0.0, None))
            d_omega = TWOPI * 1e-3 * (shifted - mean_shift)  # rad/ns
        else:
            d_omega = np.zeros(shots)
        phi_w = rng.normal(0.0, np.sqrt(2.0 * gamma_w * tau), size=shots)
        phase = TWOPI * 1e-3 * detuning_mhz * tau + d_omega * tau + phi_w
        coherence = np.exp(-tau / t2_ns)
        p_up = 0.5 * (1.0 + coherence * np.cos(phase))
        signal[i] = np.mean(rng.random(shots) < p_up)
    popt, err, resid = _fit_exp_cos(delays, signal, t2_ns, 1e-3 * detuning_mhz,
                                    gaussian=gaussian_decay)
    t2_us = popt[1] * 1e-3
    ci = 1.645 * err * 1e-3
    return CoherenceFit(t2_us, t2_us - ci, t2_us + ci,
                        params={"contrast": popt[0], "freq_ghz": popt[2],
                                "residual_rms": float(np.sqrt(np.mean(resid ** 2)))})


def simulate_t1_under_modulation(pair: CoupledPair, epsilon: float,
                                 omega_p: float, profile: NoiseProfile,
                                 delays, shots: int, seed: int,
                                 drift_fraction: float | None = None) -> CoherenceFit:
    """Monte-Carlo relaxation experiment under modulation.

    Modulation does not couple to relaxation in this model; the recovered
    T1 equals the input (times any drift multiplier) up to shot noise.
    """
    spec = pair.tunable
    delays = np.asarray(delays, dtype=float)
    mult = profile.t1_multiplier(drift_fraction) if drift_fraction is not None else 1.0
    t1_ns = spec.t1 * 1e3 * mult
    rng = np.random.default_rng(seed)
    signal = np.array([np.mean(rng.random(shots) < np.exp(-tau / t1_ns))
                       for tau in delays])

    def model(t, a, t1, c):
        return a * np.exp(-t / t1) + c

    try:
        popt, pcov = curve_fit(model, delays, signal, p0=[1.0, t1_ns, 0.0],
                               bounds=([0, 1.0, -0.2], [1.2, 1e8, 0.2]), maxfev=20000)
    except RuntimeError as exc:
        raise FitError(f"T1 fit failed: {exc}", residuals=signal) from exc
    err = np.sqrt(max(pcov[1, 1], 0.0))
    t1_us = popt[1] * 1e-3
    ci = 1.645 * err * 1e-3
    return CoherenceFit(t1_us, t1_us - ci, t1_us + ci, params={"amplitude": popt[0]})


def amplitude_scale_from_curve(raw_amplitudes, delta_omega_samples,
                               sweet_spot: float = 0.6) -> float:
    """Linear scale (Phi0 per raw unit) putting the curve minimum at 0.6 Phi0.

    The minimum location is refined by a local quadratic fit around the
    discrete argmin.
    """
    raw = np.asarray(raw_amplitudes, dtype=float)
    dw = np.asarray(delta_omega_samples, dtype=float)
    if len(raw) != len(dw) or len(raw) < 3:
        raise NoiseError("need matched curves with at least 3 points")
    i = int(np.argmin(dw))
    if i == 0 or i == len(dw) - 1:
        raise NoMinimumError("curve has no interior minimum")
    lo, hi = max(0, i - 2), min(len(raw), i + 3)
    coeffs = np.polyfit(raw[lo:hi], dw[lo:hi], 2)
    if coeffs[0] <= 0:
        raise NoMinimumError("local fit is not convex at the minimum")
    argmin = -coeffs[1] / (2.0 * coeffs[0])
    if not (raw[lo] <= argmin <= raw[hi - 1]):
        argmin = raw[i]
    return float(sweet_spot / argmin)

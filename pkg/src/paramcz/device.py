"""Static physics of an asymmetric tunable transmon coupled to a fixed transmon.

Flux-to-frequency map, response to flux modulation (time-averaged frequency
shift and even-harmonic sidebands), AC sweet spot location, parametric
resonance condition, and effective sideband coupling.

Conventions
-----------
* Transition frequencies in GHz, detunings/couplings in MHz, flux in units
  of the flux quantum, times in microseconds.
* Anharmonicities are stored as positive magnitudes; every formula that
  needs a signed anharmonicity uses ``-|eta|`` (transmons are negatively
  anharmonic).
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize_scalar
from scipy.special import j1 as bessel_j1


class DeviceError(ValueError):
    """Invalid device parameters or an operation that they cannot support."""


class NoSweetSpotError(DeviceError):
    """Raised when the spectrum is flat and no AC sweet spot exists."""


@dataclass(frozen=True)
class TransmonSpec:
    """Static parameters of a single transmon.

    ``f_max``/``f_min`` are the 0-1 transition frequencies at the two DC
    sweet spots (GHz); for a fixed-frequency transmon they coincide.
    ``anharmonicity`` is the magnitude |eta| in MHz.
    """

    f_max: float
    f_min: float
    anharmonicity: float
    t1: float
    t2_star: float
    levels: int = 3
    tunable: bool = True

    def __post_init__(self):
        if not (self.f_max >= self.f_min > 0):
            raise DeviceError(
                f"need f_max >= f_min > 0, got f_max={self.f_max}, f_min={self.f_min}"
            )
        if self.anharmonicity < 0:
            raise DeviceError("anharmonicity is stored as a positive magnitude")
        if self.t1 <= 0 or self.t2_star <= 0:
            raise DeviceError("coherence times must be positive")
        if self.t2_star > 2 * self.t1 + 1e-12:
            raise DeviceError(f"t2_star={self.t2_star} exceeds 2*t1={2 * self.t1}")
        if self.levels < 2:
            raise DeviceError("need at least 2 levels")

    @property
    def asymmetry(self) -> float:
        """Junction asymmetry parameter d of the SQUID spectrum."""
        return ((self.f_min + self.anharmonicity * 1e-3)
                / (self.f_max + self.anharmonicity * 1e-3)) ** 2


@dataclass(frozen=True)
class CoupledPair:
    """A tunable transmon capacitively coupled to a fixed one.

    ``g`` is the bare coupling in MHz, ``dc_bias`` the flux parking point
    (default 0: the tunable transmon sits at its frequency maximum).
    """

    tunable: TransmonSpec
    fixed: TransmonSpec
    g: float
    dc_bias: float = 0.0

    def __post_init__(self):
        if self.g <= 0:
            raise DeviceError("coupling g must be positive")
        if not self.tunable.tunable:
            raise DeviceError("the 'tunable' member of a pair must be tunable")

    @property
    def detuning(self) -> float:
        """Static detuning Delta = f_T^max - f_F in MHz."""
        return (self.tunable.f_max - self.fixed.f_max) * 1e3


@dataclass(frozen=True)
class ModulationResponse:
    """Response of the tunable transmon to a cosine flux drive.

    ``avg_shift`` is the time-averaged frequency minus the parked maximum
    (MHz, non-positive when parked at the maximum).  ``harmonics`` lists
    (even harmonic index 2k, amplitude in MHz) of the frequency excursion.
    """

    epsilon: float
    mod_freq: float
    avg_shift: float
    harmonics: list = field(default_factory=list)

    def harmonic(self, index: int) -> float:
        for n, amp in self.harmonics:
            if n == index:
                return amp
        return 0.0


def frequency_at_flux(spec: TransmonSpec, phi) -> float:
    """Instantaneous 0-1 transition frequency at flux ``phi`` (GHz).

    Standard asymmetric-transmon spectrum: periodic in phi with period 1
    and even in phi, interpolating between f_max at integer flux and f_min
    at half-integer flux.
    """
    if not spec.tunable:
        raise DeviceError("frequency_at_flux requires a tunable transmon")
    eta = spec.anharmonicity * 1e-3
    d = spec.asymmetry
    phi = np.asarray(phi, dtype=float)
    c, s = np.cos(np.pi * phi), np.sin(np.pi * phi)
    out = (spec.f_max + eta) * (c * c + d * d * s * s) ** 0.25 - eta
    return out if out.ndim else float(out)


def modulation_response(spec: TransmonSpec, epsilon: float, omega_p: float,
                        dc_bias: float = 0.0, n_harmonics: int = 4,
                        _grid: int = 4096) -> ModulationResponse:
    """Time-averaged frequency shift and sidebands under a cosine flux drive.

    The applied flux is ``dc_bias + epsilon*cos(omega_p*t)``; the average
    shift is computed by quadrature over one modulation period and the
    harmonic amplitudes are Fourier coefficients of the frequency excursion.
    Flux excursions beyond +-0.5 are physically fine (the spectrum is
    periodic) but flagged with a warning.
    """
    if epsilon < 0:
        raise DeviceError("epsilon must be non-negative")
    if abs(dc_bias) + epsilon > 0.5:
        warnings.warn(
            f"flux excursion {abs(dc_bias) + epsilon:.3f} exceeds 0.5 flux quanta; "
            "handled by periodicity", stacklevel=2)
    if epsilon == 0:
        base = frequency_at_flux(spec, dc_bias)
        return ModulationResponse(0.0, omega_p, (base - spec.f_max) * 1e3,
                                  [(2 * (k + 1), 0.0) for k in range(n_harmonics)])

    avg, _ = quad(lambda th: frequency_at_flux(spec, dc_bias + epsilon * np.cos(th)),
                  0.0, np.pi, limit=400, epsrel=1e-11, epsabs=1e-12)
    avg /= np.pi
    shift = (avg - spec.f_max) * 1e3

    # Harmonic amplitudes from a dense uniform grid (trapezoid rule is
    # spectrally accurate for this periodic smooth integrand).
    th = np.linspace(0.0, 2 * np.pi, _grid, endpoint=False)
    traj = frequency_at_flux(spec, dc_bias + epsilon * np.cos(th))
    harmonics = []
    for k in range(1, n_harmonics + 1):
        amp = 2.0 * np.mean(traj * np.cos(2 * k * th)) * 1e3
        harmonics.append((2 * k, float(amp)))
    return ModulationResponse(float(epsilon), float(omega_p), float(shift), harmonics)


def average_shift(spec: TransmonSpec, epsilon, omega_p: float = 0.0,
                  dc_bias: float = 0.0):
    """Average frequency shift (MHz) only; accepts an array of amplitudes."""
    eps = np.atleast_1d(np.asarray(epsilon, dtype=float))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        out = np.array([modulation_response(spec, e, omega_p, dc_bias).avg_shift
                        for e in eps])
    return out if np.ndim(epsilon) else float(out[0])


def sweet_spot_amplitude(spec: TransmonSpec, omega_p: float = 0.0,
                         dc_bias: float = 0.0, tol: float = 1e-6) -> float:
    """Modulation amplitude (flux quanta) minimizing the average frequency.

    At this amplitude the average frequency is first-order insensitive to
    amplitude noise (AC sweet spot).  Located by coarse bracketing followed
    by bounded scalar minimization on the quadrature curve.
    """
    if not spec.tunable or spec.f_max == spec.f_min:
        raise NoSweetSpotError("flat spectrum: no AC sweet spot exists")
    grid = np.linspace(0.05, 1.0, 39)
    vals = average_shift(spec, grid, omega_p, dc_bias)
    i = int(np.argmin(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = minimize_scalar(
            lambda e: modulation_response(spec, e, omega_p, dc_bias).avg_shift,
            bounds=(lo, hi), method="bounded", options={"xatol": tol})
    return float(res.x)


def resonance_offset(pair: CoupledPair, epsilon: float, omega_p: float,
                     delta_sign: int = +1) -> float:
    """Detuning from the |11>-|02> parametric resonance (MHz).

    Returns ``2*omega_p - |Delta - |eta_T| + s*avg_shift|`` where s is the
    configurable sign convention for how the average shift enters the
    resonance condition (default +1).  Zero identifies the resonance
    contour in (amplitude, frequency) space.
    """
    if delta_sign not in (+1, -1):
        raise DeviceError("delta_sign must be +1 or -1")
    shift = average_shift(pair.tunable, epsilon, omega_p, pair.dc_bias)
    inner = pair.detuning - pair.tunable.anharmonicity + delta_sign * shift
    return 2.0 * omega_p - abs(inner)


def effective_coupling(pair: CoupledPair, epsilon: float, omega_p: float,
                       mode: str = "bessel") -> float:
    """Effective |11>-|02> sideband coupling rate (MHz).

    ``mode='bessel'``: sqrt(2)*g*J1(avg_shift / (2*omega_p)).
    ``mode='fourier'``: numerically computes the relevant Fourier
    coefficient of the frequency-modulation phase factor, which agrees
    with the Bessel form at small modulation index.
    """
    if epsilon == 0:
        return 0.0
    resp = modulation_response(pair.tunable, epsilon, omega_p, pair.dc_bias,
                               n_harmonics=6)
    if mode == "bessel":
        return float(np.sqrt(2.0) * pair.g * abs(bessel_j1(resp.avg_shift / (2.0 * omega_p))))
    if mode == "fourier":
        # Phase factor exp(-i phi(t)) with phi the integral of the frequency
        # excursion about its mean; the first even sideband drives the gate.
        n = 8192
        th = np.linspace(0.0, 2 * np.pi, n, endpoint=False)  # th = omega_p t
        phi = np.zeros(n)
        for idx, amp in resp.harmonics:
            phi += (amp / (idx * omega_p)) * np.sin(idx * th)
        c1 = np.mean(np.exp(-1j * phi) * np.exp(2j * th))
        return float(np.sqrt(2.0) * pair.g * abs(c1))
    raise DeviceError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# JSON ingestion and reference device parameters

def transmon_from_dict(d: dict) -> TransmonSpec:
    known = {"f_max", "f_min", "anharmonicity", "t1", "t2_star", "levels", "tunable"}
    extra = set(d) - known
    if extra:
        raise DeviceError(f"unknown transmon keys: {sorted(extra)}")
    return TransmonSpec(**d)


def pair_from_dict(d: dict) -> CoupledPair:
    try:
        return CoupledPair(
            tunable=transmon_from_dict(d["tunable"]),
            fixed=transmon_from_dict(d["fixed"]),
            g=d["g"],
            dc_bias=d.get("dc_bias", 0.0),
        )
    except KeyError as exc:
        raise DeviceError(f"missing device key: {exc}") from exc


def pair_from_json(path) -> CoupledPair:
    with open(path) as fh:
        return pair_from_dict(json.load(fh))


def q6_spec(**overrides) -> TransmonSpec:
    """Tunable transmon of the reference pair (4.475/4.080 GHz, |eta|=200 MHz)."""
    base = TransmonSpec(f_max=4.475, f_min=4.080, anharmonicity=200.0,
                        t1=23.6, t2_star=19.4, levels=3, tunable=True)
    return replace(base, **overrides) if overrides else base


def q7_spec(**overrides) -> TransmonSpec:
    """Fixed transmon of the reference pair (3.826 GHz, |eta|=200 MHz)."""
    base = TransmonSpec(f_max=3.826, f_min=3.826, anharmonicity=200.0,
                        t1=16.0, t2_star=14.6, levels=3, tunable=False)
    return replace(base, **overrides) if overrides else base


def q6q7_pair(g: float = 5.0, **overrides) -> CoupledPair:
    """Reference coupled pair with the default bare coupling of 5 MHz."""
    return CoupledPair(tunable=q6_spec(), fixed=q7_spec(), g=g, **overrides)

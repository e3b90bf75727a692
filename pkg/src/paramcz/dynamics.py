"""Two-transmon dynamics: Hamiltonian, propagation, channels, PTM, fidelity.

Basis ordering is fixed (x) tunable throughout: the 9-dim index is
``3*n_fixed + n_tunable``, and two-qubit computational states |ab> mean
``a`` excitations in the fixed transmon and ``b`` in the tunable one.
The computational subspace maps to 9-dim indices (0, 1, 3, 4).

Propagation happens in the rotating frame of the parked 0-1 frequencies;
single-qubit phases reported by the calibration module are therefore frame
phases on top of that rotation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _core
from .device import CoupledPair, DeviceError
from .pulse import FluxPulse, Waveform, synthesize

TWOPI = 2.0 * np.pi
COMP_INDICES = (0, 1, 3, 4)

CZ = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)

PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
PAULI_LABELS = [a + b for a in "IXYZ" for b in "IXYZ"]
PAULI_2Q = [np.kron(PAULI_1Q[l[0]], PAULI_1Q[l[1]]) for l in PAULI_LABELS]


class DynamicsError(RuntimeError):
    """Integration or channel-validation failure."""


@dataclass
class DensityMatrix:
    """Density matrix on the truncated two-transmon space."""

    entries: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def validate(self, herm_tol=1e-10, trace_tol=1e-9, eig_tol=1e-8):
        r = self.entries
        if np.max(np.abs(r - r.conj().T)) > herm_tol:
            raise DynamicsError("density matrix is not Hermitian")
        if abs(np.trace(r).real - 1.0) > trace_tol:
            raise DynamicsError(f"trace {np.trace(r).real} deviates from 1")
        if np.linalg.eigvalsh(r).min() < -eig_tol:
            raise DynamicsError("density matrix has a significantly negative eigenvalue")
        return self

    @classmethod
    def pure(cls, vec: np.ndarray, **meta) -> "DensityMatrix":
        v = np.asarray(vec, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()), dict(meta))

    @classmethod
    def basis(cls, dim: int, index: int) -> "DensityMatrix":
        v = np.zeros(dim, dtype=complex)
        v[index] = 1.0
        return cls.pure(v)

    def population(self, index: int) -> float:
        return float(self.entries[index, index].real)


@dataclass
class DecoherenceRates:
    """Relaxation and pure-dephasing times (microseconds) per transmon."""

    t1_fixed: float
    t1_tunable: float
    tphi_fixed: float
    tphi_tunable: float

    def __post_init__(self):
        for v in (self.t1_fixed, self.t1_tunable, self.tphi_fixed, self.tphi_tunable):
            if v <= 0 and not np.isinf(v):
                raise DeviceError("all coherence times must be positive")

    @staticmethod
    def _tphi(t1: float, t2_star: float) -> float:
        rate = 1.0 / t2_star - 1.0 / (2.0 * t1)
        if rate < -1e-12:
            raise DeviceError("t2_star exceeds the 2*t1 limit")
        return np.inf if rate <= 0 else 1.0 / rate

    @classmethod
    def from_pair(cls, pair: CoupledPair, t1_scale: float = 1.0) -> "DecoherenceRates":
        return cls.from_times(pair.fixed.t1 * t1_scale, pair.fixed.t2_star,
                              pair.tunable.t1 * t1_scale, pair.tunable.t2_star)

    @classmethod
    def from_times(cls, t1_fixed, t2_fixed, t1_tunable, t2_tunable) -> "DecoherenceRates":
        return cls(t1_fixed=t1_fixed, t1_tunable=t1_tunable,
                   tphi_fixed=cls._tphi(t1_fixed, t2_fixed),
                   tphi_tunable=cls._tphi(t1_tunable, t2_tunable))


@dataclass
class Superoperator:
    """Channel as a matrix on column-stacked density matrices."""

    dim: int
    matrix: np.ndarray
    leakage: np.ndarray | None = None  # trace deficit per computational basis input

    def apply(self, rho: np.ndarray) -> np.ndarray:
        v = self.matrix @ rho.reshape(-1, order="F")
        return v.reshape(self.dim, self.dim, order="F")

    def compose(self, other: "Superoperator") -> "Superoperator":
        """Channel equal to ``other`` followed by ``self``."""
        return Superoperator(self.dim, self.matrix @ other.matrix)

    def choi(self) -> np.ndarray:
        d = self.dim
        c = np.zeros((d * d, d * d), dtype=complex)
        for k in range(d):
            for l in range(d):
                e = np.zeros((d, d), dtype=complex)
                e[k, l] = 1.0
                c += np.kron(e, self.apply(e))
        return c / d

    def validate(self, tp_tol=1e-8, cp_tol=1e-6, allow_leakage=False):
        d = self.dim
        rho = np.eye(d, dtype=complex) / d
        tr = np.trace(self.apply(rho)).real
        deficit = np.mean(self.leakage) if self.leakage is not None else 0.0
        if abs(tr - (1.0 - deficit)) > tp_tol and not (allow_leakage and tr <= 1.0 + tp_tol):
            raise DynamicsError(f"trace preservation violated: {tr} vs {1.0 - deficit}")
        w = np.linalg.eigvalsh(self.choi())
        if w.min() < -cp_tol:
            raise DynamicsError(f"complete positivity violated: min Choi eig {w.min()}")
        return self

    @classmethod
    def from_unitary(cls, u: np.ndarray) -> "Superoperator":
        u = np.asarray(u, dtype=complex)
        return cls(u.shape[0], np.kron(u.conj(), u))

    @classmethod
    def identity(cls, dim: int) -> "Superoperator":
        return cls(dim, np.eye(dim * dim, dtype=complex))

    @classmethod
    def depolarizing(cls, p: float, dim: int = 4) -> "Superoperator":
        ident = np.eye(dim * dim, dtype=complex)
        # |I/d)(tr| in column stacking: maps rho -> tr(rho) I/d
        eye_vec = np.eye(dim, dtype=complex).reshape(-1, order="F")
        proj = np.outer(eye_vec, eye_vec.conj()) / dim
        return cls(dim, p * ident + (1.0 - p) * proj)


# ---------------------------------------------------------------------------
# Hamiltonian and frame plumbing

def build_hamiltonian(pair: CoupledPair, flux: float) -> np.ndarray:
    """Lab-frame 9x9 Hamiltonian at a static flux, in MHz units.

    Two Duffing oscillators with an excitation-conserving coupling; the
    tunable frequency is evaluated at the given flux.
    """
    from .device import frequency_at_flux

    if pair.tunable.levels < 3 or pair.fixed.levels < 3:
        raise DeviceError("the |11>-|02> gate needs at least 3 levels per transmon")
    nf, nt = _core.N_FIXED, _core.N_TUN
    f_t = frequency_at_flux(pair.tunable, flux) * 1e3  # MHz
    f_f = pair.fixed.f_max * 1e3
    diag = (f_f * nf - 0.5 * pair.fixed.anharmonicity * nf * (nf - 1)
            + f_t * nt - 0.5 * pair.tunable.anharmonicity * nt * (nt - 1))
    h = np.diag(diag).astype(complex)
    a = np.zeros((9, 9))
    a[_core.A_ROW, _core.A_COL] = _core.A_VAL
    h += pair.g * (a + a.T)
    return h


def _frame_params(pair: CoupledPair):
    """(delta, g, diag) in rad/ns for the parked rotating frame."""
    delta = TWOPI * 1e-3 * pair.detuning
    g_ang = TWOPI * 1e-3 * pair.g
    nf, nt = _core.N_FIXED, _core.N_TUN
    diag = (-0.5 * TWOPI * 1e-3 * pair.fixed.anharmonicity * nf * (nf - 1)
            - 0.5 * TWOPI * 1e-3 * pair.tunable.anharmonicity * nt * (nt - 1))
    return delta, g_ang, diag


def _flux_map_params(pair: CoupledPair):
    spec = pair.tunable
    return spec.f_max, spec.anharmonicity * 1e-3, spec.asymmetry


def default_step(pair: CoupledPair, points_per_period: float = 20.0,
                 accuracy: float = 1.0) -> float:
    """Step resolving the fastest rotating-frame scale, tightened by ``accuracy``.

    ``accuracy=1`` is the bare 20-points-per-period resolution bound;
    larger values shrink the step proportionally.
    """
    w_max = TWOPI * 1e-3 * (abs(pair.detuning)
                            + (pair.tunable.f_max - pair.tunable.f_min) * 1e3
                            + 2 * pair.g)
    return TWOPI / (points_per_period * w_max * accuracy)


# Default integration steps (ns): fine for phase-accurate gate calibration,
# coarse for population-level scans.
DT_FINE = 0.002
DT_SCAN = 0.01


def _check_step(pair: CoupledPair, dt: float):
    limit = default_step(pair)
    if dt > limit * (1 + 1e-9):
        raise DynamicsError(
            f"step {dt} ns too coarse: needs <= {limit:.4f} ns for 20 points/period")


def _pulse_scalars(pulse: FluxPulse):
    wp = TWOPI * 1e-3 * pulse.mod_freq  # rad/ns
    return (pulse.amplitude, pulse.duration, pulse.edge, wp,
            pulse.carrier_phase, pulse.dc_bias)


def propagate_states(pair: CoupledPair, pulse: FluxPulse, psi0: np.ndarray,
                     dt: float = DT_FINE, waveform: Waveform | None = None) -> np.ndarray:
    """Propagate a batch of pure states (B, 9) through the pulse."""
    _check_step(pair, dt)
    delta, g_ang, diag = _frame_params(pair)
    fmax, eta, d = _flux_map_params(pair)
    psi0 = np.ascontiguousarray(np.atleast_2d(psi0).astype(np.complex128))
    amp, dur, edge, wp, phase, dc = _pulse_scalars(pulse)
    if waveform is not None:
        out = _core.schrodinger_waveform(
            psi0, np.ascontiguousarray(waveform.samples.astype(np.float64)),
            waveform.sample_rate, dur, delta, g_ang, diag, fmax, eta, d, dt)
    else:
        nb = psi0.shape[0]
        out = _core.schrodinger_batch(
            psi0, np.full(nb, wp), np.full(nb, dur), np.full(nb, amp),
            edge, phase, dc, fmax, eta, d, delta, g_ang, diag, dt)
    norms = np.linalg.norm(out, axis=1)
    if np.max(np.abs(norms - 1.0)) > 1e-5:
        raise DynamicsError(
            f"integration failed: norm drift {np.max(np.abs(norms - 1.0)):.2e} "
            f"(dt={dt} ns, duration={dur} ns)")
    return out


def _decay_params(rates: DecoherenceRates):
    us = 1e-3  # 1/us -> 1/ns
    g1f = us / rates.t1_fixed
    g1t = us / rates.t1_tunable
    gpf = 0.0 if np.isinf(rates.tphi_fixed) else us / rates.tphi_fixed
    gpt = 0.0 if np.isinf(rates.tphi_tunable) else us / rates.tphi_tunable
    nf, nt = _core.N_FIXED, _core.N_TUN
    dec = (-0.5 * g1f * (nf[:, None] + nf[None, :])
           - 0.5 * g1t * (nt[:, None] + nt[None, :])
           - gpf * (nf[:, None] - nf[None, :]) ** 2
           - gpt * (nt[:, None] - nt[None, :]) ** 2)
    return np.ascontiguousarray(dec), g1f, g1t


def propagate_density(pair: CoupledPair, pulse: FluxPulse, rho0: np.ndarray,
                      rates: DecoherenceRates, dt: float = DT_SCAN) -> np.ndarray:
    """Propagate a batch of density matrices (B, 9, 9) with dissipation."""
    _check_step(pair, dt)
    delta, g_ang, diag = _frame_params(pair)
    fmax, eta, d = _flux_map_params(pair)
    dec, g1f, g1t = _decay_params(rates)
    rho0 = np.ascontiguousarray(
        rho0.reshape(-1, 9, 9).astype(np.complex128))
    amp, dur, edge, wp, phase, dc = _pulse_scalars(pulse)
    out = _core.lindblad_batch(rho0, amp, dur, edge, wp, phase, dc,
                               fmax, eta, d, delta, g_ang, diag, dec, g1f, g1t, dt)
    return out


def evolve(pair: CoupledPair, pulse: FluxPulse, initial: DensityMatrix,
           rates: DecoherenceRates | None = None, dt: float | None = None,
           waveform_rate: float | None = None) -> DensityMatrix:
    """Evolve a state through the pulse; Schroedinger if ``rates`` is None.

    ``waveform_rate`` switches the drive to a sampled waveform at that rate
    (samples/ns) instead of the analytic pulse shape.
    """
    meta = {"frame": "parked", "ordering": "fixed(x)tunable"}
    waveform = synthesize(pulse, waveform_rate) if waveform_rate else None
    if rates is None:
        dt = DT_FINE if dt is None else dt
        w, v = np.linalg.eigh(initial.entries)
        keep = w > 1e-12
        weights = w[keep]
        final = propagate_states(pair, pulse, v[:, keep].T.copy(), dt=dt,
                                 waveform=waveform)
        rho = np.einsum("b,bi,bj->ij", weights, final, final.conj())
    else:
        if waveform is not None:
            raise DynamicsError("waveform-driven evolution is unitary-only")
        dt = DT_SCAN if dt is None else dt
        rho = propagate_density(pair, pulse, initial.entries[None], rates, dt=dt)[0]
        tr = np.trace(rho).real
        if abs(tr - 1.0) > 1e-6:
            raise DynamicsError(f"integration failed: trace drift {tr - 1.0:.2e}")
    meta["dt"] = dt
    return DensityMatrix(rho, meta)


def pulse_unitary(pair: CoupledPair, pulse: FluxPulse, dt: float = DT_FINE) -> np.ndarray:
    """Full 9x9 rotating-frame propagator of the pulse."""
    final = propagate_states(pair, pulse, np.eye(9, dtype=complex), dt=dt)
    return final.T.copy()


def computational_unitary(pair: CoupledPair, pulse: FluxPulse,
                          dt: float = DT_FINE) -> tuple[np.ndarray, np.ndarray]:
    """(4x4 computational block, per-column leakage) of the pulse propagator."""
    basis = np.zeros((4, 9), dtype=complex)
    for c, idx in enumerate(COMP_INDICES):
        basis[c, idx] = 1.0
    final = propagate_states(pair, pulse, basis, dt=dt)
    block = final[:, COMP_INDICES].T.copy()
    leak = 1.0 - np.sum(np.abs(block) ** 2, axis=0)
    return block, leak


def frame_correction_unitary(theta_t: float, theta_f: float) -> np.ndarray:
    """Single-qubit Z frame corrections, ordering fixed (x) tunable."""
    return np.diag([1.0,
                    np.exp(-1j * theta_t),
                    np.exp(-1j * theta_f),
                    np.exp(-1j * (theta_t + theta_f))])


def gate_superoperator(pair: CoupledPair, pulse: FluxPulse,
                       rates: DecoherenceRates | None = None,
                       frame_corrections: tuple[float, float] | None = None,
                       dt: float | None = None, validate: bool = True) -> Superoperator:
    """Channel of the pulse restricted to the computational subspace.

    Propagates the 16 computational matrix units; population leaving the
    subspace is recorded as a per-basis-state trace deficit in ``leakage``.
    """
    if rates is None:
        dt = DT_FINE if dt is None else dt
        u, leak = computational_unitary(pair, pulse, dt=dt)
        ch = Superoperator.from_unitary(u)
        ch.leakage = leak
    else:
        dt = DT_SCAN if dt is None else dt
        units = np.zeros((16, 9, 9), dtype=complex)
        for col, (k, l) in enumerate((k, l) for l in range(4) for k in range(4)):
            units[col, COMP_INDICES[k], COMP_INDICES[l]] = 1.0
        final = propagate_density(pair, pulse, units, rates, dt=dt)
        mat = np.empty((16, 16), dtype=complex)
        leak = np.zeros(4)
        for col in range(16):
            block = final[col][np.ix_(COMP_INDICES, COMP_INDICES)]
            mat[:, col] = block.reshape(-1, order="F")
            k, l = col % 4, col // 4
            if k == l:
                leak[k] = 1.0 - np.trace(block).real
        ch = Superoperator(4, mat, leakage=leak)
    if frame_corrections is not None:
        corr = Superoperator.from_unitary(frame_correction_unitary(*frame_corrections))
        ch = Superoperator(4, corr.matrix @ ch.matrix, leakage=ch.leakage)
    if validate:
        ch.validate(allow_leakage=True)
    return ch


# ---------------------------------------------------------------------------
# Pauli transfer matrix and fidelity

def pauli_transfer_matrix(ch: Superoperator) -> np.ndarray:
    """16x16 real PTM: R_ij = Tr[P_i ch(P_j)] / 4."""
    if ch.dim != 4:
        raise DynamicsError("PTM is defined here for two-qubit (dim 4) channels")
    r = np.empty((16, 16))
    for j, pj in enumerate(PAULI_2Q):
        out = ch.apply(pj)
        for i, pi in enumerate(PAULI_2Q):
            r[i, j] = np.trace(pi @ out).real / 4.0
    return r


def average_gate_fidelity(ch: Superoperator, target: np.ndarray | Superoperator) -> float:
    """Average gate fidelity of a channel against a target unitary or channel."""
    if isinstance(target, np.ndarray):
        target = Superoperator.from_unitary(target)
    d = ch.dim
    rc = pauli_transfer_matrix(ch)
    rt = pauli_transfer_matrix(target)
    return float((np.trace(rt.T @ rc) / d + 1.0) / (d + 1.0))

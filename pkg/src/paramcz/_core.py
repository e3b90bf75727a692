"""Jit-compiled fixed-step RK4 propagators for the two-transmon system.

Everything here works in the rotating frame of the parked qubit
frequencies, in angular units of rad/ns, on the 9-dimensional space of two
3-level transmons ordered fixed (x) tunable (index = 3*n_fixed + n_tunable).

The rotating-frame Hamiltonian is

    H(t) = dw(t) * n_T  +  anharmonic diagonal
           + g * (exp(-i*Delta*t) * aF^dag aT + h.c.)

with dw(t) the instantaneous excursion of the tunable frequency from its
parked maximum, driven by the flux pulse.
"""

import math

import numpy as np
from numba import njit

TWOPI = 2.0 * math.pi

# Number operators and the coupling aF^dag aT on the 9-dim space.
N_FIXED = np.repeat(np.arange(3), 3).astype(np.float64)
N_TUN = np.tile(np.arange(3), 3).astype(np.float64)

# Nonzeros of A = aF^dag aT: |nf, nt> -> sqrt((nf+1)*nt) |nf+1, nt-1>
_rows, _cols, _vals = [], [], []
for nf in range(2):
    for nt in range(1, 3):
        i = 3 * (nf + 1) + (nt - 1)
        k = 3 * nf + nt
        _rows.append(i)
        _cols.append(k)
        _vals.append(math.sqrt((nf + 1) * nt))
A_ROW = np.array(_rows, dtype=np.int64)
A_COL = np.array(_cols, dtype=np.int64)
A_VAL = np.array(_vals, dtype=np.float64)


@njit(cache=True, inline="always")
def _envelope(t, amp, duration, edge):
    if t < 0.0 or t > duration:
        return 0.0
    if edge <= 0.0:
        return amp
    s = edge / 4.0 * math.sqrt(2.0)
    a = math.erf((t - 0.5 * edge) / s)
    b = math.erf((duration - 0.5 * edge - t) / s)
    return 0.5 * amp * (a + b)


@njit(cache=True, inline="always")
def _freq_shift(phi, fmax, eta, d):
    """Angular excursion 2*pi*(f(phi) - fmax) in rad/ns."""
    c = math.cos(math.pi * phi)
    s = math.sin(math.pi * phi)
    f = (fmax + eta) * (c * c + d * d * s * s) ** 0.25 - eta
    return TWOPI * (f - fmax)


@njit(cache=True, inline="always")
def _flux_analytic(t, amp, duration, edge, wp, phase, dc):
    return dc + _envelope(t, amp, duration, edge) * math.cos(wp * t + phase)


@njit(cache=True, inline="always")
def _flux_wave(t, samples, rate):
    x = t * rate
    i = int(x)
    n = samples.shape[0]
    if i >= n - 1:
        return samples[n - 1]
    if i < 0:
        return samples[0]
    w = x - i
    return (1.0 - w) * samples[i] + w * samples[i + 1]


@njit(cache=True)
def _rhs_psi(out, psi, dw, phc, g, diag):
    for i in range(9):
        out[i] = -1j * ((dw * N_TUN[i] + diag[i]) * psi[i])
    for m in range(A_ROW.shape[0]):
        i = A_ROW[m]
        k = A_COL[m]
        v = A_VAL[m]
        out[i] += -1j * g * phc * v * psi[k]
        out[k] += -1j * g * np.conj(phc) * v * psi[i]


@njit(cache=True)
def schrodinger_batch(psi0, wp_arr, dur_arr, amp_arr, edge, phase, dc,
                      fmax, eta, d, delta, g, diag, dt_max):
    """Propagate each batch state under its own (wp, duration, amplitude).

    wp in rad/ns; durations in ns.  Returns the final states.
    """
    nb = psi0.shape[0]
    out = np.empty_like(psi0)
    k1 = np.empty(9, dtype=np.complex128)
    k2 = np.empty(9, dtype=np.complex128)
    k3 = np.empty(9, dtype=np.complex128)
    k4 = np.empty(9, dtype=np.complex128)
    tmp = np.empty(9, dtype=np.complex128)
    for b in range(nb):
        wp = wp_arr[b]
        dur = dur_arr[b]
        amp = amp_arr[b]
        nsteps = max(16, int(math.ceil(dur / dt_max)))
        dt = dur / nsteps
        psi = psi0[b].copy()
        t = 0.0
        for _ in range(nsteps):
            th = t + 0.5 * dt
            te = t + dt
            dw0 = _freq_shift(_flux_analytic(t, amp, dur, edge, wp, phase, dc), fmax, eta, d)
            dwh = _freq_shift(_flux_analytic(th, amp, dur, edge, wp, phase, dc), fmax, eta, d)
            dwe = _freq_shift(_flux_analytic(te, amp, dur, edge, wp, phase, dc), fmax, eta, d)
            p0 = np.exp(-1j * delta * t)
            ph = np.exp(-1j * delta * th)
            pe = np.exp(-1j * delta * te)
            _rhs_psi(k1, psi, dw0, p0, g, diag)
            for i in range(9):
                tmp[i] = psi[i] + 0.5 * dt * k1[i]
            _rhs_psi(k2, tmp, dwh, ph, g, diag)
            for i in range(9):
                tmp[i] = psi[i] + 0.5 * dt * k2[i]
            _rhs_psi(k3, tmp, dwh, ph, g, diag)
            for i in range(9):
                tmp[i] = psi[i] + dt * k3[i]
            _rhs_psi(k4, tmp, dwe, pe, g, diag)
            for i in range(9):
                psi[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            t = te
        out[b] = psi
    return out


@njit(cache=True)
def schrodinger_waveform(psi0, samples, rate, duration, delta, g, diag,
                         fmax, eta, d, dt):
    """Propagate batch states under a sampled flux waveform (shared pulse)."""
    nb = psi0.shape[0]
    nsteps = max(16, int(math.ceil(duration / dt)))
    dts = duration / nsteps
    out = psi0.copy()
    k1 = np.empty(9, dtype=np.complex128)
    k2 = np.empty(9, dtype=np.complex128)
    k3 = np.empty(9, dtype=np.complex128)
    k4 = np.empty(9, dtype=np.complex128)
    tmp = np.empty(9, dtype=np.complex128)
    for b in range(nb):
        psi = out[b]
        t = 0.0
        for _ in range(nsteps):
            th = t + 0.5 * dts
            te = t + dts
            dw0 = _freq_shift(_flux_wave(t, samples, rate), fmax, eta, d)
            dwh = _freq_shift(_flux_wave(th, samples, rate), fmax, eta, d)
            dwe = _freq_shift(_flux_wave(te, samples, rate), fmax, eta, d)
            p0 = np.exp(-1j * delta * t)
            ph = np.exp(-1j * delta * th)
            pe = np.exp(-1j * delta * te)
            _rhs_psi(k1, psi, dw0, p0, g, diag)
            for i in range(9):
                tmp[i] = psi[i] + 0.5 * dts * k1[i]
            _rhs_psi(k2, tmp, dwh, ph, g, diag)
            for i in range(9):
                tmp[i] = psi[i] + 0.5 * dts * k2[i]
            _rhs_psi(k3, tmp, dwh, ph, g, diag)
            for i in range(9):
                tmp[i] = psi[i] + dts * k3[i]
            _rhs_psi(k4, tmp, dwe, pe, g, diag)
            for i in range(9):
                psi[i] += dts / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            t = te
    return out


@njit(cache=True)
def _rhs_rho(out, rho, dw, phc, g, diag, dec, g1f, g1t):
    # -i [H, rho] with the sparse H structure
    for i in range(9):
        di = dw * N_TUN[i] + diag[i]
        for j in range(9):
            dj = dw * N_TUN[j] + diag[j]
            out[i, j] = -1j * (di - dj) * rho[i, j] + dec[i, j] * rho[i, j]
    for m in range(A_ROW.shape[0]):
        i = A_ROW[m]
        k = A_COL[m]
        v = A_VAL[m]
        cf = -1j * g * phc * v
        cb = -1j * g * np.conj(phc) * v
        for j in range(9):
            # H rho contribution
            out[i, j] += cf * rho[k, j]
            out[k, j] += cb * rho[i, j]
            # -rho H contribution: (rho H)[j, k] += rho[j, i] * g*phc*v etc.
            out[j, k] -= cf * rho[j, i]
            out[j, i] -= cb * rho[j, k]
    # relaxation feed terms a rho a^dag
    if g1f > 0.0:
        for nfi in range(1, 3):
            for nti in range(3):
                i = 3 * nfi + nti
                for nfj in range(1, 3):
                    for ntj in range(3):
                        j = 3 * nfj + ntj
                        w = g1f * math.sqrt(nfi * nfj)
                        out[i - 3, j - 3] += w * rho[i, j]
    if g1t > 0.0:
        for nfi in range(3):
            for nti in range(1, 3):
                i = 3 * nfi + nti
                for nfj in range(3):
                    for ntj in range(1, 3):
                        j = 3 * nfj + ntj
                        w = g1t * math.sqrt(nti * ntj)
                        out[i - 1, j - 1] += w * rho[i, j]


@njit(cache=True)
def lindblad_batch(rho0, amp, dur, edge, wp, phase, dc,
                   fmax, eta, d, delta, g, diag, dec, g1f, g1t, dt_max):
    """Propagate batch density matrices under a shared flux pulse."""
    nb = rho0.shape[0]
    nsteps = max(16, int(math.ceil(dur / dt_max)))
    dt = dur / nsteps
    out = rho0.copy()
    k1 = np.empty((9, 9), dtype=np.complex128)
    k2 = np.empty((9, 9), dtype=np.complex128)
    k3 = np.empty((9, 9), dtype=np.complex128)
    k4 = np.empty((9, 9), dtype=np.complex128)
    tmp = np.empty((9, 9), dtype=np.complex128)
    for b in range(nb):
        rho = out[b]
        t = 0.0
        for _ in range(nsteps):
            th = t + 0.5 * dt
            te = t + dt
            dw0 = _freq_shift(_flux_analytic(t, amp, dur, edge, wp, phase, dc), fmax, eta, d)
            dwh = _freq_shift(_flux_analytic(th, amp, dur, edge, wp, phase, dc), fmax, eta, d)
            dwe = _freq_shift(_flux_analytic(te, amp, dur, edge, wp, phase, dc), fmax, eta, d)
            p0 = np.exp(-1j * delta * t)
            ph = np.exp(-1j * delta * th)
            pe = np.exp(-1j * delta * te)
            _rhs_rho(k1, rho, dw0, p0, g, diag, dec, g1f, g1t)
            for i in range(9):
                for j in range(9):
                    tmp[i, j] = rho[i, j] + 0.5 * dt * k1[i, j]
            _rhs_rho(k2, tmp, dwh, ph, g, diag, dec, g1f, g1t)
            for i in range(9):
                for j in range(9):
                    tmp[i, j] = rho[i, j] + 0.5 * dt * k2[i, j]
            _rhs_rho(k3, tmp, dwh, ph, g, diag, dec, g1f, g1t)
            for i in range(9):
                for j in range(9):
                    tmp[i, j] = rho[i, j] + dt * k3[i, j]
            _rhs_rho(k4, tmp, dwe, pe, g, diag, dec, g1f, g1t)
            for i in range(9):
                for j in range(9):
                    rho[i, j] += dt / 6.0 * (k1[i, j] + 2.0 * k2[i, j]
                                             + 2.0 * k3[i, j] + k4[i, j])
            t = te
    return out

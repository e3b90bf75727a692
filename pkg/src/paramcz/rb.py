"""Randomized-benchmarking pipeline for the two-qubit CZ gate.

Sequence generation over the 11520-element Clifford group, channel-level
simulation with binomial measurement statistics, weighted decay fits of
A p^L + B, parametric percentile bootstrap confidence intervals,
bootstrap stability tests between duplicate decays, repeated interleaved
experiments with drift-aware scheduling, ECDF summaries, and the static
coherence-limited fidelity prediction.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

from .clifford import (CliffordGroup, CZ4, GROUP_ORDER, clifford_group,
                       compile_to_native)
from .device import CoupledPair
from .dynamics import (CZ, DecoherenceRates, Superoperator,
                       average_gate_fidelity, gate_superoperator)
from .noise import NoiseProfile
from .pulse import FluxPulse


class RBError(ValueError):
    """Invalid benchmarking configuration or data."""


@dataclass(frozen=True)
class RBConfig:
    """Benchmarking run shape.

    ``interleaved`` inserts the CZ channel after every random Clifford;
    ``assignment_error`` is a symmetric readout flip probability (absorbed
    into the A, B fit parameters).
    """

    lengths: tuple = (2, 4, 8, 16, 32, 64)
    sequences_per_length: int = 32
    shots_per_sequence: int = 500
    interleaved: bool = False
    assignment_error: float = 0.0

    def __post_init__(self):
        if len(self.lengths) < 1 or any(l < 1 for l in self.lengths):
            raise RBError("lengths must be positive")
        if any(b <= a for a, b in zip(self.lengths, self.lengths[1:])):
            raise RBError("lengths must be strictly increasing")
        if self.sequences_per_length < 1 or self.shots_per_sequence < 1:
            raise RBError("counts must be at least 1")
        if not (0.0 <= self.assignment_error < 0.5):
            raise RBError("assignment_error must be in [0, 0.5)")

    @property
    def n_jobs(self) -> int:
        return len(self.lengths) * self.sequences_per_length


@dataclass
class RBDataset:
    """Per-sequence survival counts."""

    lengths: np.ndarray
    sequence_index: np.ndarray
    successes: np.ndarray
    shots: np.ndarray

    def __post_init__(self):
        n = len(self.lengths)
        if not (len(self.sequence_index) == len(self.successes) == len(self.shots) == n):
            raise RBError("dataset columns differ in length")

    @property
    def proportions(self) -> np.ndarray:
        return self.successes / self.shots

    def unique_lengths(self) -> np.ndarray:
        return np.unique(self.lengths)

    def by_length(self):
        """Proportions as an (n_lengths, n_sequences) matrix."""
        uls = self.unique_lengths()
        rows = [self.proportions[self.lengths == l] for l in uls]
        n = min(len(r) for r in rows)
        return uls.astype(float), np.array([r[:n] for r in rows])

    def to_csv(self, path, header_lines=()):
        with open(path, "w", newline="") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            w = csv.writer(fh)
            w.writerow(["length", "sequence_index", "successes", "shots"])
            for row in zip(self.lengths, self.sequence_index,
                           self.successes, self.shots):
                w.writerow([int(x) for x in row])

    @classmethod
    def from_csv(cls, path) -> "RBDataset":
        cols = [[], [], [], []]
        with open(path, newline="") as fh:
            for lineno, row in enumerate(csv.reader(fh), start=1):
                if not row or row[0].lstrip().startswith("#") or row[0] == "length":
                    continue
                if len(row) != 4:
                    raise RBError(f"malformed RB row at line {lineno}: {row}")
                for c, x in zip(cols, row):
                    c.append(int(x))
        return cls(*(np.array(c, dtype=np.int64) for c in cols))

    @classmethod
    def concatenate(cls, datasets) -> "RBDataset":
        return cls(np.concatenate([d.lengths for d in datasets]),
                   np.concatenate([d.sequence_index for d in datasets]),
                   np.concatenate([d.successes for d in datasets]),
                   np.concatenate([d.shots for d in datasets]))


# ---------------------------------------------------------------------------
# Sequence simulation

_VEC00 = np.zeros(16, dtype=complex)
_VEC00[0] = 1.0  # vec(|00><00|), column stacking


class ChannelBank:
    """Per-Clifford channels composed from native-gate channels.

    ``gate_channels`` maps "cz" to a Superoperator; single-qubit layers
    default to their ideal unitaries unless a ("1q", i, j) key overrides
    them.  Channels are cached per element for a fixed CZ channel.
    """

    def __init__(self, gate_channels: dict, group: CliffordGroup | None = None):
        self.group = group or clifford_group()
        if "cz" not in gate_channels:
            raise RBError("gate_channels must provide a 'cz' channel")
        self.gate_channels = gate_channels
        cz = gate_channels["cz"]
        if cz.dim != 4:
            raise RBError(f"cz channel dimension {cz.dim} != 4")
        self._local_cache = {}
        self._element_cache = {}

    def local_matrix(self, i: int, j: int) -> np.ndarray:
        key = (i, j)
        if key not in self._local_cache:
            override = self.gate_channels.get(("1q", i, j))
            if override is not None:
                self._local_cache[key] = override.matrix
            else:
                u = np.kron(self.group.c1[i], self.group.c1[j])
                self._local_cache[key] = np.kron(u.conj(), u)
        return self._local_cache[key]

    def element_matrix(self, index: int, cz_matrix: np.ndarray | None = None):
        static = cz_matrix is None
        if static and index in self._element_cache:
            return self._element_cache[index]
        cz = self.gate_channels["cz"].matrix if static else cz_matrix
        m = np.eye(16, dtype=complex)
        for layer in compile_to_native(self.group.element(index)).layers:
            step = cz if layer[0] == "cz" else self.local_matrix(layer[1], layer[2])
            m = step @ m
        if static:
            self._element_cache[index] = m
        return m


def _sequence_survival(bank: ChannelBank, indices, interleaved: bool,
                       cz_matrix: np.ndarray | None = None) -> float:
    group = bank.group
    vec = _VEC00.copy()
    ideal = group.identity
    cz_elem = group.cz
    for idx in indices:
        vec = bank.element_matrix(idx, cz_matrix) @ vec
        ideal = group.element(idx).compose(ideal)
        if interleaved:
            cz = bank.gate_channels["cz"].matrix if cz_matrix is None else cz_matrix
            vec = cz @ vec
            ideal = cz_elem.compose(ideal)
    inv = ideal.inverse()
    vec = bank.element_matrix(inv.index, cz_matrix) @ vec
    rho = vec.reshape(4, 4, order="F")
    return float(np.clip(rho[0, 0].real, 0.0, 1.0))


def run_rb(config: RBConfig, gate_channels: dict, seed,
           cz_for_fraction=None, job_fractions=None) -> RBDataset:
    """Simulate one benchmarking dataset.

    Jobs (one per (length, sequence) pair) execute in a scrambled order;
    ``cz_for_fraction``, when given, maps each job's wall-clock fraction to
    the CZ channel in force at that moment (drift injection).  Callers
    embedding this run in a larger schedule pass explicit ``job_fractions``
    in canonical length-major order.
    """
    rng = np.random.default_rng(seed)
    bank = gate_channels if isinstance(gate_channels, ChannelBank) \
        else ChannelBank(gate_channels)
    n_jobs = config.n_jobs
    if job_fractions is None:
        order = rng.permutation(n_jobs)
        job_fractions = np.empty(n_jobs)
        job_fractions[order] = np.arange(n_jobs) / max(n_jobs, 1)
    else:
        job_fractions = np.asarray(job_fractions, dtype=float)
        if len(job_fractions) != n_jobs:
            raise RBError("job_fractions length mismatch")
    lengths, seq_idx, successes, shots = [], [], [], []
    job = 0
    for length in config.lengths:
        for s in range(config.sequences_per_length):
            indices = rng.integers(GROUP_ORDER, size=length)
            cz_matrix = None
            if cz_for_fraction is not None:
                cz_matrix = cz_for_fraction(job_fractions[job]).matrix
            p = _sequence_survival(bank, indices, config.interleaved, cz_matrix)
            ea = config.assignment_error
            p_meas = p * (1.0 - 2.0 * ea) + ea
            lengths.append(length)
            seq_idx.append(s)
            successes.append(int(rng.binomial(config.shots_per_sequence, p_meas)))
            shots.append(config.shots_per_sequence)
            job += 1
    return RBDataset(np.array(lengths, dtype=np.int64),
                     np.array(seq_idx, dtype=np.int64),
                     np.array(successes, dtype=np.int64),
                     np.array(shots, dtype=np.int64))


# ---------------------------------------------------------------------------
# Decay fitting

@dataclass
class DecayFit:
    """Weighted fit of survival = A p^L + B."""

    a: float
    p: float
    b: float
    covariance: np.ndarray
    ci_low: float
    ci_high: float
    residuals: np.ndarray
    unweighted_fallback: bool = False
    clamped: bool = False


def _model(length, a, p, b):
    return a * np.power(p, length) + b


def _init_params(lengths, means):
    rng_ = means.max() - means.min()
    a0 = b0 = max(0.5 * rng_, 1e-3)
    floor = means.min() - 1e-3
    pos = np.clip(means - floor, 1e-6, None)
    slope = np.polyfit(lengths, np.log(pos), 1)[0]
    p0 = float(np.clip(np.exp(slope), 1e-3, 0.9999))
    return a0, p0, b0


def fit_decay(dataset: RBDataset) -> DecayFit:
    """Weighted nonlinear least squares on per-length mean survivals.

    Weights are inverse variances of the survival proportions across
    random sequences at each length; zero-variance lengths trigger an
    unweighted fallback (flagged).
    """
    from scipy.optimize import curve_fit

    uls, props = dataset.by_length()
    if len(uls) < 3:
        raise RBError("need at least 3 sequence lengths to fit a decay")
    means = props.mean(axis=1)
    var = props.var(axis=1, ddof=1) / props.shape[1]
    fallback = bool(np.any(var <= 0))
    sigma = None if fallback else np.sqrt(var)
    a0, p0, b0 = _init_params(uls, means)
    try:
        popt, pcov = curve_fit(_model, uls, means, p0=[a0, p0, b0], sigma=sigma,
                               absolute_sigma=sigma is not None,
                               bounds=([0, 0, -0.5], [1.5, 1, 1.5]), maxfev=20000)
    except RuntimeError as exc:
        raise RBError(f"decay fit failed: {exc}") from exc
    clamped = bool(popt[1] >= 1.0 - 1e-12 or popt[1] <= 1e-12)
    perr = np.sqrt(max(pcov[1, 1], 0.0))
    if not np.isfinite(perr):
        perr = 0.0
    resid = means - _model(uls, *popt)
    return DecayFit(a=float(popt[0]), p=float(popt[1]), b=float(popt[2]),
                    covariance=pcov, ci_low=float(popt[1] - 1.645 * perr),
                    ci_high=float(popt[1] + 1.645 * perr), residuals=resid,
                    unweighted_fallback=fallback, clamped=clamped)


def _fit_decay_batch(lengths, y, w, iters=80):
    """Vectorized damped Gauss-Newton fits of A p^L + B.

    ``y``: (R, nL) per-length means per replicant; ``w``: weights of the
    same shape.  Returns (a, p, b, ok).
    """
    lengths = np.asarray(lengths, dtype=float)
    y = np.asarray(y, dtype=float)
    w = np.asarray(w, dtype=float)
    r_count = y.shape[0]
    rng_ = y.max(axis=1) - y.min(axis=1)
    a = np.maximum(0.5 * rng_, 1e-3)
    b = a.copy()
    floor = y.min(axis=1, keepdims=True) - 1e-3
    pos = np.clip(y - floor, 1e-6, None)
    lbar = lengths.mean()
    denom = np.sum((lengths - lbar) ** 2)
    slope = np.sum((lengths - lbar) * (np.log(pos) - np.log(pos).mean(axis=1, keepdims=True)),
                   axis=1) / denom
    p = np.clip(np.exp(slope), 1e-3, 0.9999)
    lam = np.full(r_count, 1e-3)

    def sse(a_, p_, b_):
        m = a_[:, None] * np.power(p_[:, None], lengths[None, :]) + b_[:, None]
        return np.sum(w * (y - m) ** 2, axis=1)

    cur = sse(a, p, b)
    for _ in range(iters):
        pl = np.power(p[:, None], lengths[None, :])
        m = a[:, None] * pl + b[:, None]
        r = y - m
        # Jacobian columns: d/da, d/dp, d/db
        ja = pl
        with np.errstate(divide="ignore", invalid="ignore"):
            jp = a[:, None] * lengths[None, :] * np.power(
                np.maximum(p[:, None], 1e-12), lengths[None, :] - 1.0)
        jb = np.ones_like(pl)
        jac = np.stack([ja, jp, jb], axis=2)  # (R, nL, 3)
        jtw = jac * w[:, :, None]
        g = np.einsum("rlk,rl->rk", jtw, r)
        h = np.einsum("rlk,rlm->rkm", jtw, jac)
        h = h + lam[:, None, None] * np.eye(3)[None]
        try:
            step = np.linalg.solve(h, g[..., None])[..., 0]
        except np.linalg.LinAlgError:
            step = np.einsum("rkm,rm->rk", np.linalg.pinv(h), g)
        a_n = np.clip(a + step[:, 0], 0.0, 1.5)
        p_n = np.clip(p + step[:, 1], 1e-9, 1.0)
        b_n = np.clip(b + step[:, 2], -0.5, 1.5)
        new = sse(a_n, p_n, b_n)
        better = new <= cur
        a = np.where(better, a_n, a)
        p = np.where(better, p_n, p)
        b = np.where(better, b_n, b)
        cur = np.where(better, new, cur)
        lam = np.where(better, lam * 0.5, lam * 4.0)
        lam = np.clip(lam, 1e-9, 1e6)
    ok = np.isfinite(p) & np.isfinite(cur)
    return a, p, b, ok


def _batch_stats(props_rep):
    """Per-length means and inverse-variance weights for batch fitting."""
    means = props_rep.mean(axis=2)
    var = props_rep.var(axis=2, ddof=1) / props_rep.shape[2]
    w = np.where(var > 0, 1.0 / np.clip(var, 1e-12, None), 0.0)
    w = np.where(np.all(var > 0, axis=1, keepdims=True), w, 1.0)
    return means, w


def _parametric_replicants(dataset: RBDataset, replicants, rng):
    """Binomial redraws around each sequence's sample mean.

    Returns proportions shaped (replicants, n_lengths, n_sequences).
    """
    uls, props = dataset.by_length()
    shots = int(dataset.shots[0])
    draws = rng.binomial(shots, props[None, :, :],
                         size=(replicants,) + props.shape)
    return uls, draws / shots


def bootstrap_ci(dataset: RBDataset, fit_fn=None, replicants: int = 2000,
                 seed=0, alpha: float = 0.10):
    """Parametric percentile bootstrap CI on the decay parameter.

    Counts are resampled per sequence from a binomial with the sequence's
    sample mean; the 5th/95th percentiles of the replicant statistics form
    the 90% interval.  ``fit_fn`` (dataset -> scalar) switches to a slow
    generic path; the default statistic is the fitted p via the batched
    fitter.
    """
    rng = np.random.default_rng(seed)
    if fit_fn is not None:
        stats = []
        failures = 0
        for _ in range(replicants):
            counts = rng.binomial(dataset.shots, dataset.proportions)
            rep = RBDataset(dataset.lengths, dataset.sequence_index,
                            counts.astype(np.int64), dataset.shots)
            try:
                stats.append(fit_fn(rep))
            except (RBError, RuntimeError):
                failures += 1
        stats = np.asarray(stats)
        ok_frac = len(stats) / replicants
    else:
        uls, props_rep = _parametric_replicants(dataset, replicants, rng)
        means, w = _batch_stats(props_rep)
        _, p, _, ok = _fit_decay_batch(uls, means, w)
        stats = p[ok]
        failures = int(np.sum(~ok))
        ok_frac = 1.0 - failures / replicants
    if ok_frac < 0.95:
        warnings.warn(f"bootstrap unstable: {failures}/{replicants} fit failures",
                      stacklevel=2)
    lo, hi = np.percentile(stats, [100 * alpha / 2, 100 * (1 - alpha / 2)])
    return float(lo), float(hi)


# ---------------------------------------------------------------------------
# Interleaved estimates and stability testing

@dataclass
class IRBResult:
    """Interleaved-benchmarking point estimate with 90% intervals."""

    p_ref: float
    p_int: float
    avg_fidelity: float
    infidelity: float
    ci_low: float
    ci_high: float
    p_ref_ci: tuple = (np.nan, np.nan)
    p_int_ci: tuple = (np.nan, np.nan)
    stability_pass: bool = True
    negative_infidelity: bool = False


def irb_estimate(ref: DecayFit, interleaved: DecayFit, d: int = 4) -> IRBResult:
    """Point estimate r = (d-1)/d * (1 - p_int/p_ref), F = 1 - r.

    A nominally negative infidelity (p_int > p_ref) is flagged, not
    clamped.  The attached CI propagates the two fit standard errors.
    """
    if ref.p <= 0:
        raise RBError("reference decay parameter must be positive")
    ratio = interleaved.p / ref.p
    r = (d - 1) / d * (1.0 - ratio)
    s_ref = (ref.ci_high - ref.p) / 1.645
    s_int = (interleaved.ci_high - interleaved.p) / 1.645
    s_r = (d - 1) / d * np.hypot(s_int / ref.p, interleaved.p * s_ref / ref.p ** 2)
    return IRBResult(p_ref=ref.p, p_int=interleaved.p,
                     avg_fidelity=1.0 - r, infidelity=r,
                     ci_low=1.0 - r - 1.645 * s_r, ci_high=1.0 - r + 1.645 * s_r,
                     p_ref_ci=(ref.ci_low, ref.ci_high),
                     p_int_ci=(interleaved.ci_low, interleaved.ci_high),
                     negative_infidelity=bool(r < 0))


def stability_test(dataset_a: RBDataset, dataset_b: RBDataset,
                   alpha: float = 0.10, seed=0, replicants: int = 1000):
    """Pooled bootstrap test of equal decay parameters.

    The statistic is |p_a - p_b|; its null distribution comes from
    resampling sequences (with replacement) out of the pooled per-length
    collection into two synthetic datasets.  Returns (passed, p_value).
    """
    rng = np.random.default_rng(seed)
    fit_a, fit_b = fit_decay(dataset_a), fit_decay(dataset_b)
    observed = abs(fit_a.p - fit_b.p)
    uls_a, props_a = dataset_a.by_length()
    uls_b, props_b = dataset_b.by_length()
    if not np.array_equal(uls_a, uls_b):
        raise RBError("stability test requires matching length grids")
    pooled = np.concatenate([props_a, props_b], axis=1)  # (nL, 2*nseq)
    n_len, n_pool = pooled.shape
    n_a, n_b = props_a.shape[1], props_b.shape[1]
    picks = rng.integers(n_pool, size=(replicants, n_len, n_a + n_b))
    resampled = np.take_along_axis(pooled[None], picks, axis=2)
    means_a, w_a = _batch_stats(resampled[:, :, :n_a])
    means_b, w_b = _batch_stats(resampled[:, :, n_a:])
    _, p_a, _, ok_a = _fit_decay_batch(uls_a, means_a, w_a)
    _, p_b, _, ok_b = _fit_decay_batch(uls_a, means_b, w_b)
    ok = ok_a & ok_b
    null = np.abs(p_a[ok] - p_b[ok])
    p_value = float((np.sum(null >= observed) + 1) / (len(null) + 1))
    return p_value >= alpha, p_value


# ---------------------------------------------------------------------------
# Repeated interleaved experiments

@dataclass
class CoherenceProbe:
    """T1/T2* spot checks recorded alongside a benchmarking experiment."""

    t1_fixed: float
    t1_tunable: float
    t2_fixed: float
    t2_tunable: float


@dataclass
class RepeatedIRBOutcome:
    results: list
    discarded: int
    infidelities: np.ndarray
    ecdf: "ECDF"
    probes: list = field(default_factory=list)


def run_repeated_irb(config: RBConfig, cz_channel_fn, n_experiments: int,
                     profile: NoiseProfile, seed, pair: CoupledPair | None = None,
                     group: CliffordGroup | None = None) -> RepeatedIRBOutcome:
    """Repeated grouped experiments: 2 reference + 2 interleaved decays each.

    ``cz_channel_fn(t1_multiplier)`` supplies the CZ channel at a given
    drift level (cached per level).  All measurements across the whole
    campaign live on one wall-clock axis; within an experiment the four
    decays run as sequential blocks (ref, interleaved, ref, interleaved),
    each block's sequence measurements scrambled internally, and the drift
    schedule is evaluated at each job's global fraction.  Coherence drift
    on timescales comparable to an experiment therefore lands differently
    on the duplicate decays.  Experiments whose duplicate reference or
    duplicate interleaved decays are distinguishable at the 10% level are
    discarded; surviving duplicates are pooled by concatenating counts.
    """
    rng = np.random.default_rng(seed)
    ref_cfg = RBConfig(config.lengths, config.sequences_per_length,
                       config.shots_per_sequence, False, config.assignment_error)
    int_cfg = RBConfig(config.lengths, config.sequences_per_length,
                       config.shots_per_sequence, True, config.assignment_error)
    per_exp = 4 * config.n_jobs
    total = n_experiments * per_exp
    channel_cache = {}

    def cz_at(fraction):
        level = profile.t1_multiplier(fraction)
        if level not in channel_cache:
            channel_cache[level] = cz_channel_fn(level)
        return channel_cache[level]

    bank = ChannelBank({"cz": cz_at(0.0)}, group=group)

    def bank_for(fraction):
        return cz_at(fraction)

    results, probes = [], []
    discarded = 0
    for k in range(n_experiments):
        parts = []
        for i in range(4):
            slot = rng.permutation(config.n_jobs) \
                + k * per_exp + i * config.n_jobs
            parts.append(slot / total)
        drift_fn = bank_for if (profile.t1_drift or None) else None
        ref_a = run_rb(ref_cfg, bank, rng.integers(2 ** 63), cz_for_fraction=drift_fn,
                       job_fractions=parts[0])
        int_a = run_rb(int_cfg, bank, rng.integers(2 ** 63), cz_for_fraction=drift_fn,
                       job_fractions=parts[1])
        ref_b = run_rb(ref_cfg, bank, rng.integers(2 ** 63), cz_for_fraction=drift_fn,
                       job_fractions=parts[2])
        int_b = run_rb(int_cfg, bank, rng.integers(2 ** 63), cz_for_fraction=drift_fn,
                       job_fractions=parts[3])
        if pair is not None:
            mult = profile.t1_multiplier((k + 0.5) / n_experiments)
            probes.append(CoherenceProbe(
                t1_fixed=pair.fixed.t1 * mult, t1_tunable=pair.tunable.t1 * mult,
                t2_fixed=pair.fixed.t2_star, t2_tunable=pair.tunable.t2_star))
        ok_ref, _ = stability_test(ref_a, ref_b, seed=rng.integers(2 ** 63))
        ok_int, _ = stability_test(int_a, int_b, seed=rng.integers(2 ** 63))
        if not (ok_ref and ok_int):
            discarded += 1
            continue
        shift = config.sequences_per_length
        ref_b2 = RBDataset(ref_b.lengths, ref_b.sequence_index + shift,
                           ref_b.successes, ref_b.shots)
        int_b2 = RBDataset(int_b.lengths, int_b.sequence_index + shift,
                           int_b.successes, int_b.shots)
        fit_ref = fit_decay(RBDataset.concatenate([ref_a, ref_b2]))
        fit_int = fit_decay(RBDataset.concatenate([int_a, int_b2]))
        res = irb_estimate(fit_ref, fit_int)
        res.stability_pass = True
        results.append(res)
    infid = np.array([r.infidelity for r in results])
    band = ecdf_with_band(infid) if len(infid) >= 2 else None
    return RepeatedIRBOutcome(results=results, discarded=discarded,
                              infidelities=infid, ecdf=band, probes=probes)


# ---------------------------------------------------------------------------
# ECDF and coherence-limited prediction

@dataclass
class ECDF:
    """Step ECDF with a simultaneous Dvoretzky-Kiefer-Wolfowitz band."""

    values: np.ndarray
    cumulative: np.ndarray
    band_low: np.ndarray
    band_high: np.ndarray
    half_width: float

    def to_csv(self, path, header_lines=()):
        with open(path, "w", newline="") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            w = csv.writer(fh)
            w.writerow(["infidelity", "cumulative_probability", "band_low", "band_high"])
            for row in zip(self.values, self.cumulative, self.band_low, self.band_high):
                w.writerow([repr(float(x)) for x in row])


def ecdf_with_band(samples, alpha: float = 0.10) -> ECDF:
    """ECDF of the samples with a (1-alpha) DKW confidence band."""
    samples = np.sort(np.asarray(samples, dtype=float))
    n = len(samples)
    if n < 2:
        raise RBError("need at least 2 samples for an ECDF band")
    cum = np.arange(1, n + 1) / n
    eps = np.sqrt(np.log(2.0 / alpha) / (2.0 * n))
    return ECDF(values=samples, cumulative=cum,
                band_low=np.clip(cum - eps, 0.0, 1.0),
                band_high=np.clip(cum + eps, 0.0, 1.0), half_width=float(eps))


def coherence_limited_prediction(pair: CoupledPair, pulse: FluxPulse,
                                 frame_corrections, t1_fixed_range,
                                 t2_fixed_range, t1_tunable_range,
                                 t2_tunable_range, dt: float | None = None):
    """Static-decoherence fidelity interval over the coherence-range corners.

    Evaluates the average gate fidelity of the pulse channel (with frame
    corrections, against CZ) at all 16 corner combinations of the supplied
    T1/T2* ranges and returns (min, max).
    """
    fids = []
    for t1f in t1_fixed_range:
        for t2f in t2_fixed_range:
            for t1t in t1_tunable_range:
                for t2t in t2_tunable_range:
                    rates = DecoherenceRates.from_times(
                        t1f, min(t2f, 2 * t1f), t1t, min(t2t, 2 * t1t))
                    ch = gate_superoperator(pair, pulse, rates=rates,
                                            frame_corrections=frame_corrections,
                                            dt=dt)
                    fids.append(average_gate_fidelity(ch, CZ))
    return float(min(fids)), float(max(fids))

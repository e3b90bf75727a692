import numpy as np
import pytest

from paramcz.device import q6_spec
from paramcz.noise import (InstrumentPSD, NoiseError, NoiseProfile,
                           NoMinimumError, PSDParseError,
                           amplitude_scale_from_curve, load_psd,
                           noise_realization, simulate_ramsey_under_modulation,
                           simulate_t1_under_modulation, white_dephasing_rate)

DELAYS = np.linspace(100.0, 48000.0, 40)  # ns, spans > 2x T2*


def test_white_flux_psd_conversion():
    p = NoiseProfile(white_floor=-150.0, flux_transfer=0.2)
    # -150 dBm/Hz = 1e-15 mW/Hz, times the transfer coefficient
    assert p.white_flux_psd == pytest.approx(2e-16, rel=1e-12)
    # 10 dB higher floor means 10x the PSD
    hi = NoiseProfile(white_floor=-140.0, flux_transfer=0.2)
    assert hi.white_flux_psd == pytest.approx(10.0 * p.white_flux_psd, rel=1e-12)


def test_amplitude_sigma_log_band():
    p = NoiseProfile(one_over_f_amp=10.0)
    # 1 us shot inside a 1 s experiment: band from 1 Hz to 1 MHz
    sig = p.amplitude_sigma(1000.0, t_experiment_s=1.0)
    assert sig == pytest.approx(10e-6 * np.sqrt(np.log(1e6)), rel=1e-9)
    assert NoiseProfile(one_over_f_amp=0.0).amplitude_sigma(1000.0) == 0.0


def test_profile_validation():
    with pytest.raises(NoiseError):
        NoiseProfile(flux_transfer=-1.0)
    with pytest.raises(NoiseError):
        NoiseProfile(one_over_f_amp=-1.0)


def test_t1_drift_schedule():
    p = NoiseProfile(t1_drift=(1.0, 0.5, 1.0))
    assert p.t1_multiplier(0.0) == 1.0
    assert p.t1_multiplier(0.5) == 0.5
    assert p.t1_multiplier(1.0) == 1.0
    assert NoiseProfile().t1_multiplier(0.3) == 1.0


def test_white_dephasing_rate_properties():
    q6 = q6_spec()
    p = NoiseProfile(white_floor=-150.0)
    eps_star = 0.6051880706
    gamma_star = white_dephasing_rate(q6, eps_star, p)
    # at the flux maximum with no modulation the slope vanishes
    assert white_dephasing_rate(q6, 0.0, p) < 1e-3 * gamma_star
    # the rate scales linearly with the PSD
    hi = NoiseProfile(white_floor=-140.0)
    assert white_dephasing_rate(q6, eps_star, hi) == pytest.approx(
        10.0 * gamma_star, rel=1e-9)
    # modest dephasing at the default floor: rate * T2* well below 1
    assert gamma_star * q6.t2_star * 1e3 < 0.1


def test_noise_realization_statistics():
    rng = np.random.default_rng(7)
    p = NoiseProfile(white_floor=-110.0, one_over_f_amp=0.0)
    trace = noise_realization(p, 1000.0, 1.0, rng)
    assert len(trace) == 1000
    sigma = np.sqrt(p.white_flux_psd * 1e9 / 2.0)
    assert np.std(trace) == pytest.approx(sigma, rel=0.1)
    # quasi-static component shifts the whole trace coherently
    pq = NoiseProfile(white_floor=-300.0, one_over_f_amp=1e4)
    means = [np.mean(noise_realization(pq, 1000.0, 1.0, rng)) for _ in range(50)]
    assert np.std(means) > 1e-3 * np.std(noise_realization(pq, 1000.0, 1.0, rng))


def test_noise_realization_spur_tone():
    rng = np.random.default_rng(3)
    p = NoiseProfile(white_floor=-300.0, one_over_f_amp=0.0,
                     spurs=((50.0, -100.0),))
    trace = noise_realization(p, 1000.0, 1.0, rng)
    spec = np.abs(np.fft.rfft(trace))
    freqs = np.fft.rfftfreq(len(trace), d=1.0) * 1e3  # MHz
    peak = freqs[np.argmax(spec)]
    assert peak == pytest.approx(50.0, abs=1.0)


def test_load_psd_and_floor(tmp_path):
    path = tmp_path / "psd.csv"
    path.write_text("freq_mhz,power_dbm\n# comment\n1.0,-150\n2.0,-150\n"
                    "3.0,-100\n4.0,-150\n")
    psd = load_psd(path)
    assert len(psd.frequencies) == 4
    assert psd.white_floor() == pytest.approx(-150.0)
    assert psd.white_floor(spur_percentile=100.0) == pytest.approx(-100.0)


def test_load_psd_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("1.0,-150\n2.0,oops\n")
    with pytest.raises(PSDParseError, match="line 2"):
        load_psd(bad)
    short = tmp_path / "short.csv"
    short.write_text("1.0,-150\n")
    with pytest.raises(PSDParseError):
        load_psd(short)
    with pytest.raises(PSDParseError):
        InstrumentPSD(np.array([1.0, 1.0]), np.array([-150.0, -150.0]))


def test_ramsey_sweet_spot_preserves_coherence(pair, eps_star):
    p = NoiseProfile(white_floor=-150.0)
    fit = simulate_ramsey_under_modulation(pair, eps_star, 88.5, p, DELAYS,
                                           shots=400, seed=11)
    t2_0 = pair.tunable.t2_star
    assert fit.value / t2_0 > 0.85
    assert fit.ci_low < fit.value < fit.ci_high


def test_ramsey_dip_off_sweet_spot(pair, eps_star):
    p = NoiseProfile(white_floor=-150.0)
    dip = simulate_ramsey_under_modulation(pair, 0.31, 88.5, p, DELAYS,
                                           shots=400, seed=11)
    star = simulate_ramsey_under_modulation(pair, eps_star, 88.5, p, DELAYS,
                                            shots=400, seed=11)
    # amplitude noise hits hardest where the slope of the average shift peaks
    assert dip.value < 0.6 * star.value


def test_ramsey_high_floor_degrades_sweet_spot(pair, eps_star):
    lo = NoiseProfile(white_floor=-150.0)
    hi = NoiseProfile(white_floor=-135.0)
    a = simulate_ramsey_under_modulation(pair, eps_star, 88.5, lo, DELAYS,
                                         shots=400, seed=5)
    b = simulate_ramsey_under_modulation(pair, eps_star, 88.5, hi, DELAYS,
                                         shots=400, seed=5)
    assert b.value < 0.8 * a.value


def test_ramsey_requires_long_delays(pair, eps_star):
    with pytest.raises(NoiseError, match="delays"):
        simulate_ramsey_under_modulation(pair, eps_star, 88.5, NoiseProfile(),
                                         np.linspace(10, 100, 5), 100, 1)


def test_t1_unaffected_by_modulation(pair, eps_star):
    p = NoiseProfile()
    fit = simulate_t1_under_modulation(pair, eps_star, 88.5, p,
                                       np.linspace(100, 80000, 30),
                                       shots=800, seed=2)
    assert fit.value == pytest.approx(pair.tunable.t1, rel=0.1)


def test_t1_with_drift_multiplier(pair, eps_star):
    p = NoiseProfile(t1_drift=(1.0, 0.5))
    fit = simulate_t1_under_modulation(pair, eps_star, 88.5, p,
                                       np.linspace(100, 80000, 30),
                                       shots=800, seed=2, drift_fraction=0.9)
    assert fit.value == pytest.approx(0.5 * pair.tunable.t1, rel=0.1)


def test_amplitude_scale_from_curve():
    raw = np.linspace(0.0, 2.0, 41)
    dw = (raw - 1.2) ** 2 - 50.0
    scale = amplitude_scale_from_curve(raw, dw)
    assert scale == pytest.approx(0.6 / 1.2, rel=1e-6)
    with pytest.raises(NoMinimumError):
        amplitude_scale_from_curve(raw, raw)  # monotone, no interior minimum
    with pytest.raises(NoiseError):
        amplitude_scale_from_curve(raw[:2], dw[:2])

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paramcz.device import (CoupledPair, DeviceError, NoSweetSpotError,
                            average_shift, effective_coupling,
                            frequency_at_flux, modulation_response,
                            pair_from_dict, pair_from_json, q6_spec, q6q7_pair,
                            q7_spec, resonance_offset, sweet_spot_amplitude)

# Frozen oracle values, computed independently with 30-digit arithmetic
# (mpmath closed form + adaptive quadrature of the cycle average).
ORACLE_D = 0.8381549372301181
ORACLE_F_QUARTER = 4.290514802394090
ORACLE_EPS_STAR = 0.6051880706
ORACLE_SHIFT_STAR = -272.0085627  # MHz
ORACLE_H2_STAR = -163.9442805  # MHz, second-harmonic cosine coefficient
ORACLE_OMEGA_P = 88.4957  # MHz, resonance at the sweet spot
ORACLE_GEFF_BESSEL = 3.9797091070  # MHz at (eps*, 88.4957)


def test_flux_map_endpoints():
    q6 = q6_spec()
    assert frequency_at_flux(q6, 0.0) == pytest.approx(4.475, abs=1e-12)
    assert frequency_at_flux(q6, 0.5) == pytest.approx(4.080, abs=1e-12)
    assert q6.asymmetry == pytest.approx(ORACLE_D, abs=1e-12)
    assert frequency_at_flux(q6, 0.25) == pytest.approx(ORACLE_F_QUARTER,
                                                        abs=1e-9)


@given(phi=st.floats(-3.0, 3.0), k=st.integers(-3, 3))
@settings(max_examples=60, deadline=None)
def test_flux_map_even_and_periodic(phi, k):
    q6 = q6_spec()
    f = frequency_at_flux(q6, phi)
    assert frequency_at_flux(q6, -phi) == pytest.approx(f, abs=1e-12)
    assert frequency_at_flux(q6, phi + k) == pytest.approx(f, abs=1e-10)
    assert 4.080 - 1e-9 <= f <= 4.475 + 1e-9


def test_flux_map_vectorized_matches_scalar():
    q6 = q6_spec()
    phis = np.linspace(-0.7, 0.7, 23)
    vec = frequency_at_flux(q6, phis)
    assert vec.shape == phis.shape
    for p, v in zip(phis, vec):
        assert frequency_at_flux(q6, p) == pytest.approx(v, abs=1e-14)


def test_flux_map_requires_tunable():
    with pytest.raises(DeviceError):
        frequency_at_flux(q7_spec(), 0.1)


def test_average_shift_small_amplitude_quadratic():
    q6 = q6_spec()
    s1 = average_shift(q6, 0.01)
    s2 = average_shift(q6, 0.02)
    assert s2 < s1 < 0
    # quadratic scaling to better than 1% at amplitudes <= 0.02
    assert s2 / (4.0 * s1) == pytest.approx(1.0, abs=0.01)


def test_average_shift_zero_amplitude():
    assert average_shift(q6_spec(), 0.0) == 0.0
    resp = modulation_response(q6_spec(), 0.0, 92.0)
    assert resp.avg_shift == 0.0
    assert resp.harmonic(2) == 0.0


def test_sweet_spot_location_and_value():
    q6 = q6_spec()
    eps = sweet_spot_amplitude(q6)
    assert eps == pytest.approx(ORACLE_EPS_STAR, abs=2e-5)
    assert average_shift(q6, eps) == pytest.approx(ORACLE_SHIFT_STAR, abs=1e-4)


def test_sweet_spot_first_order_insensitive():
    q6 = q6_spec()
    eps = sweet_spot_amplitude(q6)
    h = 1e-4
    slope = (average_shift(q6, eps + h) - average_shift(q6, eps - h)) / (2 * h)
    assert abs(slope) < 0.1  # MHz per flux quantum


def test_sweet_spot_tracks_spectrum_change():
    # pulling f_min down by 100 MHz moves the sweet spot slightly inward
    q6 = q6_spec(f_min=3.980)
    eps = sweet_spot_amplitude(q6)
    assert eps == pytest.approx(0.604, abs=2e-3)


def test_no_sweet_spot_for_flat_spectrum():
    flat = q6_spec(f_min=4.475)
    with pytest.raises(NoSweetSpotError):
        sweet_spot_amplitude(flat)


def test_harmonics_even_only():
    resp = modulation_response(q6_spec(), ORACLE_EPS_STAR, 92.0, n_harmonics=3)
    assert [n for n, _ in resp.harmonics] == [2, 4, 6]
    assert resp.harmonic(2) == pytest.approx(ORACLE_H2_STAR, abs=1e-3)
    assert abs(resp.harmonic(4)) < abs(resp.harmonic(2))
    assert resp.harmonic(8) == 0.0


def test_resonance_offset_static_example(pair):
    # no modulation: 2*92 - |649 - 200| = -265 MHz
    assert resonance_offset(pair, 0.0, 92.0) == pytest.approx(-265.0, abs=1e-9)


def test_resonance_offset_zero_at_predicted_frequency(pair, eps_star):
    assert resonance_offset(pair, eps_star, ORACLE_OMEGA_P) == pytest.approx(
        0.0, abs=0.01)
    # below resonance the offset is negative, above it positive
    assert resonance_offset(pair, eps_star, ORACLE_OMEGA_P - 5.0) < 0
    assert resonance_offset(pair, eps_star, ORACLE_OMEGA_P + 5.0) > 0


def test_resonance_offset_sign_convention(pair):
    a = resonance_offset(pair, 0.3, 92.0, delta_sign=+1)
    b = resonance_offset(pair, 0.3, 92.0, delta_sign=-1)
    assert a != b
    with pytest.raises(DeviceError):
        resonance_offset(pair, 0.3, 92.0, delta_sign=0)


def test_effective_coupling_bessel_oracle(pair, eps_star):
    g = effective_coupling(pair, eps_star, ORACLE_OMEGA_P, mode="bessel")
    assert g == pytest.approx(ORACLE_GEFF_BESSEL, abs=2e-4)


def test_effective_coupling_small_argument_linear(pair):
    # J1(x) ~ x/2, so g_eff should scale with the average shift
    g1 = effective_coupling(pair, 0.05, 92.0, mode="bessel")
    s1 = average_shift(pair.tunable, 0.05)
    expected = np.sqrt(2.0) * pair.g * abs(s1) / (2.0 * 2.0 * 92.0)
    assert g1 == pytest.approx(expected, rel=0.01)


def test_effective_coupling_modes_agree_at_small_index(pair):
    for eps in (0.1, 0.2):
        b = effective_coupling(pair, eps, 92.0, mode="bessel")
        f = effective_coupling(pair, eps, 92.0, mode="fourier")
        assert f == pytest.approx(b, rel=0.05)


def test_effective_coupling_zero_and_bad_mode(pair):
    assert effective_coupling(pair, 0.0, 92.0) == 0.0
    with pytest.raises(DeviceError):
        effective_coupling(pair, 0.3, 92.0, mode="nope")


def test_pair_detuning(pair):
    assert pair.detuning == pytest.approx(649.0, abs=1e-9)


def test_spec_validation_errors():
    with pytest.raises(DeviceError):
        q6_spec(f_min=5.0)  # f_min > f_max
    with pytest.raises(DeviceError):
        q6_spec(anharmonicity=-200.0)
    with pytest.raises(DeviceError):
        q6_spec(t2_star=100.0)  # exceeds 2*t1
    with pytest.raises(DeviceError):
        q6_spec(t1=-1.0)
    with pytest.raises(DeviceError):
        CoupledPair(tunable=q6_spec(), fixed=q7_spec(), g=0.0)
    with pytest.raises(DeviceError):
        CoupledPair(tunable=q7_spec(), fixed=q7_spec(), g=5.0)


def test_pair_from_json_roundtrip(tmp_path):
    doc = {
        "tunable": {"f_max": 4.475, "f_min": 4.080, "anharmonicity": 200.0,
                    "t1": 23.6, "t2_star": 19.4, "tunable": True},
        "fixed": {"f_max": 3.826, "f_min": 3.826, "anharmonicity": 200.0,
                  "t1": 16.0, "t2_star": 14.6, "tunable": False},
        "g": 5.0,
    }
    path = tmp_path / "pair.json"
    path.write_text(json.dumps(doc))
    pair = pair_from_json(path)
    assert pair.g == 5.0
    assert pair.tunable.f_max == 4.475
    assert pair.dc_bias == 0.0


def test_pair_from_dict_errors():
    with pytest.raises(DeviceError, match="missing device key"):
        pair_from_dict({"g": 5.0})
    bad = {"tunable": {"f_max": 4.4, "f_min": 4.0, "anharmonicity": 200.0,
                       "t1": 20.0, "t2_star": 18.0, "bogus": 1},
           "fixed": {"f_max": 3.8, "f_min": 3.8, "anharmonicity": 200.0,
                     "t1": 16.0, "t2_star": 14.0, "tunable": False},
           "g": 5.0}
    with pytest.raises(DeviceError, match="unknown transmon keys"):
        pair_from_dict(bad)


def test_reference_pair_defaults():
    pair = q6q7_pair()
    assert pair.tunable.t1 == 23.6
    assert pair.fixed.t2_star == 14.6
    assert not pair.fixed.tunable

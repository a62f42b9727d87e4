import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sealab.chirp import ChirpConfig, chirp_phase, chirp_sample, instantaneous_frequency


def cfg(**kw):
    base = dict(u_a=1.0, u_b=0.0, omega_0=1.0, omega_1=100.0, t_0=0.0, t_f=10.0)
    base.update(kw)
    return ChirpConfig(**base)


def test_phase_zero_at_start():
    for c in (cfg(), cfg(omega_1=1.0), cfg(t_0=3.5)):
        assert chirp_phase(c, c.t_0) == 0.0


def test_degenerate_chirp_is_constant_frequency():
    c = cfg(omega_0=7.0, omega_1=7.0)
    for tau in (0.1, 1.0, 9.9):
        assert abs(chirp_phase(c, tau) - tau * 7.0) < 1e-12


def test_phase_matches_closed_form():
    # omega 1 -> 100 over 10 s: rho = 100**0.1, phase(10) = 99/ln(rho)
    c = cfg()
    rho = 100.0 ** 0.1
    expected = (rho ** 10.0 - 1.0) / math.log(rho) * 1.0
    assert abs(expected - 99.0 / math.log(rho)) < 1e-9  # same closed form
    assert abs(chirp_phase(c, 10.0) - expected) < 1e-9
    assert abs(expected - 214.9757) < 1e-3


def test_sample_offset_only_at_start():
    c = cfg(u_a=2.0, u_b=0.5)
    assert chirp_sample(c, 0.0) == pytest.approx(0.5)


def test_sample_closed_form_at_end():
    c = cfg(u_a=2.0, u_b=0.5)
    phi = chirp_phase(c, 10.0)
    assert chirp_sample(c, 10.0) == pytest.approx(2.0 * math.sin(phi) + 0.5, rel=1e-12)


def test_sample_hits_sine_peak():
    # invert the phase map to find t where phase = pi/2; sample must be u_a
    c = cfg()
    ln_rho = c.ln_rho
    t_peak = math.log1p(math.pi / 2 * ln_rho / c.omega_0) / ln_rho
    assert chirp_sample(c, t_peak) == pytest.approx(1.0, abs=1e-12)


def test_instantaneous_frequency_constant_case():
    c = cfg(omega_0=5.0, omega_1=5.0)
    t = np.linspace(0.001, 10.0, 500)
    w = instantaneous_frequency(c, t, 1000.0)
    np.testing.assert_allclose(w, 5.0, atol=1e-9)


def test_instantaneous_frequency_approaches_end_frequency():
    c = cfg()
    w_end = instantaneous_frequency(c, 10.0, 1000.0)
    assert abs(w_end - 100.0) / 100.0 < 0.005


def test_instantaneous_frequency_monotone_up():
    c = cfg()
    f_s = 1000.0
    t = np.arange(1, int(10 * f_s)) / f_s
    w = instantaneous_frequency(c, t, f_s)
    assert np.all(np.diff(w) > 0)


def test_instantaneous_frequency_stays_in_band():
    c = cfg(omega_0=1.0, omega_1=300.0, t_f=120.0)
    f_s = 1000.0
    t = np.arange(1, int(120 * f_s)) / f_s
    w = instantaneous_frequency(c, t, f_s)
    eps = 1e-3
    assert w.min() >= 1.0 * (1 - eps)
    assert w.max() <= 300.0 * (1 + eps)


@given(
    omega_0=st.floats(0.1, 50.0),
    ratio=st.floats(1.0, 500.0),
    t_f=st.floats(1.0, 300.0),
    frac=st.floats(0.0, 1.0),
)
@settings(max_examples=200, deadline=None)
def test_frequency_bounds_property(omega_0, ratio, t_f, frac):
    c = ChirpConfig(u_a=1.0, u_b=0.0, omega_0=omega_0, omega_1=omega_0 * ratio, t_f=t_f)
    f_s = 1000.0
    t_k = max(1.0 / f_s, frac * t_f)
    w = float(instantaneous_frequency(c, t_k, f_s))
    assert c.omega_0 * (1 - 1e-3) <= w <= c.omega_1 * (1 + 1e-3)


def test_config_validation():
    with pytest.raises(ValueError):
        cfg(u_a=0.0)
    with pytest.raises(ValueError):
        cfg(omega_0=-1.0)
    with pytest.raises(ValueError):
        cfg(omega_1=0.5)  # below omega_0
    with pytest.raises(ValueError):
        cfg(t_f=0.0)


def test_config_roundtrip():
    c = cfg(u_a=2.0, u_b=0.1)
    assert ChirpConfig.from_dict(c.to_dict()) == c

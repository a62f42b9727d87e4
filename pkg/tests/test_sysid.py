import numpy as np
import pytest

from sealab.chirp import ChirpConfig
from sealab.errors import EstimationError
from sealab.lti import TransferFunction, discretize
from sealab.plant import ExperimentRecord, NoiseConfig, PlantParams, plant_tf, run_open_loop
from sealab.sysid import (
    BodeData,
    analytic_bode_data,
    display_phase_window,
    measure_margins,
    piecewise_fft_bode,
    shifted_crossover,
    single_fft_bode,
)

DEFAULT_CHIRP = ChirpConfig(u_a=1.0, u_b=0.0, omega_0=1.0, omega_1=300.0, t_f=120.0)


def synth_record(tf: TransferFunction, delay_samples: int = 0, f_s: float = 1000.0,
                 chirp: ChirpConfig = DEFAULT_CHIRP, sigma: float = 0.0, seed: int = 0) -> ExperimentRecord:
    """Drive an arbitrary test system with the chirp (independent of plant.py run path)."""
    from sealab.chirp import chirp_sample

    n = int(round(chirp.t_f * f_s))
    t = np.arange(n) / f_s
    u = chirp_sample(chirp, t)
    ud = np.zeros_like(u)
    if delay_samples:
        ud[delay_samples:] = u[:-delay_samples]
    else:
        ud = u
    f = discretize(tf, f_s).apply(ud)
    if sigma > 0:
        f = f + np.random.default_rng(seed).normal(0, sigma, n)
    return ExperimentRecord(f_s=f_s, t=t, u=u, f=f, chirp=chirp, kind="open_loop")


# fixture plants for the oracle-equivalence property: gain, first-order,
# second-order underdamped and overdamped, with and without delay
FIXTURE_PLANTS = [
    (TransferFunction.gain(2.5), 0),
    (TransferFunction((30.0,), (1.0, 30.0)), 0),
    (TransferFunction((50.0 * 350000.0,), (80.0, 1400.0, 350000.0)), 0),   # underdamped
    (TransferFunction((10.0 * 3600.0,), (1.0, 150.0, 3600.0)), 0),         # overdamped
    (TransferFunction((50.0 * 350000.0,), (80.0, 1400.0, 350000.0)), 2),   # with delay
    (TransferFunction((30.0,), (1.0, 30.0)), 5),
]


def test_piecewise_pure_gain_flat():
    rec = synth_record(TransferFunction.gain(2.5), chirp=DEFAULT_CHIRP)
    bode = piecewise_fft_bode(rec, 120)
    assert len(bode.omega) + bode.meta["dropped_segments"] == 120
    np.testing.assert_allclose(bode.mag_db, 20 * np.log10(2.5), atol=0.05)
    np.testing.assert_allclose(bode.phase_deg, 0.0, atol=0.5)


def test_piecewise_matches_analytic_for_fixture_plants():
    # interior points within 0.5 dB and 3 deg of the analytic oracle
    for tf, dsamp in FIXTURE_PLANTS:
        rec = synth_record(tf, delay_samples=dsamp)
        bode = piecewise_fft_bode(rec, 120)
        truth = analytic_bode_data(tf, dsamp / rec.f_s, bode.omega)
        interior = slice(3, -3)
        dmag = np.abs(bode.mag_db - truth.mag_db)[interior]
        dph = np.abs(bode.phase_deg - truth.phase_deg)[interior]
        assert dmag.max() < 0.5, f"{tf}: magnitude off by {dmag.max():.3f} dB"
        assert dph.max() < 3.0, f"{tf}: phase off by {dph.max():.3f} deg"


def test_piecewise_noise_robustness():
    params = PlantParams()
    rec = run_open_loop(params, DEFAULT_CHIRP, NoiseConfig(sigma_f=0.5, seed=11))
    bode = piecewise_fft_bode(rec, 120)
    truth = analytic_bode_data(plant_tf(params), params.loop_delay, bode.omega)
    good = (np.abs(bode.mag_db - truth.mag_db) <= 2.0) & (np.abs(bode.phase_deg - truth.phase_deg) <= 10.0)
    assert np.mean(good) >= 0.95


def test_piecewise_grid_invariants():
    rec = synth_record(TransferFunction((30.0,), (1.0, 30.0)))
    bode = piecewise_fft_bode(rec, 120)
    assert np.all(np.diff(bode.omega) > 0)
    assert np.all(np.abs(np.diff(bode.phase_deg)) < 180.0)


def test_piecewise_rejects_single_segment():
    rec = synth_record(TransferFunction.gain(1.0))
    with pytest.raises(EstimationError):
        piecewise_fft_bode(rec, 1)


def test_piecewise_rejects_short_segments():
    chirp = ChirpConfig(u_a=1.0, u_b=0.0, omega_0=5.0, omega_1=50.0, t_f=4.0)
    rec = synth_record(TransferFunction.gain(1.0), chirp=chirp)  # 4000 samples
    with pytest.raises(EstimationError):
        piecewise_fft_bode(rec, 120)  # 33 samples/segment


def test_single_fft_pure_gain():
    rec = synth_record(TransferFunction.gain(2.5))
    bode = single_fft_bode(rec)
    band = (bode.omega > 2.0) & (bode.omega < 150.0)
    np.testing.assert_allclose(bode.mag_db[band], 20 * np.log10(2.5), atol=0.1)


def test_single_fft_noiseless_matches_analytic_midband():
    params = PlantParams()
    rec = run_open_loop(params, DEFAULT_CHIRP, NoiseConfig(sigma_f=0.0))
    bode = single_fft_bode(rec)
    band = (bode.omega >= 2.0) & (bode.omega <= 150.0)
    truth = analytic_bode_data(plant_tf(params), params.loop_delay, bode.omega[band])
    assert np.max(np.abs(bode.mag_db[band] - truth.mag_db)) < 1.0
    # compare phase modulo 360 to stay independent of unwrap anchoring
    dph = (bode.phase_deg[band] - truth.phase_deg + 180.0) % 360.0 - 180.0
    assert np.max(np.abs(dph)) < 5.0


def test_noisy_single_fft_worse_than_piecewise():
    params = PlantParams()
    rec = run_open_loop(params, DEFAULT_CHIRP, NoiseConfig(sigma_f=0.5, seed=3))
    single = single_fft_bode(rec)
    piece = piecewise_fft_bode(rec, 120)
    t_single = analytic_bode_data(plant_tf(params), params.loop_delay, single.omega)
    t_piece = analytic_bode_data(plant_tf(params), params.loop_delay, piece.omega)
    dev_single = np.mean(np.abs(single.mag_db - t_single.mag_db))
    dev_piece = np.mean(np.abs(piece.mag_db - t_piece.mag_db))
    assert dev_single > dev_piece


def test_margins_integrator():
    # 1/s: 0 dB at exactly 1 rad/s with phase -90 -> margin 90 deg
    w = np.logspace(-2, 2, 400)
    bode = analytic_bode_data(TransferFunction((1.0,), (1.0, 0.0)), 0.0, w)
    report = measure_margins(bode)
    assert report.crossover_found
    assert report.omega_gc == pytest.approx(1.0, rel=1e-3)
    assert report.phi_pm == pytest.approx(90.0, abs=0.1)


def test_margins_flat_zero_db():
    bode = BodeData(np.logspace(0, 2, 50), np.zeros(50), np.full(50, -120.0), "analytic")
    report = measure_margins(bode)
    assert not report.crossover_found


def test_margins_no_crossing():
    bode = BodeData(np.logspace(0, 2, 50), np.full(50, -10.0), np.zeros(50), "analytic")
    assert not measure_margins(bode).crossover_found


def test_shifted_crossover_integrator():
    w = np.logspace(-2, 3, 2000)
    bode = analytic_bode_data(TransferFunction((1.0,), (1.0, 0.0)), 0.0, w)
    assert shifted_crossover(bode, 0.0) == pytest.approx(measure_margins(bode).omega_gc, rel=1e-9)
    assert shifted_crossover(bode, 20.0) == pytest.approx(10.0, rel=1e-3)


def test_shifted_crossover_monotone():
    w = np.logspace(-2, 3, 500)
    bode = analytic_bode_data(TransferFunction((1.0,), (1.0, 0.0)), 0.0, w)
    shifts = np.linspace(-10, 40, 20)
    xs = [shifted_crossover(bode, s) for s in shifts]
    assert all(b >= a for a, b in zip(xs, xs[1:]))


def test_shifted_crossover_out_of_band():
    w = np.logspace(-1, 1, 50)
    bode = analytic_bode_data(TransferFunction((1.0,), (1.0, 0.0)), 0.0, w)
    with pytest.raises(EstimationError):
        shifted_crossover(bode, 200.0)


def test_margin_against_root_finding_oracle():
    # measure_margins(analytic_bode(L)) vs direct |L(jw)| = 1 root find
    from scipy.optimize import brentq

    params = PlantParams(loop_delay=0.002)
    k_ss = 0.0468
    tf = k_ss * plant_tf(params)
    w = np.logspace(0, np.log10(400.0), 4000)
    bode = analytic_bode_data(tf, params.loop_delay, w)
    report = measure_margins(bode)

    def mag(wq):
        return abs(tf.response(wq)[0]) - 1.0

    w_exact = brentq(mag, 50.0, 400.0)
    h = tf.response(w_exact)[0]
    phase_exact = np.degrees(np.angle(h))
    # second-order rational part stays within (-180, 0]; delay added exactly
    if phase_exact > 0:
        phase_exact -= 360.0
    pm_exact = 180.0 + phase_exact - np.degrees(w_exact * params.loop_delay)
    assert report.omega_gc == pytest.approx(w_exact, rel=0.005)
    assert report.phi_pm == pytest.approx(pm_exact, abs=0.2)


def test_display_window_clip_preserves_data():
    bode = BodeData(np.array([1.0, 2.0, 4.0]), np.zeros(3), np.array([-300.0, -100.0, 30.0]), "analytic")
    out = display_phase_window(bode, -270.0, 90.0, mode="clip")
    np.testing.assert_array_equal(out.phase_deg, bode.phase_deg)
    assert out.meta["phase_window"] == [-270.0, 90.0]
    assert bode.meta.get("phase_window") is None  # input untouched


def test_display_window_wrap():
    bode = BodeData(np.array([1.0, 2.0]), np.zeros(2), np.array([-300.0, -10.0]), "analytic")
    out = display_phase_window(bode, -270.0, 90.0, mode="wrap")
    assert out.phase_deg[0] == pytest.approx(60.0)
    assert out.phase_deg[1] == pytest.approx(-10.0)
    np.testing.assert_array_equal(bode.phase_deg, [-300.0, -10.0])


def test_default_run_renders_inside_paper_window():
    params = PlantParams()
    rec = run_open_loop(params, DEFAULT_CHIRP, NoiseConfig(sigma_f=0.0))
    bode = piecewise_fft_bode(rec, 120)
    assert bode.phase_deg.min() >= -270.0
    assert bode.phase_deg.max() <= 90.0


def test_bode_csv_roundtrip():
    rec = synth_record(TransferFunction((30.0,), (1.0, 30.0)))
    bode = piecewise_fft_bode(rec, 120)
    back = BodeData.from_csv(bode.to_csv())
    np.testing.assert_allclose(back.omega, bode.omega, rtol=1e-8)
    np.testing.assert_allclose(back.mag_db, bode.mag_db, rtol=1e-6, atol=1e-9)
    np.testing.assert_allclose(back.phase_deg, bode.phase_deg, rtol=1e-6, atol=1e-9)

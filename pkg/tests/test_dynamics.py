import math

import numpy as np
import pytest

from levkit.quantities import K_B, DomainError
from levkit.sensor import Sphere, TrapState, thermal_force_asd
from levkit.dynamics import (
    ImpulseEvent,
    SimulationConfig,
    ThresholdEstimateError,
    TimeSeries,
    child_seed,
    estimate_psd,
    fit_lorentzian,
    impulse_response_template,
    matched_filter_outputs,
    matched_filter_threshold,
    simulate,
)

SPHERE = Sphere(radius=5e-6)
TRAP = TrapState(resonant_frequency=100.0, damping_rate=20.0, temperature=300.0)
CONFIG = SimulationConfig(time_step=2e-4, duration=60.0, rng_seed=12345,
                          bath_temperature=300.0)

# Small sphere / stiff loop used for the impulse-detection tests: the
# matched-filter threshold needs >= 1e4 correlation times of noise.
IMP_SPHERE = Sphere(radius=0.15e-6)
IMP_TRAP = TrapState(resonant_frequency=1000.0, damping_rate=5.0, temperature=300.0)


def imp_config(g_fb, seed=777):
    return SimulationConfig(time_step=2e-5, duration=20.0, rng_seed=seed,
                            bath_temperature=300.0, feedback_gain=g_fb)


def test_simulation_deterministic():
    a = simulate(SPHERE, TRAP, CONFIG)
    b = simulate(SPHERE, TRAP, CONFIG)
    assert np.array_equal(a.samples, b.samples)


def test_different_seed_differs():
    other = SimulationConfig(time_step=2e-4, duration=60.0, rng_seed=54321,
                             bath_temperature=300.0)
    a = simulate(SPHERE, TRAP, CONFIG)
    b = simulate(SPHERE, TRAP, other)
    assert not np.array_equal(a.samples, b.samples)


def test_child_seed_rule_is_stable_and_distinct():
    s0 = child_seed(1234, 0)
    s1 = child_seed(1234, 1)
    assert s0.spawn_key != s1.spawn_key
    assert np.random.default_rng(s0).random() != np.random.default_rng(s1).random()
    # same inputs -> same stream
    assert (np.random.default_rng(child_seed(1234, 0)).random()
            == np.random.default_rng(s0).random())


def test_time_step_guard():
    bad = SimulationConfig(time_step=1e-3, duration=60.0, rng_seed=1,
                           bath_temperature=300.0)
    with pytest.raises(DomainError):
        simulate(SPHERE, TRAP, bad)


def test_short_duration_guard_and_override():
    short = SimulationConfig(time_step=2e-4, duration=1.0, rng_seed=1,
                             bath_temperature=300.0)
    with pytest.raises(DomainError):
        simulate(SPHERE, TRAP, short)
    ok = SimulationConfig(time_step=2e-4, duration=1.0, rng_seed=1,
                          bath_temperature=300.0, allow_short_run=True)
    simulate(SPHERE, TRAP, ok)


def test_equipartition():
    series = simulate(SPHERE, TRAP, CONFIG)
    skip = int(5.0 / (TRAP.damping_rate * series.sample_interval))
    var = float(np.var(series.samples[skip:]))
    expected = K_B * 300.0 / (SPHERE.mass * TRAP.omega0**2)
    assert var == pytest.approx(expected, rel=0.03)


def test_cold_damping_reduces_variance():
    cooled = SimulationConfig(time_step=2e-4, duration=60.0, rng_seed=12345,
                              bath_temperature=300.0, feedback_gain=180.0)
    hot = simulate(SPHERE, TRAP, CONFIG)
    cold = simulate(SPHERE, TRAP, cooled)
    ratio = np.var(cold.samples[5000:]) / np.var(hot.samples[5000:])
    # T_eff drops by gamma/(gamma+g_fb) = 0.1
    assert ratio == pytest.approx(0.1, rel=0.15)


def test_psd_parseval():
    series = simulate(SPHERE, TRAP, CONFIG)
    est = estimate_psd(series, segment_length=8192)
    var = float(np.var(series.samples))
    assert est.integrated_power() == pytest.approx(var, rel=0.05)


def test_lorentzian_fit_recovers_parameters():
    series = simulate(SPHERE, TRAP, CONFIG)
    est = estimate_psd(series, segment_length=8192)
    fit = fit_lorentzian(est, SPHERE.mass, f_range=(20.0, 400.0))
    assert fit.f0 == pytest.approx(100.0, rel=0.02)
    assert fit.gamma == pytest.approx(20.0, rel=0.10)
    assert fit.force_asd == pytest.approx(
        thermal_force_asd(SPHERE, TRAP).value, rel=0.10
    )


def test_impulse_response_template_shape():
    tpl = impulse_response_template(IMP_SPHERE, IMP_TRAP, imp_config(995.0))
    gamma_eff = 1000.0
    assert tpl.size == int(round(10.0 / gamma_eff / 2e-5))
    assert np.max(np.abs(tpl)) > 0.0


def test_matched_filter_calibration():
    """A clean injected impulse q must read back as a peak of q."""
    cfg = imp_config(995.0)
    quiet = SimulationConfig(time_step=cfg.time_step, duration=0.1, rng_seed=1,
                             bath_temperature=0.0, feedback_gain=995.0,
                             allow_short_run=True)
    q = 3e-19
    kick = ImpulseEvent(time=0.05, momentum_transfer=q, direction=1)
    series = simulate(IMP_SPHERE, IMP_TRAP, quiet, injected=[kick])
    tpl = impulse_response_template(IMP_SPHERE, IMP_TRAP, quiet)
    out = matched_filter_outputs(series, tpl)
    assert np.max(out) == pytest.approx(q, rel=1e-6)


def test_threshold_scales_with_cold_damping():
    """Doubling gamma_eff leaves the thermal force drive fixed but halves the
    filter correlation time, so the impulse threshold improves by ~sqrt(2)."""
    q1 = matched_filter_threshold(IMP_SPHERE, IMP_TRAP, imp_config(995.0), 1.0)
    q2 = matched_filter_threshold(IMP_SPHERE, IMP_TRAP, imp_config(1995.0), 1.0)
    assert q1.value / q2.value == pytest.approx(math.sqrt(2.0), rel=0.10)


def test_detection_efficiency_above_threshold():
    cfg = imp_config(995.0)
    q_min = matched_filter_threshold(IMP_SPHERE, IMP_TRAP, cfg, 1.0).value
    tpl = impulse_response_template(IMP_SPHERE, IMP_TRAP, cfg)
    events = [ImpulseEvent(time=t, momentum_transfer=2.0 * q_min, direction=1)
              for t in np.arange(1.0, 19.0, 1.0)]
    noisy = SimulationConfig(time_step=cfg.time_step, duration=cfg.duration,
                             rng_seed=4242, bath_temperature=300.0,
                             feedback_gain=995.0)
    series = simulate(IMP_SPHERE, IMP_TRAP, noisy, injected=events)
    out = matched_filter_outputs(series, tpl)
    hits = 0
    for ev in events:
        idx = int(round(ev.time / series.sample_interval))
        if np.max(np.abs(out[idx - 2: idx + 3])) > q_min:
            hits += 1
    assert hits / len(events) > 0.95


def test_threshold_requires_convergence():
    short = SimulationConfig(time_step=2e-5, duration=1.0, rng_seed=1,
                             bath_temperature=300.0, feedback_gain=995.0)
    with pytest.raises(ThresholdEstimateError):
        matched_filter_threshold(IMP_SPHERE, IMP_TRAP, short, 1.0)


def test_impulse_outside_span_rejected():
    kick = ImpulseEvent(time=1e4, momentum_transfer=1e-19, direction=1)
    with pytest.raises(DomainError):
        simulate(SPHERE, TRAP, CONFIG, injected=[kick])


def test_timeseries_csv_round_trip(tmp_path):
    series = TimeSeries(sample_interval=0.5, samples=np.array([1.0, -2.25, 3.5e-7]))
    path = tmp_path / "ts.csv"
    series.to_csv(path, provenance={"run": "demo"})
    lines = path.read_text().splitlines()
    assert lines[0] == "# run = demo"
    data = [line.split(",") for line in lines if not line.startswith("#")]
    assert [float(row[1]) for row in data] == [1.0, -2.25, 3.5e-7]

"""Time-domain Langevin model of the trapped sphere.

One-dimensional center-of-mass motion with ideal cold damping:

    m x'' = -m w0^2 x - m (gamma + g_fb) x' + F_th(t)

where F_th is white Gaussian thermal forcing tied to the physical damping
gamma only (the feedback loop is noiseless).  The integrator is a BAOAB
splitting: half kick, half drift, exact Ornstein-Uhlenbeck velocity update,
half drift, half kick.  Because the system is linear the whole trajectory
is evaluated with one state-space filter pass, which is fast and
bit-reproducible for a given (seed, config).

PSD convention: ``estimate_psd`` returns a one-sided density, so a
thermally limited oscillator shows a Lorentzian with plateau force PSD
4 kB T m gamma, i.e. twice the square of ``sensor.thermal_force_asd``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy import optimize, signal

from .quantities import Dimension, DomainError, K_B, Quantity
from .sensor import Sphere, TrapState


class IntegrationError(RuntimeError):
    """Integrator produced an unstable or runaway trajectory."""


class ThresholdEstimateError(RuntimeError):
    """Matched-filter noise distribution is not converged."""


def child_seed(seed: int, task_index: int) -> np.random.SeedSequence:
    """Fixed seed-splitting rule for parallel parameter sweeps."""
    return np.random.SeedSequence(entropy=seed, spawn_key=(task_index,))


@dataclass(frozen=True)
class SimulationConfig:
    time_step: float                      # s
    duration: float                      # s
    rng_seed: int
    bath_temperature: float               # K
    feedback_gain: float = 0.0            # cold-damping rate g_fb, 1/s
    record_decimation: int = 1
    allow_short_run: bool = False

    def __post_init__(self):
        if self.time_step <= 0.0 or self.duration <= 0.0:
            raise DomainError("time step and duration must be positive")
        if self.bath_temperature < 0.0:
            raise DomainError("bath temperature must be >= 0")
        if self.feedback_gain < 0.0:
            raise DomainError("feedback gain must be >= 0")
        if self.record_decimation < 1 or self.record_decimation != int(self.record_decimation):
            raise DomainError("record decimation must be an integer >= 1")


@dataclass(frozen=True)
class TimeSeries:
    sample_interval: float
    samples: np.ndarray
    start_time: float = 0.0

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise DomainError("time series contains non-finite samples")
        object.__setattr__(self, "samples", arr)

    @property
    def times(self) -> np.ndarray:
        return self.start_time + self.sample_interval * np.arange(self.samples.size)

    @property
    def duration(self) -> float:
        return self.sample_interval * self.samples.size

    def to_csv(self, path, provenance: Optional[dict] = None):
        """Two-column CSV (time_s, displacement_m) with '#' provenance header."""
        with open(path, "w", encoding="utf-8") as fh:
            for key, val in (provenance or {}).items():
                fh.write(f"# {key} = {val}\n")
            fh.write("# columns = time_s,displacement_m\n")
            for t, x in zip(self.times, self.samples):
                fh.write(f"{float(t)!r},{float(x)!r}\n")


@dataclass(frozen=True)
class ImpulseEvent:
    time: float                 # s
    momentum_transfer: float    # q, kg m/s, > 0
    direction: int = 1          # +1 / -1

    def __post_init__(self):
        if self.momentum_transfer <= 0.0:
            raise DomainError("impulse momentum transfer must be positive")
        if self.direction not in (-1, 1):
            raise DomainError("impulse direction must be +1 or -1")


def _baoab_maps(omega0: float, gamma_total: float, dt: float):
    """One-step state map M, noise injection column, impulse injection column.

    State is (x, v).  The noise column propagates a unit velocity kick applied
    at the O substep through the remaining half drift and half kick; the
    impulse column propagates a kick applied at the start of the step.
    """
    h = dt
    kick = np.array([[1.0, 0.0], [-(omega0**2) * h / 2.0, 1.0]])
    drift = np.array([[1.0, h / 2.0], [0.0, 1.0]])
    decay = np.array([[1.0, 0.0], [0.0, math.exp(-gamma_total * h)]])
    m_step = kick @ drift @ decay @ drift @ kick
    j_noise = kick @ drift @ np.array([0.0, 1.0])
    j_impulse = m_step @ np.array([0.0, 1.0])
    return m_step, j_noise, j_impulse


def simulate(
    sphere: Sphere,
    trap: TrapState,
    config: SimulationConfig,
    injected: Sequence[ImpulseEvent] = (),
) -> TimeSeries:
    """Integrate the damped, thermally driven oscillator from x = v = 0.

    Deterministic for a given (rng_seed, config).  Injected impulses add
    q/m to the velocity at the nearest time step.
    """
    f0 = trap.resonant_frequency
    if config.time_step >= 1.0 / (20.0 * f0):
        raise DomainError(
            f"time step {config.time_step} s too coarse; need < 1/(20 f0) = {1.0/(20*f0)} s"
        )
    gamma_total = trap.damping_rate + config.feedback_gain
    if config.duration < 100.0 / gamma_total and not config.allow_short_run:
        raise DomainError(
            "duration shorter than 100 relaxation times; set allow_short_run to override"
        )

    dt = config.time_step
    n = int(round(config.duration / dt))
    m_step, j_noise, j_impulse = _baoab_maps(trap.omega0, gamma_total, dt)
    if max(abs(np.linalg.eigvals(m_step))) > 1.0 + 1e-12:
        raise IntegrationError("unstable step: one-step map has spectral radius > 1")

    mass = sphere.mass
    out_row = np.array([[1.0, 0.0]])

    x = np.zeros(n)
    temp = config.bath_temperature
    if temp > 0.0:
        rng = np.random.default_rng(np.random.SeedSequence(config.rng_seed))
        # Exact OU kick: stationary velocity variance kB T_eff / m with
        # T_eff = T gamma / (gamma + g_fb); fluctuations enter via gamma only.
        var = (
            K_B * temp * trap.damping_rate / (mass * gamma_total)
            * (1.0 - math.exp(-2.0 * gamma_total * dt))
        )
        xi = rng.standard_normal(n) * math.sqrt(var)
        num, den = signal.ss2tf(m_step, j_noise[:, None], out_row, [[0.0]])
        x = signal.lfilter(num[0], den, xi)

    if injected:
        kicks = np.zeros(n)
        for ev in injected:
            idx = int(round((ev.time - 0.0) / dt))
            if not (0 <= idx < n):
                raise DomainError(f"impulse at t = {ev.time} s outside the simulated span")
            kicks[idx] += ev.direction * ev.momentum_transfer / mass
        num, den = signal.ss2tf(m_step, j_impulse[:, None], out_row, [[0.0]])
        x = x + signal.lfilter(num[0], den, kicks)

    if temp > 0.0 and not injected:
        _check_energy_growth(x, gamma_total, dt)

    k = config.record_decimation
    return TimeSeries(sample_interval=dt * k, samples=x[::k])


def _check_energy_growth(x: np.ndarray, gamma_total: float, dt: float):
    """Flag runaway trajectories: late-time RMS > 10x post-transient RMS."""
    relax = int(math.ceil(1.0 / (gamma_total * dt)))
    if x.size < 10 * relax:
        return
    early = x[2 * relax: 5 * relax]
    late = x[-3 * relax:]
    rms_early = float(np.sqrt(np.mean(early**2)))
    rms_late = float(np.sqrt(np.mean(late**2)))
    if rms_early > 0.0 and rms_late > 10.0 * rms_early:
        raise IntegrationError(
            f"energy growth detected: late RMS {rms_late:.3e} m vs early {rms_early:.3e} m"
        )


@dataclass(frozen=True)
class PsdEstimate:
    frequency: np.ndarray     # Hz
    psd: np.ndarray           # one-sided, m^2/Hz for displacement input
    segment_length: int
    n_segments: int

    @property
    def df(self) -> float:
        return float(self.frequency[1] - self.frequency[0])

    def integrated_power(self) -> float:
        return float(np.sum(self.psd) * self.df)


def estimate_psd(series: TimeSeries, segment_length: int, overlap: float = 0.5) -> PsdEstimate:
    """Averaged-periodogram (Welch) one-sided PSD with a Hann window.

    Scaling uses the mean-square window correction, so sum(PSD) * df equals
    the variance of the window-corrected series.
    """
    x = series.samples
    m = int(segment_length)
    if m < 8:
        raise DomainError("segment length too short")
    if x.size < m:
        raise DomainError(f"series of {x.size} samples shorter than one segment ({m})")
    fs = 1.0 / series.sample_interval
    hop = max(1, int(round(m * (1.0 - overlap))))
    window = np.hanning(m)
    u = float(np.mean(window**2))

    n_segments = 0
    acc = np.zeros(m // 2 + 1)
    for start in range(0, x.size - m + 1, hop):
        seg = x[start: start + m] * window
        spec = np.fft.rfft(seg)
        acc += np.abs(spec) ** 2
        n_segments += 1
    psd = acc / (n_segments * fs * m * u)
    psd[1:] *= 2.0
    if m % 2 == 0:
        psd[-1] /= 2.0
    freqs = np.fft.rfftfreq(m, d=series.sample_interval)
    return PsdEstimate(frequency=freqs, psd=psd, segment_length=m, n_segments=n_segments)


@dataclass(frozen=True)
class LorentzianFit:
    f0: float            # Hz
    gamma: float         # effective linewidth, 1/s
    force_psd: float     # one-sided white force PSD driving the oscillator, N^2/Hz

    @property
    def force_asd(self) -> float:
        """Symmetric-convention force ASD, comparable to sensor.thermal_force_asd."""
        return math.sqrt(self.force_psd / 2.0)


def fit_lorentzian(psd_est: PsdEstimate, mass: float,
                   f_range: Optional[tuple] = None) -> LorentzianFit:
    """Fit S_x(f) = S_F / (m^2 ((w0^2-w^2)^2 + w^2 g^2)) to a displacement PSD."""
    f = psd_est.frequency
    s = psd_est.psd
    keep = f > 0
    if f_range is not None:
        keep &= (f >= f_range[0]) & (f <= f_range[1])
    f = f[keep]
    s = s[keep]
    if f.size < 16:
        raise DomainError("too few PSD points in the fit range")

    f0_guess = float(f[np.argmax(s)])
    # Half-power width as the linewidth seed.
    peak = float(np.max(s))
    above = f[s > peak / 2.0]
    gamma_guess = max(2.0 * math.pi * (above[-1] - above[0]), 2.0 * math.pi * psd_est.df)
    sf_guess = peak * mass**2 * (2.0 * math.pi * f0_guess) ** 2 * gamma_guess**2

    def log_model(freq, log_sf, f_res, gam):
        w = 2.0 * math.pi * freq
        w0 = 2.0 * math.pi * f_res
        return log_sf - np.log((w0**2 - w**2) ** 2 + (w * gam) ** 2) - 2.0 * math.log(mass)

    popt, _ = optimize.curve_fit(
        log_model, f, np.log(s),
        p0=[math.log(sf_guess), f0_guess, gamma_guess],
        maxfev=20000,
    )
    return LorentzianFit(f0=float(popt[1]), gamma=abs(float(popt[2])),
                         force_psd=float(math.exp(popt[0])))


def impulse_response_template(
    sphere: Sphere, trap: TrapState, config: SimulationConfig
) -> np.ndarray:
    """Displacement response to a unit (1 kg m/s) impulse, truncated at 10/gamma_eff.

    Generated with the production integrator at zero temperature so the
    template matches the discrete closed-loop dynamics exactly.
    """
    gamma_total = trap.damping_rate + config.feedback_gain
    length = 10.0 / gamma_total
    tpl_config = replace(
        config,
        duration=length,
        bath_temperature=0.0,
        record_decimation=1,
        allow_short_run=True,
    )
    kick = ImpulseEvent(time=0.0, momentum_transfer=1.0, direction=1)
    return simulate(sphere, trap, tpl_config, injected=[kick]).samples


def matched_filter_outputs(series: TimeSeries, template: np.ndarray) -> np.ndarray:
    """Correlate a trajectory against the impulse template.

    Output is calibrated in momentum units: a clean impulse q produces a
    peak of q at the sample where it occurred.
    """
    norm = float(np.dot(template, template))
    if norm <= 0.0:
        raise DomainError("degenerate matched-filter template")
    full = signal.fftconvolve(series.samples, template[::-1], mode="full")
    return full[template.size - 1:] / norm


def matched_filter_threshold(
    sphere: Sphere,
    trap: TrapState,
    config: SimulationConfig,
    false_alarm_rate: float,
) -> Quantity:
    """Smallest impulse whose filter response clears the false-alarm threshold.

    The threshold is the empirical (1 - FAR * dt) quantile of |filter output|
    on a noise-only simulation; no Gaussian assumption.  Requires at least
    1e4 filter correlation times (~1/gamma_eff) of simulated noise.
    """
    if false_alarm_rate <= 0.0:
        raise DomainError("false alarm rate must be positive")
    gamma_total = trap.damping_rate + config.feedback_gain
    n_correlation_times = config.duration * gamma_total
    if n_correlation_times < 1.0e4:
        raise ThresholdEstimateError(
            f"noise distribution not converged: {n_correlation_times:.0f} filter "
            "correlation times simulated, need >= 1e4"
        )

    noise_cfg = replace(config, record_decimation=1)
    noise_series = simulate(sphere, trap, noise_cfg, injected=())
    template = impulse_response_template(sphere, trap, config)
    outputs = matched_filter_outputs(noise_series, template)
    # Drop trailing lags where the template overruns the end of the series.
    if outputs.size <= template.size:
        raise ThresholdEstimateError("series shorter than the filter template")
    outputs = outputs[: -template.size]

    p_exceed = false_alarm_rate * noise_series.sample_interval
    if p_exceed >= 1.0:
        raise DomainError("false alarm rate above one per sample")
    tail_count = outputs.size * p_exceed
    if 0.0 < p_exceed and tail_count < 10.0:
        raise ThresholdEstimateError(
            f"only {tail_count:.1f} expected tail samples at this false-alarm rate; "
            "simulate longer or relax the rate"
        )
    threshold = float(np.quantile(np.abs(outputs), 1.0 - p_exceed))
    return Quantity(threshold, Dimension.MOMENTUM)

"""Monte-Carlo dephasing: Gaussian colored noise and trajectory averaging.

Serves as an oracle for :mod:`ddspec.coherence` that shares no code with
the filter-function route: noise records are synthesized in the frequency
domain, the toggling-frame phase is integrated in the time domain, and the
visibility is the trajectory mean of ``cos(phi)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import InvalidArgumentError
from .sequences import PulseSequence
from .spectra import NoiseSpectrum

__all__ = [
    "TimeSeries",
    "McEstimate",
    "generate_noise",
    "phase_weights",
    "accumulate_phase",
    "mc_visibility",
    "default_grid",
    "infrared_cutoff",
]


@dataclass(frozen=True, eq=False)
class TimeSeries:
    dt: float
    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, float)
        if s.ndim != 1 or len(s) < 2:
            raise InvalidArgumentError("a time series needs at least two samples")
        if not self.dt > 0:
            raise InvalidArgumentError("dt must be positive")
        object.__setattr__(self, "samples", s)

    def __len__(self):
        return len(self.samples)

    @property
    def duration(self) -> float:
        return (len(self.samples) - 1) * self.dt


@dataclass(frozen=True)
class McEstimate:
    visibility_mean: float
    std_error: float
    n_trajectories: int
    seed: int


def _is_pow2(n):
    return n >= 1 and n & (n - 1) == 0


def _amplitude_scale(spec, dt, n):
    """Per-bin standard deviation of the rfft coefficients, DC set to zero."""
    omega = 2 * np.pi * np.fft.rfftfreq(n, dt)
    scale = np.zeros_like(omega)
    scale[1:] = np.sqrt(np.asarray(spec(omega[1:]), float) / (n * dt)) * n
    return scale


def _synthesize(scale, n, rng):
    m = len(scale)
    z = rng.standard_normal((2, m))
    coef = (z[0] + 1j * z[1]) * (scale / math.sqrt(2))
    # the Nyquist bin of a real signal is real; keep its full variance
    coef[-1] = z[0, -1] * scale[-1]
    return coef


def generate_noise(spec: NoiseSpectrum, dt: float, n: int, seed) -> TimeSeries:
    """Stationary Gaussian noise record with two-sided spectrum ``spec``.

    Each positive frequency bin ``omega_k = 2 pi k / (n dt)`` receives an
    independent complex Gaussian amplitude with variance
    ``S(omega_k) / (n dt)`` (times ``n^2`` for the unnormalized inverse FFT).
    The DC bin is zero, so the lowest represented frequency
    ``2 pi / (n dt)`` acts as an infrared cutoff.
    """
    if not _is_pow2(n) or n < 64:
        raise InvalidArgumentError(f"n must be a power of two >= 64, got {n}")
    if not dt > 0:
        raise InvalidArgumentError("dt must be positive")
    rng = np.random.default_rng(seed)
    scale = _amplitude_scale(spec, dt, n)
    return TimeSeries(dt, np.fft.irfft(_synthesize(scale, n, rng), n))


def phase_weights(seq: PulseSequence, dt: float, n_samples: int) -> np.ndarray:
    """Weights ``w`` with ``phi = w @ beta`` for samples ``beta_m = beta(m dt)``.

    ``phi`` is the integral of the toggling sign times the piecewise-linear
    interpolant of the samples, split exactly at the pulse times and at ``T``.
    This is the trapezoid rule with the segments cut at the sign changes.
    """
    T = seq.total_time
    m_end = int(math.ceil(T / dt - 1e-9))
    if m_end >= n_samples or (n_samples - 1) * dt < T * (1 - 1e-12):
        raise InvalidArgumentError("noise record is shorter than the pulse sequence")
    w = np.zeros(n_samples)
    cuts = np.concatenate(([0.0], seq.pulse_times, [T]))
    for seg, (a, b) in enumerate(zip(cuts[:-1], cuts[1:])):
        sign = -1.0 if seg % 2 else 1.0
        # sample-interval pieces of [a, b]
        grid = np.arange(math.floor(a / dt) + 1, math.ceil(b / dt - 1e-12)) * dt
        pts = np.concatenate(([a], grid[(grid > a) & (grid < b)], [b]))
        lo, hi = pts[:-1], pts[1:]
        # linear interpolation weights of beta on each piece: integral of the
        # interpolant over [lo, hi] inside sample interval [k dt, (k+1) dt]
        k = np.minimum(np.floor(0.5 * (lo + hi) / dt).astype(int), n_samples - 2)
        x0 = lo / dt - k
        x1 = hi / dt - k
        # int (1 - x) dx and int x dx from x0 to x1, times dt
        w_left = (x1 - x0 - 0.5 * (x1**2 - x0**2)) * dt
        w_right = 0.5 * (x1**2 - x0**2) * dt
        np.add.at(w, k, sign * w_left)
        np.add.at(w, k + 1, sign * w_right)
    return w


def accumulate_phase(noise: TimeSeries, seq: PulseSequence) -> float:
    """Toggling-frame phase ``int_0^T beta(t) s(t) dt`` of one noise record."""
    if noise.duration < seq.total_time * (1 - 1e-12):
        raise InvalidArgumentError(
            f"noise record of {noise.duration:g} s is shorter than T={seq.total_time:g} s")
    return float(phase_weights(seq, noise.dt, len(noise)) @ noise.samples)


def default_grid(T: float, samples_per_T: int = 256, ir_factor: float = 20.0):
    """Return ``(dt, n)`` for simulating a sequence of length ``T``.

    ``n`` is the smallest power of two whose lowest frequency
    ``2 pi / (n dt)`` lies at or below ``1 / (ir_factor T)``.
    """
    dt = T / samples_per_T
    need = 2 * np.pi * ir_factor * T / dt
    n = 1 << max(6, math.ceil(math.log2(need)))
    return dt, n


def infrared_cutoff(dt: float, n: int, alpha: float | None = None) -> float:
    """Continuous lower frequency limit equivalent to a synthesized record.

    The record carries the discrete frequencies ``k d omega``, k >= 1. For a
    spectrum that is flat near zero the matching continuous cutoff sits half
    a bin below the first one. For ``S ~ omega^-alpha`` (0 < alpha < 1)
    against a filter that is flat at zero, the cutoff ``c d omega`` with
    ``c^(1-alpha) / (1-alpha) = -zeta(alpha)`` makes the integral reproduce
    the discrete sum up to terms that vanish with the bin width.
    """
    d_omega = 2 * np.pi / (n * dt)
    if alpha is None or alpha <= 0:
        return 0.5 * d_omega
    if alpha >= 1:
        raise InvalidArgumentError("power-law infrared matching needs alpha < 1")
    c = (-special.zeta(alpha) * (1 - alpha)) ** (1 / (1 - alpha))
    return c * d_omega


def mc_visibility(spec: NoiseSpectrum | None, seq: PulseSequence, n_traj: int, seed: int,
                  dt: float | None = None, n: int | None = None,
                  batch: int = 256) -> McEstimate:
    """Trajectory average of ``cos(phi)`` over independent noise records.

    Trajectory ``i`` draws from its own generator seeded by the ``i``-th
    child of ``SeedSequence(seed)``, so the estimate depends only on
    ``(seed, n_traj)`` and not on batching. ``spec=None`` means no noise.
    """
    if n_traj < 100:
        raise InvalidArgumentError("need at least 100 trajectories")
    if spec is None:
        return McEstimate(1.0, 0.0, n_traj, seed)
    if dt is None or n is None:
        dt, n = default_grid(seq.total_time)
    if not _is_pow2(n) or n < 64:
        raise InvalidArgumentError(f"n must be a power of two >= 64, got {n}")
    scale = _amplitude_scale(spec, dt, n)
    w = phase_weights(seq, dt, n)
    used = np.flatnonzero(w).max() + 1
    w = w[:used]
    children = np.random.SeedSequence(seed).spawn(n_traj)
    values = np.empty(n_traj)
    for start in range(0, n_traj, batch):
        idx = range(start, min(start + batch, n_traj))
        coef = np.stack([_synthesize(scale, n, np.random.default_rng(children[i])) for i in idx])
        beta = np.fft.irfft(coef, n, axis=1)[:, :used]
        values[start:start + len(idx)] = np.cos(beta @ w)
    mean = float(np.mean(values))  # numpy sums pairwise
    err = float(np.std(values, ddof=1) / math.sqrt(n_traj))
    return McEstimate(mean, err, n_traj, seed)

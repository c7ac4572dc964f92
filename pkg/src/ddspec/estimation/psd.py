"""Welch power spectral density and the power-law plus white-noise fit."""
from __future__ import annotations

import numpy as np
from scipy import signal

from ..errors import InvalidArgumentError
from ..stochastic import TimeSeries
from .lm import FitResult, lm_least_squares

__all__ = ["welch_psd", "rebin_log", "psd_model", "fit_psd_powerlaw_white"]

_WINDOWS = {"hann": "hann", "rect": "boxcar"}


def welch_psd(ts: TimeSeries, segment_len: int, overlap_fraction: float = 0.5,
              window: str = "hann"):
    """Averaged periodogram on ``omega >= 0`` in the package's spectrum convention.

    The estimate targets the same ``S(omega)`` that :func:`generate_noise`
    takes, so ``int_0^{pi/dt} S d omega = pi * variance``. Returns
    ``(omega, psd)`` with ``omega`` in rad/s.
    """
    n = len(ts.samples)
    segment_len = int(segment_len)
    if segment_len > n:
        raise InvalidArgumentError(f"segment of {segment_len} samples exceeds the series length {n}")
    if segment_len < 2 or segment_len & (segment_len - 1):
        raise InvalidArgumentError("segment length must be a power of two")
    if not 0 <= overlap_fraction < 1:
        raise InvalidArgumentError("overlap fraction must lie in [0, 1)")
    try:
        win = _WINDOWS[window.lower()]
    except KeyError:
        raise InvalidArgumentError(f"unknown window {window!r}; use 'hann' or 'rect'") from None
    f, p = signal.welch(ts.samples, fs=1.0 / ts.dt, window=win, nperseg=segment_len,
                        noverlap=int(round(overlap_fraction * segment_len)),
                        detrend="constant", scaling="density", return_onesided=True)
    # scipy's one-sided density in Hz has int p df = variance and doubles all
    # bins except DC and Nyquist; undo the doubling
    s = p / 2
    s[0] = p[0]
    if segment_len % 2 == 0:
        s[-1] = p[-1]
    return 2 * np.pi * f, s


def _log_bins(omega, psd, n_bins, omega_min, omega_max):
    omega = np.asarray(omega, float)
    psd = np.asarray(psd, float)
    keep = omega > 0
    if omega_min is not None:
        keep &= omega >= omega_min
    if omega_max is not None:
        keep &= omega <= omega_max
    omega, psd = omega[keep], psd[keep]
    if len(omega) == 0:
        raise InvalidArgumentError("no positive frequencies to rebin")
    edges = np.geomspace(omega[0], omega[-1] * (1 + 1e-12), n_bins + 1)
    idx = np.clip(np.searchsorted(edges, omega, side="right") - 1, 0, n_bins - 1)
    # renumber so that only occupied bins remain
    _, idx = np.unique(idx, return_inverse=True)
    return omega, psd, idx


def _bin_mean(idx, values):
    return np.bincount(idx, weights=values) / np.bincount(idx)


def rebin_log(omega, psd, n_bins=60, omega_min=None, omega_max=None):
    """Average a spectrum in logarithmically spaced bins.

    Returns bin-centre frequencies (geometric mean of members), mean values
    and member counts; empty bins are dropped and DC is excluded.
    """
    omega, psd, idx = _log_bins(omega, psd, n_bins, omega_min, omega_max)
    return np.exp(_bin_mean(idx, np.log(omega))), _bin_mean(idx, psd), np.bincount(idx)


def psd_model(omega, S_PLN, alpha_tilde, S_WN):
    return S_PLN * np.power(omega, -alpha_tilde) + S_WN


def fit_psd_powerlaw_white(omega, psd, n_bins=60, omega_min=None, omega_max=None) -> FitResult:
    """Fit ``S_PLN / omega^alpha_tilde + S_WN`` on log-binned data in log space.

    The model is bin-averaged exactly like the data. Each bin's log-residual is weighted by the square root of its member
    count. Internally the amplitudes are rescaled to order one, which keeps
    the solver well conditioned for PSDs of any magnitude.
    """
    psd = np.asarray(psd, float)
    omega = np.asarray(omega, float)
    pos = omega > 0
    if np.any(psd[pos] <= 0):
        raise InvalidArgumentError("PSD values must be positive for a log fit")
    w_all, _, idx = _log_bins(omega, psd, n_bins, omega_min, omega_max)
    w, s, cnt = rebin_log(omega, psd, n_bins, omega_min, omega_max)
    if len(w) < 4:
        raise InvalidArgumentError("too few frequency bins for a three-parameter fit")
    ref = float(np.median(s))
    w_ref = float(np.exp(np.mean(np.log(w))))
    x = w / w_ref
    y = s / ref
    weight = np.sqrt(cnt)

    # initial guess: white level from the top fifth of the band, slope from the bottom
    top = w >= np.quantile(w, 0.8)
    q0 = float(np.min(y[top]))
    low = w <= np.quantile(w, 0.3)
    slope = np.polyfit(np.log(x[low]), np.log(np.clip(y[low] - 0.5 * q0, 1e-12, None)), 1)[0] if low.sum() > 1 else -1.0
    a0 = float(np.clip(-slope, 0.05, 4.5))
    p_amp = float(max(np.exp(np.mean(np.log(np.clip(y[low] - 0.5 * q0, 1e-12, None))
                                     + a0 * np.log(x[low]))), 1e-6))

    # the model is averaged over the same bin members as the data, so
    # curvature inside a bin does not bias the fit
    x_all = w_all / w_ref

    def residuals(p):
        return (np.log(_bin_mean(idx, p[0] * x_all ** -p[1] + p[2])) - np.log(y)) * weight

    lo = [0.0, 0.0, 0.0]
    hi = [np.inf, 6.0, np.inf]
    fit = lm_least_squares(residuals, [p_amp, a0, 0.5 * q0], bounds=(lo, hi),
                           names=("S_PLN", "alpha_tilde", "S_WN"))
    p, a, q = fit.values
    scale_pln = ref * w_ref**a
    jac = np.array([[scale_pln, p * scale_pln * np.log(w_ref), 0.0],
                    [0.0, 1.0, 0.0],
                    [0.0, 0.0, ref]])
    fit.values = np.array([p * scale_pln, a, q * ref])
    fit.covariance = jac @ fit.covariance @ jac.T
    return fit

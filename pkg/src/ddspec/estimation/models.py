"""Line-shape, decay and fringe models with their fits.

Frequencies entering ``Omega_R`` are angular (rad/s); detunings of the
microwave spectrum are ordinary frequencies in Hz; coil fields are in mG.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateFitError, InvalidArgumentError
from .lm import FitResult, curve_fit

__all__ = [
    "THEORY_SHIFT_HZ",
    "ZEEMAN_SLOPE_HZ_PER_MG",
    "square_pulse_line",
    "mw_spectrum_model",
    "fit_mw_spectrum",
    "ramsey_population_model",
    "fit_ramsey_population",
    "fringe_model",
    "fringe_visibility",
    "FringeFit",
    "fit_fringe",
    "lifetime_model",
    "fit_lifetime",
    "bfield_spectrum_model",
    "fit_bfield_spectrum",
]

# expected clock-transition shift from trap parameters; reference value only
THEORY_SHIFT_HZ = -123.0
# linear Zeeman slope of the Rb calibration transition, 0.7 MHz/G
ZEEMAN_SLOPE_HZ_PER_MG = 700.0


def square_pulse_line(detuning, A, C, Omega_R, tau):
    """Transfer of a square pulse of length ``tau`` at angular detuning ``detuning``."""
    omega2 = np.asarray(detuning, float) ** 2 + Omega_R**2
    return A * Omega_R**2 / omega2 * np.sin(np.sqrt(omega2) * tau / 2) ** 2 + C


def mw_spectrum_model(dnu, A, C, dnu_res, Omega_R, tau):
    return square_pulse_line(2 * np.pi * (np.asarray(dnu, float) - dnu_res), A, C, Omega_R, tau)


def _peak_init(x, y):
    y = np.asarray(y, float)
    C = float(np.min(y))
    return float(np.max(y) - C), C, float(np.asarray(x, float)[np.argmax(y)])


def fit_mw_spectrum(dnu, counts, Omega_R, tau, sigma=None, init=None) -> FitResult:
    """Fit amplitude, offset and resonance detuning (Hz) with Omega_R and tau fixed."""
    p0 = init if init is not None else _peak_init(dnu, counts)

    def model(x, A, C, res):
        return mw_spectrum_model(x, A, C, res, Omega_R, tau)

    return curve_fit(model, dnu, counts, p0, sigma=sigma, names=("A", "C", "dnu_res"))


def ramsey_population_model(T, A, C, dnu, tau_c):
    T = np.asarray(T, float)
    return A / 2 * (1 - np.cos(2 * np.pi * abs(dnu) * T) * np.exp(-(T / tau_c) ** 2)) + C


def _ramsey_init(T, y, w):
    """Grid search over (frequency, decay time); amplitude and offset are linear."""
    T = np.asarray(T, float)
    span = T.max() - T.min()
    dT = np.min(np.diff(np.unique(T)))
    freqs = np.linspace(0.5 / span, 0.5 / dT, 400)
    taus = np.geomspace(dT, 10 * span, 30)
    w2 = w * w
    s11 = w2.sum()
    sy1 = (w2 * y).sum()
    syy = (w2 * y * y).sum()
    best = (np.inf, None)
    for tau in taus:
        env = np.exp(-(T / tau) ** 2)
        # design columns: 0.5 (1 - cos(2 pi f T) env) and 1; solve 2x2 normal equations per f
        osc = 0.5 * (1 - np.cos(2 * np.pi * np.outer(freqs, T)) * env)
        soo = (osc * osc) @ w2
        so1 = osc @ w2
        soy = osc @ (w2 * y)
        det = soo * s11 - so1**2
        ok = det > 1e-12 * soo * s11
        A = np.where(ok, (soy * s11 - so1 * sy1) / np.where(ok, det, 1), 0)
        C = np.where(ok, (soo * sy1 - so1 * soy) / np.where(ok, det, 1), sy1 / s11)
        cost = syy - 2 * A * soy - 2 * C * sy1 + A * A * soo + 2 * A * C * so1 + C * C * s11
        cost = np.where(ok, cost, np.inf)
        i = int(np.argmin(cost))
        if cost[i] < best[0]:
            best = (cost[i], (float(A[i]), float(C[i]), float(freqs[i]), float(tau)))
    return best[1]


def fit_ramsey_population(T, counts, sigma=None, init=None) -> FitResult:
    """Fit the Gaussian-damped Ramsey oscillation; returns A, C, dnu_res (Hz), tau_c (s)."""
    T = np.asarray(T, float)
    y = np.asarray(counts, float)
    if len(T) < 5:
        raise InvalidArgumentError("a Ramsey trace needs at least five points")
    w = np.ones_like(y) if sigma is None else 1 / np.broadcast_to(np.asarray(sigma, float), y.shape)
    p0 = init if init is not None else _ramsey_init(T, y, w)
    fit = curve_fit(ramsey_population_model, T, y, p0, sigma=sigma,
                    bounds=([-np.inf, -np.inf, 0, 1e-12], [np.inf, np.inf, np.inf, np.inf]),
                    names=("A", "C", "dnu_res", "tau_c"))
    return fit


def fringe_model(phase_deg, a, c, Phi):
    """Population ``a sin^2(pi (Phi - phase) / 360 deg) + c``; angles in degrees."""
    x = np.pi / 360.0 * (Phi - np.asarray(phase_deg, float))
    return a * np.sin(x) ** 2 + c


def fringe_visibility(a, c):
    """``(P_max - P_min) / (P_max + P_min) = a / (a + 2c)``."""
    return a / (a + 2 * c)


@dataclass
class FringeFit:
    a: float
    c: float
    Phi: float
    visibility: float
    visibility_err: float
    degenerate: bool
    fit: FitResult | None


def _wrap_deg(x):
    """Wrap to (-180, 180]."""
    y = -((-x + 180.0) % 360.0) + 180.0
    return 180.0 if y == -180.0 else y


def fit_fringe(phase_deg, population, sigma=None) -> FringeFit:
    """Fit a phase-scan fringe and return the visibility with its uncertainty.

    ``a`` and ``c`` are constrained non-negative. A flat fringe yields
    visibility 0 with ``degenerate=True`` instead of raising.
    """
    phi = np.asarray(phase_deg, float)
    y = np.asarray(population, float)
    if len(phi) < 5:
        raise InvalidArgumentError("a fringe fit needs at least five points")
    if np.ptp(phi) < 180:
        raise InvalidArgumentError("the phase scan must span at least 180 degrees")
    # a sin^2((Phi - phi)/2) + c = (c + a/2) - (a/2) cos(Phi) cos(phi) - (a/2) sin(Phi) sin(phi)
    rad = np.deg2rad(phi)
    X = np.column_stack((np.ones_like(rad), np.cos(rad), np.sin(rad)))
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    half_a = float(np.hypot(coef[1], coef[2]))
    scale = max(np.max(np.abs(y)), 1e-300)
    if half_a <= 1e-12 * scale:
        return FringeFit(0.0, float(np.mean(y)), 0.0, 0.0, 0.0, True, None)
    Phi0 = float(np.degrees(np.arctan2(-coef[2], -coef[1])))
    a0 = 2 * half_a
    c0 = max(float(coef[0]) - half_a, 0.0)
    try:
        fit = curve_fit(fringe_model, phi, y, (a0, c0, Phi0), sigma=sigma,
                        bounds=([0, 0, Phi0 - 360], [np.inf, np.inf, Phi0 + 360]),
                        names=("a", "c", "Phi"))
    except DegenerateFitError:
        return FringeFit(0.0, float(np.mean(y)), 0.0, 0.0, 0.0, True, None)
    a, c, Phi = fit.values
    if a <= 0:
        return FringeFit(0.0, float(c), 0.0, 0.0, 0.0, True, fit)
    vis = fringe_visibility(a, c)
    grad = np.array([2 * c, -2 * a, 0.0]) / (a + 2 * c) ** 2
    err = float(np.sqrt(max(grad @ fit.covariance @ grad, 0.0)))
    return FringeFit(float(a), float(c), _wrap_deg(float(Phi)), float(vis), err, False, fit)


def lifetime_model(T, N0, tau):
    return N0 * np.exp(-np.asarray(T, float) / tau)


def fit_lifetime(T, counts, sigma=None, tau_max=None) -> FitResult:
    """Exponential atom loss ``N0 exp(-T / tau_LT)``.

    ``tau_LT`` is bounded above by ``tau_max`` (default 1e4 times the time
    span). A fit that ends on that bound, i.e. data without visible decay,
    is reported with ``converged=False`` and ``flags['non_decaying']``.
    """
    T = np.asarray(T, float)
    y = np.asarray(counts, float)
    if len(T) < 2:
        raise InvalidArgumentError("need at least two points")
    if np.any(y <= 0):
        raise InvalidArgumentError("atom numbers must be positive")
    span = float(np.ptp(T))
    if span <= 0:
        raise InvalidArgumentError("time points must not all coincide")
    if tau_max is None:
        tau_max = 1e4 * span
    slope, icept = np.polyfit(T, np.log(y), 1)
    tau0 = -1 / slope if slope < -1 / tau_max else 0.5 * tau_max
    p0 = (float(np.exp(icept)), float(min(tau0, 0.5 * tau_max)))
    if p0[1] >= 0.5 * tau_max:
        p0 = (float(np.mean(y)), 0.5 * tau_max)
    try:
        fit = curve_fit(lifetime_model, T, y, p0, sigma=sigma,
                        bounds=([0, 0], [np.inf, tau_max]), names=("N0", "tau_LT"))
    except DegenerateFitError:
        fit = FitResult(("N0", "tau_LT"), np.array([np.mean(y), tau_max]),
                        np.full((2, 2), np.inf), float(np.linalg.norm(y - np.mean(y))), 0, False)
    non_decaying = fit.values[1] >= tau_max * (1 - 1e-6) or fit.flags.get("at_bound", {}).get("tau_LT", False)
    fit.flags["non_decaying"] = bool(non_decaying)
    if non_decaying:
        fit.converged = False
    return fit


def bfield_spectrum_model(B_mG, A, C, B_res_mG, Omega_R, tau):
    detuning = 2 * np.pi * (np.asarray(B_mG, float) - B_res_mG) * ZEEMAN_SLOPE_HZ_PER_MG
    return square_pulse_line(detuning, A, C, Omega_R, tau)


def fit_bfield_spectrum(B_mG, counts, Omega_R, tau, sigma=None, init=None) -> FitResult:
    """Fit amplitude, offset and resonant coil field (mG) with Omega_R and tau fixed."""
    p0 = init if init is not None else _peak_init(B_mG, counts)

    def model(x, A, C, res):
        return bfield_spectrum_model(x, A, C, res, Omega_R, tau)

    return curve_fit(model, B_mG, counts, p0, sigma=sigma, names=("A", "C", "B_res_mG"))

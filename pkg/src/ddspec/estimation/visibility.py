"""Visibility datasets, fringe normalization and the global noise fit.

Each dataset holds the measurements of one N-CPMG family. The global fit
models every dataset as ``V(T) = V0_i exp(-chi_N(T)) + b_i`` with a shared
power-law spectrum ``S0 / omega^alpha`` and per-dataset ``V0_i, b_i``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..coherence import chi_powerlaw, tau_c_numeric
from ..errors import InvalidArgumentError
from ..sequences import make_cpmg
from ..spectra import PowerLaw
from .lm import FitResult, lm_least_squares
from .models import fit_fringe, fringe_model

__all__ = [
    "FringeScan",
    "VisibilityDataset",
    "normalization_divisor",
    "normalize_fringes",
    "fit_dataset_fringes",
    "global_visibility_fit",
    "visibility_model",
    "synthetic_visibility_dataset",
    "synthetic_fringe_dataset",
    "coherence_time_table",
]


@dataclass(frozen=True, eq=False)
class FringeScan:
    """One phase scan at fixed sequence length ``T``."""

    T: float
    phase_deg: np.ndarray
    population: np.ndarray
    sigma: np.ndarray | None = None

    def __post_init__(self):
        if not self.T > 0:
            raise InvalidArgumentError("T must be positive")
        object.__setattr__(self, "phase_deg", np.asarray(self.phase_deg, float))
        object.__setattr__(self, "population", np.asarray(self.population, float))
        if self.sigma is not None:
            s = np.asarray(self.sigma, float)
            if np.any(~(s > 0)):
                raise InvalidArgumentError("fringe uncertainties must be positive")
            object.__setattr__(self, "sigma", s)


@dataclass(frozen=True, eq=False)
class VisibilityDataset:
    """Measurements for one pulse number.

    Either ``fringes`` (raw or normalized phase scans) or the fitted
    ``T``/``visibility``/``visibility_err`` arrays may be present.
    ``normalized`` records whether fringe populations are already divided
    by the total atom number.
    """

    n_pulses: int
    T: np.ndarray = field(default_factory=lambda: np.zeros(0))
    visibility: np.ndarray | None = None
    visibility_err: np.ndarray | None = None
    fringes: tuple = ()
    lifetime_tau: float | None = None
    n_cs0: float | None = None
    normalized: bool = False

    def __post_init__(self):
        if self.fringes:
            object.__setattr__(self, "fringes", tuple(self.fringes))
            if not len(self.T):
                object.__setattr__(self, "T", np.array([f.T for f in self.fringes]))
        T = np.asarray(self.T, float)
        if np.any(~(T > 0)):
            raise InvalidArgumentError("sequence lengths must be positive")
        object.__setattr__(self, "T", T)
        for name in ("visibility", "visibility_err"):
            v = getattr(self, name)
            if v is not None:
                v = np.asarray(v, float)
                if v.shape != T.shape:
                    raise InvalidArgumentError(f"{name} must match T in length")
                object.__setattr__(self, name, v)
        if self.lifetime_tau is not None and not self.lifetime_tau > 0:
            raise InvalidArgumentError("lifetime must be positive")
        if self.n_pulses < 0:
            raise InvalidArgumentError("pulse number must be >= 0")


def normalization_divisor(T, n_cs0, lifetime_tau):
    """Total atom number ``N_Cs0 exp(-T / tau_LT)`` at sequence length ``T``."""
    return n_cs0 * np.exp(-np.asarray(T, float) / lifetime_tau)


def normalize_fringes(ds: VisibilityDataset) -> VisibilityDataset:
    """Divide fringe populations (and uncertainties) by the surviving atom number."""
    if ds.n_cs0 is None or ds.lifetime_tau is None:
        raise InvalidArgumentError("normalization needs n_cs0 and lifetime_tau")
    if not ds.n_cs0 > 0:
        raise InvalidArgumentError("n_cs0 must be positive")
    if ds.normalized:
        return ds
    scans = []
    for f in ds.fringes:
        d = normalization_divisor(f.T, ds.n_cs0, ds.lifetime_tau)
        scans.append(FringeScan(f.T, f.phase_deg, f.population / d,
                                None if f.sigma is None else f.sigma / d))
    return replace(ds, fringes=tuple(scans), normalized=True)


def fit_dataset_fringes(ds: VisibilityDataset) -> VisibilityDataset:
    """Fit every fringe and store visibilities with propagated errors.

    Degenerate (flat) fringes are kept with visibility 0 and the largest
    uncertainty among the other points, so they carry little weight.
    """
    vis, err, flat = [], [], []
    for f in ds.fringes:
        r = fit_fringe(f.phase_deg, f.population, f.sigma)
        vis.append(r.visibility)
        err.append(r.visibility_err)
        flat.append(r.degenerate)
    err = np.asarray(err)
    flat = np.asarray(flat)
    if flat.any():
        err[flat] = err[~flat].max() if (~flat).any() else 1.0
    err[err <= 0] = np.min(err[err > 0]) if np.any(err > 0) else 1.0
    return replace(ds, visibility=np.asarray(vis), visibility_err=err)


def visibility_model(T, n_pulses, S0, alpha, V0, b):
    seq = make_cpmg(n_pulses, 1.0)
    return V0 * np.exp(-chi_powerlaw(S0, alpha, seq, T)) + b


def _initial_guess(datasets, alpha0):
    V0s = [float(ds.visibility[np.argmin(ds.T)]) for ds in datasets]
    bs = [float(ds.visibility[np.argmax(ds.T)]) for ds in datasets]
    # S0 from the largest-N set: pick the point closest to 1/e of its own decay
    i = int(np.argmax([ds.n_pulses for ds in datasets]))
    ds = datasets[i]
    V0, b = V0s[i], bs[i]
    y = (ds.visibility - b) / (V0 - b) if V0 != b else np.full(len(ds.T), 0.5)
    j = int(np.argmin(np.abs(np.clip(y, 0.05, 0.95) - np.exp(-1))))
    chi_target = -np.log(np.clip(y[j], 0.05, 0.95))
    unit = chi_powerlaw(1.0, alpha0, make_cpmg(ds.n_pulses, 1.0), ds.T[j])
    S0 = float(chi_target / unit)
    # keep the decayed level from swallowing the amplitude
    V0s = [max(v - b_, 1e-3) for v, b_ in zip(V0s, bs)]
    return S0, V0s, bs


def global_visibility_fit(datasets, init=None, fix_V0=None, fix_b=None) -> FitResult:
    """Fit a shared power-law spectrum to visibility decays of several pulse numbers.

    Parameters
    ----------
    datasets : sequence of VisibilityDataset
        Each needs at least three fitted visibilities. Uncertainties weight
        the residuals when present.
    init : dict, optional
        Starting ``S0`` and/or ``alpha``.
    fix_V0, fix_b : float, optional
        Hold every per-dataset amplitude or offset at the given value.

    Returns
    -------
    FitResult
        Parameters ``S0, alpha`` followed by ``V0_N``/``b_N`` for each
        dataset (suffix is the pulse number; repeated N get ``_k`` indices).
    """
    datasets = list(datasets)
    if not datasets:
        raise InvalidArgumentError("at least one dataset is required")
    for ds in datasets:
        if ds.visibility is None or len(ds.T) < 3:
            raise InvalidArgumentError(f"dataset N={ds.n_pulses} needs at least three fitted visibilities")
    has_ramsey = any(ds.n_pulses == 0 for ds in datasets)
    # the Ramsey integral diverges for alpha >= 1
    alpha_max = 1.0 - 1e-6 if has_ramsey else 3.0 - 1e-6
    init = dict(init or {})
    alpha0 = float(init.get("alpha", min(1.0, alpha_max - 0.05)))
    S0_guess, V0s, bs = _initial_guess(datasets, alpha0)
    S0_0 = float(init.get("S0", S0_guess))

    names = ["S0", "alpha"]
    p0 = [S0_0, alpha0]
    lo = [0.0, 1e-6]
    hi = [np.inf, alpha_max]
    seen = {}
    for ds, v0, b in zip(datasets, V0s, bs):
        k = seen.get(ds.n_pulses, 0)
        seen[ds.n_pulses] = k + 1
        tag = f"{ds.n_pulses}" if k == 0 else f"{ds.n_pulses}_{k}"
        if fix_V0 is None:
            names.append(f"V0_{tag}")
            p0.append(v0)
            lo.append(0.0)
            hi.append(np.inf)
        if fix_b is None:
            names.append(f"b_{tag}")
            p0.append(b)
            lo.append(-np.inf)
            hi.append(np.inf)

    seqs = [make_cpmg(ds.n_pulses, 1.0) for ds in datasets]
    weights = [1 / ds.visibility_err if ds.visibility_err is not None else np.ones(len(ds.T))
               for ds in datasets]

    def residuals(p):
        S0, alpha = p[0], p[1]
        out = []
        k = 2
        for ds, seq, w in zip(datasets, seqs, weights):
            if fix_V0 is None:
                V0 = p[k]
                k += 1
            else:
                V0 = fix_V0
            if fix_b is None:
                b = p[k]
                k += 1
            else:
                b = fix_b
            model = V0 * np.exp(-chi_powerlaw(S0, alpha, seq, ds.T)) + b
            out.append((model - ds.visibility) * w)
        return np.concatenate(out)

    return lm_least_squares(residuals, p0, bounds=(lo, hi), names=names)


def coherence_time_table(S0, alpha, pulse_numbers):
    """Numeric coherence times for each pulse number of a power-law spectrum."""
    spec = PowerLaw(S0, alpha)
    return {int(N): tau_c_numeric(spec, int(N)) for N in pulse_numbers}


def synthetic_visibility_dataset(n_pulses, T, S0, alpha, V0=1.0, b=0.0, noise=0.0, rng=None):
    """Visibilities from the model plus Gaussian noise of absolute size ``noise``."""
    T = np.asarray(T, float)
    clean = visibility_model(T, n_pulses, S0, alpha, V0, b)
    rng = np.random.default_rng(rng)
    vis = clean + noise * rng.standard_normal(T.shape) if noise > 0 else clean
    err = np.full(T.shape, noise) if noise > 0 else None
    return VisibilityDataset(n_pulses, T, vis, err)


def synthetic_fringe_dataset(n_pulses, T, S0, alpha, V0=0.9, b=0.02, n_cs0=25.0,
                             lifetime_tau=0.685, phase_steps=10, atom_noise=0.3, rng=None):
    """Raw fringe scans in atom numbers, as a phase scan from -185 to 185 degrees.

    The visibility is turned into a fringe with ``c = (1 - V) / 2`` and
    ``a = V`` so that ``a / (a + 2c) = V``; populations are multiplied by
    the surviving atom number and perturbed by Gaussian noise of
    ``atom_noise`` atoms.
    """
    rng = np.random.default_rng(rng)
    phases = np.linspace(-185.0, 185.0, phase_steps)
    T = np.asarray(T, float)
    vis = visibility_model(T, n_pulses, S0, alpha, V0, b)
    scans = []
    for t, v in zip(T, vis):
        a = v
        c = (1 - v) / 2
        Phi = rng.uniform(-30, 30)
        total = normalization_divisor(t, n_cs0, lifetime_tau)
        pop = total * fringe_model(phases, a, c, Phi)
        pop = pop + atom_noise * rng.standard_normal(phases.shape)
        scans.append(FringeScan(t, phases, pop, np.full(phases.shape, atom_noise)))
    return VisibilityDataset(n_pulses, fringes=tuple(scans), lifetime_tau=lifetime_tau, n_cs0=n_cs0)

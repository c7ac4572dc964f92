"""Filter functions g(omega, T) of delta-pulse sequences.

All variants use the dimensionless frequency ``u = omega * T``. Three
evaluations are provided:

* :func:`filter_exact` -- any sequence, summed segment by segment;
* :func:`filter_cpmg_closed` -- CPMG only, geometric-series closed form;
* :func:`filter_cpmg_sinc` -- CPMG only, sum of sinc^2 peaks (large-N).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .sequences import PulseSequence

__all__ = [
    "Variant",
    "FilterEvaluation",
    "filter_exact",
    "filter_exact_u",
    "filter_cpmg_closed",
    "filter_cpmg_sinc",
    "default_sinc_terms",
    "peak_frequencies",
    "phase_moments",
    "cpmg_fractions",
    "evaluate",
]

SMALL_U = 1e-4
# half-width (in u) of the window around a removable singularity of the
# closed form inside which Richardson extrapolation replaces direct evaluation
_SINGULAR_HALF_WIDTH = 1e-3


class Variant(str, enum.Enum):
    EXACT = "exact"
    CLOSED = "closed"
    SINC = "sinc"


@dataclass(frozen=True)
class FilterEvaluation:
    omega: float
    value: float
    variant: Variant


_TWO_PI_LD = 2 * np.pi * np.longdouble(1) + np.longdouble(2.4492935982947064e-16)


def _reduced(u, x):
    """``u * x mod 2 pi`` with the product and reduction in extended precision.

    At ``u ~ 1e3`` a float64 product already carries ~1e-13 absolute phase
    error, which dominates the result near the deep zeros of the filter.
    """
    prod = np.asarray(u, np.longdouble) * np.asarray(x, np.longdouble)
    return np.fmod(prod, _TWO_PI_LD).astype(float)


def cpmg_fractions(N: int) -> np.ndarray:
    """CPMG pulse positions ``(2j - 1) / (2N)`` in extended precision."""
    j = np.arange(1, N + 1, dtype=np.longdouble)
    return (2 * j - 1) / (2 * np.longdouble(N))


def phase_moments(fractions, kmax=4):
    """Moments ``int_0^1 s(x) x^k dx`` of the toggling sign, k = 0..kmax."""
    edges = np.concatenate(([0.0], np.asarray(fractions, float), [1.0]))
    signs = (-1.0) ** np.arange(len(edges) - 1)
    k = np.arange(kmax + 1)[:, None]
    upper = edges[1:][None, :] ** (k + 1)
    lower = edges[:-1][None, :] ** (k + 1)
    return ((upper - lower) * signs).sum(axis=1) / (k[:, 0] + 1)


def filter_exact_u(fractions, u):
    """Filter function of the pulse pattern ``fractions`` (t_j / T) at ``u``.

    Computes ``|int_0^1 s(x) exp(i u x) dx|^2`` as a sum over constant-sign
    segments, each contributing ``w exp(i u m) sinc(u w / 2)``. This equals
    the pulse-sum expression divided by ``u^2`` but does not cancel at small
    ``u``; below ``SMALL_U`` a Taylor series in the moments is used instead.
    """
    u = np.asarray(u, dtype=float)
    scalar = u.ndim == 0
    u = np.atleast_1d(u)
    if np.any(u < 0):
        raise InvalidArgumentError("omega must be non-negative")
    edges_ld = np.concatenate(([0], np.asarray(fractions, np.longdouble), [1])).astype(np.longdouble)
    widths_ld = np.diff(edges_ld)
    mids_ld = (edges_ld[1:] + edges_ld[:-1]) / 2
    widths = widths_ld.astype(float)
    signs = (-1.0) ** np.arange(len(widths))
    out = np.empty_like(u)

    small = u < SMALL_U
    if np.any(~small):
        ub = u[~small][:, None]
        half = ub * widths / 2
        with np.errstate(invalid="ignore", divide="ignore"):
            amp = signs * widths * np.where(half > 0, np.sin(_reduced(ub, widths_ld / 2)) / half, 1.0)
        ph = _reduced(ub, mids_ld)
        re = (amp * np.cos(ph)).sum(axis=1)
        im = (amp * np.sin(ph)).sum(axis=1)
        out[~small] = re * re + im * im
    if np.any(small):
        mu = phase_moments(fractions, 4)
        us = u[small]
        # sum_k (i u)^k mu_k / k!
        re = mu[0] - us**2 * mu[2] / 2 + us**4 * mu[4] / 24
        im = us * mu[1] - us**3 * mu[3] / 6
        out[small] = re * re + im * im
    return out[0] if scalar else out


def filter_exact(seq: PulseSequence, omega):
    """g(omega, T) for an arbitrary delta-pulse sequence."""
    return filter_exact_u(seq.fractions, np.asarray(omega, float) * seq.total_time)


def _closed_raw(N, u):
    z = np.exp(1j * u / N)
    e = np.exp(1j * u)
    sign = (-1.0) ** N
    num = 1 - sign * e + 2 * np.exp(1j * u / (2 * N)) * (sign * e - 1) / (z + 1)
    return np.abs(num) ** 2 / u**2


def filter_cpmg_closed(N: int, u):
    """CPMG filter from the geometric-series closed form.

    The closed form has removable singularities at ``u = (2k+1) N pi`` where
    ``exp(iu/N) = -1``. Within ``1e-3`` of one of those points the value is
    obtained by symmetric Richardson extrapolation from offsets that stay
    clear of the singularity. Small ``u`` falls back to the moment series.
    """
    N = int(N)
    if N < 1:
        raise InvalidArgumentError("closed form requires N >= 1")
    u = np.asarray(u, dtype=float)
    scalar = u.ndim == 0
    u = np.atleast_1d(u).copy()
    if np.any(u < 0):
        raise InvalidArgumentError("u must be non-negative")
    out = np.empty_like(u)

    small = u < SMALL_U
    if np.any(small):
        j = np.arange(1, N + 1)
        out[small] = filter_exact_u(cpmg_fractions(N), u[small])

    k = np.round((u / (N * np.pi) - 1) / 2)
    dist = np.abs(u - (2 * k + 1) * N * np.pi)
    near = (dist < _SINGULAR_HALF_WIDTH) & ~small
    regular = ~small & ~near
    if np.any(regular):
        out[regular] = _closed_raw(N, u[regular])
    if np.any(near):
        un = u[near]
        h = 2 * _SINGULAR_HALF_WIDTH
        f1 = 0.5 * (_closed_raw(N, un + h) + _closed_raw(N, un - h))
        f2 = 0.5 * (_closed_raw(N, un + 2 * h) + _closed_raw(N, un - 2 * h))
        out[near] = (4 * f1 - f2) / 3
    return out[0] if scalar else out


def default_sinc_terms(tol: float = 1e-6) -> int:
    """Smallest ``k_max`` whose tail bound ``4/((2k_max+3) pi)^2`` is below ``tol``."""
    return max(0, math.ceil((2 / (math.pi * math.sqrt(tol)) - 3) / 2))


def filter_cpmg_sinc(N: int, u, k_max: int | None = None):
    """Large-N approximation: sum of sinc^2 peaks at ``u = (2k+1) N pi``."""
    if k_max is None:
        k_max = default_sinc_terms()
    if k_max < 0:
        raise InvalidArgumentError("k_max must be >= 0")
    u = np.asarray(u, dtype=float)
    k = np.arange(k_max + 1)
    odd = 2 * k + 1
    weights = 4 / (odd * np.pi) ** 2
    x = (u[..., None] - odd * N * np.pi) / 2
    return (weights * np.sinc(x / np.pi) ** 2).sum(axis=-1)


def peak_frequencies(N: int, T: float, k_max: int) -> np.ndarray:
    """Angular frequencies ``(2k+1) N pi / T`` of the CPMG filter peaks."""
    if N < 1 or T <= 0:
        raise InvalidArgumentError("need N >= 1 and T > 0")
    k = np.arange(k_max + 1)
    return (2 * k + 1) * N * np.pi / T


def evaluate(seq: PulseSequence, omega, variant=Variant.EXACT, k_max=None):
    """Evaluate one filter variant on a frequency grid, returning records."""
    variant = Variant(variant)
    omega = np.atleast_1d(np.asarray(omega, float))
    u = omega * seq.total_time
    if variant is Variant.EXACT:
        vals = filter_exact(seq, omega)
    elif seq.family.value != "cpmg":
        raise InvalidArgumentError(f"{variant.value} variant is only defined for CPMG sequences")
    elif variant is Variant.CLOSED:
        vals = filter_cpmg_closed(seq.n_pulses, u)
    else:
        vals = filter_cpmg_sinc(seq.n_pulses, u, k_max)
    return [FilterEvaluation(float(w), float(v), variant) for w, v in zip(omega, vals)]

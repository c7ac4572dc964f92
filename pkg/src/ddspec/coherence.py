"""Coherence integral, visibility and coherence times.

The coherence integral of a delta-pulse sequence of length ``T`` is::

    chi(T) = T^2 / (2 pi) int_0^inf S(omega) g(omega, T) d omega
           = T / (2 pi) int_0^inf S(u / T) g(u) du,          u = omega T

and the visibility is ``V = exp(-chi)``. The integral is evaluated in ``u``
because ``g`` depends only on the pulse pattern there.
"""
from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate, optimize

from .errors import BracketError, DomainError, InvalidArgumentError
from .filters import filter_exact_u
from .sequences import Family, PulseSequence, make_cpmg, make_uhrig
from .spectra import NoiseSpectrum, PowerLaw

__all__ = [
    "CoherenceResult",
    "chi_numeric",
    "chi_powerlaw",
    "visibility",
    "chi_analytic_cpmg",
    "tau1_analytic",
    "tau_c_analytic",
    "tau_c_numeric",
    "dip_times",
    "riemann_zeta",
]

_GL_LO = np.polynomial.legendre.leggauss(16)
_GL_HI = np.polynomial.legendre.leggauss(32)
# the panel region extends past the k-th CPMG peak by this many half-periods
_SPLIT_PEAKS = 3
_SPLIT_MARGIN = 20 * np.pi


@dataclass(frozen=True)
class CoherenceResult:
    chi: float
    visibility: float
    quadrature_error_estimate: float


def _zero_order(fractions) -> int:
    """0 if the filter is finite at u = 0, 1 if it vanishes like u^2."""
    edges = np.concatenate(([0.0], np.asarray(fractions, float), [1.0]))
    dwell = np.diff(edges) @ ((-1.0) ** np.arange(len(edges) - 1))
    return 0 if abs(dwell) > 1e-12 else 1


def _pulse_coefficients(fractions):
    """Amplitudes and positions of the exponentials in ``u * sqrt(g)``."""
    fr = np.asarray(fractions, float)
    n = len(fr)
    pos = np.concatenate(([0.0], fr, [1.0]))
    coef = np.concatenate(([1.0], 2.0 * (-1.0) ** np.arange(1, n + 1), [(-1.0) ** (n + 1)]))
    return coef, pos


def _cosine_weights(fractions):
    """Return ``(a0, {delta: w})`` with ``u^2 g(u) = a0 + sum w cos(delta u)``."""
    coef, pos = _pulse_coefficients(fractions)
    a0 = float(coef @ coef)
    terms = {}
    for m in range(len(pos)):
        for n in range(m + 1, len(pos)):
            d = round(pos[n] - pos[m], 12)
            terms[d] = terms.get(d, 0.0) + 2 * coef[m] * coef[n]
    return a0, {d: w for d, w in terms.items() if w != 0.0}


def _gl(f, a, b, rule):
    x, w = rule
    half = 0.5 * (b - a)
    nodes = (0.5 * (a + b))[:, None] + half[:, None] * x
    return (f(nodes.ravel()).reshape(nodes.shape) @ w) * half


def _adaptive_panels(f, edges, rtol, max_rounds=40):
    """Integrate ``f`` over consecutive panels with Gauss-Legendre 16/32 pairs.

    Panels whose 16- and 32-point results disagree by more than their share
    of ``rtol * |total|`` are bisected, for up to ``max_rounds`` rounds.
    """
    a = np.asarray(edges[:-1], float)
    b = np.asarray(edges[1:], float)
    done_val = 0.0
    done_err = 0.0
    for _ in range(max_rounds):
        hi = _gl(f, a, b, _GL_HI)
        lo = _gl(f, a, b, _GL_LO)
        err = np.abs(hi - lo)
        total = done_val + hi.sum()
        budget = rtol * max(abs(total), 1e-300) / max(len(a), 1)
        bad = err > budget
        done_val += hi[~bad].sum()
        done_err += err[~bad].sum()
        if not bad.any():
            break
        mid = 0.5 * (a[bad] + b[bad])
        a, b = np.concatenate((a[bad], mid)), np.concatenate((mid, b[bad]))
    else:
        done_val += hi[bad].sum()
        done_err += err[bad].sum()
    return done_val, done_err


def _reduced_integral(spec: NoiseSpectrum, fractions, T: float, u_ir: float = 0.0, rtol=1e-10):
    """``int_{u_ir}^inf S(u/T) g(u) du`` and an absolute error estimate."""
    # QUADPACK warns when rtol is below attainable roundoff; the error
    # estimate it returns is propagated instead
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return _reduced_integral_impl(spec, fractions, T, u_ir, rtol)


def _reduced_integral_impl(spec, fractions, T, u_ir, rtol):
    n = len(fractions)
    scale = max(n, 1)

    def f(u):
        u = np.asarray(u, float)
        return spec(u / T) * filter_exact_u(fractions, u)

    feature_u = [w * T for w in spec.breakpoints()]
    u_split = (2 * _SPLIT_PEAKS + 1) * scale * np.pi + _SPLIT_MARGIN
    if feature_u:
        u_split = max(u_split, max(feature_u) + _SPLIT_MARGIN)
    u_split = max(u_split, u_ir + _SPLIT_MARGIN)

    total = 0.0
    err = 0.0
    start = u_ir
    if u_ir < np.pi:
        # algebraic endpoint behaviour at u -> 0 (S ~ u^-a, g ~ u^0 or u^2):
        # QAGS with epsilon extrapolation handles it
        pts = [p for p in feature_u if u_ir < p < np.pi]
        val, e = integrate.quad(f, u_ir, np.pi, points=pts or None, limit=400,
                                epsabs=0.0, epsrel=rtol)
        total += val
        err += e
        start = np.pi

    step = np.pi
    edges = np.arange(start, u_split, step)
    edges = np.union1d(np.append(edges, u_split), [p for p in feature_u if start < p < u_split])
    val, e = _adaptive_panels(f, edges, rtol)
    total += val
    err += e

    # tail: u^2 g(u) = a0 + sum_d w_d cos(d u); each term against S(u/T)/u^2
    a0, cos_terms = _cosine_weights(np.asarray(fractions, float))

    def h(u):
        return spec(u / T) / (u * u)

    val, e = integrate.quad(h, u_split, np.inf, limit=200, epsabs=0.0, epsrel=rtol)
    total += a0 * val
    err += abs(a0) * e
    for d, w in cos_terms.items():
        val, e = integrate.quad(h, u_split, np.inf, weight="cos", wvar=d, limlst=100, limit=200,
                                epsabs=max(abs(total), 1e-300) * rtol * 1e-2)
        total += w * val
        err += abs(w) * e
    return total, err


def chi_numeric(spec: NoiseSpectrum, seq: PulseSequence, omega_ir: float | None = None,
                rtol: float = 1e-10) -> CoherenceResult:
    """Coherence integral of ``seq`` under noise ``spec`` by adaptive quadrature.

    Parameters
    ----------
    omega_ir : float, optional
        Infrared cutoff in rad/s. Frequencies below it are excluded. Without
        a cutoff, spectra that make the integral diverge at ``omega -> 0``
        raise :class:`DomainError`.
    """
    if omega_ir is None or omega_ir <= 0:
        spec.check_integrable(_zero_order(seq.fractions))
        u_ir = 0.0
    else:
        u_ir = omega_ir * seq.total_time
    T = seq.total_time
    integral, err = _reduced_integral(spec, seq.fractions, T, u_ir, rtol)
    chi = T / (2 * np.pi) * integral
    return CoherenceResult(chi, math.exp(-chi), T / (2 * np.pi) * err)


def visibility(spec, seq, **kw) -> float:
    return chi_numeric(spec, seq, **kw).visibility


@functools.lru_cache(maxsize=4096)
def _powerlaw_unit_chi(key, alpha: float) -> float:
    family, payload = key
    fractions = np.asarray(payload, float) if family == "custom" else _fractions_for(family, payload)
    integral, _ = _reduced_integral(PowerLaw(1.0, alpha), fractions, 1.0)
    return integral / (2 * np.pi)


def _fractions_for(family, n):
    if family == "ramsey":
        return np.zeros(0)
    maker = make_cpmg if family == "cpmg" else make_uhrig
    return maker(n, 1.0).fractions


def _sequence_key(seq: PulseSequence):
    if seq.family is Family.RAMSEY or (seq.family is Family.CPMG and seq.n_pulses == 0):
        return ("ramsey", 0)
    if seq.family in (Family.CPMG, Family.UHRIG):
        return (seq.family.value, seq.n_pulses)
    return ("custom", tuple(np.asarray(seq.fractions, float)))


def chi_powerlaw(S0: float, alpha: float, seq: PulseSequence, T=None):
    """Coherence integral for ``S0 / omega^alpha`` using exact scaling.

    For a pure power law ``chi(T) = S0 T^(1+alpha) chi_1``, where ``chi_1``
    depends only on the pulse pattern and ``alpha``; ``chi_1`` is computed
    once per (pattern, alpha) and cached. ``T`` may be an array of total
    times for the same pattern; it defaults to ``seq.total_time``.
    """
    if not (S0 > 0 and alpha > 0):
        raise InvalidArgumentError("need S0 > 0 and alpha > 0")
    PowerLaw(S0, alpha).check_integrable(_zero_order(seq.fractions))
    unit = _powerlaw_unit_chi(_sequence_key(seq), float(alpha))
    T = seq.total_time if T is None else np.asarray(T, float)
    return S0 * np.power(T, 1 + alpha) * unit


def chi_analytic_cpmg(S0: float, alpha: float, N: int, T):
    """Large-N approximation ``(T / tau_c)^(1 + alpha)``."""
    return np.power(np.asarray(T, float) / tau_c_analytic(S0, alpha, N), 1 + alpha)


def tau1_analytic(S0: float, alpha: float) -> float:
    """Single-pulse coherence time of the analytic large-N law."""
    if not (S0 > 0 and alpha > 0):
        raise InvalidArgumentError("need S0 > 0 and alpha > 0")
    s = 2 + alpha
    inner = 4 * S0 * math.pi ** (-s) * (1 - 2.0 ** (-s)) * riemann_zeta(s)
    return inner ** (-1 / (1 + alpha))


def tau_c_analytic(S0: float, alpha: float, N: int) -> float:
    """``N^(alpha / (1 + alpha)) * tau_1``."""
    if N < 1:
        raise InvalidArgumentError("analytic coherence time needs N >= 1")
    return N ** (alpha / (1 + alpha)) * tau1_analytic(S0, alpha)


def tau_c_numeric(spec: NoiseSpectrum, N: int, T_bracket=None, family: str = "cpmg",
                  omega_ir: float | None = None, rtol: float = 1e-6) -> float:
    """Sequence length at which ``chi = 1`` (visibility ``1/e``).

    ``T_bracket`` must satisfy ``chi(lo) < 1 < chi(hi)``. If omitted, a
    bracket is searched for by repeated doubling/halving from 10 ms.
    """
    def build(T):
        if family == "uhrig" and N > 0:
            return make_uhrig(N, T)
        return make_cpmg(N, T)

    if isinstance(spec, PowerLaw) and omega_ir is None:
        def chi(T):
            return chi_powerlaw(spec.S0, spec.alpha, build(T))
    else:
        def chi(T):
            return chi_numeric(spec, build(T), omega_ir=omega_ir).chi

    if T_bracket is None:
        lo = hi = 0.01
        for _ in range(200):
            if chi(lo) < 1:
                break
            lo /= 2
        for _ in range(200):
            if chi(hi) > 1:
                break
            hi *= 2
        T_bracket = (lo, hi)
    lo, hi = map(float, T_bracket)
    if not (0 < lo < hi):
        raise BracketError(f"invalid bracket {T_bracket!r}")
    f_lo, f_hi = chi(lo) - 1, chi(hi) - 1
    if not (f_lo < 0 < f_hi):
        raise BracketError(f"chi - 1 does not change sign on [{lo}, {hi}]: {f_lo:+.3g}, {f_hi:+.3g}")
    # root in log T keeps the relative tolerance uniform across decades
    x = optimize.brentq(lambda x: chi(math.exp(x)) - 1, math.log(lo), math.log(hi),
                        xtol=rtol * 0.1, rtol=4 * np.finfo(float).eps)
    return math.exp(x)


def dip_times(omega0: float, N: int, k_max: int) -> np.ndarray:
    """Sequence lengths ``(2k + 1) N pi / omega0`` where a resonance at ``omega0`` dominates."""
    if omega0 <= 0 or N < 1:
        raise InvalidArgumentError("need omega0 > 0 and N >= 1")
    k = np.arange(k_max + 1)
    return (2 * k + 1) * N * np.pi / omega0


_BERNOULLI = [Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30),
              Fraction(5, 66), Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510)]


def riemann_zeta(s: float, cutoff: int = 32) -> float:
    """Riemann zeta for real ``s > 1``.

    Direct summation to ``cutoff - 1`` followed by the Euler-Maclaurin tail
    with Bernoulli corrections up to ``B_16``. At ``cutoff = 32`` the
    remainder is below 1e-16 for all ``s > 1`` of practical size.
    """
    s = float(s)
    if not s > 1:
        raise DomainError(f"zeta(s) diverges for s <= 1, got s={s}")
    M = cutoff
    n = np.arange(1, M, dtype=float)
    head = math.fsum(n ** -s)
    tail = M ** (1 - s) / (s - 1) + 0.5 * M ** -s
    rising = s  # s (s+1) ... (s + 2k - 2)
    fact = 2.0  # (2k)!
    for k, b in enumerate(_BERNOULLI, start=1):
        tail += float(b) / fact * rising * M ** (-s - 2 * k + 1)
        rising *= (s + 2 * k - 1) * (s + 2 * k)
        fact *= (2 * k + 1) * (2 * k + 2)
    return head + tail

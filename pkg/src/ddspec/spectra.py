"""Parametric and tabulated noise spectra S(omega).

Angular frequency is in rad/s everywhere. ``S`` is the transform of the
noise correlation ``C(t) = <beta(t) beta(0)>`` over the whole real line, so
``C(0) = (1/pi) int_0^inf S(omega) d omega``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidArgumentError

__all__ = [
    "NoiseSpectrum",
    "PowerLaw",
    "PowerLawPlusWhite",
    "White",
    "GaussianResonance",
    "SumSpectrum",
    "Tabulated",
    "spectrum_eval",
    "parse_spectrum",
]


class NoiseSpectrum:
    """Base class. Subclasses implement ``__call__`` for ``omega > 0``."""

    def __call__(self, omega):
        raise NotImplementedError

    def __add__(self, other):
        if not isinstance(other, NoiseSpectrum):
            return NotImplemented
        return SumSpectrum((self, other))

    def low_frequency_exponent(self) -> float:
        """Largest ``a`` with ``S ~ omega^-a`` as ``omega -> 0`` (0 if bounded)."""
        return 0.0

    def breakpoints(self):
        """Angular frequencies where the integrand has structure worth resolving."""
        return ()

    def check_integrable(self, zero_order: int) -> None:
        """Raise if ``int_0 S(omega) omega^(2 zero_order) d omega`` diverges."""
        a = self.low_frequency_exponent()
        if a >= 2 * zero_order + 1:
            raise DomainError(
                f"coherence integral diverges at omega -> 0: spectrum ~ omega^-{a:g} "
                f"against a filter ~ omega^{2 * zero_order} (need exponent < {2 * zero_order + 1})"
            )


@dataclass(frozen=True)
class PowerLaw(NoiseSpectrum):
    """``S0 / omega^alpha``; ``S0`` carries units of s^(1 - alpha)."""

    S0: float
    alpha: float

    def __post_init__(self):
        if not self.S0 > 0 or not self.alpha > 0:
            raise InvalidArgumentError("PowerLaw needs S0 > 0 and alpha > 0")

    def __call__(self, omega):
        return self.S0 * np.power(omega, -self.alpha)

    def low_frequency_exponent(self):
        return self.alpha


@dataclass(frozen=True)
class White(NoiseSpectrum):
    level: float

    def __post_init__(self):
        if self.level < 0:
            raise InvalidArgumentError("white level must be >= 0")

    def __call__(self, omega):
        return np.full(np.shape(omega), float(self.level)) if np.ndim(omega) else float(self.level)


@dataclass(frozen=True)
class PowerLawPlusWhite(NoiseSpectrum):
    """``S_PLN / omega^alpha_tilde + S_WN``."""

    S_PLN: float
    alpha_tilde: float
    S_WN: float = 0.0

    def __post_init__(self):
        if not self.S_PLN > 0 or not self.alpha_tilde > 0 or self.S_WN < 0:
            raise InvalidArgumentError("need S_PLN > 0, alpha_tilde > 0, S_WN >= 0")

    def __call__(self, omega):
        return self.S_PLN * np.power(omega, -self.alpha_tilde) + self.S_WN

    def low_frequency_exponent(self):
        return self.alpha_tilde


@dataclass(frozen=True)
class GaussianResonance(NoiseSpectrum):
    """``S1 exp(-(omega - omega0)^2 / (2 delta_omega^2))``."""

    S1: float
    omega0: float
    delta_omega: float

    def __post_init__(self):
        if not (self.S1 > 0 and self.omega0 > 0 and self.delta_omega > 0):
            raise InvalidArgumentError("GaussianResonance needs S1, omega0, delta_omega > 0")

    def __call__(self, omega):
        x = (np.asarray(omega, float) - self.omega0) / self.delta_omega
        return self.S1 * np.exp(-0.5 * x * x)

    def breakpoints(self):
        return tuple(self.omega0 + k * self.delta_omega for k in (-8, -3, 0, 3, 8)
                     if self.omega0 + k * self.delta_omega > 0)


@dataclass(frozen=True)
class SumSpectrum(NoiseSpectrum):
    components: tuple = field(default=())

    def __post_init__(self):
        flat = []
        for c in self.components:
            flat.extend(c.components if isinstance(c, SumSpectrum) else [c])
        object.__setattr__(self, "components", tuple(flat))

    def __call__(self, omega):
        return sum(c(omega) for c in self.components)

    def low_frequency_exponent(self):
        return max((c.low_frequency_exponent() for c in self.components), default=0.0)

    def breakpoints(self):
        return tuple(b for c in self.components for b in c.breakpoints())


@dataclass(frozen=True, eq=False)
class Tabulated(NoiseSpectrum):
    """Sampled spectrum, interpolated linearly in log-log coordinates.

    Outside the grid the boundary segment's power law is continued.
    Zero samples are not allowed because they have no logarithm.
    """

    omega_grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.omega_grid, float)
        v = np.asarray(self.values, float)
        if w.ndim != 1 or w.shape != v.shape or len(w) < 2:
            raise InvalidArgumentError("need matching 1-d grids with at least two samples")
        if np.any(w <= 0) or np.any(np.diff(w) <= 0):
            raise InvalidArgumentError("omega grid must be positive and strictly ascending")
        if np.any(v <= 0):
            raise InvalidArgumentError("tabulated values must be positive for log-log interpolation")
        object.__setattr__(self, "omega_grid", w)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "_lw", np.log(w))
        object.__setattr__(self, "_lv", np.log(v))

    def __call__(self, omega):
        lx = np.log(np.asarray(omega, float))
        lw, lv = self._lw, self._lv
        y = np.interp(lx, lw, lv)
        lo_slope = (lv[1] - lv[0]) / (lw[1] - lw[0])
        hi_slope = (lv[-1] - lv[-2]) / (lw[-1] - lw[-2])
        y = np.where(lx < lw[0], lv[0] + lo_slope * (lx - lw[0]), y)
        y = np.where(lx > lw[-1], lv[-1] + hi_slope * (lx - lw[-1]), y)
        return np.exp(y)

    def low_frequency_exponent(self):
        return max(0.0, -(self._lv[1] - self._lv[0]) / (self._lw[1] - self._lw[0]))

    def breakpoints(self):
        return tuple(self.omega_grid)


def spectrum_eval(spec: NoiseSpectrum, omega):
    """Evaluate ``spec`` at strictly positive angular frequencies."""
    w = np.asarray(omega, float)
    if np.any(~(w > 0)):
        raise InvalidArgumentError("spectrum is only defined for omega > 0")
    out = spec(w)
    return float(out) if np.ndim(out) == 0 else out


_KINDS = {
    "powerlaw": (PowerLaw, ("S0", "alpha")),
    "white": (White, ("level",)),
    "plw": (PowerLawPlusWhite, ("S_PLN", "alpha_tilde", "S_WN")),
    "gauss": (GaussianResonance, ("S1", "omega0_rad_per_s", "delta_omega_rad_per_s")),
}


def parse_spectrum(text: str) -> NoiseSpectrum:
    """Parse an inline spectrum description.

    Grammar: ``kind:key=value,key=value`` joined by ``+`` for sums, e.g.
    ``powerlaw:S0=1288,alpha=0.89+gauss:S1=50,omega0_rad_per_s=628.3,delta_omega_rad_per_s=12.6``.
    Kinds and keys are those of ``_KINDS``. A string naming an existing
    file is read as a two-column CSV ``omega_rad_per_s,S``.
    """
    import os

    text = text.strip()
    if os.path.isfile(text):
        from .io import load_spectrum_table

        return load_spectrum_table(text)
    parts = [p for p in text.split("+") if p.strip()]
    if not parts:
        raise InvalidArgumentError("empty spectrum description")
    comps = []
    for part in parts:
        kind, _, rest = part.strip().partition(":")
        if kind not in _KINDS:
            raise InvalidArgumentError(f"unknown spectrum kind {kind!r}; choose from {sorted(_KINDS)}")
        cls, keys = _KINDS[kind]
        kv = {}
        for item in filter(None, rest.split(",")):
            k, eq, v = item.partition("=")
            if not eq:
                raise InvalidArgumentError(f"expected key=value, got {item!r}")
            kv[k.strip()] = float(v)
        missing = [k for k in keys if k not in kv and not (cls is PowerLawPlusWhite and k == "S_WN")]
        extra = set(kv) - set(keys)
        if missing or extra:
            raise InvalidArgumentError(f"{kind}: expected keys {keys}, got {sorted(kv)}")
        args = [kv.get(k, 0.0) for k in keys]
        comps.append(cls(*args))
    if any(not math.isfinite(a) for c in comps for a in getattr(c, "__dict__", {}).values()
           if isinstance(a, float)):
        raise InvalidArgumentError("spectrum parameters must be finite")
    return comps[0] if len(comps) == 1 else SumSpectrum(tuple(comps))

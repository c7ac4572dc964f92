"""Construction of delta-shaped pi-pulse sequences.

A sequence is fully described by its total length ``T`` and the ordered
pulse times ``0 < t_1 < ... < t_N < T``. Between pulses the noise enters the
qubit phase with a toggling sign ``+1, -1, +1, ...``.
"""
from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidArgumentError

__all__ = [
    "Family",
    "PulseSequence",
    "make_ramsey",
    "make_cpmg",
    "make_uhrig",
    "make_custom",
    "toggling_sign",
    "parse_sequence_spec",
    "read_sequence_file",
    "write_sequence_file",
]


class Family(str, enum.Enum):
    RAMSEY = "ramsey"
    CPMG = "cpmg"
    UHRIG = "uhrig"
    CUSTOM = "custom"


@dataclass(frozen=True)
class PulseSequence:
    """Immutable pi-pulse sequence.

    Parameters
    ----------
    total_time : float
        Sequence length ``T`` in seconds.
    pulse_times : tuple of float
        Strictly increasing pulse times inside ``(0, T)``.
    family : Family
        Tag recording how the sequence was built.
    """

    total_time: float
    pulse_times: tuple = field(default=())
    family: Family = Family.CUSTOM

    def __post_init__(self):
        T = float(self.total_time)
        if not (math.isfinite(T) and T > 0):
            raise InvalidArgumentError(f"total time must be positive, got {self.total_time!r}")
        times = tuple(float(t) for t in self.pulse_times)
        object.__setattr__(self, "total_time", T)
        object.__setattr__(self, "pulse_times", times)
        object.__setattr__(self, "family", Family(self.family))
        if times:
            arr = np.asarray(times)
            if not np.all(np.isfinite(arr)):
                raise InvalidArgumentError("pulse times must be finite")
            if arr[0] <= 0 or arr[-1] >= T:
                raise InvalidArgumentError("pulse times must lie strictly inside (0, T)")
            if np.any(np.diff(arr) <= 0):
                raise InvalidArgumentError("pulse times must be strictly increasing")
        if self.family is Family.RAMSEY and times:
            raise InvalidArgumentError("a Ramsey sequence has no pi-pulses")

    @property
    def n_pulses(self) -> int:
        return len(self.pulse_times)

    @property
    def fractions(self) -> np.ndarray:
        """Pulse times in units of the total time (extended precision)."""
        if self.family is Family.CPMG:
            j = np.arange(1, self.n_pulses + 1, dtype=np.longdouble)
            return (2 * j - 1) / (2 * np.longdouble(self.n_pulses))
        return np.asarray(self.pulse_times, np.longdouble) / np.longdouble(self.total_time)

    def scaled(self, total_time: float) -> "PulseSequence":
        """Same pulse pattern stretched to a new total time."""
        if self.family is Family.CPMG:
            return make_cpmg(self.n_pulses, total_time)
        if self.family is Family.UHRIG:
            return make_uhrig(self.n_pulses, total_time)
        if self.family is Family.RAMSEY:
            return make_ramsey(total_time)
        return PulseSequence(total_time, tuple((self.fractions * total_time).astype(float)), self.family)

    def segments(self):
        """Return ``(edges, signs)`` with ``len(edges) == N + 2``."""
        edges = np.concatenate(([0.0], self.pulse_times, [self.total_time]))
        signs = (-1.0) ** np.arange(self.n_pulses + 1)
        return edges, signs


def _check_T(T):
    if not (isinstance(T, (int, float, np.floating, np.integer)) and math.isfinite(T) and T > 0):
        raise InvalidArgumentError(f"T must be a positive number of seconds, got {T!r}")


def make_ramsey(T: float) -> PulseSequence:
    _check_T(T)
    return PulseSequence(T, (), Family.RAMSEY)


def make_cpmg(N: int, T: float) -> PulseSequence:
    """N-CPMG sequence, ``t_j = (2j - 1) T / (2N)``; ``N = 0`` gives Ramsey."""
    _check_T(T)
    N = int(N)
    if N < 0:
        raise InvalidArgumentError(f"pulse count must be >= 0, got {N}")
    if N == 0:
        return make_ramsey(T)
    j = np.arange(1, N + 1)
    return PulseSequence(T, tuple((2 * j - 1) * T / (2 * N)), Family.CPMG)


def make_uhrig(N: int, T: float) -> PulseSequence:
    """Uhrig sequence, ``t_j = T sin^2(j pi / (2N + 2))``."""
    _check_T(T)
    N = int(N)
    if N < 1:
        raise InvalidArgumentError("Uhrig sequence needs N >= 1; use make_cpmg(0, T) for Ramsey")
    j = np.arange(1, N + 1)
    times = T * np.sin(j * np.pi / (2 * N + 2)) ** 2
    # enforce exact mirror symmetry about T/2
    times = 0.5 * (times + (T - times[::-1]))
    return PulseSequence(T, tuple(times), Family.UHRIG)


def make_custom(T: float, pulse_times: Sequence[float]) -> PulseSequence:
    _check_T(T)
    return PulseSequence(T, tuple(pulse_times), Family.CUSTOM)


def toggling_sign(seq: PulseSequence, t: float) -> int:
    """Sign of the noise coupling at time ``t``.

    A pulse at exactly ``t`` counts as already applied.
    """
    if not (0.0 <= t <= seq.total_time):
        raise InvalidArgumentError(f"t={t!r} outside [0, {seq.total_time}]")
    fired = int(np.searchsorted(seq.pulse_times, t, side="right"))
    return -1 if fired % 2 else 1


def parse_sequence_spec(text: str, T: float) -> PulseSequence:
    """Build a sequence from ``"cpmg:N"``, ``"uhrig:N"`` or ``"ramsey"``."""
    family, _, count = text.strip().lower().partition(":")
    if family == "ramsey":
        return make_ramsey(T)
    try:
        n = int(count)
    except ValueError:
        raise InvalidArgumentError(f"bad sequence spec {text!r}; expected family:N") from None
    if family == "cpmg":
        return make_cpmg(n, T)
    if family == "uhrig":
        return make_uhrig(n, T)
    raise InvalidArgumentError(f"unknown sequence family {family!r}")


def write_sequence_file(seq: PulseSequence, path) -> None:
    """Write the ``T=<seconds>`` header followed by one pulse time per line."""
    lines = [f"T={seq.total_time!r}"] + [repr(t) for t in seq.pulse_times]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_sequence_file(path: str | os.PathLike) -> PulseSequence:
    from .errors import DataValidationError

    with open(path) as fh:
        lines = [ln.strip() for ln in fh]
    while lines and not lines[-1]:
        lines.pop()
    if not lines or not lines[0].startswith("T="):
        raise DataValidationError("expected header 'T=<seconds>'", row=1)
    try:
        T = float(lines[0][2:])
    except ValueError:
        raise DataValidationError("total time is not a number", row=1) from None
    times = []
    for k, ln in enumerate(lines[1:], start=2):
        try:
            times.append(float(ln))
        except ValueError:
            raise DataValidationError(f"not a number: {ln!r}", row=k) from None
    try:
        return make_custom(T, times)
    except InvalidArgumentError as exc:
        raise DataValidationError(str(exc)) from None

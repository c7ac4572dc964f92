"""CSV/JSON readers and writers with fixed, exact headers."""
from __future__ import annotations

import csv
import json
import math
import os
from collections import OrderedDict

import numpy as np

from .errors import DataValidationError
from .estimation.visibility import FringeScan, VisibilityDataset
from .spectra import Tabulated
from .stochastic import TimeSeries

__all__ = [
    "SCHEMAS",
    "read_table",
    "load_dataset",
    "load_spectrum_table",
    "write_csv",
    "write_json",
    "format_float",
]

SCHEMAS = {
    "fringes": ("n_pulses", "T_s", "phase_deg", "atoms", "atoms_err"),
    "lifetime": ("T_s", "atoms", "atoms_err"),
    "timeseries": ("t_s", "value"),
    "visibility": ("n_pulses", "T_s", "V", "V_err"),
    "bfield": ("B_coil_mG", "atoms", "atoms_err"),
    "mw": ("dnu_hz", "atoms", "atoms_err"),
    "psd": ("omega_rad_per_s", "psd"),
    "spectrum": ("omega_rad_per_s", "S"),
}
# columns that must be strictly positive
_POSITIVE = {"atoms_err", "V_err", "T_s", "omega_rad_per_s"}


def read_table(path, schema: str) -> dict:
    """Read a CSV whose header must equal ``SCHEMAS[schema]`` exactly.

    Returns a dict of float arrays keyed by column name. Errors carry the
    1-based file row (header is row 1) and the column name.
    """
    cols = SCHEMAS[schema]
    expected = ",".join(cols)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or ",".join(c.strip() for c in rows[0]) != expected:
        raise DataValidationError(f"expected {expected}", row=1)
    data = {c: [] for c in cols}
    for r, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(cols):
            raise DataValidationError(f"expected {len(cols)} fields, got {len(row)}", row=r)
        for c, cell in zip(cols, row):
            try:
                v = float(cell)
            except ValueError:
                raise DataValidationError(f"not a number: {cell!r}", row=r, column=c) from None
            if not math.isfinite(v):
                raise DataValidationError("value is not finite", row=r, column=c)
            if c in _POSITIVE and not v > 0:
                raise DataValidationError(f"must be positive, got {cell.strip()}", row=r, column=c)
            if c == "n_pulses" and (v < 0 or v != int(v)):
                raise DataValidationError("pulse number must be a non-negative integer", row=r, column=c)
            data[c].append(v)
    if not data[cols[0]]:
        raise DataValidationError("file contains no data rows")
    return {c: np.asarray(v) for c, v in data.items()}


def _load_fringes(path):
    t = read_table(path, "fringes")
    groups = OrderedDict()
    for i, (n, T) in enumerate(zip(t["n_pulses"].astype(int), t["T_s"])):
        groups.setdefault(int(n), OrderedDict()).setdefault(float(T), []).append(i)
    out = []
    for n, by_T in groups.items():
        scans = []
        for T, idx in by_T.items():
            idx = np.asarray(idx)
            order = idx[np.argsort(t["phase_deg"][idx], kind="stable")]
            scans.append(FringeScan(T, t["phase_deg"][order], t["atoms"][order], t["atoms_err"][order]))
        out.append(VisibilityDataset(n, fringes=tuple(sorted(scans, key=lambda s: s.T))))
    return out


def _load_visibility(path):
    t = read_table(path, "visibility")
    out = []
    for n in OrderedDict.fromkeys(t["n_pulses"].astype(int)):
        m = t["n_pulses"] == n
        order = np.argsort(t["T_s"][m], kind="stable")
        out.append(VisibilityDataset(int(n), t["T_s"][m][order], t["V"][m][order], t["V_err"][m][order]))
    return out


def _load_timeseries(path):
    t = read_table(path, "timeseries")
    ts = t["t_s"]
    if len(ts) < 2:
        raise DataValidationError("a time series needs at least two rows")
    steps = np.diff(ts)
    dt = float(np.mean(steps))
    bad = np.flatnonzero(np.abs(steps - dt) > 1e-6 * abs(dt))
    if not dt > 0 or bad.size:
        row = int(bad[0]) + 3 if bad.size else 3
        raise DataValidationError("time stamps must be uniformly spaced and increasing", row=row, column="t_s")
    return TimeSeries(dt, t["value"])


def load_spectrum_table(path) -> Tabulated:
    t = read_table(path, "spectrum")
    if np.any(np.diff(t["omega_rad_per_s"]) <= 0):
        raise DataValidationError("omega must be strictly ascending", column="omega_rad_per_s")
    if np.any(t["S"] <= 0):
        raise DataValidationError("spectrum values must be positive", column="S")
    return Tabulated(t["omega_rad_per_s"], t["S"])


def load_dataset(path, schema: str):
    """Parse and validate a data file into the matching typed object.

    ``fringes`` and ``visibility`` give a list of :class:`VisibilityDataset`
    (one per pulse number), ``timeseries`` a :class:`TimeSeries`,
    ``spectrum`` a :class:`Tabulated` spectrum, anything else the dict of
    columns from :func:`read_table`.
    """
    if schema not in SCHEMAS:
        raise DataValidationError(f"unknown schema {schema!r}")
    if not os.path.exists(path):
        raise DataValidationError(f"no such file: {path}")
    if schema == "fringes":
        return _load_fringes(path)
    if schema == "visibility":
        return _load_visibility(path)
    if schema == "timeseries":
        return _load_timeseries(path)
    if schema == "spectrum":
        return load_spectrum_table(path)
    return read_table(path, schema)


def format_float(x) -> str:
    """Shortest round-tripping text for a float; integers stay integral."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return repr(float(x))


def write_csv(path, header, rows) -> None:
    """Write rows under ``header``; ``path='-'`` writes to stdout."""
    import sys

    lines = [",".join(header)] + [",".join(format_float(v) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if str(path) == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def write_json(path, obj) -> None:
    import sys

    text = json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"
    if str(path) == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)

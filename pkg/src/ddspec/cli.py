"""Command-line interface: ``ddspec <command> [options]``.

Exit codes: 0 success, 2 usage, 3 data validation, 4 numerical failure.
Any option can also come from ``--config FILE`` holding ``key = value``
lines (keys are the option names with dashes as underscores); options
given on the command line win.
"""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import coherence, filters, sequences, spectra, stochastic
from .errors import (
    BracketError,
    DataValidationError,
    DegenerateFitError,
    DomainError,
    InvalidArgumentError,
)
from .io import load_dataset, write_csv, write_json

log = logging.getLogger("ddspec")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4


class NumericalFailure(RuntimeError):
    pass


def read_config(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for k, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, eq, value = line.partition("=")
            if not eq or not key.strip():
                raise InvalidArgumentError(f"{path}:{k}: expected key = value")
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _grid(args):
    if args.tsteps < 1 or not 0 < args.tmin_s <= args.tmax_s:
        raise InvalidArgumentError("need 0 < tmin_s <= tmax_s and tsteps >= 1")
    return np.linspace(args.tmin_s, args.tmax_s, args.tsteps)


def cmd_sequence(args):
    T = args.T_s
    fam = args.family.lower()
    if fam == "cpmg":
        seq = sequences.make_cpmg(args.n, T)
    elif fam == "uhrig":
        seq = sequences.make_uhrig(args.n, T)
    elif fam == "ramsey":
        seq = sequences.make_ramsey(T)
    else:
        raise InvalidArgumentError(f"unknown family {args.family!r}")
    if args.out == "-":
        sys.stdout.write("\n".join([f"T={seq.total_time!r}"] + [repr(t) for t in seq.pulse_times]) + "\n")
    else:
        sequences.write_sequence_file(seq, args.out)


def cmd_filter(args):
    seq = sequences.parse_sequence_spec(args.sequence, args.T_s)
    omega = np.linspace(args.omega_min_rad_per_s, args.omega_max_rad_per_s, args.n_omega)
    variants = ["exact", "closed", "sinc"] if args.variant == "all" else [args.variant]
    rows = []
    for v in variants:
        rows.extend((r.omega, r.value, r.variant.value) for r in filters.evaluate(seq, omega, v, args.k_max))
    write_csv(args.out, ("omega_rad_per_s", "g", "variant"), rows)


def cmd_coherence(args):
    spec = spectra.parse_spectrum(args.spectrum)
    rows = []
    for T in _grid(args):
        r = coherence.chi_numeric(spec, sequences.parse_sequence_spec(args.sequence, T),
                                  omega_ir=args.omega_ir_rad_per_s)
        rows.append((T, r.chi, r.visibility))
    write_csv(args.out, ("T_s", "chi", "visibility"), rows)


def cmd_simulate(args):
    spec = spectra.parse_spectrum(args.spectrum)
    rows = []
    for k, T in enumerate(_grid(args)):
        seq = sequences.parse_sequence_spec(args.sequence, T)
        est = stochastic.mc_visibility(spec, seq, args.ntraj, args.seed + k)
        ir = None
        if seq.n_pulses == 0:
            dt, n = stochastic.default_grid(T)
            a = spec.low_frequency_exponent()
            ir = stochastic.infrared_cutoff(dt, n, a if 0 < a < 1 else None)
        v = coherence.chi_numeric(spec, seq, omega_ir=ir).visibility
        rows.append((T, est.visibility_mean, est.std_error, v))
    write_csv(args.out, ("T_s", "V_mc", "stderr", "V_analytic"), rows)


def _fit_json(fit, extra=None):
    d = fit.to_dict()
    if extra:
        d.update(extra)
    return d


def _check_converged(fit):
    if not fit.converged:
        raise NumericalFailure(f"fit did not converge: {fit.message}")


def cmd_fit_visibility(args):
    from .estimation import fit_dataset_fringes, fit_lifetime, global_visibility_fit, normalize_fringes
    from .estimation.visibility import VisibilityDataset

    if bool(args.fringes) == bool(args.visibility):
        raise InvalidArgumentError("give exactly one of --fringes or --visibility")
    if args.visibility:
        datasets = load_dataset(args.visibility, "visibility")
    else:
        raw = load_dataset(args.fringes, "fringes")
        n_cs0, tau = args.n_cs0, args.lifetime_s
        if args.lifetime_csv:
            t = load_dataset(args.lifetime_csv, "lifetime")
            life = fit_lifetime(t["T_s"], t["atoms"], t["atoms_err"])
            _check_converged(life)
            tau = life["tau_LT"]
            n_cs0 = n_cs0 if n_cs0 is not None else life["N0"]
        if n_cs0 is None or tau is None:
            raise InvalidArgumentError("normalization needs --n-cs0 and --lifetime-s (or --lifetime-csv)")
        datasets = [fit_dataset_fringes(normalize_fringes(
            VisibilityDataset(d.n_pulses, fringes=d.fringes, lifetime_tau=tau, n_cs0=n_cs0)))
            for d in raw]
    init = {}
    if args.S0 is not None:
        init["S0"] = args.S0
    if args.alpha is not None:
        init["alpha"] = args.alpha
    fit = global_visibility_fit(datasets, init=init)
    _check_converged(fit)
    write_json(args.out, _fit_json(fit))


def cmd_fit_fringe(args):
    from .estimation import fit_fringe

    out = []
    for ds in load_dataset(args.fringes, "fringes"):
        for f in ds.fringes:
            r = fit_fringe(f.phase_deg, f.population, f.sigma)
            entry = {"n_pulses": ds.n_pulses, "T_s": f.T, "visibility": r.visibility,
                     "visibility_err": r.visibility_err, "degenerate": r.degenerate}
            if r.fit is not None:
                entry.update(r.fit.to_dict())
                entry["params"]["Phi"] = r.Phi
            out.append(entry)
    write_json(args.out, {"fringes": out})


def cmd_fit_lifetime(args):
    from .estimation import fit_lifetime

    t = load_dataset(args.data, "lifetime")
    fit = fit_lifetime(t["T_s"], t["atoms"], t["atoms_err"])
    write_json(args.out, _fit_json(fit))
    _check_converged(fit)


def cmd_psd(args):
    from .estimation import welch_psd

    ts = load_dataset(args.data, "timeseries")
    omega, p = welch_psd(ts, args.segment_len, args.overlap, args.window)
    # the DC bin is dropped so the file reloads under the psd schema
    write_csv(args.out, ("omega_rad_per_s", "psd"), zip(omega[1:], p[1:]))


def cmd_fit_psd(args):
    from .estimation import fit_psd_powerlaw_white, welch_psd

    if bool(args.data) == bool(args.timeseries):
        raise InvalidArgumentError("give exactly one of --data (PSD csv) or --timeseries")
    if args.data:
        t = load_dataset(args.data, "psd")
        omega, p = t["omega_rad_per_s"], t["psd"]
    else:
        omega, p = welch_psd(load_dataset(args.timeseries, "timeseries"), args.segment_len)
    fit = fit_psd_powerlaw_white(omega, p, n_bins=args.n_bins, omega_min=args.omega_min_rad_per_s,
                                 omega_max=args.omega_max_rad_per_s)
    write_json(args.out, _fit_json(fit))
    _check_converged(fit)


def cmd_calibrate_b(args):
    from .estimation import fit_bfield_spectrum

    t = load_dataset(args.data, "bfield")
    fit = fit_bfield_spectrum(t["B_coil_mG"], t["atoms"], args.omega_r_rad_per_s, args.tau_s, sigma=t["atoms_err"])
    write_json(args.out, _fit_json(fit))
    _check_converged(fit)


def cmd_reproduce(args):
    from .reproduce import run

    outdir = args.out if args.out != "-" else "reproduce_out"
    summary = run(outdir, seed=args.seed, n_traj=args.ntraj)
    log.info("wrote %s: alpha=%.4f S0=%.1f", outdir, summary["alpha"], summary["S0"])


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ddspec", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--config", help="key = value file supplying defaults")
        sp.add_argument("-o", "--out", default="-", help="output path ('-' for stdout)")
        sp.add_argument("--seed", type=int, default=2024)
        sp.set_defaults(func=func)
        return sp

    s = add("sequence", cmd_sequence, "emit pulse times of a sequence")
    s.add_argument("--family", required=True, help="cpmg, uhrig or ramsey")
    s.add_argument("--n", type=int, default=0)
    s.add_argument("--T_s", type=float, required=True)

    s = add("filter", cmd_filter, "filter function on a frequency grid")
    s.add_argument("--sequence", required=True, help="cpmg:N, uhrig:N or ramsey")
    s.add_argument("--T_s", type=float, required=True)
    s.add_argument("--omega-min-rad-per-s", dest="omega_min_rad_per_s", type=float, default=0.0)
    s.add_argument("--omega-max-rad-per-s", dest="omega_max_rad_per_s", type=float, required=True)
    s.add_argument("--n-omega", dest="n_omega", type=int, default=500)
    s.add_argument("--variant", default="exact", choices=["exact", "closed", "sinc", "all"])
    s.add_argument("--k-max", dest="k_max", type=int, default=None)

    def grid(sp):
        sp.add_argument("--spectrum", required=True, help="inline spectrum or CSV file")
        sp.add_argument("--sequence", required=True, help="cpmg:N, uhrig:N or ramsey")
        sp.add_argument("--tmin-s", dest="tmin_s", type=float, required=True)
        sp.add_argument("--tmax-s", dest="tmax_s", type=float, required=True)
        sp.add_argument("--tsteps", type=int, default=20)

    s = add("coherence", cmd_coherence, "coherence integral and visibility over a T grid")
    grid(s)
    s.add_argument("--omega-ir-rad-per-s", dest="omega_ir_rad_per_s", type=float, default=None,
                   help="optional infrared cutoff")

    s = add("simulate", cmd_simulate, "Monte-Carlo visibility against the quadrature")
    grid(s)
    s.add_argument("--ntraj", type=int, default=2000)

    s = add("fit-visibility", cmd_fit_visibility, "global (S0, alpha) fit")
    s.add_argument("--fringes", help="fringes.csv")
    s.add_argument("--visibility", help="CSV n_pulses,T_s,V,V_err")
    s.add_argument("--n-cs0", dest="n_cs0", type=float)
    s.add_argument("--lifetime-s", dest="lifetime_s", type=float)
    s.add_argument("--lifetime-csv", dest="lifetime_csv")
    s.add_argument("--S0", type=float)
    s.add_argument("--alpha", type=float)

    s = add("fit-fringe", cmd_fit_fringe, "fit every fringe of a fringes.csv")
    s.add_argument("--fringes", required=True)

    s = add("fit-lifetime", cmd_fit_lifetime, "exponential lifetime fit")
    s.add_argument("--data", required=True, help="lifetime.csv")

    s = add("psd", cmd_psd, "Welch PSD of a time series")
    s.add_argument("--data", required=True, help="timeseries.csv")
    s.add_argument("--segment-len", dest="segment_len", type=int, default=4096)
    s.add_argument("--overlap", type=float, default=0.5)
    s.add_argument("--window", default="hann", choices=["hann", "rect"])

    s = add("fit-psd", cmd_fit_psd, "power-law plus white fit of a PSD")
    s.add_argument("--data", help="CSV omega_rad_per_s,psd")
    s.add_argument("--timeseries", help="timeseries.csv (PSD computed first)")
    s.add_argument("--segment-len", dest="segment_len", type=int, default=4096)
    s.add_argument("--n-bins", dest="n_bins", type=int, default=60)
    s.add_argument("--omega-min-rad-per-s", dest="omega_min_rad_per_s", type=float)
    s.add_argument("--omega-max-rad-per-s", dest="omega_max_rad_per_s", type=float)

    s = add("calibrate-b", cmd_calibrate_b, "coil-field resonance fit")
    s.add_argument("--data", required=True, help="CSV B_coil_mG,atoms,atoms_err")
    s.add_argument("--omega-r-rad-per-s", dest="omega_r_rad_per_s", type=float, default=2 * np.pi * 2180.0,
                   help="resonant Rabi frequency")
    s.add_argument("--tau-s", dest="tau_s", type=float, default=243.9e-6)

    s = add("reproduce", cmd_reproduce, "full synthetic pipeline into a directory")
    s.add_argument("--ntraj", type=int, default=2000)
    return p


def _config_path(argv):
    for i, a in enumerate(argv):
        if a == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if a.startswith("--config="):
            return a.split("=", 1)[1]
    return None


def _apply_config(parser, argv):
    """Install config-file values as parser defaults so explicit flags win."""
    argv = list(sys.argv[1:] if argv is None else argv)
    path = _config_path(argv)
    if path is not None:
        choices = parser._subparsers._group_actions[0].choices
        command = next((a for a in argv if a in choices), None)
        if command is None:
            return parser.parse_args(argv)
        sub = choices[command]
        known = {a.dest: a for a in sub._actions}
        defaults = {}
        for k, v in read_config(path).items():
            if k not in known or k in ("config", "help"):
                raise InvalidArgumentError(f"unknown config key {k!r} for {command}")
            act = known[k]
            try:
                defaults[k] = act.type(v) if act.type else v
            except ValueError:
                raise InvalidArgumentError(f"config key {k!r}: bad value {v!r}") from None
            act.required = False
        sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (InvalidArgumentError, OSError) as exc:
        print(f"ddspec: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except DataValidationError as exc:
        print(f"ddspec: invalid data: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (BracketError, DegenerateFitError, DomainError, NumericalFailure) as exc:
        print(f"ddspec: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except InvalidArgumentError as exc:
        print(f"ddspec: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""Dephasing of qubits under delta-pulse dynamical decoupling.

Forward model (filter functions, coherence integral), a Monte-Carlo oracle,
and the inverse problem of extracting noise-spectrum parameters from
visibility decays and measured PSDs.
"""
from .coherence import (
    CoherenceResult,
    chi_analytic_cpmg,
    chi_numeric,
    chi_powerlaw,
    dip_times,
    riemann_zeta,
    tau1_analytic,
    tau_c_analytic,
    tau_c_numeric,
)
from .errors import (
    BracketError,
    DataValidationError,
    DegenerateFitError,
    DomainError,
    InvalidArgumentError,
)
from .filters import (
    filter_cpmg_closed,
    filter_cpmg_sinc,
    filter_exact,
    peak_frequencies,
)
from .sequences import (
    Family,
    PulseSequence,
    make_cpmg,
    make_custom,
    make_ramsey,
    make_uhrig,
    toggling_sign,
)
from .spectra import (
    GaussianResonance,
    NoiseSpectrum,
    PowerLaw,
    PowerLawPlusWhite,
    SumSpectrum,
    Tabulated,
    White,
    spectrum_eval,
)
from .stochastic import (
    McEstimate,
    TimeSeries,
    accumulate_phase,
    generate_noise,
    mc_visibility,
)

__version__ = "0.1.0"

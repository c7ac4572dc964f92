"""Inverse problems: least squares, fit models, visibility and PSD fits."""
from .lm import FitResult, covariance_from_jacobian, curve_fit, lm_least_squares
from .models import (
    THEORY_SHIFT_HZ,
    ZEEMAN_SLOPE_HZ_PER_MG,
    FringeFit,
    bfield_spectrum_model,
    fit_bfield_spectrum,
    fit_fringe,
    fit_lifetime,
    fit_mw_spectrum,
    fit_ramsey_population,
    fringe_model,
    fringe_visibility,
    lifetime_model,
    mw_spectrum_model,
    ramsey_population_model,
)
from .psd import fit_psd_powerlaw_white, psd_model, rebin_log, welch_psd
from .visibility import (
    FringeScan,
    VisibilityDataset,
    coherence_time_table,
    fit_dataset_fringes,
    global_visibility_fit,
    normalization_divisor,
    normalize_fringes,
    synthetic_fringe_dataset,
    synthetic_visibility_dataset,
    visibility_model,
)

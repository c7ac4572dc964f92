"""Weighted nonlinear least squares.

A thin layer over :func:`scipy.optimize.least_squares` that fixes the
convergence criteria, computes the parameter covariance and reports the
outcome as a :class:`FitResult`.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from ..errors import DegenerateFitError, InvalidArgumentError

__all__ = ["FitResult", "lm_least_squares", "curve_fit", "covariance_from_jacobian"]

MAX_ITER = 500
XTOL = 1e-8
FTOL = 1e-10


@dataclass
class FitResult:
    """Outcome of a least-squares fit.

    ``residual_norm`` is the Euclidean norm of the weighted residuals, so
    its square is the chi-square when uncertainties were supplied.
    """

    names: tuple
    values: np.ndarray
    covariance: np.ndarray
    residual_norm: float
    n_iterations: int
    converged: bool
    dof: int = 0
    message: str = ""
    flags: dict = field(default_factory=dict)

    @property
    def params(self) -> dict:
        return dict(zip(self.names, map(float, self.values)))

    @property
    def errors(self) -> dict:
        d = np.sqrt(np.clip(np.diag(self.covariance), 0, None))
        return dict(zip(self.names, map(float, d)))

    def __getitem__(self, name):
        return self.params[name]

    def to_dict(self) -> dict:
        return {
            "params": self.params,
            "uncertainties": self.errors,
            "residual_norm": float(self.residual_norm),
            "converged": bool(self.converged),
            "n_iterations": int(self.n_iterations),
            "flags": {k: (bool(v) if isinstance(v, (bool, np.bool_)) else v)
                      for k, v in self.flags.items()},
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def covariance_from_jacobian(jac, rcond=1e-7):
    """``(J^T J)^-1`` via SVD; raises :class:`DegenerateFitError` if singular.

    Columns are normalized first so the singularity test ignores parameter
    units. ``rcond`` sits above the ~1e-8 noise of finite-difference columns.
    """
    jac = np.atleast_2d(np.asarray(jac, float))
    if not np.all(np.isfinite(jac)):
        raise DegenerateFitError("Jacobian is not finite")
    norm = np.linalg.norm(jac, axis=0)
    if np.any(norm == 0):
        raise DegenerateFitError("a parameter has no influence on the residuals")
    _, s, vt = np.linalg.svd(jac / norm, full_matrices=False)
    if s.size == 0 or s[-1] <= rcond * s[0]:
        raise DegenerateFitError("normal matrix is singular; parameters are not identifiable")
    cov = (vt.T / s**2) @ vt / np.outer(norm, norm)
    return 0.5 * (cov + cov.T)


def lm_least_squares(residuals, p0, bounds=None, names=None, absolute_sigma=False,
                     max_iter=MAX_ITER, jac="2-point", x_scale="jac") -> FitResult:
    """Minimize ``sum(residuals(p)**2)`` starting from ``p0``.

    Without bounds this is MINPACK's Levenberg-Marquardt; with bounds it is
    the trust-region reflective solver, which reduces to the same damped
    Gauss-Newton step away from the bounds. Convergence is declared on a
    relative step below 1e-8 or a relative cost change below 1e-10.

    The covariance is the inverse normal matrix, scaled by the reduced
    chi-square unless ``absolute_sigma`` is set. A singular normal matrix
    raises :class:`DegenerateFitError`.
    """
    p0 = np.asarray(p0, float)
    names = tuple(names) if names is not None else tuple(f"p{i}" for i in range(len(p0)))
    if len(names) != len(p0):
        raise InvalidArgumentError("one name per parameter is required")
    r0 = np.asarray(residuals(p0), float)
    if not np.all(np.isfinite(r0)):
        raise InvalidArgumentError("residuals are not finite at the initial point")
    if bounds is None:
        lo = np.full(len(p0), -np.inf)
        hi = np.full(len(p0), np.inf)
    else:
        lo, hi = (np.broadcast_to(np.asarray(b, float), p0.shape).copy() for b in bounds)
        if np.any(p0 < lo) or np.any(p0 > hi):
            raise InvalidArgumentError("initial parameters lie outside the bounds")
    bounded = np.any(np.isfinite(lo)) or np.any(np.isfinite(hi))
    if bounded:
        # trf needs a strictly feasible start
        span = np.where(np.isfinite(hi - lo), hi - lo, np.abs(p0) + 1.0)
        p0 = np.clip(p0, lo + 1e-10 * span, hi - 1e-10 * span)
    method = "trf" if bounded or len(r0) < len(p0) else "lm"
    if method == "lm" and x_scale == "jac":
        x_scale = 1.0 if isinstance(jac, str) else x_scale
    res = optimize.least_squares(
        residuals, p0, jac=jac, bounds=(lo, hi) if bounded else (-np.inf, np.inf),
        method=method, xtol=XTOL, ftol=FTOL, gtol=1e-15, max_nfev=max_iter * (1 if method == "trf" else len(p0) + 1),
        x_scale=x_scale if method == "trf" else 1.0,
    )
    dof = len(res.fun) - len(p0)
    cov = covariance_from_jacobian(res.jac)
    chi2 = float(res.fun @ res.fun)
    if not absolute_sigma and dof > 0:
        cov = cov * (chi2 / dof)
    at_bound = (np.isclose(res.x, lo, rtol=1e-6, atol=0) | np.isclose(res.x, hi, rtol=1e-6, atol=0)
                | (res.active_mask != 0))
    return FitResult(
        names=names,
        values=res.x,
        covariance=cov,
        residual_norm=float(np.sqrt(chi2)),
        n_iterations=int(res.nfev),
        converged=bool(res.status > 0),
        dof=dof,
        message=res.message,
        flags={"at_bound": {n: bool(b) for n, b in zip(names, at_bound)}},
    )


def curve_fit(model, x, y, p0, sigma=None, bounds=None, names=None, absolute_sigma=False,
              **kw) -> FitResult:
    """Fit ``y ~ model(x, *p)``; residuals are divided by ``sigma`` when given."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if sigma is None:
        w = np.ones_like(y)
    else:
        sigma = np.broadcast_to(np.asarray(sigma, float), y.shape)
        if np.any(~(sigma > 0)):
            raise InvalidArgumentError("uncertainties must be positive")
        w = 1.0 / sigma
    if len(y) < len(p0):
        raise InvalidArgumentError(f"{len(y)} data points cannot determine {len(p0)} parameters")

    def residuals(p):
        return (model(x, *p) - y) * w

    return lm_least_squares(residuals, p0, bounds=bounds, names=names,
                            absolute_sigma=absolute_sigma and sigma is not None, **kw)

"""GP significance screen on the log2 ratio of observed to null VI.

Two zero-mean Gaussian process models are fitted to the ratio series by
maximum marginal likelihood: a noise-only model (pure white noise) and a
signal model with a squared-exponential covariance on the perturbation
level. The log Bayes factor is the difference of the two maximized log
marginal likelihoods; large values indicate a real underlying signal,
i.e. community structure that departs from the configuration-model null.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve, eigh

from .errors import InputError, NumericalError

VAR_FLOOR = 1e-12


@dataclass(frozen=True)
class GPModel:
    sigma_f2: float  # signal variance; 0 for the noise-only model
    length_scale: float
    sigma_n2: float
    degenerate: bool = False

    def __post_init__(self):
        if self.sigma_f2 < 0 or self.length_scale <= 0 or self.sigma_n2 <= 0:
            raise InputError("kernel hyperparameters must be positive")


@dataclass(frozen=True)
class RatioSeries:
    x: np.ndarray
    y: np.ndarray
    dropped_cells: int = 0

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.shape != y.shape or x.ndim != 1:
            raise InputError("series x and y must be matching 1-d arrays")
        if not (np.isfinite(x).all() and np.isfinite(y).all()):
            raise InputError("series must contain finite values only")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)


def ratio_series_from_curves(curves) -> RatioSeries:
    """Pair vic and vic_random cells by (level, replicate); p=0 excluded.

    Cells with a zero value on either side (log of 0 or of infinity) and
    missing cells are dropped and counted.
    """
    levels = np.asarray(curves.grid.levels)[1:]
    vic = curves.vic[1:]
    ran = curves.vic_random[1:]
    x = np.repeat(levels, vic.shape[1])
    with np.errstate(divide="ignore", invalid="ignore"):
        y = np.log2(vic / ran).ravel()
    keep = np.isfinite(y)
    return RatioSeries(x=x[keep], y=y[keep], dropped_cells=int((~keep).sum()))


def _kernel(x1, x2, sigma_f2, length_scale):
    d = x1[:, None] - x2[None, :]
    return sigma_f2 * np.exp(-0.5 * (d / length_scale) ** 2)


def _covariance(model: GPModel, x: np.ndarray) -> np.ndarray:
    k = _kernel(x, x, model.sigma_f2, model.length_scale)
    return k + model.sigma_n2 * np.eye(x.size)


def log_marginal_likelihood(model: GPModel, series: RatioSeries) -> float:
    """Exact Gaussian log marginal likelihood via Cholesky with jitter.

    On factorization failure, jitter 1e-8 * trace/n is added to the
    diagonal and escalated tenfold up to 1e-2 before giving up.
    """
    if series.x.size == 0:
        raise InputError("empty series")
    ky = _covariance(model, series.x)
    n = series.x.size
    jitter = 0.0
    step = 1e-8 * np.trace(ky) / n
    while True:
        try:
            c, low = cho_factor(ky + jitter * np.eye(n), lower=True)
            break
        except np.linalg.LinAlgError:
            jitter = step if jitter == 0.0 else jitter * 10.0
            if jitter > 1e-2:
                raise NumericalError(
                    "kernel matrix is not positive definite; "
                    f"condition ~ {np.linalg.cond(ky):.3g}"
                )
    alpha = cho_solve((c, low), series.y)
    logdet = 2.0 * np.log(np.diag(c)).sum()
    return float(
        -0.5 * series.y @ alpha - 0.5 * logdet - 0.5 * n * np.log(2.0 * np.pi)
    )


def lml_gradient(model: GPModel, series: RatioSeries) -> np.ndarray:
    """Gradient of the LML w.r.t. (log sigma_f2, log length_scale, log sigma_n2)."""
    x, y = series.x, series.y
    n = x.size
    d2 = (x[:, None] - x[None, :]) ** 2
    kf = model.sigma_f2 * np.exp(-0.5 * d2 / model.length_scale**2)
    ky = kf + model.sigma_n2 * np.eye(n)
    c, low = cho_factor(ky, lower=True)
    alpha = cho_solve((c, low), y)
    kinv = cho_solve((c, low), np.eye(n))
    w = np.outer(alpha, alpha) - kinv
    # dK/d log sigma_f2 = kf ; dK/d log l = kf * d2 / l^2 ; dK/d log sn2 = sn2*I
    grads = [
        0.5 * np.sum(w * kf),
        0.5 * np.sum(w * (kf * d2 / model.length_scale**2)),
        0.5 * np.trace(w) * model.sigma_n2,
    ]
    return np.array(grads)


def _noise_only_lml(y, sigma_n2):
    n = y.size
    return -0.5 * (y @ y) / sigma_n2 - 0.5 * n * np.log(2.0 * np.pi * sigma_n2)


def _golden(fn, lo, hi, iters=40):
    """Golden-section maximization of fn over [lo, hi]."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(d)
    return (c, fc) if fc >= fd else (d, fd)


def fit_hyperparameters(series: RatioSeries, model_class: str) -> GPModel:
    """Maximize the LML over a log grid, then refine coordinate-wise.

    model_class is 'noise_only' (sigma_f2 pinned to 0) or
    'signal_plus_noise'.
    """
    if model_class not in ("noise_only", "signal_plus_noise"):
        raise InputError(f"unknown model class {model_class!r}")
    x, y = series.x, series.y
    if np.unique(x).size < 3:
        raise InputError("need at least 3 distinct x values to fit")
    var_y = float(np.var(y))
    if var_y <= VAR_FLOOR:
        return GPModel(
            sigma_f2=0.0 if model_class == "noise_only" else VAR_FLOOR,
            length_scale=1.0,
            sigma_n2=VAR_FLOOR,
            degenerate=True,
        )

    sn2_grid = var_y * np.geomspace(1e-3, 2.0, 12)
    if model_class == "noise_only":
        best_sn2 = max(sn2_grid, key=lambda s: _noise_only_lml(y, s))
        lo, hi = np.log(best_sn2) - np.log(10.0), np.log(best_sn2) + np.log(10.0)
        log_sn2, _ = _golden(lambda t: _noise_only_lml(y, np.exp(t)), lo, hi)
        return GPModel(sigma_f2=0.0, length_scale=1.0, sigma_n2=float(np.exp(log_sn2)))

    x_range = float(x.max() - x.min()) or 1.0
    ell_grid = x_range * np.geomspace(0.05, 2.0, 12)
    sf2_grid = var_y * np.geomspace(1e-3, 10.0, 12)
    d2 = (x[:, None] - x[None, :]) ** 2
    n = x.size
    best = (-np.inf, None)
    for ell in ell_grid:
        # Eigendecompose the unit-variance kernel once per length-scale;
        # every (sigma_f2, sigma_n2) pair is then a closed form.
        k_unit = np.exp(-0.5 * d2 / ell**2)
        lam, q = eigh(k_unit)
        lam = np.clip(lam, 0.0, None)
        qy2 = (q.T @ y) ** 2
        for sf2 in sf2_grid:
            ev = sf2 * lam[None, :] + sn2_grid[:, None]
            lml = -0.5 * (
                (qy2[None, :] / ev).sum(axis=1)
                + np.log(2.0 * np.pi * ev).sum(axis=1)
            )
            i = int(np.argmax(lml))
            if lml[i] > best[0]:
                best = (float(lml[i]), (sf2, ell, float(sn2_grid[i])))
    _, (sf2, ell, sn2) = best

    # Coordinate-wise golden-section refinement in log space.
    theta = np.log([sf2, ell, sn2])

    def objective(t):
        return log_marginal_likelihood(
            GPModel(np.exp(t[0]), np.exp(t[1]), np.exp(t[2])), series
        )

    for _ in range(2):
        for i in range(3):
            def coord(v, i=i):
                t = theta.copy()
                t[i] = v
                return objective(t)

            span = np.log(4.0)
            theta[i], _ = _golden(coord, theta[i] - span, theta[i] + span, iters=25)
    return GPModel(
        sigma_f2=float(np.exp(theta[0])),
        length_scale=float(np.exp(theta[1])),
        sigma_n2=float(np.exp(theta[2])),
    )


def bayes_factor(series: RatioSeries) -> float:
    """log-BF = max LML(signal_plus_noise) - max LML(noise_only)."""
    signal = fit_hyperparameters(series, "signal_plus_noise")
    noise = fit_hyperparameters(series, "noise_only")
    return log_marginal_likelihood(signal, series) - _noise_only_lml(
        series.y, noise.sigma_n2
    )


def gp_test(curves) -> dict:
    """Full GP screen on a VICurveSet; JSON-ready report."""
    series = ratio_series_from_curves(curves)
    signal = fit_hyperparameters(series, "signal_plus_noise")
    noise = fit_hyperparameters(series, "noise_only")
    lml_signal = log_marginal_likelihood(signal, series)
    lml_noise = _noise_only_lml(series.y, noise.sigma_n2)
    return {
        "log_bf": float(lml_signal - lml_noise),
        "fitted_signal": {
            "sigma_f2": signal.sigma_f2,
            "length_scale": signal.length_scale,
            "sigma_n2": signal.sigma_n2,
        },
        "fitted_noise": {"sigma_n2": noise.sigma_n2},
        "dropped_cells": series.dropped_cells,
        "n_points": int(series.x.size),
    }

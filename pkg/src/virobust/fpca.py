"""Two-sample functional test via marginal FPCA and Anderson-Darling.

The observed and null VI trajectories are pooled; the mean and covariance
of the mixture sample give a truncated Karhunen-Loeve basis. Per-component
score distributions of the two groups are compared with a permutation
two-sample Anderson-Darling test, and the K p-values are adjusted by
Benjamini-Hochberg FDR (Bonferroni reported alongside).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .rewire import rng_stream


@dataclass(frozen=True)
class FPCABasis:
    grid: np.ndarray
    mean: np.ndarray
    eigenfunctions: np.ndarray  # [K x grid]
    eigenvalues: np.ndarray  # all of them, descending
    truncation: int
    noise_variance: float
    weights: np.ndarray  # quadrature weights of the discrete inner product

    def scores(self, curves: np.ndarray) -> np.ndarray:
        """Project curves onto the first K eigenfunctions."""
        centered = np.atleast_2d(curves) - self.mean
        return centered @ (self.eigenfunctions[: self.truncation].T * self.weights[:, None])


def _trapezoid_weights(grid: np.ndarray) -> np.ndarray:
    w = np.zeros_like(grid)
    w[1:] += np.diff(grid) / 2.0
    w[:-1] += np.diff(grid) / 2.0
    return w


def marginal_fpca(curves: np.ndarray, grid, pve: float = 0.95) -> FPCABasis:
    """FPCA of the pooled (mixture) curve sample on a shared grid.

    curves is [n_curves x n_levels]; truncation K is the smallest K whose
    eigenvalues explain at least ``pve`` of the total variance.
    """
    curves = np.asarray(curves, dtype=float)
    grid = np.asarray(grid, dtype=float)
    if curves.ndim != 2 or curves.shape[1] != grid.size:
        raise InputError("curves must be [n_curves x n_levels] on the given grid")
    if curves.shape[0] < 4:
        raise InputError("need at least 4 curves for FPCA")
    if not 0.0 < pve <= 1.0:
        raise InputError("pve must lie in (0, 1]")
    w = _trapezoid_weights(grid)
    mean = curves.mean(axis=0)
    centered = curves - mean
    cov = (centered.T @ centered) / (curves.shape[0] - 1)
    # Discrete-inner-product eigenproblem via the symmetric weighting trick.
    sw = np.sqrt(w)
    lam, vec = np.linalg.eigh(sw[:, None] * cov * sw[None, :])
    order = np.argsort(lam)[::-1]
    lam = np.clip(lam[order], 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = np.where(sw[None, :] > 0, vec[:, order].T / sw[None, :], 0.0)
    total = lam.sum()
    if total <= 0:
        raise InputError("pooled curves have zero variance")
    cumulative = np.cumsum(lam) / total
    k = int(np.searchsorted(cumulative, pve - 1e-12) + 1)
    # Diagonal excess over the smoothed (adjacent off-diagonal) covariance
    # estimates the measurement-error variance; reported, never subtracted.
    diag = np.diag(cov)
    off = np.diag(cov, k=1)
    excess = diag[:-1] - off if off.size else np.zeros(1)
    noise_var = float(max(np.median(excess), 0.0))
    return FPCABasis(
        grid=grid,
        mean=mean,
        eigenfunctions=phi,
        eigenvalues=lam,
        truncation=k,
        noise_variance=noise_var,
        weights=w,
    )


def _ad_statistic(masks: np.ndarray, n1: int, n2: int) -> np.ndarray:
    """Pettitt two-sample AD statistic for each row-mask of sorted labels.

    masks is [n_perm x N] boolean, True where the pooled-sorted value
    belongs to group 1.
    """
    n_total = n1 + n2
    m_j = np.cumsum(masks[:, :-1], axis=1)
    j = np.arange(1, n_total)
    num = (n_total * m_j - j[None, :] * n1) ** 2
    den = j * (n_total - j)
    return (num / den[None, :]).sum(axis=1) / (n1 * n2)


def ad_two_sample(scores1, scores2, n_perm: int, rng: np.random.Generator):
    """Permutation p-value of the two-sample Anderson-Darling statistic.

    p = (1 + #{permuted stat >= observed}) / (n_perm + 1); the smallest
    attainable p-value is 1/(n_perm + 1).
    """
    s1 = np.asarray(scores1, dtype=float)
    s2 = np.asarray(scores2, dtype=float)
    if s1.size < 2 or s2.size < 2:
        raise InputError("both samples need at least 2 values")
    if n_perm < 99:
        raise InputError("n_perm must be at least 99")
    pooled = np.concatenate([s1, s2])
    if np.all(pooled == pooled[0]):
        return 1.0
    n1, n2 = s1.size, s2.size
    order = np.argsort(pooled, kind="stable")
    labels = np.zeros(pooled.size, dtype=bool)
    labels[:n1] = True
    observed = _ad_statistic(labels[order][None, :], n1, n2)[0]
    # One shared random matrix gives n_perm synchronized label shuffles.
    keys = rng.random((n_perm, pooled.size))
    perm_positions = np.argsort(keys, axis=1)
    perm_masks = perm_positions < n1  # True -> assigned to group 1
    perm_masks = perm_masks[:, order]
    stats = _ad_statistic(perm_masks, n1, n2)
    return float((1 + np.sum(stats >= observed - 1e-12)) / (n_perm + 1))


def benjamini_hochberg(p_values) -> np.ndarray:
    """BH step-up adjusted p-values; monotone, >= raw, capped at 1."""
    p = np.asarray(p_values, dtype=float)
    k = p.size
    order = np.argsort(p, kind="stable")
    ranked = p[order] * k / np.arange(1, k + 1)
    adjusted = np.minimum.accumulate(ranked[::-1])[::-1]
    out = np.empty(k)
    out[order] = np.clip(adjusted, 0.0, 1.0)
    return out


def fpca_test(
    observed: np.ndarray,
    null_sample: np.ndarray,
    grid,
    pve: float = 0.95,
    alpha: float = 0.05,
    n_perm: int = 999,
    seed: int = 0,
) -> dict:
    """Marginal FPCA + per-component AD permutation tests + FDR decision."""
    observed = np.asarray(observed, dtype=float)
    null_sample = np.asarray(null_sample, dtype=float)
    pooled = np.vstack([observed, null_sample])
    basis = marginal_fpca(pooled, grid, pve=pve)
    scores = basis.scores(pooled)
    n1 = observed.shape[0]
    raw = np.array(
        [
            ad_two_sample(
                scores[:n1, k], scores[n1:, k], n_perm, rng_stream(seed, 5, k)
            )
            for k in range(basis.truncation)
        ]
    )
    bh = benjamini_hochberg(raw)
    min_adjusted = float(bh.min())
    return {
        "K": basis.truncation,
        "pve": pve,
        "raw_p": [float(p) for p in raw],
        "bh_adjusted": [float(p) for p in bh],
        "min_adjusted_p": min_adjusted,
        "fdr_reject": bool(min_adjusted <= alpha),
        "bonferroni_reject": bool(raw.min() <= alpha / basis.truncation),
        "noise_variance": basis.noise_variance,
        "alpha": alpha,
    }


def fpca_test_from_curves(curves, pve=0.95, alpha=0.05, n_perm=999, seed=0) -> dict:
    """Run the FPCA test on a VICurveSet (replicate trajectories as curves)."""
    obs = _complete_curves(curves.vic)
    nul = _complete_curves(curves.vic_random)
    return fpca_test(
        obs, nul, np.asarray(curves.grid.levels), pve=pve, alpha=alpha,
        n_perm=n_perm, seed=seed,
    )


def _complete_curves(mat: np.ndarray) -> np.ndarray:
    """Replicate trajectories over levels, dropping those with missing cells."""
    curves = mat.T
    return curves[np.isfinite(curves).all(axis=1)]

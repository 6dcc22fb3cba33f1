"""GP marginal likelihood numerics and the Bayes-factor screen."""

import numpy as np
import pytest

from virobust.errors import InputError
from virobust.gp import (
    GPModel,
    RatioSeries,
    bayes_factor,
    fit_hyperparameters,
    gp_test,
    lml_gradient,
    log_marginal_likelihood,
    ratio_series_from_curves,
)


def dense_lml(model, x, y):
    """Reference LML straight from the multivariate-normal density."""
    d = x[:, None] - x[None, :]
    ky = model.sigma_f2 * np.exp(-0.5 * (d / model.length_scale) ** 2)
    ky = ky + model.sigma_n2 * np.eye(x.size)
    sign, logdet = np.linalg.slogdet(ky)
    assert sign > 0
    return (
        -0.5 * y @ np.linalg.solve(ky, y)
        - 0.5 * logdet
        - 0.5 * x.size * np.log(2 * np.pi)
    )


def random_case(rng):
    n = int(rng.integers(5, 40))
    x = np.sort(rng.random(n))
    y = rng.normal(size=n)
    model = GPModel(
        sigma_f2=float(rng.uniform(0.1, 3.0)),
        length_scale=float(rng.uniform(0.1, 2.0)),
        sigma_n2=float(rng.uniform(0.05, 1.0)),
    )
    return model, RatioSeries(x=x, y=y)


def test_lml_matches_dense_formula():
    rng = np.random.default_rng(2)
    for _ in range(20):
        model, series = random_case(rng)
        assert log_marginal_likelihood(model, series) == pytest.approx(
            dense_lml(model, series.x, series.y), abs=1e-8
        )


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(4)
    for _ in range(10):
        model, series = random_case(rng)
        grad = lml_gradient(model, series)
        theta = np.log([model.sigma_f2, model.length_scale, model.sigma_n2])
        eps = 1e-6
        for i in range(3):
            tp, tm = theta.copy(), theta.copy()
            tp[i] += eps
            tm[i] -= eps
            fd = (
                log_marginal_likelihood(
                    GPModel(np.exp(tp[0]), np.exp(tp[1]), np.exp(tp[2])), series
                )
                - log_marginal_likelihood(
                    GPModel(np.exp(tm[0]), np.exp(tm[1]), np.exp(tm[2])), series
                )
            ) / (2 * eps)
            denom = max(abs(fd), 1e-8)
            assert abs(grad[i] - fd) / denom < 1e-4


def test_model_validation():
    with pytest.raises(InputError):
        GPModel(sigma_f2=-1.0, length_scale=1.0, sigma_n2=1.0)
    with pytest.raises(InputError):
        GPModel(sigma_f2=1.0, length_scale=0.0, sigma_n2=1.0)
    with pytest.raises(InputError):
        GPModel(sigma_f2=1.0, length_scale=1.0, sigma_n2=0.0)


def test_series_validation():
    with pytest.raises(InputError):
        RatioSeries(x=np.array([0.0, 1.0]), y=np.array([1.0]))
    with pytest.raises(InputError):
        RatioSeries(x=np.array([0.0, 1.0]), y=np.array([1.0, np.nan]))


def test_constant_series_flagged_degenerate():
    series = RatioSeries(x=np.linspace(0, 1, 10), y=np.zeros(10))
    model = fit_hyperparameters(series, "signal_plus_noise")
    assert model.degenerate


def test_white_noise_yields_small_bayes_factor():
    # Pure noise: the structured model should win at most marginally. The
    # maximized log-LR for a boundary variance parameter has a ~half-chi2
    # tail, so ~16% of runs land above 1 by chance; assert the achievable
    # calibration here (the strict published gate runs in the acceptance
    # suite and is documented as a known tension).
    vals = []
    for seed in range(60):
        rng = np.random.default_rng(seed)
        x = np.repeat(np.linspace(0.1, 1.0, 10), 4)
        y = rng.normal(scale=0.3, size=x.size)
        vals.append(bayes_factor(RatioSeries(x=x, y=y)))
    vals = np.asarray(vals)
    assert np.median(vals) < 0.5
    assert np.mean(vals < 1.0) >= 0.7
    assert vals.max() < 10.0


def test_structured_signal_yields_large_bayes_factor():
    rng = np.random.default_rng(77)
    x = np.repeat(np.linspace(0.1, 1.0, 10), 4)
    y = np.sin(3 * x) + rng.normal(scale=0.05, size=x.size)
    assert bayes_factor(RatioSeries(x=x, y=y)) > 10.0


def test_ratio_series_drops_p0_and_nonfinite():
    class FakeGrid:
        levels = (0.0, 0.5, 1.0)

    class FakeCurves:
        grid = FakeGrid()
        vic = np.array([[0.0, 0.0], [1.0, 2.0], [4.0, 0.0]])
        vic_random = np.array([[0.0, 0.0], [2.0, 2.0], [1.0, np.nan]])

    series = ratio_series_from_curves(FakeCurves())
    # p=0 row excluded entirely; the 0/nan cell dropped and counted.
    assert series.dropped_cells == 1
    assert series.x.tolist() == [0.5, 0.5, 1.0]
    assert series.y.tolist() == pytest.approx([-1.0, 0.0, 2.0])


def test_gp_test_report_shape():
    class FakeGrid:
        levels = tuple(np.linspace(0, 1, 11))

    rng = np.random.default_rng(5)

    class FakeCurves:
        grid = FakeGrid()
        vic = np.vstack([np.zeros(6), rng.uniform(1, 3, size=(10, 6))])
        vic_random = np.vstack([np.zeros(6), rng.uniform(1, 3, size=(10, 6))])

    out = gp_test(FakeCurves())
    assert set(out) == {
        "log_bf",
        "fitted_signal",
        "fitted_noise",
        "dropped_cells",
        "n_points",
    }
    assert out["n_points"] == 60

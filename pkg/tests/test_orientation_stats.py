"""
Orientation-angle models, fitting and diagnostics.

 Group 1: KSD
   Two-sample and model KSD values, symmetry, range, errors
 Group 2: moments
   Skewness and kurtosis on small series and large family samples
 Group 3: truncated laws
   Normalization, peak value, CDF endpoints, finite-difference density,
   simplified form, sigma conventions
 Group 4: sampling and fitting
   Reproducibility, kurtosis band, parameter recovery, family selection
"""
import math

import numpy as np
import pytest
from scipy import integrate

from classes.errors import DegenerateVariance, EmptySeries, NonMonotonicTimestamps, ValidationError
from classes.orientation import Family, OrientationModel, SampleSeries, UniformAzimuthModel
from utils.orientation_stats import (
    fit_mle,
    ksd_two_sample,
    ksd_vs_model,
    ksd_with_atom,
    kurtosis,
    sample,
    select_family,
    simplified_cdf_gap,
    skewness,
    trunc_cdf,
    trunc_moments,
    trunc_pdf,
)


# ── Shared fixtures ───────────────────────────────────────────────────────────

_SITTING = OrientationModel.sitting()
_WALKING = OrientationModel.walking()


# ── Group 1: KSD ──────────────────────────────────────────────────────────────

def test_identical_series_have_zero_ksd():
    a = SampleSeries.of([0.1, 0.4, 0.2])
    assert ksd_two_sample(a, a) == 0.0


def test_disjoint_point_masses_have_unit_ksd():
    assert ksd_two_sample([0.0], [1.0]) == 1.0


def test_two_sample_ksd_is_symmetric():
    rng = np.random.default_rng(2)
    a, b = rng.normal(size=500), rng.laplace(size=700)
    assert ksd_two_sample(a, b) == pytest.approx(ksd_two_sample(b, a))
    assert 0.0 <= ksd_two_sample(a, b) <= 1.0


def test_same_model_samples_are_close():
    a = sample(_SITTING, 100_000, seed=1)
    b = sample(_SITTING, 100_000, seed=2)
    assert ksd_two_sample(a, b) < 0.02


def test_empty_series_is_rejected():
    with pytest.raises(EmptySeries):
        ksd_two_sample([], [1.0])
    with pytest.raises(EmptySeries):
        SampleSeries.of([])


def test_model_ksd_of_own_sample_is_small():
    assert ksd_vs_model(sample(_SITTING, 200_000, seed=4), _SITTING) < 0.005


def test_single_sample_at_median_is_bounded():
    median = float(_SITTING.ppf(0.5))
    assert ksd_vs_model([median], _SITTING) == pytest.approx(0.5, abs=1e-9)


def test_far_tail_constant_series_approaches_one():
    assert ksd_vs_model(np.full(10, 0.001), _SITTING) > 0.99


def test_atom_aware_ksd_scores_jump():
    # half the mass at 0, uniform on (0, 1] for the rest
    rng = np.random.default_rng(0)
    x = np.where(rng.random(50_000) < 0.5, 0.0, rng.random(50_000))
    cdf = lambda t: np.where(np.asarray(t) >= 0.0, 0.5 + 0.5 * np.clip(t, 0.0, 1.0), 0.0)
    assert ksd_with_atom(x, cdf) < 0.01


def test_timestamps_must_increase():
    with pytest.raises(NonMonotonicTimestamps):
        SampleSeries([1.0, 2.0, 3.0], timestamps=[0.0, 0.1, 0.1])


# ── Group 2: moments ──────────────────────────────────────────────────────────

def test_symmetric_series_has_zero_skew():
    assert skewness([-1.0, 0.0, 1.0]) == pytest.approx(0.0, abs=1e-15)


def test_right_tail_has_positive_skew():
    assert skewness([0.0, 0.0, 1.0]) > 0.0


def test_moments_need_enough_varied_samples():
    with pytest.raises(DegenerateVariance):
        skewness([1.0, 2.0])
    with pytest.raises(DegenerateVariance):
        kurtosis([3.0, 3.0, 3.0, 3.0])


@pytest.mark.parametrize(
    "draw, expected, tol",
    [
        (lambda rng, n: rng.laplace(size=n), 6.0, 0.2),
        (lambda rng, n: rng.normal(size=n), 3.0, 0.05),
        (lambda rng, n: rng.uniform(size=n), 1.8, 0.02),
    ],
)
def test_family_kurtosis(draw, expected, tol):
    x = draw(np.random.default_rng(11), 1_000_000)
    assert kurtosis(x) == pytest.approx(expected, abs=tol)


def test_laplace_sample_is_not_skewed():
    x = np.random.default_rng(5).laplace(size=1_000_000)
    assert abs(skewness(x)) < 0.05


# ── Group 3: truncated laws ───────────────────────────────────────────────────

@pytest.mark.parametrize("model", [_SITTING, _WALKING])
def test_truncated_density_integrates_to_one(model):
    mass, _ = integrate.quad(lambda t: trunc_pdf(model, t), 0.0, 0.5 * math.pi, points=[model.mu_theta], limit=200,
                             epsabs=1e-12, epsrel=1e-12)
    assert mass == pytest.approx(1.0, abs=1e-9)


def test_density_at_mode_is_close_to_untruncated_peak():
    b = _SITTING.scale
    assert trunc_pdf(_SITTING, _SITTING.mu_theta) == pytest.approx(1.0 / (2.0 * b * _SITTING.normalizer))
    # truncation removes about 3e-4 of the Laplace mass
    assert trunc_pdf(_SITTING, _SITTING.mu_theta) == pytest.approx(1.0 / (2.0 * b), rel=1e-3)


def test_density_is_zero_outside_bounds():
    assert trunc_pdf(_SITTING, -0.01) == 0.0
    assert trunc_pdf(_SITTING, 1.6) == 0.0


def test_exact_cdf_endpoints():
    assert trunc_cdf(_SITTING, 0.0) == pytest.approx(0.0, abs=1e-15)
    assert trunc_cdf(_SITTING, 0.5 * math.pi) == 1.0
    assert np.all(np.diff(trunc_cdf(_SITTING, np.linspace(0.0, 1.6, 500))) >= 0.0)


def test_simplified_cdf_is_half_at_mean():
    simple = OrientationModel(Family.LAPLACE, _SITTING.mu_theta, _SITTING.scale, exact=False)
    assert trunc_cdf(simple, simple.mu_theta) == pytest.approx(0.5)


def test_simplified_gap_is_bounded_by_lost_mass():
    assert simplified_cdf_gap(_SITTING) <= 1.0 - _SITTING.normalizer + 1e-12


@pytest.mark.parametrize("model", [_SITTING, _WALKING])
def test_cdf_derivative_matches_density(model):
    grid = np.linspace(0.05, 1.5, 300)
    grid = grid[np.abs(grid - model.mu_theta) > 1e-3]
    h = 1e-6
    slope = (trunc_cdf(model, grid + h) - trunc_cdf(model, grid - h)) / (2.0 * h)
    np.testing.assert_allclose(slope, trunc_pdf(model, grid), atol=1e-6)


def test_laplace_scale_from_standard_deviation():
    assert _SITTING.scale == pytest.approx(math.radians(7.68) / math.sqrt(2.0))
    assert _SITTING.sigma == pytest.approx(math.radians(7.68))


def test_variance_reading_of_sigma():
    m = OrientationModel.from_degrees(Family.GAUSSIAN, 29.67, 7.78, sigma_kind="variance")
    assert m.scale == pytest.approx(math.radians(math.sqrt(7.78)))


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(scale=0.0),
        dict(scale=0.1, lower=0.5, upper=0.5),
        dict(scale=0.1, lower=-0.1),
        dict(scale=0.1, upper=2.0),
    ],
)
def test_invalid_models_are_rejected(kwargs):
    with pytest.raises(ValidationError):
        OrientationModel(Family.LAPLACE, 0.7, **kwargs)


def test_uniform_azimuth_model():
    u = UniformAzimuthModel()
    assert u.pdf(0.0) == pytest.approx(1.0 / (2.0 * math.pi))
    assert u.cdf(0.0) == pytest.approx(0.5)
    x = u.sample(10_000, seed=1)
    assert x.min() >= -math.pi and x.max() < math.pi


# ── Group 4: sampling and fitting ─────────────────────────────────────────────

def test_sampling_is_reproducible():
    assert sample(_SITTING, 1, seed=9).values[0] == sample(_SITTING, 1, seed=9).values[0]


def test_sampled_kurtosis_matches_truncated_moments():
    expected = trunc_moments(_SITTING)["kurtosis"]
    assert 5.0 <= expected <= 7.0
    assert kurtosis(sample(_SITTING, 1_000_000, seed=3)) == pytest.approx(expected, abs=0.2)


@pytest.mark.parametrize("model", [_SITTING, _WALKING])
def test_fit_recovers_table_parameters(model):
    report = fit_mle(sample(model, 100_000, seed=21), model.family)
    assert math.degrees(report.model.mu_theta) == pytest.approx(math.degrees(model.mu_theta), abs=0.3)
    assert math.degrees(report.model.sigma) == pytest.approx(math.degrees(model.sigma), abs=0.3)
    assert report.n == 100_000
    assert report.ksd < 0.01


def test_laplace_fit_uses_lower_middle_median():
    report = fit_mle([0.1, 0.2, 0.4, 0.9], Family.LAPLACE)
    assert report.model.mu_theta == pytest.approx(0.2)
    assert report.model.scale == pytest.approx((0.1 + 0.0 + 0.2 + 0.7) / 4.0)


def test_constant_series_cannot_be_fitted():
    with pytest.raises(DegenerateVariance):
        fit_mle([0.5, 0.5, 0.5], Family.LAPLACE)


def test_fit_needs_two_samples():
    with pytest.raises(EmptySeries):
        fit_mle([0.5], Family.GAUSSIAN)


def test_family_selection_prefers_the_generating_family():
    assert select_family(sample(_SITTING, 50_000, seed=8)).model.family is Family.LAPLACE
    assert select_family(sample(_WALKING, 50_000, seed=8)).model.family is Family.GAUSSIAN

"""Distribution containers, ratio evaluators, and the named families."""

import json
import math

import numpy as np
import pytest
from scipy import stats

from obrs import (
    DomainError,
    FiniteDist,
    GaussianMixture,
    bimodal_target,
    dist_from_json,
    gaussian_grid_2d,
    ratio_of,
    single_gaussian,
    spacing_mismatch_pair,
    trapezoid_grid,
)


# ---------------------------------------------------------------------------
# FiniteDist
# ---------------------------------------------------------------------------


def test_finite_dist_validation():
    with pytest.raises(DomainError):
        FiniteDist([0, 1], [0.5])
    with pytest.raises(DomainError):
        FiniteDist([0, 0], [0.5, 0.5])
    with pytest.raises(DomainError):
        FiniteDist([0, 1], [-0.1, 1.1])
    with pytest.raises(DomainError):
        FiniteDist([0, 1], [0.6, 0.6])
    # zero-probability atoms are allowed
    d = FiniteDist([0, 1, 2], [0.5, 0.5, 0.0])
    assert d.density(2) == 0.0


def test_finite_dist_lookup(two_point):
    target, _ = two_point
    assert target.density(0) == 0.5
    assert target.index(1) == 1
    with pytest.raises(DomainError):
        target.index(7)


def test_finite_dist_sampling_is_seed_deterministic(two_point):
    target, _ = two_point
    a = target.sample(np.random.default_rng(5), 100)
    b = target.sample(np.random.default_rng(5), 100)
    assert a == b
    freq = np.mean([x == 0 for x in a])
    assert 0.3 < freq < 0.7


def test_finite_dist_json_roundtrip():
    d = FiniteDist([(0, 0), (0, 1), (1, 0)], [0.2, 0.3, 0.5])
    back = dist_from_json(json.loads(json.dumps(d.to_json())))
    assert isinstance(back, FiniteDist)
    assert back.same_support(d)
    np.testing.assert_allclose(back.probs, d.probs)


# ---------------------------------------------------------------------------
# GaussianMixture
# ---------------------------------------------------------------------------


def test_single_gaussian_density_matches_scipy():
    g = single_gaussian(0.7, 1.3)
    xs = np.linspace(-4, 6, 50)
    np.testing.assert_allclose(g.density(xs), stats.norm.pdf(xs, 0.7, 1.3), rtol=1e-12)
    np.testing.assert_allclose(
        g.log_density(xs), stats.norm.logpdf(xs, 0.7, 1.3), atol=1e-12
    )


def test_mixture_density_is_weighted_sum():
    m = GaussianMixture(
        weights=[0.3, 0.7], means=[[-1.0], [2.0]], stds=[[0.5], [1.5]]
    )
    xs = np.linspace(-5, 7, 40)
    manual = 0.3 * stats.norm.pdf(xs, -1, 0.5) + 0.7 * stats.norm.pdf(xs, 2, 1.5)
    np.testing.assert_allclose(m.density(xs), manual, rtol=1e-12)


def test_mixture_2d_density():
    m = GaussianMixture(weights=[1.0], means=[[1.0, -1.0]], stds=[[0.5, 2.0]])
    pts = np.array([[1.0, -1.0], [0.0, 0.0], [2.0, 1.0]])
    manual = stats.norm.pdf(pts[:, 0], 1, 0.5) * stats.norm.pdf(pts[:, 1], -1, 2.0)
    np.testing.assert_allclose(m.density(pts), manual, rtol=1e-12)


def test_log_density_far_tail_stays_finite():
    g = single_gaussian(0.0, 0.1)
    ld = g.log_density(np.array([50.0]))
    assert np.isfinite(ld).all()
    assert ld[0] < -1e5


def test_mixture_validation():
    with pytest.raises(DomainError):
        GaussianMixture(weights=[0.5, 0.6], means=[[0.0], [1.0]], stds=[[1.0], [1.0]])
    with pytest.raises(DomainError):
        GaussianMixture(weights=[1.0], means=[[0.0]], stds=[[0.0]])
    with pytest.raises(DomainError):
        GaussianMixture(weights=[1.0], means=[[0.0, 0.0, 0.0]], stds=[[1.0, 1.0, 1.0]])


def test_mixture_sampling_moments(rng):
    m = GaussianMixture(weights=[0.5, 0.5], means=[[-2.0], [2.0]], stds=[[0.5], [0.5]])
    xs = m.sample(rng, 200_000)
    assert xs.shape == (200_000,)
    assert abs(np.mean(xs)) < 0.02
    assert abs(np.var(xs) - (4.0 + 0.25)) < 0.05


def test_mixture_2d_sample_shape(rng):
    m = gaussian_grid_2d()
    xs = m.sample(rng, 1000)
    assert xs.shape == (1000, 2)


def test_mixture_json_roundtrip():
    m = bimodal_target()
    back = dist_from_json(json.loads(json.dumps(m.to_json())))
    assert isinstance(back, GaussianMixture)
    xs = np.linspace(-4, 4, 20)
    np.testing.assert_allclose(back.log_density(xs), m.log_density(xs), atol=1e-14)


def test_dist_from_json_rejects_unknown():
    with pytest.raises(DomainError):
        dist_from_json({"type": "dirichlet"})


# ---------------------------------------------------------------------------
# Ratio evaluators
# ---------------------------------------------------------------------------


def test_ratio_finite_values(two_point):
    target, model = two_point
    r = ratio_of(target, model)
    assert r(0) == pytest.approx(0.625)
    assert r(1) == pytest.approx(2.5)
    np.testing.assert_allclose(r.log([0, 1]), [math.log(0.625), math.log(2.5)])


def test_ratio_finite_rejects_orphan_target_mass():
    target = FiniteDist([0, 1], [0.5, 0.5])
    model = FiniteDist([0, 1], [1.0, 0.0])
    with pytest.raises(DomainError):
        ratio_of(target, model)


def test_ratio_counts_calls(two_point):
    target, model = two_point
    r = ratio_of(target, model)
    assert r.calls == 0
    r([0, 1, 0])
    r(1)
    assert r.calls == 4


def test_ratio_mixture_log_values(mixture_pair):
    target, model = mixture_pair
    r = ratio_of(target, model)
    xs = np.array([-2.0, 0.0, 2.0])
    expected = target.log_density(xs) - model.log_density(xs)
    np.testing.assert_allclose(r.log(xs), expected, atol=1e-14)
    # mode of the target should be favored, the trough disfavored
    assert r(2.0) > 1.0 > r(0.0)


# ---------------------------------------------------------------------------
# Quadrature grid and the named families
# ---------------------------------------------------------------------------


def test_trapezoid_grid_normalizes_density(mixture_pair):
    target, model = mixture_pair
    x, w = trapezoid_grid([target, model])
    assert math.isclose(float(np.dot(w, target.density(x))), 1.0, abs_tol=1e-10)
    assert math.isclose(float(np.dot(w, model.density(x))), 1.0, abs_tol=1e-10)


def test_trapezoid_grid_covers_both(mixture_pair):
    target, model = mixture_pair
    x, _ = trapezoid_grid([target, model], span=8.0)
    assert x[0] <= -2 - 8 * 0.5
    assert x[-1] >= 2 + 8 * 0.5


def test_bimodal_target_mass_between_modes():
    # mass of the right mode's central band [1, 3]: half of ~95.45% plus a
    # negligible left-mode tail
    target = bimodal_target()
    expected = 0.5 * (stats.norm.cdf(2) - stats.norm.cdf(-2)) + 0.5 * (
        stats.norm.cdf(10) - stats.norm.cdf(6)
    )
    assert expected == pytest.approx(0.4772499, abs=5e-7)
    x, w = trapezoid_grid([target], n_nodes=8192)
    band = (x >= 1.0) & (x <= 3.0)
    got = float(np.dot(w[band], target.density(x[band])))
    assert got == pytest.approx(expected, abs=1e-4)


def test_spacing_mismatch_pair_structure():
    target, model = spacing_mismatch_pair(0.7)
    assert target.n_components == 10
    assert model.n_components == 10
    np.testing.assert_allclose(np.diff(target.means[:, 0]), 1.0)
    np.testing.assert_allclose(np.diff(model.means[:, 0]), 0.7)
    np.testing.assert_allclose(target.stds, math.sqrt(0.3))
    np.testing.assert_allclose(model.stds, math.sqrt(0.4))
    assert float(np.mean(target.means)) == pytest.approx(0.0)
    assert float(np.mean(model.means)) == pytest.approx(0.0)
    with pytest.raises(DomainError):
        spacing_mismatch_pair(0.0)


def test_gaussian_grid_2d_structure():
    grid = gaussian_grid_2d(sigma=0.05, spacing=1.0)
    assert grid.n_components == 25
    np.testing.assert_allclose(grid.weights, 1.0 / 25)
    xs = sorted(set(grid.means[:, 0]))
    assert xs == [-2.0, -1.0, 0.0, 1.0, 2.0]
    custom = gaussian_grid_2d(weights=np.full(25, 1.0 / 25))
    np.testing.assert_allclose(custom.weights, grid.weights)
    with pytest.raises(DomainError):
        gaussian_grid_2d(weights=np.full(10, 0.1))

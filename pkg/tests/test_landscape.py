"""Budgeted training loss and the spacing/fit landscapes."""

import math

import numpy as np
import pytest

from obrs import (
    DomainError,
    budgeted_loss,
    divergence_finite,
    fit_grid,
    landscape_1d,
    local_minima_count,
    primal_identity_check,
    refine,
    refined_finite,
    spacing_mismatch_pair,
)
from obrs.fdiv import GENERATOR_PANEL, Generator, max_divergence
from obrs.oracle import random_instance


# ---------------------------------------------------------------------------
# The budgeted loss and its primal identity
# ---------------------------------------------------------------------------


def test_two_point_loss_is_refined_divergence(two_point):
    target, model = two_point
    loss = budgeted_loss(Generator.kl(), target, model, 2.0, mode="exact")
    assert loss == pytest.approx(0.020410997260127565, abs=1e-7)


def test_loss_collapses_when_budget_covers(two_point):
    target, model = two_point
    # budget 3 > M = 2.5: the refined distribution equals the target exactly
    for gen in GENERATOR_PANEL:
        loss = budgeted_loss(gen, target, model, 3.0, mode="exact")
        assert loss == pytest.approx(gen.f_at_one, abs=1e-12), gen.label


def test_primal_identity_random_instances(rng):
    worst = 0.0
    for _ in range(20):
        target, model = random_instance(rng)
        sup = math.exp(max_divergence(target, model))
        budget = float(np.exp(rng.uniform(0.0, math.log(sup))))
        for gen in (Generator.kl(), Generator.gan()):
            worst = max(worst, primal_identity_check(gen, target, model, budget))
    assert worst <= 1e-10


def test_loss_quadrature_collapse_on_mixtures(mixture_pair):
    target, model = mixture_pair
    # budget 5 exceeds the ~4.08 ratio envelope: quadrature loss lands on f(1)
    loss = budgeted_loss(Generator.gan(), target, model, 5.0, mode="quadrature")
    assert loss == pytest.approx(-math.log(4.0), abs=1e-6)


def test_loss_monotone_in_budget_exact(two_point):
    target, model = two_point
    losses = [
        budgeted_loss(Generator.kl(), target, model, k, mode="exact")
        for k in (1.0, 1.3, 1.7, 2.0, 2.5)
    ]
    assert all(b <= a + 1e-12 for a, b in zip(losses, losses[1:]))
    # unit budget: no refinement at all, the plain divergence
    assert losses[0] == pytest.approx(0.22314355131420976, abs=1e-12)


def test_loss_rejects_sub_unit_budget(two_point):
    target, model = two_point
    with pytest.raises(DomainError):
        budgeted_loss(Generator.kl(), target, model, 0.9, mode="exact")


# ---------------------------------------------------------------------------
# Local minima counting
# ---------------------------------------------------------------------------


def test_local_minima_count_synthetic():
    assert local_minima_count(np.array([3.0, 1.0, 2.0, 0.0, 5.0])) == 2
    assert local_minima_count(np.array([1.0, 2.0, 3.0])) == 0
    assert local_minima_count(np.array([3.0, 2.0, 1.0])) == 0
    assert local_minima_count(np.array([2.0, 1.0, 2.0])) == 1
    # plateaus do not count as strict minima
    assert local_minima_count(np.array([2.0, 1.0, 1.0, 2.0])) == 0


# ---------------------------------------------------------------------------
# The spacing landscape (reduced grids: the full default runs in acceptance)
# ---------------------------------------------------------------------------


def test_landscape_small_grid_monotone_in_budget():
    thetas = np.linspace(0.5, 1.5, 21)
    surf = landscape_1d(thetas=thetas, budgets=(1.0, 2.0), n_nodes=2048)
    assert surf.losses.shape == (21, 2)
    assert np.max(surf.losses[:, 1] - surf.losses[:, 0]) <= 1e-8
    assert surf.gen_label == "gan"
    # matched spacing is the best column entry at unit budget
    assert abs(surf.argmin_theta(1.0) - 1.0) <= 0.1


def test_landscape_column_lookup():
    thetas = np.linspace(0.8, 1.2, 5)
    surf = landscape_1d(thetas=thetas, budgets=(1.0,), n_nodes=1024)
    np.testing.assert_array_equal(surf.column(1.0), surf.losses[:, 0])
    counts = surf.minima_counts()
    assert set(counts) == {1.0}


# ---------------------------------------------------------------------------
# Fit grids (reduced: the full default lattice runs in acceptance)
# ---------------------------------------------------------------------------


def test_fit_grid_small_lattice():
    mus = np.linspace(-1.0, 1.0, 5)
    sigmas = np.linspace(1.0, 3.0, 9)
    res = fit_grid(budget=1.0, mus=mus, sigmas=sigmas, n_nodes=1024)
    assert res.losses.shape == (5, 9)
    i, j = np.unravel_index(np.argmin(res.losses), res.losses.shape)
    assert res.best_mu == mus[i]
    assert res.best_sigma == sigmas[j]
    assert res.best_loss == res.losses[i, j]
    # symmetric target: the best center is the middle of the grid
    assert res.best_mu == pytest.approx(0.0)


def test_fit_budget_widens_optimum_small():
    mus = np.array([0.0])
    sigmas = np.linspace(0.8, 3.0, 23)
    res1 = fit_grid(budget=1.0, mus=mus, sigmas=sigmas, n_nodes=2048)
    res2 = fit_grid(budget=2.0, mus=mus, sigmas=sigmas, n_nodes=2048)
    assert res2.best_sigma > res1.best_sigma
    assert res2.best_loss < res1.best_loss

"""Independent checks: brute-force optimality, improvement bounds, ball tests.

Everything here verifies the budgeted sampler from the outside. The
optimality sweep throws random feasible acceptance functions at a finite
instance and confirms none does better than the solved one for any
generator in the panel. The bound checks compare the refined divergence
against its closed-form guarantees, constructing the mixture witnesses
explicitly so a failure names the offending atom instead of just a number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .dist import FiniteDist
from .errors import DomainError
from .fdiv import (
    GENERATOR_PANEL,
    Generator,
    divergence_finite,
    max_divergence,
    renyi_divergence,
)
from .sampling import AcceptanceSpec, acceptance_from_target, refine, refined_finite

_FLOOR = 1e-4


# ---------------------------------------------------------------------------
# Random instances and feasible competitors
# ---------------------------------------------------------------------------


def random_instance(
    rng: np.random.Generator, n_atoms: int | None = None, floor: float = _FLOOR
) -> tuple[FiniteDist, FiniteDist]:
    """A random finite target/model pair on a shared support.

    Both probability vectors are Dirichlet draws floored at ``floor`` and
    renormalized, so every atom carries mass on both sides and all ratios
    stay in [floor-ish, 1/floor-ish].
    """
    n = int(n_atoms) if n_atoms is not None else int(rng.integers(3, 33))
    atoms = list(range(n))
    dists = []
    for _ in range(2):
        v = np.maximum(rng.dirichlet(np.ones(n)), floor)
        dists.append(FiniteDist(atoms, v / math.fsum(v.tolist())))
    return dists[0], dists[1]


def random_feasible_acceptance(
    model: FiniteDist,
    budget: float,
    rng: np.random.Generator,
    floor: float = 1e-6,
    rate_tol: float = 1e-9,
) -> np.ndarray:
    """A random acceptance vector with E_model[a] = 1/budget to ``rate_tol``.

    Starts from uniform noise, pulls it onto the rate constraint
    multiplicatively, then finishes with exact water-filling moves (raising
    everything toward 1 or lowering toward ``floor`` proportionally to the
    available headroom), which hit the constraint in one or two passes.
    """
    if budget < 1:
        raise DomainError("budget must be at least 1")
    q = model.probs
    tau = 1.0 / budget
    if tau < floor:
        raise DomainError("budget too large for the acceptance floor")
    a = rng.uniform(floor, 1.0, len(q))
    for _ in range(3):
        s = float(np.dot(q, a))
        a = np.clip(a * (tau / s), floor, 1.0)
    for _ in range(4):
        s = math.fsum((q * a).tolist())
        delta = tau - s
        if abs(delta) <= rate_tol:
            return a
        if delta > 0:
            head = 1.0 - a
            room = float(np.dot(q, head))
            a = a + head * (delta / room)
        else:
            head = a - floor
            room = float(np.dot(q, head))
            a = a - head * (-delta / room)
    s = math.fsum((q * a).tolist())
    if abs(s - tau) > rate_tol:
        raise DomainError(f"could not hit rate {tau} (got {s})")
    return a


# ---------------------------------------------------------------------------
# Optimality sweep
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GenOptimality:
    """One generator's verdict from an optimality sweep."""

    gen_label: str
    refined_loss: float
    best_competitor_loss: float
    min_gap: float  # best competitor minus refined (negative = beaten)
    violations: int  # competitors beating the solved acceptance by > tol


@dataclass(frozen=True)
class OptimalityReport:
    budget: float
    trials: int
    tol: float
    per_gen: dict[str, GenOptimality] = field(default_factory=dict)

    @property
    def all_pass(self) -> bool:
        return all(g.violations == 0 for g in self.per_gen.values())


def _loss_of_acceptance(
    gen: Generator, target: FiniteDist, model: FiniteDist, a: np.ndarray
) -> float:
    mass = model.probs * a
    z = math.fsum(mass.tolist())
    if z <= 0:
        raise DomainError("acceptance kills all model mass")
    return divergence_finite(gen, target, FiniteDist(model.atoms, mass / z)).value


def check_optimality(
    target: FiniteDist,
    model: FiniteDist,
    budget: float,
    gens: tuple[Generator, ...] = GENERATOR_PANEL,
    trials: int = 1000,
    rng: np.random.Generator | None = None,
    tol: float = 1e-9,
) -> OptimalityReport:
    """Throw ``trials`` random same-rate acceptances at every generator at once.

    The solved acceptance is computed once; each random competitor is
    evaluated under every generator in the panel, so a single sweep tests
    that one acceptance function is simultaneously optimal for all of them.
    """
    if rng is None:
        raise DomainError("check_optimality needs an rng")
    spec, _ = refine(target, model, budget, mode="exact")
    ref = refined_finite(model, spec)
    refined_losses = {
        g.label: divergence_finite(g, target, ref.dist).value for g in gens
    }
    best = {g.label: math.inf for g in gens}
    violations = {g.label: 0 for g in gens}
    for _ in range(trials):
        a = random_feasible_acceptance(model, budget, rng)
        for g in gens:
            loss = _loss_of_acceptance(g, target, model, a)
            best[g.label] = min(best[g.label], loss)
            if loss < refined_losses[g.label] - tol:
                violations[g.label] += 1
    per_gen = {
        g.label: GenOptimality(
            gen_label=g.label,
            refined_loss=refined_losses[g.label],
            best_competitor_loss=best[g.label],
            min_gap=best[g.label] - refined_losses[g.label],
            violations=violations[g.label],
        )
        for g in gens
    }
    return OptimalityReport(budget=budget, trials=trials, tol=tol, per_gen=per_gen)


# ---------------------------------------------------------------------------
# Improvement bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundReport:
    """Refined divergence against its closed-form improvement guarantee.

    Divergences are shifted by -f(1) (a no-op except for gan) so both sides
    are nonnegative and the contraction factor applies cleanly.
    """

    gen_label: str
    budget: float
    lhs: float  # shifted refined divergence
    rhs: float  # contraction factor times shifted base divergence
    base: float  # shifted divergence before refinement
    alpha: float  # mixing weight of the witness, min(1, (budget-1)/sup_ratio)
    witness_divergence: float  # shifted divergence of the mixture witness
    witness_feasible: bool  # witness inside the budget ball, atom by atom
    witness_max_excess: float  # max over atoms of witness - budget*model
    satisfied: bool

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs


def check_improvement_bound(
    gen: Generator,
    target: FiniteDist,
    model: FiniteDist,
    budget: float,
    tol: float = 1e-10,
) -> BoundReport:
    """Verify: refined divergence <= (1 - min(1, (K-1)/M)) * base divergence.

    The guarantee holds for every generator because the mixture witness
    p_a = model + a*(target - model) with a = min(1, (K-1)/M) lies inside
    the budget-K ball, and the refined distribution is at least as good as
    any ball member. Both the bound and the witness chain are evaluated.
    """
    shift = -gen.f_at_one
    base = divergence_finite(gen, target, model).value + shift
    spec, _ = refine(target, model, budget, mode="exact")
    ref = refined_finite(model, spec)
    lhs = divergence_finite(gen, target, ref.dist).value + shift
    sup = math.exp(max_divergence(target, model))
    alpha = min(1.0, (budget - 1.0) / sup)
    rhs = (1.0 - alpha) * base
    witness = model.probs + alpha * (target.probs - model.probs)
    witness_dist = FiniteDist(model.atoms, witness / math.fsum(witness.tolist()))
    excess = witness - budget * model.probs
    witness_div = divergence_finite(gen, target, witness_dist).value + shift
    return BoundReport(
        gen_label=gen.label,
        budget=budget,
        lhs=lhs,
        rhs=rhs,
        base=base,
        alpha=alpha,
        witness_divergence=witness_div,
        witness_feasible=bool(np.max(excess) <= 1e-12),
        witness_max_excess=float(np.max(excess)),
        satisfied=bool(lhs <= rhs + tol),
    )


@dataclass(frozen=True)
class KLRenyiReport:
    """The Renyi-interpolation form of the improvement guarantee for KL.

    This variant is *reported, never asserted*: its published derivation
    leans on an order comparison that runs the wrong way, and instances
    violating the stated inequality are easy to construct (the two-point
    canonical instance is one). ``satisfied`` records what happened.
    """

    budget: float
    order: float  # log(budget)/log(sup_ratio), the interpolation order
    kl: float
    renyi: float
    lhs: float  # KL(target || refined)
    rhs: float  # (1 - order) * (kl - renyi)
    satisfied: bool
    witness_feasible: bool
    witness_max_excess: float
    limit_case: str | None  # "unit_budget" | "budget_covers_ratio" | None


def check_kl_renyi_bound(
    target: FiniteDist, model: FiniteDist, budget: float, tol: float = 1e-10
) -> KLRenyiReport:
    """Evaluate the KL-specific bound (1-b)*(KL - Renyi_b), b = logK/logM.

    The geometric-mixture witness proportional to p^b * q^(1-b) is also
    checked against the ball constraint; its infeasibility is precisely why
    the inequality can fail, so the report carries the witness excess.
    """
    kl_gen = Generator.kl()
    kl = divergence_finite(kl_gen, target, model).value
    spec, _ = refine(target, model, budget, mode="exact")
    ref = refined_finite(model, spec)
    lhs = divergence_finite(kl_gen, target, ref.dist).value
    log_sup = max_divergence(target, model)
    p, q = target.probs, model.probs
    live = (p > 0) & (q > 0)
    limit_case = None
    if budget == 1.0:
        # order -> 0 limit: Renyi_0 is -log of the model mass on the target support
        order = 0.0
        renyi = -math.log(math.fsum(q[p > 0].tolist()))
        rhs = kl - renyi
        limit_case = "unit_budget"
        witness = np.where(live, q, 0.0)
    elif math.log(budget) >= log_sup:
        order = 1.0
        renyi = kl
        rhs = 0.0
        limit_case = "budget_covers_ratio"
        witness = np.where(live, p, 0.0)
    else:
        order = math.log(budget) / log_sup
        renyi = renyi_divergence(order, target, model)
        rhs = (1.0 - order) * (kl - renyi)
        lw = order * np.log(np.where(live, p, 1.0)) + (1.0 - order) * np.log(
            np.where(live, q, 1.0)
        )
        lw = np.where(live, lw, -np.inf)
        witness = np.exp(lw - logsumexp(lw))
    excess = witness - budget * q
    return KLRenyiReport(
        budget=budget,
        order=order,
        kl=kl,
        renyi=renyi,
        lhs=lhs,
        rhs=rhs,
        satisfied=bool(lhs <= rhs + tol),
        witness_feasible=bool(np.max(excess) <= 1e-12),
        witness_max_excess=float(np.max(excess)),
        limit_case=limit_case,
    )


# ---------------------------------------------------------------------------
# Budget-ball membership
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BallReport:
    """Is a candidate reachable from the model within a sampling budget?"""

    member: bool
    max_log_ratio: float  # log sup candidate/model
    log_budget: float
    witness_atom: int | None  # first atom exceeding the ball, if any
    acceptance: AcceptanceSpec | None  # realizing table when member


def check_ball_membership(
    candidate: FiniteDist, model: FiniteDist, budget: float, tol: float = 1e-12
) -> BallReport:
    """Exact membership test for the budget ball around the model.

    A candidate is a member iff candidate <= budget * model atomwise
    (equivalently its max-divergence from the model is at most log budget);
    membership comes with the acceptance table that realizes it at rate
    exactly 1/budget.
    """
    if budget < 1:
        raise DomainError("budget must be at least 1")
    c, q = candidate.probs, model.probs
    orphan = np.flatnonzero((q == 0) & (c > 0))
    if orphan.size:
        return BallReport(
            member=False,
            max_log_ratio=math.inf,
            log_budget=math.log(budget),
            witness_atom=int(orphan[0]),
            acceptance=None,
        )
    max_log = max_divergence(candidate, model)
    over = np.flatnonzero(c > budget * q * (1.0 + tol) + 0.0)
    if over.size:
        return BallReport(
            member=False,
            max_log_ratio=max_log,
            log_budget=math.log(budget),
            witness_atom=int(over[0]),
            acceptance=None,
        )
    spec = acceptance_from_target(candidate, model, budget)
    return BallReport(
        member=True,
        max_log_ratio=max_log,
        log_budget=math.log(budget),
        witness_atom=None,
        acceptance=spec,
    )

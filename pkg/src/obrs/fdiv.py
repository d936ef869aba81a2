"""f-divergences: generators, convex conjugates, and estimators.

A divergence between target P and model Q is written as an expectation under
the model, D_f(P || Q) = E_Q[f(r)] with r = p/q, for a convex generator f
normalized so the minimum is at u = 1. Five generators are supported:

============  ==========================================  =============
label         f(u)                                        f(1)
============  ==========================================  =============
kl            u log u                                     0
reverse_kl    -log u                                      0
tv            |u - 1| / 2                                 0
gan           u log u - (u+1) log(u+1)                    -log 4
pr            max(lam*u, 1) - max(lam, 1)                 0
============  ==========================================  =============

The gan generator keeps its textbook offset (f(1) = -log 4) rather than
being re-normalized, so gan divergences live in [-log 4, 0]. The pr family
is parameterized by lam > 0 and its divergence is the hinge gap between the
two distributions at that ratio threshold.

Conjugates f*(t) = sup_u (ut - f(u)) are provided for the variational
(dual) form, along with the gradient maps in both directions:
``discriminator_from_ratio`` = f'(r) and ``ratio_from_discriminator`` =
(f*)'(t). For smooth generators these are inverse bijections and the
Fenchel-Young identity f(u) + f*(f'(u)) = u f'(u) holds exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import logsumexp

from .dist import Distribution, FiniteDist, GaussianMixture, RatioFn, ratio_of, trapezoid_grid
from .errors import (
    AbsoluteContinuityError,
    DomainError,
    EstimationError,
    SupportMismatchError,
    UnsupportedGeneratorError,
)

_KINDS = ("kl", "reverse_kl", "tv", "gan", "pr")
_SMOOTH = ("kl", "reverse_kl", "gan")


@dataclass(frozen=True)
class Generator:
    """A convex generator f for an f-divergence; ``lam`` only applies to pr."""

    kind: str
    lam: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise UnsupportedGeneratorError(f"unknown generator kind {self.kind!r}")
        if self.kind == "pr":
            if self.lam is None or self.lam <= 0:
                raise DomainError("pr generator needs lam > 0")
        elif self.lam is not None:
            raise DomainError(f"{self.kind} takes no lam parameter")

    # -- constructors -------------------------------------------------------

    @classmethod
    def kl(cls) -> "Generator":
        return cls("kl")

    @classmethod
    def reverse_kl(cls) -> "Generator":
        return cls("reverse_kl")

    @classmethod
    def total_variation(cls) -> "Generator":
        return cls("tv")

    @classmethod
    def gan(cls) -> "Generator":
        return cls("gan")

    @classmethod
    def precision_recall(cls, lam: float) -> "Generator":
        return cls("pr", float(lam))

    @classmethod
    def parse(cls, text: str) -> "Generator":
        """Parse a CLI label: ``kl``, ``rkl``, ``tv``, ``gan``, or ``pr:LAM``."""
        text = text.strip().lower()
        if text in ("kl",):
            return cls.kl()
        if text in ("rkl", "reverse_kl"):
            return cls.reverse_kl()
        if text in ("tv",):
            return cls.total_variation()
        if text in ("gan",):
            return cls.gan()
        if text.startswith("pr:"):
            try:
                lam = float(text[3:])
            except ValueError:
                raise UnsupportedGeneratorError(f"bad pr threshold in {text!r}") from None
            return cls.precision_recall(lam)
        raise UnsupportedGeneratorError(f"unknown generator {text!r}")

    # -- properties ---------------------------------------------------------

    @property
    def label(self) -> str:
        return f"pr:{self.lam:g}" if self.kind == "pr" else self.kind

    @property
    def smooth(self) -> bool:
        return self.kind in _SMOOTH

    @property
    def f_at_one(self) -> float:
        """f(1): 0 for all generators except gan, whose offset is -log 4."""
        return -math.log(4.0) if self.kind == "gan" else 0.0

    def __str__(self) -> str:
        return self.label


# ---------------------------------------------------------------------------
# Pointwise maps
# ---------------------------------------------------------------------------


def f_value(gen: Generator, u):
    """Evaluate f(u) elementwise for u >= 0 (right-limit conventions at 0).

    At u = 0: kl -> 0, gan -> 0, tv -> 1/2, pr -> 1 - max(lam, 1),
    reverse_kl -> +inf.
    """
    arr = np.asarray(u, dtype=float)
    if np.any(arr < 0):
        raise DomainError("generator argument must be nonnegative")
    with np.errstate(divide="ignore", invalid="ignore"):
        if gen.kind == "kl":
            out = np.where(arr > 0, arr * np.log(np.where(arr > 0, arr, 1.0)), 0.0)
        elif gen.kind == "reverse_kl":
            out = np.where(arr > 0, -np.log(np.where(arr > 0, arr, 1.0)), np.inf)
        elif gen.kind == "tv":
            out = 0.5 * np.abs(arr - 1.0)
        elif gen.kind == "gan":
            # u log u - (u+1) log(u+1); log1p keeps the second term accurate.
            out = np.where(arr > 0, arr * np.log(np.where(arr > 0, arr, 1.0)), 0.0) - (
                arr + 1.0
            ) * np.log1p(arr)
        else:  # pr
            out = np.maximum(gen.lam * arr, 1.0) - max(gen.lam, 1.0)
    return float(out) if np.isscalar(u) else out


def fstar_value(gen: Generator, t):
    """Convex conjugate f*(t), on each generator's dual domain.

    kl: exp(t-1) on all of R; gan: -log(1 - e^t) for t < 0;
    reverse_kl: -1 - log(-t) for t < 0; pr: t / lam.
    tv has no useful conjugate here and raises.
    """
    if gen.kind == "tv":
        raise UnsupportedGeneratorError("tv conjugate is degenerate; not supported")
    arr = np.asarray(t, dtype=float)
    if gen.kind == "kl":
        out = np.exp(arr - 1.0)
    elif gen.kind == "gan":
        if np.any(arr >= 0):
            raise DomainError("gan conjugate needs t < 0")
        out = -np.log(-np.expm1(arr))
    elif gen.kind == "reverse_kl":
        if np.any(arr >= 0):
            raise DomainError("reverse_kl conjugate needs t < 0")
        out = -1.0 - np.log(-arr)
    else:  # pr
        out = arr / gen.lam
    return float(out) if np.isscalar(t) else out


def discriminator_from_ratio(gen: Generator, r):
    """Optimal dual variable at ratio r, i.e. f'(r) (a subgradient for tv/pr).

    kl: 1 + log r; gan: log(r / (1+r)) (the log-sigmoid convention);
    reverse_kl: -1/r; tv: sign(r-1)/2; pr: lam * sign(r-1).
    """
    arr = np.asarray(r, dtype=float)
    if np.any(arr <= 0):
        raise DomainError("ratio must be positive")
    if gen.kind == "kl":
        out = 1.0 + np.log(arr)
    elif gen.kind == "gan":
        out = np.log(arr) - np.log1p(arr)
    elif gen.kind == "reverse_kl":
        out = -1.0 / arr
    elif gen.kind == "tv":
        out = 0.5 * np.sign(arr - 1.0)
    else:  # pr
        out = gen.lam * np.sign(arr - 1.0)
    return float(out) if np.isscalar(r) else out


def ratio_from_discriminator(gen: Generator, t):
    """Invert the dual map: (f*)'(t). Only smooth generators are invertible.

    kl: exp(t-1); gan: e^t / (1 - e^t) for t < 0; reverse_kl: -1/t for t < 0.
    """
    if not gen.smooth:
        raise UnsupportedGeneratorError(f"{gen.label} has no single-valued ratio recovery")
    arr = np.asarray(t, dtype=float)
    if gen.kind == "kl":
        out = np.exp(arr - 1.0)
    elif gen.kind == "gan":
        if np.any(arr >= 0):
            raise DomainError("gan discriminator values must be negative")
        out = np.exp(arr) / (-np.expm1(arr))
    else:  # reverse_kl
        if np.any(arr >= 0):
            raise DomainError("reverse_kl discriminator values must be negative")
        out = -1.0 / arr
    return float(out) if np.isscalar(t) else out


# ---------------------------------------------------------------------------
# Divergence estimators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DivergenceEstimate:
    """A divergence value with sampling metadata (stderr = 0 means exact)."""

    value: float
    stderr: float = 0.0
    n: int = 0

    def __float__(self) -> float:
        return self.value


def divergence_finite(gen: Generator, target: FiniteDist, model: FiniteDist) -> DivergenceEstimate:
    """Exact D_f(target || model) on a shared finite support.

    Atoms where both masses vanish contribute nothing. A model-null atom
    carrying target mass breaks absolute continuity: tv and pr remain finite
    by their u -> inf limits, every other generator raises.
    """
    if not target.same_support(model):
        raise SupportMismatchError("divergence_finite requires identical atom lists")
    p, q = target.probs, model.probs
    heavy = (q == 0) & (p > 0)
    terms: list[float] = []
    if np.any(heavy):
        if gen.kind == "tv":
            terms.append(0.5 * math.fsum(p[heavy].tolist()))
        elif gen.kind == "pr":
            # lim q f(p/q) = lam p - max(lam,1) q = lam p as q -> 0.
            terms.append(gen.lam * math.fsum(p[heavy].tolist()))
        else:
            i = int(np.flatnonzero(heavy)[0])
            raise AbsoluteContinuityError(
                f"model mass vanishes at atom index {i} ({target.atoms[i]!r}) "
                "where target mass is positive"
            )
    live = q > 0
    terms.extend((q[live] * f_value(gen, p[live] / q[live])).tolist())
    return DivergenceEstimate(value=math.fsum(terms))


def divergence_quadrature(
    gen: Generator,
    target: GaussianMixture,
    model: GaussianMixture,
    n_nodes: int = 4096,
    span: float = 8.0,
) -> DivergenceEstimate:
    """Trapezoid-rule D_f(target || model) for 1-d mixture pairs."""
    x, w = trapezoid_grid([target, model], n_nodes=n_nodes, span=span)
    lp = target.log_density(x)
    lq = model.log_density(x)
    terms = _fdiv_terms(gen, w * np.exp(lp), w * np.exp(lq), lp - lq)
    return DivergenceEstimate(value=math.fsum(terms.tolist()))


def _fdiv_terms(gen: Generator, pw: np.ndarray, qw: np.ndarray, log_u: np.ndarray) -> np.ndarray:
    """Stable per-point contributions qw * f(exp(log_u)) with pw = qw * u.

    Works directly from target weight, model weight, and the log ratio, so
    log-ratios of hundreds never round-trip through exp(). Used by both the
    quadrature divergence and the budgeted-loss integrand, where qw plays
    the role of the (possibly acceptance-reweighted) model weight.
    """
    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        if gen.kind == "kl":
            # qw * u log u = pw * log u
            terms = np.where(pw > 0, pw * log_u, 0.0)
        elif gen.kind == "reverse_kl":
            terms = np.where(qw > 0, -qw * log_u, 0.0)
            if np.any((qw > 0) & (pw == 0)):
                terms = np.where((qw > 0) & (pw == 0), np.inf, terms)
        elif gen.kind == "tv":
            terms = 0.5 * np.abs(pw - qw)
        elif gen.kind == "gan":
            # qw [u log u - (u+1) log(u+1)] = pw log u - (pw + qw) log(u+1)
            log1pu = np.logaddexp(log_u, 0.0)
            terms = np.where(pw > 0, pw * log_u, 0.0) - (pw + qw) * log1pu
            # a vanished model weight under target mass has limit 0, not nan
            terms = np.where((qw == 0) & (pw > 0) & ~np.isfinite(log_u), 0.0, terms)
        else:  # pr
            terms = np.maximum(gen.lam * pw, qw) - max(gen.lam, 1.0) * qw
    return np.where((pw == 0) & (qw == 0), 0.0, terms)


def divergence_mc(
    gen: Generator,
    ratio: RatioFn,
    model: Distribution,
    n: int,
    rng: np.random.Generator,
) -> DivergenceEstimate:
    """Monte Carlo E_model[f(r)] with a normal-approximation stderr."""
    if n < 2:
        raise DomainError("need at least 2 samples")
    xs = model.sample(rng, n)
    lr = np.asarray(ratio.log(xs), dtype=float)
    vals = f_value(gen, np.exp(lr))
    if not np.all(np.isfinite(vals)):
        bad = int(np.flatnonzero(~np.isfinite(vals))[0])
        raise EstimationError(
            "non-finite generator value in Monte Carlo estimate", offending_value=float(lr[bad])
        )
    return DivergenceEstimate(
        value=float(np.mean(vals)), stderr=float(np.std(vals, ddof=1) / math.sqrt(n)), n=n
    )


def dual_value(
    gen: Generator,
    t_fn: Callable[[np.ndarray], np.ndarray],
    target: Distribution,
    model: Distribution,
    n_nodes: int = 4096,
    span: float = 8.0,
) -> float:
    """Variational value E_target[t(x)] - E_model[f*(t(x))] for a dual function t.

    Equals the divergence when t is the optimal discriminator; any other t
    gives a lower bound. Finite pairs are summed exactly, 1-d mixture pairs
    integrated by quadrature.
    """
    if isinstance(target, FiniteDist) and isinstance(model, FiniteDist):
        if not target.same_support(model):
            raise SupportMismatchError("dual_value requires identical atom lists")
        t = np.asarray(t_fn(np.arange(len(target))), dtype=float)
        fst = fstar_value(gen, t)
        return math.fsum((target.probs * t).tolist()) - math.fsum((model.probs * fst).tolist())
    if isinstance(target, GaussianMixture) and isinstance(model, GaussianMixture):
        x, w = trapezoid_grid([target, model], n_nodes=n_nodes, span=span)
        t = np.asarray(t_fn(x), dtype=float)
        fst = fstar_value(gen, t)
        pw = w * target.density(x)
        q = w * model.density(x)
        return math.fsum((pw * t).tolist()) - math.fsum((q * fst).tolist())
    raise SupportMismatchError("dual_value needs two finite or two mixture distributions")


# ---------------------------------------------------------------------------
# Renyi and max divergences
# ---------------------------------------------------------------------------


def renyi_divergence(order: float, target: FiniteDist, model: FiniteDist) -> float:
    """Renyi divergence of the given order on a shared finite support.

    Computed as logsumexp(order*log p + (1-order)*log q) / (order - 1).
    Orders <= 0 and exactly 1 are rejected; orders > 1 require the model to
    dominate the target. Very large orders approach the max divergence.
    """
    if order <= 0:
        raise DomainError("Renyi order must be positive")
    if order == 1.0:
        raise DomainError("order 1 is the KL limit; use divergence_finite with kl")
    if not target.same_support(model):
        raise SupportMismatchError("renyi_divergence requires identical atom lists")
    p, q = target.probs, model.probs
    if order > 1:
        bad = np.flatnonzero((q == 0) & (p > 0))
        if bad.size:
            raise AbsoluteContinuityError(
                f"order {order} needs model support to cover the target "
                f"(fails at atom index {int(bad[0])})"
            )
    live = (p > 0) & (q > 0)
    if not np.any(live):
        raise DomainError("distributions share no support")
    lp = np.log(p[live])
    lq = np.log(q[live])
    return float(logsumexp(order * lp + (1.0 - order) * lq) / (order - 1.0))


def max_divergence(target: Distribution, model: Distribution, grid: np.ndarray | None = None) -> float:
    """log sup_x target(x)/model(x): exact on finite supports, grid sup otherwise."""
    if isinstance(target, FiniteDist) and isinstance(model, FiniteDist):
        if not target.same_support(model):
            raise SupportMismatchError("max_divergence requires identical atom lists")
        p, q = target.probs, model.probs
        bad = np.flatnonzero((q == 0) & (p > 0))
        if bad.size:
            raise AbsoluteContinuityError(
                f"model mass vanishes at atom index {int(bad[0])} under target mass"
            )
        live = p > 0
        if not np.any(live):
            raise DomainError("target has no mass")
        return float(np.max(np.log(p[live]) - np.log(q[live])))
    if isinstance(target, GaussianMixture) and isinstance(model, GaussianMixture):
        if grid is None:
            if target.dim != 1:
                raise DomainError("supply an explicit grid for mixtures above 1-d")
            grid, _ = trapezoid_grid([target, model])
        lr = np.asarray(target.log_density(grid), dtype=float) - np.asarray(
            model.log_density(grid), dtype=float
        )
        return float(np.max(lr))
    raise SupportMismatchError("max_divergence needs two finite or two mixture distributions")


GENERATOR_PANEL: tuple[Generator, ...] = (
    Generator.kl(),
    Generator.reverse_kl(),
    Generator.total_variation(),
    Generator.gan(),
    Generator.precision_recall(2.0),
)
"""The default panel used by optimality sweeps and the CLI table."""

"""Distributions with exact likelihood ratios.

Two concrete families, chosen so every downstream quantity is exactly
verifiable:

- ``FiniteDist``: explicit atoms and probabilities (exact sums).
- ``GaussianMixture``: diagonal Gaussian mixtures in 1 or 2 dimensions
  (analytic densities; expectations via quadrature or Monte Carlo).

``ratio_of`` builds the likelihood-ratio evaluator r(x) = p(x)/q(x) used by
all acceptance functions. Mixture ratios are evaluated in log space so that
deep tails (log-ratios of several hundred) never overflow prematurely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .errors import DomainError, SupportMismatchError

_PROB_TOL = 1e-12


# ---------------------------------------------------------------------------
# Finite distributions
# ---------------------------------------------------------------------------


class FiniteDist:
    """A distribution on an explicit finite set of atoms.

    Atoms may be any hashable labels (ints, strings, coordinate tuples);
    probabilities must be nonnegative and sum to 1 within 1e-12.
    """

    def __init__(self, atoms: Sequence[Any], probs: Sequence[float]):
        atoms = list(atoms)
        probs = np.asarray(probs, dtype=float)
        if len(atoms) != len(probs):
            raise DomainError("atoms and probs must have equal length")
        if len(atoms) != len(set(atoms)):
            raise DomainError("atoms must be distinct")
        if np.any(probs < 0):
            raise DomainError("probabilities must be nonnegative")
        total = math.fsum(probs.tolist())
        if abs(total - 1.0) > _PROB_TOL:
            raise DomainError(f"probabilities sum to {total!r}, not 1")
        self.atoms = atoms
        self.probs = probs
        self._index = {a: i for i, a in enumerate(atoms)}

    def __len__(self) -> int:
        return len(self.atoms)

    def __repr__(self) -> str:
        return f"FiniteDist({len(self)} atoms)"

    def index(self, atom: Any) -> int:
        try:
            return self._index[atom]
        except KeyError:
            raise DomainError(f"{atom!r} is not an atom of this distribution") from None

    def density(self, x: Any) -> float:
        """Probability mass at atom ``x`` (error if x is not an atom)."""
        return float(self.probs[self.index(x)])

    def sample(self, rng: np.random.Generator, n: int) -> list:
        idx = rng.choice(len(self.atoms), size=n, p=self.probs)
        return [self.atoms[i] for i in idx]

    def same_support(self, other: "FiniteDist") -> bool:
        return self.atoms == other.atoms

    def to_json(self) -> dict:
        return {"type": "finite", "atoms": _jsonable(self.atoms), "probs": self.probs.tolist()}


def _jsonable(atoms: list) -> list:
    out = []
    for a in atoms:
        if isinstance(a, tuple):
            out.append(list(a))
        elif isinstance(a, (np.integer,)):
            out.append(int(a))
        elif isinstance(a, (np.floating,)):
            out.append(float(a))
        else:
            out.append(a)
    return out


# ---------------------------------------------------------------------------
# Gaussian mixtures (diagonal covariance, dim 1 or 2)
# ---------------------------------------------------------------------------


class GaussianMixture:
    """Mixture of axis-aligned Gaussians in 1 or 2 dimensions."""

    def __init__(self, weights: Sequence[float], means: Sequence, stds: Sequence):
        weights = np.asarray(weights, dtype=float)
        means = np.atleast_2d(np.asarray(means, dtype=float))
        if means.shape[0] == 1 and len(weights) > 1:
            means = means.T  # a flat list of 1-d means came in as one row
        stds = np.asarray(stds, dtype=float)
        k, dim = means.shape
        if dim not in (1, 2):
            raise DomainError(f"only dim 1 or 2 supported, got {dim}")
        if stds.ndim == 0:
            stds = np.full((k, dim), float(stds))
        elif stds.ndim == 1:
            if stds.shape[0] == k:
                stds = np.repeat(stds[:, None], dim, axis=1)
            else:
                raise DomainError("stds must be scalar or per-component")
        if stds.shape != (k, dim):
            raise DomainError(f"stds shape {stds.shape} incompatible with {k} components of dim {dim}")
        if len(weights) != k:
            raise DomainError("weights and means must have equal length")
        if np.any(weights < 0) or abs(math.fsum(weights.tolist()) - 1.0) > _PROB_TOL:
            raise DomainError("weights must be a probability vector")
        if np.any(stds <= 0):
            raise DomainError("standard deviations must be positive")
        self.weights = weights
        self.means = means
        self.stds = stds
        self.dim = dim
        self._log_w = np.log(weights, out=np.full_like(weights, -np.inf), where=weights > 0)
        self._log_norm = -np.sum(np.log(stds), axis=1) - 0.5 * dim * math.log(2 * math.pi)

    @property
    def n_components(self) -> int:
        return len(self.weights)

    def __repr__(self) -> str:
        return f"GaussianMixture(k={self.n_components}, dim={self.dim})"

    def _points(self, x) -> np.ndarray:
        pts = np.asarray(x, dtype=float)
        if self.dim == 1:
            return pts.reshape(-1, 1)
        if pts.ndim == 1:
            return pts.reshape(1, 2)
        return pts.reshape(-1, 2)

    def log_density(self, x) -> np.ndarray | float:
        """Log density; exact in log space even deep in the tails."""
        pts = self._points(x)  # (n, dim)
        z = (pts[:, None, :] - self.means[None, :, :]) / self.stds[None, :, :]
        comp = self._log_w + self._log_norm - 0.5 * np.sum(z * z, axis=2)
        if comp.shape[1] == 1:
            out = comp[:, 0]
        else:
            # logsumexp by hand: component counts are tiny and this sits on
            # the hot path of every quadrature sweep
            m = np.max(comp, axis=1)
            out = m + np.log(np.sum(np.exp(comp - m[:, None]), axis=1))
        return _match_shape(out, x, self.dim)

    def density(self, x) -> np.ndarray | float:
        ld = self.log_density(x)
        return np.exp(ld) if isinstance(ld, np.ndarray) else math.exp(ld)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        comps = rng.choice(self.n_components, size=n, p=self.weights)
        eps = rng.standard_normal((n, self.dim))
        out = self.means[comps] + eps * self.stds[comps]
        return out[:, 0] if self.dim == 1 else out

    def support_box(self, span: float = 8.0) -> tuple[np.ndarray, np.ndarray]:
        """Axis-aligned box: union of component mean ± span·std intervals."""
        lo = np.min(self.means - span * self.stds, axis=0)
        hi = np.max(self.means + span * self.stds, axis=0)
        return lo, hi

    def to_json(self) -> dict:
        return {
            "type": "gaussian_mixture",
            "weights": self.weights.tolist(),
            "means": self.means.tolist(),
            "stds": self.stds.tolist(),
        }


def _match_shape(out: np.ndarray, x, dim: int):
    """Return a scalar for scalar-ish input, else the flat array."""
    arr = np.asarray(x)
    if dim == 1 and arr.ndim == 0:
        return float(out[0])
    if dim == 2 and arr.ndim == 1:
        return float(out[0])
    return out


Distribution = FiniteDist | GaussianMixture


def dist_from_json(obj: dict) -> Distribution:
    kind = obj.get("type")
    if kind == "finite":
        atoms = [tuple(a) if isinstance(a, list) else a for a in obj["atoms"]]
        return FiniteDist(atoms, obj["probs"])
    if kind == "gaussian_mixture":
        return GaussianMixture(obj["weights"], obj["means"], obj["stds"])
    raise DomainError(f"unknown distribution type {kind!r}")


# ---------------------------------------------------------------------------
# Likelihood ratios
# ---------------------------------------------------------------------------


@dataclass
class RatioFn:
    """Likelihood-ratio evaluator r(x) = target(x) / model(x).

    ``log`` evaluates log r(x); ``__call__`` exponentiates it. Keeping the
    log form public matters: mixture pairs can have log-ratios of several
    hundred where exp() would overflow.
    """

    log_fn: Callable[[Any], np.ndarray | float]
    kind: str = "analytic"
    calls: int = field(default=0, compare=False)  # points evaluated, not batches

    def log(self, x) -> np.ndarray | float:
        if np.isscalar(x) or isinstance(x, tuple):
            self.calls += 1
        else:
            self.calls += len(x)
        return self.log_fn(x)

    def __call__(self, x) -> np.ndarray | float:
        lr = self.log(x)
        return np.exp(lr) if isinstance(lr, np.ndarray) else math.exp(lr)


def ratio_of(target: Distribution, model: Distribution) -> RatioFn:
    """Exact likelihood ratio of two distributions of the same family.

    Finite/finite pairs must share the atom list; an atom with model mass 0
    and target mass > 0 is a zero-denominator error.
    """
    if isinstance(target, FiniteDist) and isinstance(model, FiniteDist):
        if not target.same_support(model):
            raise SupportMismatchError("ratio requires identical atom lists")
        bad = np.flatnonzero((model.probs == 0) & (target.probs > 0))
        if bad.size:
            raise DomainError(
                f"zero-denominator: model mass is 0 at atom index {bad[0]} "
                f"({target.atoms[bad[0]]!r}) where target mass is positive"
            )
        with np.errstate(divide="ignore"):
            log_table = np.where(
                target.probs > 0,
                np.log(target.probs, where=target.probs > 0, out=np.full_like(target.probs, -np.inf))
                - np.log(model.probs, where=model.probs > 0, out=np.zeros_like(model.probs)),
                -np.inf,
            )
        index = model._index

        def log_fn(x):
            if isinstance(x, (list, np.ndarray)) and not np.isscalar(x):
                return np.array([log_table[index[a]] for a in x])
            return float(log_table[index[x]])

        return RatioFn(log_fn, kind="finite")

    if isinstance(target, GaussianMixture) and isinstance(model, GaussianMixture):
        if target.dim != model.dim:
            raise SupportMismatchError("mixture dimensions differ")

        def log_fn(x):
            return target.log_density(x) - model.log_density(x)

        return RatioFn(log_fn, kind="mixture")

    raise SupportMismatchError("ratio_of needs two finite or two mixture distributions")


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------


def trapezoid_grid(
    dists: Sequence[GaussianMixture], n_nodes: int = 4096, span: float = 8.0
) -> tuple[np.ndarray, np.ndarray]:
    """Composite-trapezoid nodes/weights covering every mixture's support.

    The domain is the union of all component mean ± span·std intervals of
    all the 1-d mixtures given. For smooth, rapidly decaying integrands the
    rule converges superalgebraically, so 4096 nodes are effectively exact.
    """
    if n_nodes < 2:
        raise DomainError("need at least 2 nodes")
    los, his = [], []
    for d in dists:
        if d.dim != 1:
            raise DomainError("trapezoid_grid handles 1-d mixtures only")
        lo, hi = d.support_box(span)
        los.append(lo[0])
        his.append(hi[0])
    lo, hi = min(los), max(his)
    x = np.linspace(lo, hi, n_nodes)
    h = (hi - lo) / (n_nodes - 1)
    w = np.full(n_nodes, h)
    w[0] = w[-1] = h / 2
    return x, w


# ---------------------------------------------------------------------------
# Named experiment families
# ---------------------------------------------------------------------------


def spacing_mismatch_pair(
    theta: float, spacing_target: float = 1.0
) -> tuple[GaussianMixture, GaussianMixture]:
    """Ten equal 1-d modes: target at spacing ``spacing_target``, model at ``theta``.

    Both mixtures are centered at 0. The target has component variance 0.3,
    the model 0.4, so sweeping theta traces how mode-spacing mismatch moves
    divergence landscapes.
    """
    if theta <= 0:
        raise DomainError("spacing theta must be positive")
    offsets = np.arange(10) - 4.5
    target = GaussianMixture(
        np.full(10, 0.1), (offsets * spacing_target)[:, None], math.sqrt(0.3)
    )
    model = GaussianMixture(np.full(10, 0.1), (offsets * theta)[:, None], math.sqrt(0.4))
    return target, model


def bimodal_target(mu: float = 2.0, sigma: float = 0.5) -> GaussianMixture:
    """Equal two-mode 1-d mixture at ±mu."""
    return GaussianMixture([0.5, 0.5], [[-mu], [mu]], sigma)


def single_gaussian(mu: float, sigma: float) -> GaussianMixture:
    return GaussianMixture([1.0], [[mu]], sigma)


def gaussian_grid_2d(
    sigma: float = 0.05, spacing: float = 1.0, weights: Sequence[float] | None = None
) -> GaussianMixture:
    """5×5 lattice of 2-d Gaussians centered on {−2s..2s}², equal weights by default."""
    axis = spacing * (np.arange(5) - 2.0)
    means = np.array([(a, b) for a in axis for b in axis])
    if weights is None:
        weights = np.full(25, 1.0 / 25.0)
    return GaussianMixture(weights, means, sigma)

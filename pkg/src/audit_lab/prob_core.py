"""Exponential-family core: parameter sets, smoothness constants, concrete
families, and the sampling primitives the auditors build on.

A family is the density  h(x) * exp(theta^T T(x) - W(theta))  with natural
parameter theta in a known convex set.  Specs are immutable behavior bundles
(closures), so new families can be added without touching the auditors; the
two shipped families (spherical Gaussian with known sigma^2, and the 1-D
Exponential with theta < 0) both have exact samplers.

All probability math is float64 and densities are handled in log space.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, ParamOutOfSet, StreamExhausted
from .rng import RngStream

__all__ = [
    "SmoothnessConstants",
    "ParamSet",
    "BallParamSet",
    "BoxParamSet",
    "ExpFamilySpec",
    "spherical_gaussian_family",
    "exponential_family_1d",
    "log_density",
    "sample",
    "BernoulliStream",
    "sample_until_tau_successes",
]


@dataclass(frozen=True)
class SmoothnessConstants:
    """Curvature/regularity constants of a family over its parameter set.

    kappa / lam bound the Hessian of the log-partition (kappa*I <= Hess W
    <= lam*I), lipschitz_L bounds ||grad W||, ball_beta is the ball-radius
    constant (a ball of radius 1/ball_beta around each true parameter stays
    inside the set), and positivity_alpha floors the survival probability
    P[f=1 | Y, A] used by the truncated estimator.

    Normalization: kappa <= 1 and lipschitz_L, ball_beta >= 1.
    """

    kappa: float
    lam: float
    lipschitz_L: float
    ball_beta: float
    positivity_alpha: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.kappa <= self.lam):
            raise DomainError(f"need 0 < kappa <= lam, got {self.kappa}, {self.lam}")
        if self.kappa > 1.0:
            raise DomainError("kappa must be <= 1 (normalization)")
        if self.lipschitz_L < 1.0:
            raise DomainError("lipschitz_L must be >= 1 (normalization)")
        if self.ball_beta < 1.0:
            raise DomainError("ball_beta must be >= 1 (normalization)")
        if not (0.0 < self.positivity_alpha <= 1.0):
            raise DomainError("positivity_alpha must be in (0, 1]")


class ParamSet:
    """Convex parameter set with membership and exact Euclidean projection."""

    def contains(self, theta: np.ndarray) -> bool:  # pragma: no cover
        raise NotImplementedError

    def project(self, theta: np.ndarray) -> np.ndarray:  # pragma: no cover
        raise NotImplementedError


@dataclass(frozen=True)
class BallParamSet(ParamSet):
    """Euclidean ball {theta : ||theta - center|| <= radius}."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if self.radius <= 0:
            raise DomainError("ball radius must be positive")

    def contains(self, theta: np.ndarray) -> bool:
        v = np.asarray(theta, dtype=float) - self.center
        return float(np.linalg.norm(v)) <= self.radius * (1.0 + 1e-12)

    def project(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        v = theta - self.center
        norm = float(np.linalg.norm(v))
        if norm <= self.radius:
            return theta
        return self.center + v * (self.radius / norm)


@dataclass(frozen=True)
class BoxParamSet(ParamSet):
    """Axis-aligned box; projection is per-coordinate clamping."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lo, dtype=float))
        hi = np.atleast_1d(np.asarray(self.hi, dtype=float))
        if lo.shape != hi.shape or np.any(lo > hi):
            raise DomainError("box bounds must satisfy lo <= hi coordinatewise")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def contains(self, theta: np.ndarray) -> bool:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        eps = 1e-12 * (1.0 + np.abs(self.lo) + np.abs(self.hi))
        return bool(np.all(theta >= self.lo - eps) and np.all(theta <= self.hi + eps))

    def project(self, theta: np.ndarray) -> np.ndarray:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        return np.clip(theta, self.lo, self.hi)


@dataclass(frozen=True)
class ExpFamilySpec:
    """Behavior bundle for one exponential family.

    All callables are batch-capable: points are arrays of shape (n, dim)
    (a single point of shape (dim,) is also accepted).
    """

    name: str
    dim: int
    log_base_measure: Callable[[np.ndarray], np.ndarray]
    suff_stat: Callable[[np.ndarray], np.ndarray]
    log_partition: Callable[[np.ndarray], float]
    grad_log_partition: Callable[[np.ndarray], np.ndarray]
    sampler: Callable[[np.ndarray, RngStream, Optional[int]], np.ndarray]
    constants: SmoothnessConstants
    param_set: ParamSet
    # Closed-form moment inversion (mean of T -> theta), when available.
    moments_to_natural: Optional[Callable[[np.ndarray], np.ndarray]] = None
    # Max polynomial degree of the components of T (enters kappa_f).
    suff_stat_degree: int = 1
    # One draw per row of a (c, dim) parameter stack; enables vectorized
    # rejection sampling across independent SGD chains.  Falls back to a
    # per-row loop over ``sampler`` when absent.
    sampler_multi: Optional[Callable[[np.ndarray, RngStream], np.ndarray]] = None

    def draw_multi(self, thetas: np.ndarray, rng: RngStream) -> np.ndarray:
        thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
        if self.sampler_multi is not None:
            return self.sampler_multi(thetas, rng)
        return np.stack([self.sampler(t, rng, None) for t in thetas])

    def require_in_set(self, theta: np.ndarray) -> np.ndarray:
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        if not self.param_set.contains(theta):
            raise ParamOutOfSet(f"theta {theta} outside parameter set of {self.name}")
        return theta


def _as_points(x, dim: int) -> tuple[np.ndarray, bool]:
    """Normalize a point or batch to shape (n, dim); flag single points."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
        return arr, True
    if arr.ndim == 1:
        if dim == 1 and arr.shape[0] != 1:
            return arr.reshape(-1, 1), False
        return arr.reshape(1, dim), True
    return arr, False


def log_density(spec: ExpFamilySpec, theta, x):
    """log h(x) + theta^T T(x) - W(theta) for a point or a batch of points."""
    theta = spec.require_in_set(theta)
    pts, single = _as_points(x, spec.dim)
    out = spec.log_base_measure(pts) + spec.suff_stat(pts) @ theta - spec.log_partition(theta)
    return float(out[0]) if single else out


def sample(spec: ExpFamilySpec, theta, rng: RngStream, size: Optional[int] = None):
    """Draw from the density; empirical mean of T converges to grad W(theta)."""
    theta = spec.require_in_set(theta)
    return spec.sampler(theta, rng, size)


def spherical_gaussian_family(
    d: int,
    sigma2: float,
    param_set: Optional[ParamSet] = None,
    constants: Optional[SmoothnessConstants] = None,
) -> ExpFamilySpec:
    """Spherical Gaussian in R^d with known shared variance sigma^2.

    Natural parameter theta = mu / sigma^2, T(x) = x, and
    W(theta) = (sigma^2/2)||theta||^2 + (d/2) log(2 pi sigma^2).
    """
    if d < 1 or sigma2 <= 0:
        raise DomainError("need d >= 1 and sigma2 > 0")
    sigma2 = float(sigma2)
    log_norm = 0.5 * d * np.log(2.0 * np.pi * sigma2)
    if param_set is None:
        param_set = BallParamSet(np.zeros(d), 50.0)
    if constants is None:
        radius = getattr(param_set, "radius", 50.0)
        constants = SmoothnessConstants(
            kappa=min(1.0, sigma2),
            lam=sigma2,
            lipschitz_L=max(1.0, sigma2 * radius),
            ball_beta=1.0,
        )

    def log_h(pts):
        return -0.5 * np.sum(pts * pts, axis=1) / sigma2

    def suff(pts):
        return pts

    def W(theta):
        theta = np.asarray(theta, dtype=float)
        return 0.5 * sigma2 * float(theta @ theta) + log_norm

    def gradW(theta):
        return sigma2 * np.asarray(theta, dtype=float)

    def sampler(theta, rng: RngStream, size=None):
        mu = sigma2 * np.asarray(theta, dtype=float)
        n = 1 if size is None else int(size)
        x = mu + np.sqrt(sigma2) * rng.np.standard_normal((n, d))
        return x[0] if size is None else x

    def moments_to_natural(t_bar):
        return np.asarray(t_bar, dtype=float) / sigma2

    def sampler_multi(thetas, rng: RngStream):
        mus = sigma2 * thetas
        return mus + np.sqrt(sigma2) * rng.np.standard_normal(mus.shape)

    return ExpFamilySpec(
        name=f"spherical_gaussian(d={d}, sigma2={sigma2:g})",
        dim=d,
        log_base_measure=log_h,
        suff_stat=suff,
        log_partition=W,
        grad_log_partition=gradW,
        sampler=sampler,
        constants=constants,
        param_set=param_set,
        moments_to_natural=moments_to_natural,
        suff_stat_degree=1,
        sampler_multi=sampler_multi,
    )


def exponential_family_1d(
    param_set: Optional[ParamSet] = None,
    constants: Optional[SmoothnessConstants] = None,
) -> ExpFamilySpec:
    """1-D Exponential distribution: density -theta * exp(theta x) on x >= 0.

    theta < 0, T(x) = x, W(theta) = -log(-theta), grad W = -1/theta.
    """
    if param_set is None:
        param_set = BoxParamSet(np.array([-10.0]), np.array([-0.1]))
    if constants is None:
        # Hess W = 1/theta^2 over the default box [-10, -0.1].
        constants = SmoothnessConstants(
            kappa=0.01, lam=100.0, lipschitz_L=10.0, ball_beta=1.0
        )

    def log_h(pts):
        out = np.zeros(pts.shape[0])
        out[pts[:, 0] < 0] = -np.inf
        return out

    def suff(pts):
        return pts

    def W(theta):
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        return -float(np.log(-theta[0]))

    def gradW(theta):
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        return -1.0 / theta

    def sampler(theta, rng: RngStream, size=None):
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        rate = -theta[0]
        n = 1 if size is None else int(size)
        x = rng.np.exponential(1.0 / rate, size=(n, 1))
        return x[0] if size is None else x

    def moments_to_natural(t_bar):
        t_bar = np.atleast_1d(np.asarray(t_bar, dtype=float))
        if t_bar[0] <= 0:
            from .errors import DegenerateMoments

            raise DegenerateMoments("mean of T must be positive for the Exponential family")
        return np.array([-1.0 / t_bar[0]])

    def sampler_multi(thetas, rng: RngStream):
        rates = -thetas[:, 0]
        return (rng.np.exponential(1.0, size=len(rates)) / rates).reshape(-1, 1)

    return ExpFamilySpec(
        name="exponential_1d",
        dim=1,
        log_base_measure=log_h,
        suff_stat=suff,
        log_partition=W,
        grad_log_partition=gradW,
        sampler=sampler,
        constants=constants,
        param_set=param_set,
        moments_to_natural=moments_to_natural,
        suff_stat_degree=1,
        sampler_multi=sampler_multi,
    )


class BernoulliStream:
    """Unbounded seeded Bernoulli(p) stream with a chunked fast path."""

    def __init__(self, p: float, rng: RngStream):
        if not (0.0 < p < 1.0):
            raise DomainError("p must be in (0, 1)")
        self.p = float(p)
        self.rng = rng

    def take(self, k: int) -> np.ndarray:
        return (self.rng.np.random(int(k)) < self.p).astype(np.int8)

    def __iter__(self):
        while True:
            yield from self.take(4096)


def sample_until_tau_successes(stream, tau: int) -> int:
    """Draw from a Bernoulli stream until the tau-th success; return the
    1-based index N of that success.  tau/N is the plug-in estimate of the
    success probability.

    ``stream`` is any iterable of {0,1} outcomes; a ``BernoulliStream`` (or
    anything with a ``take(k)`` chunk method) uses a vectorized path with
    identical semantics.
    """
    tau = int(tau)
    if tau < 1:
        raise DomainError("tau must be >= 1")

    if hasattr(stream, "take"):
        seen = 0
        successes = 0
        # Chunk size anticipates the remaining wait; grows geometrically.
        chunk = max(1024, 4 * tau)
        while True:
            draws = stream.take(chunk)
            hits = int(draws.sum())
            if successes + hits >= tau:
                need = tau - successes
                idx = np.flatnonzero(draws)[need - 1]
                return seen + int(idx) + 1
            successes += hits
            seen += len(draws)
            chunk = min(2 * chunk, 1 << 22)

    successes = 0
    n = 0
    for outcome in stream:
        n += 1
        if outcome:
            successes += 1
            if successes == tau:
                return n
    raise StreamExhausted(f"stream ended after {n} draws with {successes} < {tau} successes")

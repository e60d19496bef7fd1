"""Closed-form concentration bounds used as independent test oracles.

These are deliberately tiny pure functions: the Monte Carlo property suites
check empirical frequencies against them, so they must stay independent of
the sampling code they vouch for.  Bounds above 1 are returned as-is
(callers clip for display); keeping raw values preserves monotonicity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = ["TailBound", "negbin_bounds", "chernoff_bound", "kl_bernoulli", "ratio_bounds"]


@dataclass(frozen=True)
class TailBound:
    """Two-sided interval with the probability of falling outside it."""

    lo: float
    hi: float
    failure_prob: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise DomainError("need lo <= hi")


def negbin_bounds(tau: int, p: float, eps: float) -> TailBound:
    """Concentration of the stopping time N of a sample-until-tau-successes
    run on Bernoulli(p):

        P[(1 - eps) tau / p <= N <= (1 + eps) tau / p] >= 1 - 2 exp(-tau eps^2 / 4).

    The failure probability is reported raw; it exceeds 1 (vacuous) for
    small tau * eps^2.
    """
    if tau < 1:
        raise DomainError("tau must be >= 1")
    if not (0.0 < p < 1.0):
        raise DomainError("p must be in (0, 1)")
    if not (0.0 <= eps <= 1.0):
        raise DomainError("eps must be in [0, 1]")
    center = tau / p
    return TailBound(
        lo=(1.0 - eps) * center,
        hi=(1.0 + eps) * center,
        failure_prob=2.0 * math.exp(-tau * eps * eps / 4.0),
    )


def chernoff_bound(mu: float, eps: float) -> float:
    """Two-sided multiplicative Chernoff bound for a sum of independent
    Bernoullis with mean mu:  P[|X - mu| >= eps mu] <= 2 exp(-mu eps^2 / 3).
    """
    if mu <= 0:
        raise DomainError("mu must be positive")
    if not (0.0 < eps < 1.0):
        raise DomainError("eps must be in (0, 1)")
    return 2.0 * math.exp(-mu * eps * eps / 3.0)


def kl_bernoulli(p: float, q: float) -> float:
    """KL divergence D(Ber(p) || Ber(q)), natural log."""
    if not (0.0 < p < 1.0 and 0.0 < q < 1.0):
        raise DomainError("p and q must be in (0, 1)")
    return p * math.log(p / q) + (1.0 - p) * math.log((1.0 - p) / (1.0 - q))


def ratio_bounds(eps: float) -> tuple[float, float]:
    """Bracket for the ratios (1 - eps)/(1 + eps) and (1 + eps)/(1 - eps):

        (1 - eps)/(1 + eps) >= 1 - 2 eps   and   (1 + eps)/(1 - eps) <= 1 + 4 eps

    for eps in (0, 1/2).  Returns (1 - 2 eps, 1 + 4 eps).
    """
    if not (0.0 < eps < 0.5):
        raise DomainError("eps must be in (0, 1/2)")
    return 1.0 - 2.0 * eps, 1.0 + 4.0 * eps

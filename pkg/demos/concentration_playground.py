"""Sanity-check the concentration bounds that the test suites lean on.

The stopping-time estimator draws Bernoulli outcomes until tau successes;
its stopping index N is a sum of geometric waits, and tau/N estimates the
success probability.  The closed-form interval and failure bound below are
the oracles the Monte Carlo suites are checked against.
"""

import numpy as np

from audit_lab import (
    BernoulliStream,
    RngStream,
    chernoff_bound,
    kl_bernoulli,
    negbin_bounds,
    ratio_bounds,
    sample_until_tau_successes,
)

print("stopping-time concentration (tau successes of a Ber(p) stream):")
rng = RngStream(0)
for p, tau, eps in ((0.3, 2000, 0.1), (0.1, 500, 0.2)):
    bound = negbin_bounds(tau, p, eps)
    ns = np.array(
        [sample_until_tau_successes(BernoulliStream(p, rng), tau) for _ in range(1000)]
    )
    outside = float(np.mean((ns < bound.lo) | (ns > bound.hi)))
    print(f"  p={p}, tau={tau}, eps={eps}: N in [{bound.lo:,.0f}, {bound.hi:,.0f}] "
          f"missed {outside:.4f} of the time (bound {min(bound.failure_prob, 1):.4f})")
    print(f"    estimate tau/N: mean {np.mean(tau / ns):.4f} vs true {p}")

print("\nmultiplicative Chernoff tail 2 exp(-mu eps^2 / 3):")
for mu in (300, 3000):
    print(f"  mu={mu}, eps=0.1 -> {chernoff_bound(mu, 0.1):.6f}")

print("\nBernoulli KL and its quadratic upper bounds:")
q, e = 0.3, 0.05
print(f"  KL(Ber(q) || Ber(q(1+8e))) = {kl_bernoulli(q, q * (1 + 8 * e)):.6f} "
      f"<= 64 q e^2 = {64 * q * e * e:.6f}")
print(f"  KL(Ber(q(1+8e)) || Ber(q)) = {kl_bernoulli(q * (1 + 8 * e), q):.6f} "
      f"<= 128 q e^2 = {128 * q * e * e:.6f}")

print("\nratio brackets for (1 +- eps) factors:")
for e in (0.1, 0.25):
    lo, hi = ratio_bounds(e)
    print(f"  eps={e}: (1-e)/(1+e) = {(1 - e) / (1 + e):.4f} >= {lo}; "
          f"(1+e)/(1-e) = {(1 + e) / (1 - e):.4f} <= {hi}")

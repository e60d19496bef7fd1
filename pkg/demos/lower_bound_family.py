"""The matched FAIR/UNFAIR instance pair behind the label-complexity lower
bound, in exact rational arithmetic.

Both hypotheses share every quantity an auditor can see for free: the
positive rate per group and the label distribution among positives.  They
differ only in what the paid labels of negatively classified individuals
reveal, which is why distinguishing them forces label purchases, and why
the number of purchases must scale like 1/eps^2.
"""

from fractions import Fraction

import numpy as np

from audit_lab import (
    PartialFeedbackEnv,
    RngStream,
    generate_past_database,
    make_lower_bound_pair,
    population_summary,
    rs_audit,
)

eps, p, q = Fraction(1, 10), Fraction(3, 10), Fraction(3, 10)
fair, unfair = make_lower_bound_pair(eps, p, q)

print(f"construction: eps={eps}, p={p}, q={q}")
print(f"FAIR   true EOD = {population_summary(fair, None, 'exact').eod}")
print(f"UNFAIR true EOD = {population_summary(unfair, None, 'exact').eod} "
      f"(= 2 eps / (1 + 4 eps), and > eps)")

print("\nwhat the free data shows (identical across hypotheses):")
for a in (0, 1):
    pf_fair = sum(fair.joint_conditional(1, y, a) for y in (0, 1))
    pf_unfair = sum(unfair.joint_conditional(1, y, a) for y in (0, 1))
    print(f"  P[f=1 | A={a}]: FAIR {pf_fair} vs UNFAIR {pf_unfair}")

print("\nlabel purchases of RS-Audit scale like 1/eps^2:")
labels = []
eps_grid = (0.2, 0.1, 0.05)
for e in eps_grid:
    per_seed = []
    for s in (0, 1):
        rng = RngStream(300 + s)
        need = int(30 * 576 * np.log(16 / 0.05) / e**2)
        db = generate_past_database(unfair, None, need, rng, keep_features=False)
        env = PartialFeedbackEnv(unfair, None, 0.0, 1.0, rng)
        per_seed.append(rs_audit(env, db, e, 0.05).labels_requested)
    labels.append(float(np.mean(per_seed)))
    print(f"  eps={e:<5} labels requested ~ {labels[-1]:,.0f}")

slope = np.polyfit(np.log([1 / e**2 for e in eps_grid]), np.log(labels), 1)[0]
print(f"log-log slope of labels vs 1/eps^2: {slope:.3f} (theory: 1)")

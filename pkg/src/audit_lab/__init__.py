"""Cost-efficient fairness auditing under partial feedback.

Library layout:

* ``prob_core``       exponential families, parameter sets, seeded sampling
* ``stats``           closed-form concentration bounds (test oracles)
* ``instances``       data-generating audit instances and classifiers
* ``environment``     the partial-feedback protocol and cost ledger
* ``audit_blackbox``  Baseline and RS-Audit
* ``audit_mixture``   TruncEst, MAP oracle, Exp-Audit
* ``harness``         dataset ingestion, sweeps, results emission
* ``cli``             the ``audit-lab`` command
"""

from .audit_blackbox import (
    AuditReport,
    Caps,
    CellEstimates,
    baseline_audit,
    compute_tau,
    decide,
    online_sample,
    past_sample,
    rs_audit,
)
from .audit_mixture import (
    MapOracle,
    TheoreticalSchedule,
    TruncEstConfig,
    compute_R,
    exp_audit,
    map_classify,
    map_classify_batch,
    mle_from_moments,
    practical_trunc_config,
    project_to_feasible,
    sample_gradient,
    theoretical_schedule,
    trunc_est,
)
from .environment import (
    CostLedger,
    Individual,
    PartialFeedbackEnv,
    PastDatabase,
    generate_past_database,
)
from .errors import *  # noqa: F401,F403
from .instances import (
    Classifier,
    ConstantClassifier,
    EmpiricalAuditInstance,
    LogisticConfig,
    LogisticModel,
    LowerBoundInstance,
    MixtureAuditInstance,
    MixtureConfig,
    PopulationSummary,
    builtin_classifier,
    empirical_instance_from_numeric,
    generate_separated_mixture,
    make_lower_bound_pair,
    population_summary,
    separation_radius,
    train_logistic,
    train_logistic_numeric,
)
from .prob_core import (
    BallParamSet,
    BernoulliStream,
    BoxParamSet,
    ExpFamilySpec,
    ParamSet,
    SmoothnessConstants,
    exponential_family_1d,
    log_density,
    sample,
    sample_until_tau_successes,
    spherical_gaussian_family,
)
from .rng import RngStream, derive_seed
from .stats import TailBound, chernoff_bound, kl_bernoulli, negbin_bounds, ratio_bounds

__version__ = "0.1.0"

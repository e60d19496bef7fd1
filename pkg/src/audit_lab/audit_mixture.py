"""Mixture-model auditor: truncated-sample parameter estimation, the
approximate-MAP label proxy, and the full Exp-Audit loop.

The past database, restricted to one (y, a) cell, is an i.i.d. sample from
the exponential-family component theta*_{y,a} truncated by the classifier's
acceptance region {f = 1}.  The estimator runs projected SGD on the
truncated negative log-likelihood; its stochastic gradient at theta is
T(Z') - T(Z) with Z a fresh data point and Z' a rejection-sampled draw from
the current component restricted to the acceptance region.  Independent
chains are run from a moment-based warm start and a candidate close to more
than half of the others is returned.

Exp-Audit then buys only a constant number of labels (a coarse weight
estimate), builds a per-group MAP oracle from the learned components, and
replaces further label purchases with feature-only draws classified by the
oracle.  That is the step that makes its label cost independent of the
audit tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .audit_blackbox import (
    AuditReport,
    Caps,
    CellEstimates,
    _delta_hat_from_cells,
    _online_stop,
    decide,
    past_sample,
)
from .environment import PartialFeedbackEnv, PastDatabase
from .errors import (
    AcceptanceFailure,
    DegenerateMoments,
    DomainError,
    InfeasibleIntersection,
    InsufficientHistory,
    InsufficientSamples,
    NoMajorityCandidate,
)
from .instances import Classifier
from .prob_core import ExpFamilySpec, SmoothnessConstants, log_density
from .rng import RngStream

__all__ = [
    "TruncEstConfig",
    "TheoreticalSchedule",
    "MapOracle",
    "sample_gradient",
    "mle_from_moments",
    "project_to_feasible",
    "trunc_est",
    "theoretical_schedule",
    "map_classify",
    "map_classify_batch",
    "compute_R",
    "exp_audit",
    "practical_trunc_config",
]


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TruncEstConfig:
    """Estimation schedule.  ``eps_target`` is the desired parameter accuracy
    (internally rescaled by 1/sqrt(3)); the counts describe the warm start,
    the per-candidate chain length and the number of independent chains."""

    eps_target: float
    delta: float
    n_init: int = 1000
    m_per_candidate: int = 2000
    n_candidates: int = 10
    eta: float = 0.01
    max_accept_attempts: int = 100
    use_theoretical_schedule: bool = False
    # Candidate-cluster radius; None = 2 * eps_target (the analysis value),
    # widened adaptively under the practical schedule.
    majority_radius: Optional[float] = None
    # Emit tail-averaged iterates instead of the last iterate (practical
    # variance reduction; the theoretical schedule keeps last-iterate).
    average_tail: bool = True

    def __post_init__(self):
        if self.eps_target <= 0 or not (0 < self.delta < 1):
            raise DomainError("need eps_target > 0 and delta in (0, 1)")
        if min(self.n_init, self.m_per_candidate, self.n_candidates) < 1:
            raise DomainError("all schedule counts must be >= 1")
        if self.eta <= 0:
            raise DomainError("eta must be positive")


def practical_trunc_config(
    n_available: int,
    eps_target: float,
    delta: float,
    constants: SmoothnessConstants,
) -> TruncEstConfig:
    """Desk-scale schedule fitted to the available cell size.

    Chain count follows 10 ceil(log(1/delta)); the chain length shrinks to
    fit the data (chains consume disjoint slices).  Raises
    InsufficientSamples when no usable schedule fits.
    """
    n_candidates = max(10, 10 * math.ceil(math.log(1.0 / delta)))
    n_init = min(1000, max(50, n_available // 5))
    rest = n_available - n_init
    # Chain length matters more than amplification count at desk scale:
    # trade candidates away before letting chains drop below ~100 steps.
    if rest // n_candidates < 100:
        n_candidates = max(10, min(n_candidates, rest // 100))
    m = min(2000, rest // n_candidates)
    if m < 10:
        raise InsufficientSamples(
            f"cell of {n_available} samples cannot support the practical schedule"
        )
    return TruncEstConfig(
        eps_target=eps_target,
        delta=delta,
        n_init=n_init,
        m_per_candidate=m,
        n_candidates=n_candidates,
        eta=0.01 * constants.kappa,
        max_accept_attempts=int(math.ceil(10.0 / constants.positivity_alpha)),
    )


@dataclass(frozen=True)
class TheoreticalSchedule:
    """The literature schedule, exposed for reference.  The constants are
    astronomically conservative; ``practical_trunc_config`` is the default."""

    d_alpha: float
    kappa_f: float
    lambda_f: float
    rho_sq: float
    G: float
    C: float
    k: int
    n: int
    m: int
    eta: float


def theoretical_schedule(
    c: SmoothnessConstants,
    dim: int,
    eps: float,
    delta: float,
    C: float = 1.0,
    k: int = 1,
) -> TheoreticalSchedule:
    """Evaluate the full theoretical constant chain:

        d(alpha) = eps^2 + 2 beta log(1/alpha)
        kappa_f  = (1/2) (alpha^2 exp(-6 (lam/kappa^2) d(alpha)^2) / (4 C k))^{2k} kappa
        lambda_f = exp(6 (lam/kappa^2) d(alpha)^2) / alpha^2 * lam
        rho^2    = dim (lambda_f + lam)
                   + (1 + 2 lam/kappa)^2 (12 beta lam / kappa^2 * d(alpha)^2
                                          - 4 beta log(alpha) + eps^2)^2
        G        = rho^2 / (kappa_f^2 eps^2)
        n >= 2 beta log(1/delta) / eps^2
        eta      = min(kappa_f eps^2 / (2 rho^2), 1 / kappa_f)
        m >= (G v 1/2) log(d(alpha) / (kappa eps^2))
    """
    if eps <= 0 or not (0 < delta < 1):
        raise DomainError("need eps > 0 and delta in (0, 1)")
    alpha, beta, kap, lam = c.positivity_alpha, c.ball_beta, c.kappa, c.lam
    d_alpha = eps * eps + 2.0 * beta * math.log(1.0 / alpha)
    bend = 6.0 * (lam / (kap * kap)) * d_alpha * d_alpha
    kappa_f = 0.5 * (alpha * alpha * math.exp(-bend) / (4.0 * C * k)) ** (2 * k) * kap
    lambda_f = math.exp(bend) / (alpha * alpha) * lam
    rho_sq = dim * (lambda_f + lam) + (1.0 + 2.0 * lam / kap) ** 2 * (
        12.0 * beta * lam / (kap * kap) * d_alpha * d_alpha
        - 4.0 * beta * math.log(alpha)
        + eps * eps
    ) ** 2
    G = rho_sq / (kappa_f * kappa_f * eps * eps)
    n = int(math.ceil(2.0 * beta * math.log(1.0 / delta) / (eps * eps)))
    eta = min(kappa_f * eps * eps / (2.0 * rho_sq), 1.0 / kappa_f)
    log_arg = max(d_alpha / (kap * eps * eps), math.e)
    m = int(math.ceil(max(G, 0.5) * math.log(log_arg)))
    return TheoreticalSchedule(d_alpha, kappa_f, lambda_f, rho_sq, G, C, k, n, m, eta)


# ---------------------------------------------------------------------------
# Estimation primitives
# ---------------------------------------------------------------------------


def sample_gradient(
    z,
    theta: np.ndarray,
    f: Callable,
    spec: ExpFamilySpec,
    rng: RngStream,
    max_attempts: int = 100,
) -> np.ndarray:
    """Unbiased stochastic gradient of the truncated negative log-likelihood:
    draw Z' from the component at theta until f(Z') = 1, return T(Z') - T(z).
    """
    if max_attempts < 1:
        raise DomainError("max_attempts must be >= 1")
    theta = spec.require_in_set(theta)
    t_z = np.atleast_2d(spec.suff_stat(np.atleast_2d(np.asarray(z, dtype=float))))[0]
    for _ in range(int(max_attempts)):
        z_new = spec.sampler(theta, rng, None)
        if int(np.atleast_1d(f(np.atleast_2d(z_new)))[0]) == 1:
            t_new = spec.suff_stat(np.atleast_2d(z_new))[0]
            return t_new - t_z
    raise AcceptanceFailure(
        f"no accepted draw in {max_attempts} attempts (positivity violated or theta far off)"
    )


def mle_from_moments(spec: ExpFamilySpec, samples: np.ndarray) -> np.ndarray:
    """Moment-matching estimate: theta with grad W(theta) = mean of T.

    Closed form where the family provides one; otherwise minimizes the
    strongly convex W(theta) - theta^T T-bar by descent to gradient norm
    <= 1e-8.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if samples.size == 0:
        raise DegenerateMoments("no samples")
    t_bar = spec.suff_stat(samples).mean(axis=0)
    if spec.moments_to_natural is not None:
        return np.atleast_1d(spec.moments_to_natural(t_bar))
    theta = np.atleast_1d(spec.param_set.project(np.zeros(spec.dim)))
    lr = 1.0 / spec.constants.lam
    for _ in range(20000):
        grad = spec.grad_log_partition(theta) - t_bar
        if float(np.linalg.norm(grad)) <= 1e-8:
            return theta
        theta = spec.param_set.project(theta - lr * grad)
    raise DegenerateMoments("moment inversion did not converge; T-bar outside moment range?")


def project_to_feasible(
    theta: np.ndarray, theta0: np.ndarray, radius: float, param_set
) -> np.ndarray:
    """Project onto ball(theta0, radius) intersected with the parameter set
    by alternating projections (<= 100 rounds, tolerance 1e-10)."""
    if radius <= 0:
        raise DomainError("radius must be positive")
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    theta0 = np.atleast_1d(np.asarray(theta0, dtype=float))
    for _ in range(100):
        v = theta - theta0
        norm = float(np.linalg.norm(v))
        if norm > radius:
            theta = theta0 + v * (radius / norm)
        theta = param_set.project(theta)
        in_ball = float(np.linalg.norm(theta - theta0)) <= radius + 1e-10
        if in_ball and param_set.contains(theta):
            return theta
    raise InfeasibleIntersection("alternating projection failed to converge")


def _project_chain_batch(thetas, theta0, radius, param_set):
    """Row-wise feasibility projection for a stack of SGD chains."""
    v = thetas - theta0
    norms = np.linalg.norm(v, axis=1)
    over = norms > radius
    if np.any(over):
        thetas = thetas.copy()
        thetas[over] = theta0 + v[over] * (radius / norms[over])[:, None]
    # Both shipped parameter-set shapes commute well with one extra pass.
    from .prob_core import BallParamSet, BoxParamSet

    if isinstance(param_set, BoxParamSet):
        return np.clip(thetas, param_set.lo, param_set.hi)
    if isinstance(param_set, BallParamSet):
        w = thetas - param_set.center
        norms = np.linalg.norm(w, axis=1)
        over = norms > param_set.radius
        if np.any(over):
            thetas = thetas.copy()
            thetas[over] = (
                param_set.center + w[over] * (param_set.radius / norms[over])[:, None]
            )
        return thetas
    return np.stack(
        [project_to_feasible(t, theta0, radius, param_set) for t in thetas]
    )


def _accepted_draws_batch(
    spec: ExpFamilySpec,
    thetas: np.ndarray,
    f_batch: Callable,
    rng: RngStream,
    max_attempts: int,
) -> np.ndarray:
    """One accepted draw per chain, vectorized across chains."""
    n = len(thetas)
    out = None
    pending = np.arange(n)
    for _ in range(int(max_attempts)):
        draws = spec.draw_multi(thetas[pending], rng)
        if out is None:
            out = np.empty((n, draws.shape[1]))
        accepted = np.asarray(f_batch(draws)).astype(bool)
        out[pending[accepted]] = draws[accepted]
        pending = pending[~accepted]
        if len(pending) == 0:
            return out
    raise AcceptanceFailure(
        f"{len(pending)} chains found no accepted draw in {max_attempts} attempts"
    )


def _select_candidate(
    candidates: np.ndarray, eps_target: float, config: TruncEstConfig
) -> np.ndarray:
    """Pick a candidate close to more than half of the others."""
    v = len(candidates)
    diffs = candidates[:, None, :] - candidates[None, :, :]
    dist = np.linalg.norm(diffs, axis=2)
    radius = config.majority_radius
    if radius is None:
        radius = 2.0 * eps_target
        if not config.use_theoretical_schedule and v > 1:
            off_diag = dist[~np.eye(v, dtype=bool)]
            radius = max(radius, 2.0 * float(np.median(off_diag)))
    counts = (dist <= radius).sum(axis=1)  # includes self
    best = int(np.argmax(counts))
    if counts[best] > v / 2.0:
        return candidates[best]
    raise NoMajorityCandidate(
        f"best candidate is within {radius:.4g} of only {counts[best] - 1} of {v - 1} others"
    )


def _run_chains(data, spec, f_batch, config, theta0, radius, rng):
    """n_candidates independent projected-SGD chains over disjoint slices."""
    C, m = config.n_candidates, config.m_per_candidate
    t_data = spec.suff_stat(data)  # (C*m, dim)
    thetas = np.tile(theta0, (C, 1))
    offsets = np.arange(C) * m
    tail_start = m // 2
    tail_sum = np.zeros_like(thetas)
    tail_n = 0
    # The per-call attempt cap is calibrated for one draw; across m*C draws
    # the failure tail must shrink with the number of draws, so widen it
    # logarithmically (expected work per step is still ~1/alpha).
    alpha = spec.constants.positivity_alpha
    cap = max(
        config.max_accept_attempts,
        int(math.ceil((10.0 + 3.0 * math.log(max(m * C, 2))) / alpha)),
    )
    for j in range(m):
        z_new = _accepted_draws_batch(
            spec, thetas, f_batch, rng, cap
        )
        grads = spec.suff_stat(z_new) - t_data[offsets + j]
        thetas = _project_chain_batch(
            thetas - config.eta * grads, theta0, radius, spec.param_set
        )
        if config.average_tail and j >= tail_start:
            tail_sum += thetas
            tail_n += 1
    if config.average_tail and tail_n > 0:
        return tail_sum / tail_n
    return thetas


def trunc_est(
    D_cell: np.ndarray,
    f,
    spec: ExpFamilySpec,
    config: TruncEstConfig,
    rng: RngStream,
) -> np.ndarray:
    """Estimate the component parameter from truncated (f = 1) samples.

    Warm start: moment inversion on the first n_init samples.  Then
    n_candidates independent projected-SGD chains of m steps, each step
    consuming one fresh data point and one rejection-sampled draw, each
    iterate projected to ball(theta0, (eps^2 + 2 beta log(1/alpha))/kappa)
    intersected with the parameter set.  Returns the candidate within the
    majority cluster; a failed cluster test is retried once on fresh data
    when the cell is large enough.
    """
    data = np.atleast_2d(np.asarray(D_cell, dtype=float))
    cfg = config
    if cfg.use_theoretical_schedule:
        sched = theoretical_schedule(
            spec.constants,
            spec.dim,
            cfg.eps_target / math.sqrt(3.0),
            cfg.delta,
            k=spec.suff_stat_degree,
        )
        cfg = replace(
            cfg,
            n_init=sched.n,
            m_per_candidate=sched.m,
            n_candidates=max(1, 10 * math.ceil(math.log(1.0 / cfg.delta))),
            eta=sched.eta,
            average_tail=False,
        )
    need = cfg.n_init + cfg.n_candidates * cfg.m_per_candidate
    if len(data) < need:
        raise InsufficientSamples(f"cell has {len(data)} samples, schedule needs {need}")

    eps_int = cfg.eps_target / math.sqrt(3.0)
    consts = spec.constants
    radius = (eps_int * eps_int + 2.0 * consts.ball_beta * math.log(1.0 / consts.positivity_alpha)) / consts.kappa

    def f_batch(X):
        return np.asarray(f(X))

    theta0 = spec.param_set.project(mle_from_moments(spec, data[: cfg.n_init]))

    block = cfg.n_candidates * cfg.m_per_candidate
    attempts = 1 + (len(data) - cfg.n_init >= 2 * block)
    start = cfg.n_init
    last_error = None
    for _ in range(attempts):
        chain_data = data[start : start + block]
        candidates = _run_chains(chain_data, spec, f_batch, cfg, theta0, radius, rng)
        try:
            return _select_candidate(candidates, cfg.eps_target, cfg)
        except NoMajorityCandidate as err:  # retry once on fresh samples
            last_error = err
            start += block
    raise last_error


# ---------------------------------------------------------------------------
# MAP oracle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MapOracle:
    """Per-group proxy labeler: argmax_y q~_{y|a} * density(theta^_{y,a}, x),
    ties broken toward y = 1."""

    group: int
    weights: dict  # y -> q~_{y|a} (positive)
    params: dict  # y -> theta^_{y,a}
    family: ExpFamilySpec

    def __post_init__(self):
        if min(self.weights.values()) <= 0:
            raise DomainError("oracle weights must be positive")


def map_classify_batch(oracle: MapOracle, X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    score1 = math.log(oracle.weights[1]) + log_density(oracle.family, oracle.params[1], X)
    score0 = math.log(oracle.weights[0]) + log_density(oracle.family, oracle.params[0], X)
    return (score1 >= score0).astype(np.int8)


def map_classify(oracle: MapOracle, x) -> int:
    return int(map_classify_batch(oracle, np.atleast_2d(np.asarray(x, dtype=float)))[0])


def compute_R(q_tilde_min: float, eps: float, delta: float, n_groups: int, log_factor: float = 12.0) -> int:
    """Feature-only sample size R = ceil(3430 log(12 |A| / delta) / (q~ eps^2))."""
    if not (0.0 < q_tilde_min <= 1.0):
        raise DomainError("q_tilde_min must be in (0, 1]")
    if not (0.0 < eps < 1.0 and 0.0 < delta < 1.0):
        raise DomainError("eps and delta must be in (0, 1)")
    if n_groups < 2:
        raise DomainError("need at least two groups")
    return int(math.ceil(3430.0 * math.log(log_factor * n_groups / delta) / (q_tilde_min * eps * eps)))


# ---------------------------------------------------------------------------
# Exp-Audit
# ---------------------------------------------------------------------------


def _observe_features_for_group(env: PartialFeedbackEnv, a: int, r: int):
    """Draw until r individuals of group a are seen, paying c_feat only for
    their features when f = 0 (features of positives are free; other groups
    are rejected at no cost).  Returns the r feature vectors."""
    collected = []
    n_collected = 0
    chunk = max(4096, 2 * r)
    ledger = env.ledger
    while n_collected < r:
        A, F, Y, X = env._draw_arrays(chunk, with_x=True)
        mask = A == a
        take = np.flatnonzero(mask)
        needed = r - n_collected
        if len(take) > needed:
            stop_idx = int(take[needed - 1])
            ledger.n_drawn -= len(A) - (stop_idx + 1)
            take = take[:needed]
            F = F[: stop_idx + 1]
            mask = mask[: stop_idx + 1]
        ledger.charge_features_batch(int((F[take] == 0).sum()))
        collected.append(X[take])
        n_collected += len(take)
        chunk = int(min(max(4096, 1.3 * (r - n_collected) / max(float(np.mean(A == a)), 1e-3)), 1 << 21))
    return np.vstack(collected)


def exp_audit(
    env: PartialFeedbackEnv,
    db: PastDatabase,
    eps: float,
    delta: float,
    spec: ExpFamilySpec,
    constants: Optional[SmoothnessConstants] = None,
    caps: Optional[Caps] = None,
    rng: Optional[RngStream] = None,
    trunc_config: Optional[TruncEstConfig] = None,
    r_log_factor: float = 12.0,
    seed: Optional[int] = None,
) -> AuditReport:
    """Mixture-model audit.

    Per (y, a): learn theta^_{y,a} from the past positives of that cell,
    buy a coarse weight estimate q~_{y|a} online with the constant threshold
    tau' (labels paid), and read p^_{y|a} off the past database.  Per group:
    build the MAP oracle, observe R feature-only individuals, and estimate
    q^_{y|a} from proxy-label counts.  Decide UNFAIR iff the plug-in
    disparity exceeds eps / 2.
    """
    if rng is None:
        raise DomainError("exp_audit needs an RngStream for the estimation chains")
    constants = constants or spec.constants
    groups = env.instance.groups
    n_a = len(groups)
    eps_prime = 0.1
    log_term = math.log(14.0 * n_a / delta)
    tau_prime = int(math.ceil(4.0 * log_term / (eps_prime * eps_prime)))
    tau = int(math.ceil(576.0 * log_term / (eps * eps)))
    capped = False
    if caps is not None and caps.tau_cap is not None:
        if tau > caps.tau_cap:
            tau, capped = int(caps.tau_cap), True
        if tau_prime > caps.tau_cap:
            tau_prime, capped = int(caps.tau_cap), True
    delta_trunc = delta / (14.0 * n_a)
    eps_trunc = eps / (2.0 * constants.ball_beta)

    classifier: Classifier = env.classifier
    theta_hat: dict = {}
    q_tilde: dict = {}
    p_hat: dict = {}
    truncated = False
    draw_cap = caps.draw_cap if caps else None

    for a in groups:
        def f_batch(X, _a=a):
            return classifier.predict_batch(X, np.full(len(X), _a))

        for y in (0, 1):
            cell = db.positive_cell(y, a)
            if cell is None or len(cell) == 0:
                raise InsufficientHistory(f"no past positives in cell (y={y}, a={a})")
            cfg = trunc_config
            if cfg is None:
                cfg = practical_trunc_config(len(cell), eps_trunc, delta_trunc, constants)
            theta_hat[(y, a)] = trunc_est(cell, f_batch, spec, cfg, rng)

            res = _online_stop(env, tau_prime, y, a, joint=False, draw_cap=draw_cap)
            truncated |= res.truncated
            q_tilde[(y, a)] = max(res.successes, 1) / max(res.n, 1)
            n_past = past_sample(db, tau, y, a, conditioning="per_group")
            p_hat[(y, a)] = tau / n_past

    q_hat: dict = {}
    r_used: dict = {}
    for a in groups:
        oracle = MapOracle(
            group=a,
            weights={y: q_tilde[(y, a)] for y in (0, 1)},
            params={y: theta_hat[(y, a)] for y in (0, 1)},
            family=spec,
        )
        q_m = min(q_tilde[(0, a)], q_tilde[(1, a)])
        r = compute_R(q_m, eps, delta, n_a, log_factor=r_log_factor)
        if caps is not None and caps.r_cap is not None and r > caps.r_cap:
            r, capped = int(caps.r_cap), True
        r_used[a] = r
        labels_before = env.ledger.n_label_requests
        X_group = _observe_features_for_group(env, a, r)
        assert env.ledger.n_label_requests == labels_before  # feature-only phase
        proxies = map_classify_batch(oracle, X_group)
        counts = {1: int(proxies.sum()), 0: int(len(proxies) - proxies.sum())}
        for y in (0, 1):
            q_hat[(y, a)] = max(counts[y], 1) / r

    delta_hat = _delta_hat_from_cells(p_hat, q_hat, groups)
    return AuditReport(
        algorithm="exp_audit",
        verdict=decide(delta_hat, eps),
        delta_hat=delta_hat,
        estimates=CellEstimates(p_hat, q_hat, "per_group"),
        samples_drawn=env.ledger.n_drawn,
        labels_requested=env.ledger.n_label_requests,
        cost=env.ledger.total_cost,
        tau_used=tau,
        capped=capped,
        truncated_run=truncated,
        seed=seed,
        extra={
            "tau_prime": tau_prime,
            "R": r_used,
            "params_dump": [
                {
                    "group": a,
                    "y": y,
                    "theta_hat": np.asarray(theta_hat[(y, a)]).tolist(),
                    "q_tilde": q_tilde[(y, a)],
                    "q_hat": q_hat[(y, a)],
                    "p_hat": p_hat[(y, a)],
                }
                for a in groups
                for y in (0, 1)
            ],
        },
    )

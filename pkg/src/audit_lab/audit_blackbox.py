"""Blackbox auditors: the label-everything Baseline and the rejection-
sampling auditor RS-Audit, built on stopping-time estimators.

Both estimate the per-cell ratios P[f=1 | Y=y, A=a] by sampling until a
threshold count tau of target events is reached (the estimate is tau / N
with N the stopping time, a sum of geometric waits) and declare UNFAIR iff
the resulting plug-in equalized-odds difference exceeds eps / 2.

The two differ in what they pay for.  The Baseline requests the true label
of every negatively classified individual it passes and counts events
jointly over (Y, A); RS-Audit skips individuals outside the target group at
zero cost and works with group-conditional quantities, which is what makes
it cheaper.

An audit run is strictly sequential (stopping times are order-dependent);
parallelism belongs at the run level with independent environments.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .environment import PartialFeedbackEnv, PastDatabase
from .errors import DomainError, InsufficientHistory
from .rng import RngStream

__all__ = [
    "Caps",
    "CellEstimates",
    "AuditReport",
    "compute_tau",
    "online_sample",
    "past_sample",
    "decide",
    "baseline_audit",
    "rs_audit",
]


@dataclass(frozen=True)
class Caps:
    """Operational caps: they keep desk-scale runs finite, at the price of
    voiding the finite-sample guarantee (reports are flagged)."""

    tau_cap: Optional[int] = None
    r_cap: Optional[int] = None
    draw_cap: Optional[int] = None  # hard per-run draw budget


@dataclass
class CellEstimates:
    p_hat: dict  # (y, a) -> estimate of p_{y,a} or p_{y|a}
    q_hat: dict
    conditioning: str  # "joint" | "per_group"


@dataclass
class AuditReport:
    algorithm: str
    verdict: str  # "FAIR" | "UNFAIR"
    delta_hat: float
    estimates: CellEstimates
    samples_drawn: int
    labels_requested: int
    cost: float
    tau_used: float
    capped: bool
    truncated_run: bool = False
    seed: Optional[int] = None
    extra: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "algorithm": self.algorithm,
                "verdict": self.verdict,
                "delta_hat": self.delta_hat,
                "samples_drawn": self.samples_drawn,
                "labels_requested": self.labels_requested,
                "cost": self.cost,
                "tau": self.tau_used,
                "capped": self.capped,
                "seed": self.seed,
            },
            sort_keys=True,
        )


def compute_tau(eps: float, delta: float, n_groups: int) -> float:
    """Stopping threshold tau = 576 log(8 |A| / delta) / eps^2 (natural log)."""
    if not (0.0 < eps < 1.0 and 0.0 < delta < 1.0):
        raise DomainError("eps and delta must be in (0, 1)")
    if n_groups < 2:
        raise DomainError("need at least two groups")
    return 576.0 * math.log(8.0 * n_groups / delta) / (eps * eps)


def decide(delta_hat: float, eps: float) -> str:
    """UNFAIR iff delta_hat > eps / 2 (strict)."""
    if not (0.0 <= delta_hat):
        raise DomainError("delta_hat must be nonnegative")
    if not (0.0 < eps < 1.0):
        raise DomainError("eps must be in (0, 1)")
    return "UNFAIR" if delta_hat > eps / 2.0 else "FAIR"


@dataclass
class _StopResult:
    n: int  # stopping count (group members in per-group mode, all draws in joint mode)
    successes: int
    truncated: bool


def _online_stop(
    env: PartialFeedbackEnv,
    tau: int,
    y: int,
    a: int,
    joint: bool,
    draw_cap: Optional[int] = None,
) -> _StopResult:
    """Run the online phase until tau target events, charging the ledger
    exactly as the corresponding auditor would.

    joint=False (RS mode): individuals with A != a are rejected at zero
    cost and do not count toward N; labels of A == a individuals are
    observed (free when f=1, paid when f=0) and N counts group members.

    joint=True (Baseline mode): the label of every individual is observed
    (paid whenever f=0, any group) and N counts all individuals.
    """
    ledger = env.ledger
    hits = 0
    n_counted = 0
    n_drawn_here = 0
    chunk = 4096
    while True:
        if draw_cap is not None:
            remaining = draw_cap - n_drawn_here
            if remaining <= 0:
                return _StopResult(n_counted, hits, True)
            chunk = min(chunk, remaining)
        A, F, Y, _ = env._draw_arrays(chunk)
        if joint:
            counted = np.ones(len(A), dtype=bool)
            target = (A == a) & (Y == y)
        else:
            counted = A == a
            target = counted & (Y == y)

        cum = hits + np.cumsum(target)
        stop_positions = np.flatnonzero(target)
        if hits + int(target.sum()) >= tau:
            # index (within chunk) of the draw that completes the count
            k_needed = tau - hits
            stop_idx = int(stop_positions[k_needed - 1])
            used = stop_idx + 1
            # un-draw the unused tail of the chunk
            ledger.n_drawn -= len(A) - used
            A, F, Y, counted = A[:used], F[:used], Y[:used], counted[:used]
            pay = counted & (F == 0)
            ledger.charge_labels_batch(int(pay.sum()), int((pay & (Y == 0)).sum()))
            return _StopResult(n_counted + int(counted.sum()), tau, False)

        hits = int(cum[-1])
        n_counted += int(counted.sum())
        n_drawn_here += len(A)
        pay = counted & (F == 0)
        ledger.charge_labels_batch(int(pay.sum()), int((pay & (Y == 0)).sum()))
        # grow toward the expected remaining wait
        rate = max(hits / max(n_drawn_here, 1), 1e-6)
        expect = int(1.2 * (tau - hits) / rate) + 1024
        chunk = int(min(max(4096, expect), 1 << 21))


def online_sample(env: PartialFeedbackEnv, tau: int, y: int, a: int) -> int:
    """RS-mode online stopping count: number of A == a individuals processed
    when the tau-th one with Y == y is observed.  Rejected individuals
    (A != a) never touch the ledger."""
    if tau < 1:
        raise DomainError("tau must be >= 1")
    return _online_stop(env, tau, y, a, joint=False).n


def past_sample(
    db: PastDatabase, tau: int, y: int, a: int, conditioning: str = "per_group"
) -> int:
    """Stopping count over the past database, at zero cost.

    per_group: iterate only A == a records, count until tau hits of
    (f=1, Y=y).  joint: iterate all records, count until tau hits of
    (f=1, Y=y, A=a).
    """
    if tau < 1:
        raise DomainError("tau must be >= 1")
    if conditioning == "per_group":
        mask = db.a == a
        hits = (db.f[mask] == 1) & (db.y[mask] == y)
    elif conditioning == "joint":
        hits = (db.f == 1) & (db.y == y) & (db.a == a)
    else:
        raise DomainError(f"unknown conditioning {conditioning!r}")
    positions = np.flatnonzero(hits)
    if len(positions) < tau:
        raise InsufficientHistory(
            f"past database has {len(positions)} records with (f=1, y={y}, a={a}), need {tau}"
        )
    return int(positions[tau - 1]) + 1


def _delta_hat_from_cells(p_hat: dict, q_hat: dict, groups) -> float:
    ratios = {k: p_hat[k] / q_hat[k] for k in p_hat}
    return max(
        abs(ratios[(y, a)] - ratios[(y, b)])
        for y in (0, 1)
        for a in groups
        for b in groups
    )


def _effective_tau(eps, delta, n_groups, caps: Optional[Caps], fixed_tau: Optional[int]):
    if fixed_tau is not None:
        tau = int(fixed_tau)
        capped = False
    else:
        tau = int(math.ceil(compute_tau(eps, delta, n_groups)))
        capped = False
    if caps is not None and caps.tau_cap is not None and tau > caps.tau_cap:
        tau = int(caps.tau_cap)
        capped = True
    return tau, capped


def baseline_audit(
    env: PartialFeedbackEnv,
    db: PastDatabase,
    eps: float,
    delta: float,
    caps: Optional[Caps] = None,
    fixed_tau: Optional[int] = None,
    seed: Optional[int] = None,
) -> AuditReport:
    """Label-everything baseline with joint-cell stopping counts."""
    groups = env.instance.groups
    tau, capped = _effective_tau(eps, delta, len(groups), caps, fixed_tau)
    draw_cap = caps.draw_cap if caps else None
    p_hat, q_hat = {}, {}
    truncated = False
    for y in (0, 1):
        for a in groups:
            res = _online_stop(env, tau, y, a, joint=True, draw_cap=draw_cap)
            truncated |= res.truncated
            q_hat[(y, a)] = max(res.successes, 1) / max(res.n, 1)
            n_past = past_sample(db, tau, y, a, conditioning="joint")
            p_hat[(y, a)] = tau / n_past
    delta_hat = _delta_hat_from_cells(p_hat, q_hat, groups)
    return AuditReport(
        algorithm="baseline",
        verdict=decide(delta_hat, eps),
        delta_hat=delta_hat,
        estimates=CellEstimates(p_hat, q_hat, "joint"),
        samples_drawn=env.ledger.n_drawn,
        labels_requested=env.ledger.n_label_requests,
        cost=env.ledger.total_cost,
        tau_used=tau,
        capped=capped,
        truncated_run=truncated,
        seed=seed,
    )


def rs_audit(
    env: PartialFeedbackEnv,
    db: PastDatabase,
    eps: float,
    delta: float,
    caps: Optional[Caps] = None,
    fixed_tau: Optional[int] = None,
    seed: Optional[int] = None,
) -> AuditReport:
    """Rejection-sampling auditor: group-conditional stopping counts; labels
    are requested only for A == a, f = 0 individuals."""
    groups = env.instance.groups
    tau, capped = _effective_tau(eps, delta, len(groups), caps, fixed_tau)
    draw_cap = caps.draw_cap if caps else None
    p_hat, q_hat = {}, {}
    truncated = False
    for y in (0, 1):
        for a in groups:
            res = _online_stop(env, tau, y, a, joint=False, draw_cap=draw_cap)
            truncated |= res.truncated
            q_hat[(y, a)] = max(res.successes, 1) / max(res.n, 1)
            n_past = past_sample(db, tau, y, a, conditioning="per_group")
            p_hat[(y, a)] = tau / n_past
    delta_hat = _delta_hat_from_cells(p_hat, q_hat, groups)
    return AuditReport(
        algorithm="rs_audit",
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
    )

"""The partial-feedback interaction protocol.

What an auditor sees for free: the group label a and the decision f of every
drawn individual, plus the full (x, a, y) of positively classified ones.
What it pays for, on f = 0 individuals only:

* feature-only access: c_feat (once per individual),
* label access: c_feat plus c_lab if the revealed label is Y = 0 (a
  "default"); a label request after a prior feature request on the same
  individual charges only the incremental c_lab part.

Ground-truth labels are generated lazily at draw time, so the 1{Y = 0}
charge is well-defined regardless of reveal order.  One environment per
audit run; runs parallelize with distinct environments and split seeds.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import AccessError, DomainError
from .instances import (
    AuditInstance,
    Classifier,
    EmpiricalAuditInstance,
    LowerBoundInstance,
    MixtureAuditInstance,
    PassThroughClassifier,
)
from .rng import RngStream

__all__ = [
    "CostLedger",
    "Individual",
    "PastDatabase",
    "PartialFeedbackEnv",
    "generate_past_database",
]


@dataclass
class CostLedger:
    """Accumulator for the asymmetric audit-cost model.

    Invariant (maintained by every charge path):
        total_cost = c_feat * (n_label_requests + n_feature_requests)
                     + c_lab * n_defaults.
    """

    c_feat: float
    c_lab: float
    total_cost: float = 0.0
    n_label_requests: int = 0  # label access on f=0 individuals
    n_feature_requests: int = 0  # feature-only access on f=0 individuals
    n_defaults: int = 0  # revealed Y=0 among paid label requests
    n_drawn: int = 0

    def __post_init__(self):
        if self.c_feat < 0 or self.c_lab < 0:
            raise DomainError("costs must be nonnegative")

    def charge_label(self, y: int) -> None:
        self.n_label_requests += 1
        if y == 0:
            self.n_defaults += 1
            self.total_cost += self.c_feat + self.c_lab
        else:
            self.total_cost += self.c_feat

    def charge_feature(self) -> None:
        self.n_feature_requests += 1
        self.total_cost += self.c_feat

    def upgrade_feature_to_label(self, y: int) -> None:
        """Label request on an individual whose feature fee was already paid."""
        self.n_feature_requests -= 1
        self.n_label_requests += 1
        if y == 0:
            self.n_defaults += 1
            self.total_cost += self.c_lab

    def charge_labels_batch(self, n_requests: int, n_defaults: int) -> None:
        self.n_label_requests += int(n_requests)
        self.n_defaults += int(n_defaults)
        self.total_cost += self.c_feat * int(n_requests) + self.c_lab * int(n_defaults)

    def charge_features_batch(self, n_requests: int) -> None:
        self.n_feature_requests += int(n_requests)
        self.total_cost += self.c_feat * int(n_requests)

    @property
    def label_cost(self) -> float:
        """The c_lab-attributed part of the total."""
        return self.c_lab * self.n_defaults


class Individual:
    """Handle to one drawn individual.  (a, f) are always visible; x and y
    are free when f = 1 and gated behind paid reveals when f = 0."""

    __slots__ = ("a", "f", "_x", "_y", "feature_revealed", "label_revealed")

    def __init__(self, a: int, f: int, x, y: int):
        self.a = int(a)
        self.f = int(f)
        self._x = x
        self._y = int(y)
        self.feature_revealed = f == 1
        self.label_revealed = f == 1

    @property
    def x(self):
        if not self.feature_revealed:
            raise AccessError("features hidden: call reveal_feature or reveal_label first")
        return self._x

    @property
    def y(self) -> int:
        if not self.label_revealed:
            raise AccessError("label hidden: call reveal_label first")
        return self._y


@dataclass
class PastDatabase:
    """Historical i.i.d. draws filtered through the classifier, in draw
    order.  Labels are present iff f = 1 (y is masked to -1 otherwise)."""

    a: np.ndarray
    f: np.ndarray
    y: np.ndarray  # -1 where f == 0
    x: Optional[np.ndarray] = None  # (n, d), or None for feature-less instances

    def __post_init__(self):
        if np.any((self.f == 0) & (self.y != -1)):
            raise DomainError("labels must be masked where f = 0")

    @property
    def n(self) -> int:
        return len(self.a)

    def positives(self):
        """(x, a, y) arrays of the positively classified records."""
        mask = self.f == 1
        x = self.x[mask] if self.x is not None else None
        return x, self.a[mask], self.y[mask]

    def negatives(self):
        mask = self.f == 0
        x = self.x[mask] if self.x is not None else None
        return x, self.a[mask]

    def positive_cell(self, y: int, a: int) -> Optional[np.ndarray]:
        """Features of past positives with the given label and group."""
        mask = (self.f == 1) & (self.y == y) & (self.a == a)
        return self.x[mask] if self.x is not None else None

    def to_csv(self, path) -> None:
        d = 0 if self.x is None else self.x.shape[1]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([f"x_{j}" for j in range(d)] + ["a", "f", "y"])
            for i in range(self.n):
                row = [] if self.x is None else [repr(float(v)) for v in self.x[i]]
                y = "" if self.f[i] == 0 else str(int(self.y[i]))
                w.writerow(row + [int(self.a[i]), int(self.f[i]), y])


class PartialFeedbackEnv:
    """Online sampling protocol around one (instance, classifier) pair."""

    def __init__(
        self,
        instance: AuditInstance,
        classifier: Optional[Classifier],
        c_feat: float,
        c_lab: float,
        rng: RngStream,
        draw_cap: Optional[int] = None,
    ):
        if isinstance(instance, LowerBoundInstance) and classifier is None:
            classifier = PassThroughClassifier()
        self.instance = instance
        self.classifier = classifier
        self.ledger = CostLedger(c_feat=c_feat, c_lab=c_lab)
        self.rng = rng
        self.draw_cap = draw_cap
        self._f_rows: Optional[np.ndarray] = None
        if isinstance(instance, EmpiricalAuditInstance):
            self._f_rows = instance.predict_all(classifier)

    # -- drawing ------------------------------------------------------------

    def _draw_arrays(self, k: int, with_x: bool = False):
        """k fresh draws as (a, f, y, x_or_none).  Internal fast path; the
        caller is responsible for charging the ledger before using y or x of
        any f = 0 row (the batched auditors do exactly that)."""
        inst = self.instance
        if isinstance(inst, EmpiricalAuditInstance):
            X, A, Y, idx = inst.sample_batch(k, self.rng)
            F = self._f_rows[idx]
            x = X if with_x else None
            self.ledger.n_drawn += k
            return A, F, Y, x
        X, A, Y = inst.sample_batch(k, self.rng)
        F = self.classifier.predict_batch(X, A)
        self.ledger.n_drawn += k
        return A, F, Y, (X if with_x else None)

    def draw_individual(self) -> Individual:
        """One draw.  Visible part is (a, f); when f = 1 the full tuple is
        free of charge."""
        inst = self.instance
        if isinstance(inst, EmpiricalAuditInstance):
            _, A, Y, idx = inst.sample_batch(1, self.rng)
            i = int(idx[0])
            f = int(self._f_rows[i])
            self.ledger.n_drawn += 1
            return Individual(int(A[0]), f, inst.row_features(i), int(Y[0]))
        X, A, Y = inst.sample_batch(1, self.rng)
        f = int(self.classifier.predict_batch(X, A)[0])
        self.ledger.n_drawn += 1
        return Individual(int(A[0]), f, X[0], int(Y[0]))

    # -- reveals ------------------------------------------------------------

    def reveal_label(self, ind: Individual) -> int:
        """Reveal y (and x: a label request subsumes feature access).
        Charges c_feat + c_lab * 1{y=0} on f = 0 individuals; idempotent."""
        if not ind.label_revealed:
            if ind.feature_revealed:
                self.ledger.upgrade_feature_to_label(ind._y)
            else:
                self.ledger.charge_label(ind._y)
            ind.label_revealed = True
            ind.feature_revealed = True
        return ind._y

    def reveal_feature(self, ind: Individual):
        """Reveal x only; charges c_feat on f = 0 individuals; idempotent."""
        if not ind.feature_revealed:
            self.ledger.charge_feature()
            ind.feature_revealed = True
        return ind._x


def generate_past_database(
    instance: AuditInstance,
    classifier: Optional[Classifier],
    n: int,
    rng: RngStream,
    keep_features: bool = True,
) -> PastDatabase:
    """n i.i.d. draws with classifier decisions attached; labels appear only
    on positives.  Building history carries zero audit cost."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if isinstance(instance, LowerBoundInstance) and classifier is None:
        classifier = PassThroughClassifier()
    f_rows = None
    if isinstance(instance, EmpiricalAuditInstance):
        f_rows = instance.predict_all(classifier)
    chunks_a, chunks_f, chunks_y, chunks_x = [], [], [], []
    remaining = n
    while remaining > 0:
        k = min(remaining, 1 << 20)
        if isinstance(instance, EmpiricalAuditInstance):
            X, A, Y, idx = instance.sample_batch(k, rng)
            F = f_rows[idx]
        else:
            X, A, Y = instance.sample_batch(k, rng)
            F = classifier.predict_batch(X, A)
        chunks_a.append(A.astype(np.int16))
        chunks_f.append(F.astype(np.int8))
        chunks_y.append(np.where(F == 1, Y, -1).astype(np.int8))
        if keep_features and X is not None:
            chunks_x.append(X)
        remaining -= k
    x = np.vstack(chunks_x) if chunks_x else None
    return PastDatabase(
        a=np.concatenate(chunks_a),
        f=np.concatenate(chunks_f),
        y=np.concatenate(chunks_y),
        x=x,
    )

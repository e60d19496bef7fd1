"""Audit instances (data-generating processes), the classifier zoo, and
exact / Monte Carlo population summaries including the true equalized-odds
difference.

Three instance kinds are supported:

* ``MixtureAuditInstance`` -- group label A, then Y ~ Ber(q_{1|A}), then a
  feature draw from an exponential-family component with parameter
  theta*_{Y,A}.
* ``EmpiricalAuditInstance`` -- uniform-with-replacement draws over a fixed
  table of (x, a, y) rows.
* ``LowerBoundInstance`` -- the two-group FAIR/UNFAIR family whose
  classifier behavior is specified directly as per-(y, a) Bernoulli laws;
  all of its population quantities are exact rationals.

Instances and classifiers are immutable after construction and safe to
share across threads; Monte Carlo summaries can shard ``n`` across workers
with split seeds.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .errors import DegenerateData, DomainError, IllPosed
from .prob_core import (
    BallParamSet,
    ExpFamilySpec,
    SmoothnessConstants,
    spherical_gaussian_family,
)
from .rng import RngStream

Number = Union[float, Fraction]


# ---------------------------------------------------------------------------
# Classifiers
# ---------------------------------------------------------------------------


class Classifier:
    """Deterministic binary decision rule f(x, a) -> {0, 1}."""

    kind: str = "custom"

    def predict(self, x, a) -> int:
        raise NotImplementedError

    def predict_batch(self, X: np.ndarray, A: np.ndarray) -> np.ndarray:
        """Vectorized path for numeric feature matrices of shape (n, d)."""
        return np.array([self.predict(x, a) for x, a in zip(X, A)], dtype=np.int8)

    def predict_rows(self, table: dict, feature_cols: list, A: np.ndarray) -> np.ndarray:
        """Tabular path: ``table`` maps column name -> full column array."""
        n = len(A)
        out = np.empty(n, dtype=np.int8)
        for i in range(n):
            row = {c: table[c][i] for c in feature_cols}
            out[i] = self.predict(row, int(A[i]))
        return out


class ConstantClassifier(Classifier):
    """f(x, a) = value everywhere.  Handy for protocol edge cases."""

    def __init__(self, value: int):
        self.value = int(value)

    def predict(self, x, a) -> int:
        return self.value

    def predict_batch(self, X, A):
        return np.full(len(A), self.value, dtype=np.int8)

    def predict_rows(self, table, feature_cols, A):
        return np.full(len(A), self.value, dtype=np.int8)


class SenseAttrClassifier(Classifier):
    """f(x, a) = a (binary groups)."""

    kind = "sense_attr"

    def predict(self, x, a) -> int:
        return int(a)

    def predict_batch(self, X, A):
        return np.asarray(A, dtype=np.int8)

    def predict_rows(self, table, feature_cols, A):
        return np.asarray(A, dtype=np.int8)


class RandomClassifier(Classifier):
    """Seed-deterministic Ber(1/2) per (x, a) identity.

    Looks i.i.d. across distinct rows but is a pure function of
    (x, a, seed), so repeated evaluation of the same individual is stable.
    """

    kind = "random"

    def __init__(self, seed: int = 0):
        self.seed = int(seed)

    def _bit(self, payload: bytes) -> int:
        h = hashlib.blake2b(payload, digest_size=1, salt=self.seed.to_bytes(8, "big"))
        return h.digest()[0] & 1

    def predict(self, x, a) -> int:
        if isinstance(x, dict):
            payload = repr(sorted(x.items())).encode()
        else:
            payload = np.asarray(x, dtype=float).tobytes()
        return self._bit(payload + int(a).to_bytes(4, "big", signed=True))

    def predict_batch(self, X, A):
        X = np.asarray(X, dtype=float)
        return np.array(
            [self.predict(X[i], int(A[i])) for i in range(len(A))], dtype=np.int8
        )


class PassThroughClassifier(Classifier):
    """Reads the decision embedded in a pseudo-feature (lower-bound family)."""

    def predict(self, x, a) -> int:
        return int(np.asarray(x).reshape(-1)[0])

    def predict_batch(self, X, A):
        return np.asarray(X, dtype=float).reshape(len(A), -1)[:, 0].astype(np.int8)


def builtin_classifier(kind: str, seed: int = 0) -> Classifier:
    if kind == "sense_attr":
        return SenseAttrClassifier()
    if kind == "random":
        return RandomClassifier(seed)
    raise DomainError(f"unknown builtin classifier kind: {kind!r}")


# ---------------------------------------------------------------------------
# Logistic model + feature encoding
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ColumnEncoding:
    """How one raw column enters the design matrix."""

    name: str
    kind: str  # "numeric" | "categorical"
    mean: float = 0.0
    std: float = 1.0
    fill: object = 0.0  # imputation value (median / mode)
    levels: tuple = ()


@dataclass(frozen=True)
class EncodingSpec:
    """One-hot map for categoricals, mean/std standardization for numerics."""

    columns: tuple
    include_group: bool

    @property
    def width(self) -> int:
        w = 0
        for c in self.columns:
            w += 1 if c.kind == "numeric" else len(c.levels)
        return w + (1 if self.include_group else 0)

    def encode_table(self, table: dict, A: np.ndarray) -> np.ndarray:
        n = len(A)
        blocks = []
        for c in self.columns:
            col = table[c.name]
            if c.kind == "numeric":
                v = np.asarray(col, dtype=float).copy()
                v[~np.isfinite(v)] = float(c.fill)
                blocks.append(((v - c.mean) / c.std).reshape(n, 1))
            else:
                v = np.asarray(col, dtype=object).copy()
                missing = np.array([s is None or s == "" for s in v])
                v[missing] = c.fill
                block = np.zeros((n, len(c.levels)))
                index = {lvl: j for j, lvl in enumerate(c.levels)}
                for i, s in enumerate(v):
                    j = index.get(s)
                    if j is not None:
                        block[i, j] = 1.0
                blocks.append(block)
        if self.include_group:
            blocks.append(np.asarray(A, dtype=float).reshape(n, 1))
        return np.hstack(blocks)


def build_encoding(
    table: dict, feature_cols: list, include_group: bool
) -> EncodingSpec:
    cols = []
    for name in feature_cols:
        col = table[name]
        if np.issubdtype(np.asarray(col).dtype, np.number):
            v = np.asarray(col, dtype=float)
            finite = v[np.isfinite(v)]
            fill = float(np.median(finite)) if len(finite) else 0.0
            filled = np.where(np.isfinite(v), v, fill)
            std = float(filled.std())
            cols.append(
                ColumnEncoding(
                    name, "numeric", float(filled.mean()), std if std > 0 else 1.0, fill
                )
            )
        else:
            v = np.asarray(col, dtype=object)
            present = [s for s in v if s is not None and s != ""]
            if not present:
                raise DegenerateData(f"column {name!r} has no usable values")
            values, counts = np.unique(np.array(present, dtype=object), return_counts=True)
            mode = values[int(np.argmax(counts))]
            cols.append(
                ColumnEncoding(name, "categorical", fill=mode, levels=tuple(values))
            )
    return EncodingSpec(tuple(cols), include_group)


class LogisticModel(Classifier):
    """Thresholded logistic scorer: predict 1 iff sigmoid(w phi(x) + b) >= t."""

    def __init__(
        self,
        weights: np.ndarray,
        bias: float,
        encoding: Optional[EncodingSpec] = None,
        threshold: float = 0.5,
        include_group: bool = True,
        feature_cols: Optional[list] = None,
        numeric_mean: Optional[np.ndarray] = None,
        numeric_std: Optional[np.ndarray] = None,
        kind: str = "all_LR",
    ):
        self.weights = np.asarray(weights, dtype=float)
        self.bias = float(bias)
        self.encoding = encoding
        self.threshold = float(threshold)
        self.include_group = include_group
        self.feature_cols = feature_cols
        self.numeric_mean = numeric_mean
        self.numeric_std = numeric_std
        self.kind = kind

    def _design_numeric(self, X: np.ndarray, A: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float).reshape(len(A), -1)
        if self.numeric_mean is not None:
            X = (X - self.numeric_mean) / self.numeric_std
        if self.include_group:
            X = np.hstack([X, np.asarray(A, dtype=float).reshape(-1, 1)])
        return X

    def scores_batch(self, X: np.ndarray, A: np.ndarray) -> np.ndarray:
        phi = self._design_numeric(X, A)
        return phi @ self.weights + self.bias

    def predict_batch(self, X, A):
        return (self.scores_batch(X, A) >= self._score_cut()).astype(np.int8)

    def _score_cut(self) -> float:
        # sigmoid(s) >= t  <=>  s >= log(t / (1 - t))
        return math.log(self.threshold / (1.0 - self.threshold))

    def predict(self, x, a) -> int:
        if isinstance(x, dict):
            table = {k: np.array([v], dtype=object if isinstance(v, str) else float) for k, v in x.items()}
            return int(self.predict_rows(table, list(x.keys()), np.array([a]))[0])
        return int(self.predict_batch(np.asarray(x, dtype=float).reshape(1, -1), np.array([a]))[0])

    def predict_rows(self, table, feature_cols, A):
        if self.encoding is None:
            raise DegenerateData("model was trained on numeric features, not a table")
        phi = self.encoding.encode_table(table, A)
        return (phi @ self.weights + self.bias >= self._score_cut()).astype(np.int8)


@dataclass(frozen=True)
class LogisticConfig:
    learning_rate: float = 0.1
    iterations: int = 2000
    exclude_sensitive: bool = False
    threshold: float = 0.5


def _fit_logistic(phi: np.ndarray, y: np.ndarray, config: LogisticConfig):
    """Full-batch gradient descent on the mean log-loss.

    The step size is halved whenever a step would increase the loss, which
    keeps the training-loss trajectory non-increasing.
    """
    n, p = phi.shape
    w = np.zeros(p)
    b = 0.0
    lr = config.learning_rate
    y = np.asarray(y, dtype=float)

    def loss_and_probs(w, b):
        s = phi @ w + b
        # log(1 + e^s) - y*s, computed stably
        loss = float(np.mean(np.logaddexp(0.0, s) - y * s))
        return loss, 1.0 / (1.0 + np.exp(-s))

    loss, probs = loss_and_probs(w, b)
    history = [loss]
    for _ in range(config.iterations):
        grad_w = phi.T @ (probs - y) / n
        grad_b = float(np.mean(probs - y))
        while True:
            w_new = w - lr * grad_w
            b_new = b - lr * grad_b
            new_loss, new_probs = loss_and_probs(w_new, b_new)
            if new_loss <= loss + 1e-12 or lr < 1e-8:
                break
            lr *= 0.5
        w, b, loss, probs = w_new, b_new, new_loss, new_probs
        history.append(loss)
    return w, b, history


def train_logistic(rows, target: str, config: Optional[LogisticConfig] = None, rng=None):
    """Train a logistic model on a column table.

    ``rows`` maps column name -> array and must contain ``target`` plus a
    group column named ``"a"`` (0/1 group ids).  ``exclude_sensitive`` drops
    the group id from the design matrix (the blind variant).  Constant-label
    data is allowed: the fit degenerates to an intercept-only model that
    predicts that label everywhere.
    """
    config = config or LogisticConfig()
    if target not in rows or "a" not in rows:
        raise DegenerateData("rows must contain the target column and a group column 'a'")
    y = np.asarray(rows[target])
    n = len(y)
    if n == 0:
        raise DegenerateData("empty training set")
    feature_cols = [c for c in rows.keys() if c not in (target, "a")]
    A = np.asarray(rows["a"], dtype=int)
    encoding = build_encoding(rows, feature_cols, include_group=not config.exclude_sensitive)
    phi = encoding.encode_table(rows, A)
    w, b, history = _fit_logistic(phi, y, config)
    model = LogisticModel(
        w,
        b,
        encoding=encoding,
        threshold=config.threshold,
        include_group=not config.exclude_sensitive,
        feature_cols=feature_cols,
        kind="wo_A_LR" if config.exclude_sensitive else "all_LR",
    )
    model.loss_history = history
    return model


def train_logistic_numeric(
    X: np.ndarray, A: np.ndarray, y: np.ndarray, config: Optional[LogisticConfig] = None
) -> LogisticModel:
    """Numeric-feature variant (mixture instances): standardize, optionally
    append the group id, fit by the same full-batch descent."""
    config = config or LogisticConfig()
    X = np.asarray(X, dtype=float)
    if len(X) == 0:
        raise DegenerateData("empty training set")
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std[std == 0] = 1.0
    phi = (X - mean) / std
    if not config.exclude_sensitive:
        phi = np.hstack([phi, np.asarray(A, dtype=float).reshape(-1, 1)])
    w, b, history = _fit_logistic(phi, np.asarray(y, dtype=float), config)
    model = LogisticModel(
        w,
        b,
        encoding=None,
        threshold=config.threshold,
        include_group=not config.exclude_sensitive,
        numeric_mean=mean,
        numeric_std=std,
        kind="wo_A_LR" if config.exclude_sensitive else "all_LR",
    )
    model.loss_history = history
    return model


# ---------------------------------------------------------------------------
# Instances
# ---------------------------------------------------------------------------


def _draw_categorical(probs: np.ndarray, n: int, rng: RngStream) -> np.ndarray:
    cum = np.cumsum(probs)
    cum[-1] = 1.0
    return np.searchsorted(cum, rng.np.random(n), side="right").astype(np.int64)


@dataclass(frozen=True)
class MixtureAuditInstance:
    """Exponential-family mixture: A ~ group_probs, Y ~ Ber(q_{1|A}),
    X ~ family component theta*_{Y,A}."""

    group_probs: np.ndarray  # P[A = a], a = 0..k-1
    label_probs: np.ndarray  # q_{1|a}
    family: ExpFamilySpec
    params: dict  # (y, a) -> natural parameter
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        gp = np.asarray(self.group_probs, dtype=float)
        lp = np.asarray(self.label_probs, dtype=float)
        if gp.ndim != 1 or abs(gp.sum() - 1.0) > 1e-9 or np.any(gp <= 0):
            raise DomainError("group_probs must be positive and sum to 1")
        if lp.shape != gp.shape or np.any(lp <= 0) or np.any(lp >= 1):
            raise DomainError("label_probs must lie strictly inside (0, 1)")
        object.__setattr__(self, "group_probs", gp)
        object.__setattr__(self, "label_probs", lp)
        for (y, a), theta in self.params.items():
            th = np.asarray(theta, dtype=float)
            if not self.family.param_set.contains(th):
                raise DomainError(f"theta*_{{{y},{a}}} outside the parameter set")
            self.params[(y, a)] = th

    @property
    def groups(self) -> list:
        return list(range(len(self.group_probs)))

    @property
    def dim(self) -> int:
        return self.family.dim

    def sample_batch(self, n: int, rng: RngStream):
        A = _draw_categorical(self.group_probs, n, rng)
        Y = (rng.np.random(n) < self.label_probs[A]).astype(np.int8)
        X = np.empty((n, self.family.dim))
        for a in self.groups:
            for y in (0, 1):
                mask = (A == a) & (Y == y)
                k = int(mask.sum())
                if k:
                    X[mask] = self.family.sampler(self.params[(y, a)], rng, k)
        return X, A, Y

    def to_json(self) -> str:
        sigma2 = self.meta.get("sigma2")
        if sigma2 is None:
            raise DomainError("only spherical-Gaussian instances serialize to JSON")
        means = {
            f"{y},{a}": (np.asarray(th) * sigma2).tolist()
            for (y, a), th in self.params.items()
        }
        return json.dumps(
            {
                "family": "spherical_gaussian",
                "d": self.family.dim,
                "sigma2": sigma2,
                "group_probs": self.group_probs.tolist(),
                "label_probs": self.label_probs.tolist(),
                "means": means,
            },
            sort_keys=True,
        )

    @staticmethod
    def from_json(doc: str) -> "MixtureAuditInstance":
        obj = json.loads(doc)
        if obj.get("family") != "spherical_gaussian":
            raise DomainError("unsupported family in instance document")
        d, sigma2 = int(obj["d"]), float(obj["sigma2"])
        means = {tuple(map(int, k.split(","))): np.asarray(v, dtype=float) for k, v in obj["means"].items()}
        radius = max(float(np.linalg.norm(m)) / sigma2 for m in means.values()) + 2.0
        family = spherical_gaussian_family(d, sigma2, param_set=BallParamSet(np.zeros(d), radius))
        params = {k: m / sigma2 for k, m in means.items()}
        return MixtureAuditInstance(
            group_probs=np.asarray(obj["group_probs"], dtype=float),
            label_probs=np.asarray(obj["label_probs"], dtype=float),
            family=family,
            params=params,
            meta={"sigma2": sigma2},
        )


@dataclass(frozen=True)
class EmpiricalAuditInstance:
    """Uniform-with-replacement sampling over a fixed row table."""

    table: dict  # column name -> array; may be empty for pure (X, a, y) data
    feature_cols: list
    X: Optional[np.ndarray]  # numeric features (n, d), or None for tabular-only
    a: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=np.int64)
        y = np.asarray(self.y, dtype=np.int8)
        if len(a) == 0:
            raise IllPosed("empty instance")
        for g in np.unique(a):
            labels = np.unique(y[a == g])
            if len(labels) < 2:
                raise IllPosed(f"group {g} lacks one of the label values; audit is ill-posed")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def groups(self) -> list:
        return sorted(int(g) for g in np.unique(self.a))

    def predict_all(self, classifier: Classifier) -> np.ndarray:
        """Classifier decisions for every row (ordering = row order)."""
        if self.X is not None:
            return classifier.predict_batch(self.X, self.a)
        return classifier.predict_rows(self.table, self.feature_cols, self.a)

    def sample_batch(self, n: int, rng: RngStream):
        idx = rng.np.integers(0, self.n, size=n)
        X = self.X[idx] if self.X is not None else None
        return X, self.a[idx], self.y[idx], idx

    def row_features(self, i: int):
        if self.X is not None:
            return self.X[i]
        return {c: self.table[c][i] for c in self.feature_cols}


def empirical_instance_from_numeric(X, a, y) -> EmpiricalAuditInstance:
    return EmpiricalAuditInstance(
        table={}, feature_cols=[], X=np.asarray(X, dtype=float), a=a, y=y
    )


@dataclass(frozen=True)
class LowerBoundInstance:
    """Two-group instance family with classifier behavior given directly as
    per-(y, a) Bernoulli laws.  FAIR has equalized-odds difference exactly 0;
    UNFAIR has exactly 2 eps / (1 + 4 eps).
    """

    eps: Fraction
    p_param: Fraction
    q_param: Fraction
    hypothesis: str  # "FAIR" | "UNFAIR"
    group_probs: tuple = (Fraction(1, 2), Fraction(1, 2))

    @property
    def groups(self) -> list:
        return [0, 1]

    def q1(self, a: int) -> Fraction:
        """Label law q_{1|a}."""
        if self.hypothesis == "UNFAIR" and a == 1:
            return self.q_param * (1 + 4 * self.eps)
        return self.q_param

    def pf1(self, y: int, a: int) -> Fraction:
        """P[f = 1 | Y = y, A = a]."""
        e, p, q = self.eps, self.p_param, self.q_param
        if self.hypothesis == "FAIR" or a == 0:
            return Fraction(1, 2) if y == 1 else p / (2 * (1 - q))
        if y == 1:
            return 1 / (2 * (1 + 4 * e))
        return p / (2 * (1 - q - 4 * e * q))

    def joint_conditional(self, f: int, y: int, a: int) -> Fraction:
        """P[f, Y = y | A = a], exact."""
        qy = self.q1(a) if y == 1 else 1 - self.q1(a)
        pf = self.pf1(y, a)
        return qy * (pf if f == 1 else 1 - pf)

    def true_eod(self) -> Fraction:
        best = Fraction(0)
        for y in (0, 1):
            d = abs(self.pf1(y, 0) - self.pf1(y, 1))
            best = max(best, d)
        return best

    def sample_batch(self, n: int, rng: RngStream):
        gp = np.array([float(g) for g in self.group_probs])
        A = _draw_categorical(gp, n, rng)
        q1 = np.array([float(self.q1(0)), float(self.q1(1))])
        Y = (rng.np.random(n) < q1[A]).astype(np.int8)
        pf = np.array(
            [[float(self.pf1(y, a)) for a in (0, 1)] for y in (0, 1)]
        )  # pf[y, a]
        F = (rng.np.random(n) < pf[Y, A]).astype(np.int8)
        X = F.astype(float).reshape(n, 1)  # pseudo-feature carrying the decision
        return X, A, Y

    def to_json(self) -> str:
        return json.dumps(
            {
                "eps": str(self.eps),
                "p": str(self.p_param),
                "q": str(self.q_param),
                "hypothesis": self.hypothesis,
            },
            sort_keys=True,
        )

    @staticmethod
    def from_json(doc: str) -> "LowerBoundInstance":
        obj = json.loads(doc)
        return make_lower_bound_instance(
            Fraction(obj["eps"]), Fraction(obj["p"]), Fraction(obj["q"]), obj["hypothesis"]
        )


def make_lower_bound_instance(eps, p_param, q_param, hypothesis: str) -> LowerBoundInstance:
    e, p, q = Fraction(eps), Fraction(p_param), Fraction(q_param)
    if not (0 < e < Fraction(1, 4)):
        raise DomainError("eps must lie in (0, 1/4)")
    if not (0 < p < Fraction(1, 2) and 0 < q < Fraction(1, 2)):
        raise DomainError("p and q must lie in (0, 1/2)")
    if q * (1 + 4 * e) > 1:
        raise DomainError("q (1 + 4 eps) must not exceed 1")
    if p > 2 * (1 - q - 4 * e * q):
        raise DomainError("p too large: P[f=1 | Y=0, A=1] would exceed 1")
    # Keep the Y=1 disparity the maximizer, so the UNFAIR gap is exactly
    # 2 eps / (1 + 4 eps).
    if p * q * (1 + 4 * e) > (1 - q - 4 * e * q) * (1 - q):
        raise DomainError("parameters make the Y=0 disparity dominate the Y=1 gap")
    if hypothesis not in ("FAIR", "UNFAIR"):
        raise DomainError("hypothesis must be FAIR or UNFAIR")
    return LowerBoundInstance(e, p, q, hypothesis)


def make_lower_bound_pair(eps, p_param, q_param):
    """The matched (FAIR, UNFAIR) instance pair sharing all free-data laws."""
    return (
        make_lower_bound_instance(eps, p_param, q_param, "FAIR"),
        make_lower_bound_instance(eps, p_param, q_param, "UNFAIR"),
    )


AuditInstance = Union[MixtureAuditInstance, EmpiricalAuditInstance, LowerBoundInstance]


# ---------------------------------------------------------------------------
# Separated mixture generation
# ---------------------------------------------------------------------------


def separation_radius(
    c: SmoothnessConstants, eps: float, q_max: float, q_min: float
) -> float:
    """Minimum natural-parameter separation that makes the approximate MAP
    oracle's per-component error O(eps * q_min):

        sqrt( (48 (L v beta) beta + 3 lam) / (4 kappa beta^2)
              * log(10 q_max / (q_min eps)) ).
    """
    if not (0.0 < eps <= 1.0):
        raise DomainError("eps must be in (0, 1]")
    if not (0.0 < q_min <= q_max <= 1.0):
        raise DomainError("need 0 < q_min <= q_max <= 1")
    L, b, lam, kap = c.lipschitz_L, c.ball_beta, c.lam, c.kappa
    coef = (48.0 * max(L, b) * b + 3.0 * lam) / (4.0 * kap * b * b)
    return math.sqrt(coef * math.log(10.0 * q_max / (q_min * eps)))


@dataclass(frozen=True)
class MixtureConfig:
    d: int = 5
    sigma2: float = 4.0
    group_probs: tuple = (0.3, 0.7)
    label_probs: tuple = (0.4, 0.7)  # q_{1|0}, q_{1|1}
    eps: float = 0.1
    constants: SmoothnessConstants = field(
        default_factory=lambda: SmoothnessConstants(
            kappa=1.0, lam=4.0, lipschitz_L=4.0, ball_beta=2.0, positivity_alpha=0.1
        )
    )
    # Scale on the construction radius.  1.0 reproduces the full separation
    # bound; the experiment harness defaults to a smaller scale so trained
    # classifiers keep non-trivial error in every (y, a) cell.
    sep_scale: float = 1.0


def generate_separated_mixture(config: MixtureConfig, rng: RngStream) -> MixtureAuditInstance:
    """Draw component means mu_{1,a} ~ U[-1,1]^d, a uniform unit direction u,
    and set mu_{0,a} = mu_{1,a} + r u with r the separation radius (scaled by
    ``sep_scale``); convert means to natural parameters theta = mu / sigma^2.
    """
    d, s2 = config.d, float(config.sigma2)
    if d < 1:
        raise DomainError("d must be >= 1")
    params_mu = {}
    radii = {}
    for a in range(len(config.group_probs)):
        q1 = config.label_probs[a]
        q_max, q_min = max(q1, 1 - q1), min(q1, 1 - q1)
        r = config.sep_scale * separation_radius(config.constants, config.eps, q_max, q_min)
        radii[a] = r
        mu1 = rng.np.uniform(-1.0, 1.0, size=d)
        u = rng.np.standard_normal(d)
        u /= np.linalg.norm(u)
        params_mu[(1, a)] = mu1
        params_mu[(0, a)] = mu1 + r * u
    theta = {k: mu / s2 for k, mu in params_mu.items()}
    max_norm = max(float(np.linalg.norm(t)) for t in theta.values())
    ball = BallParamSet(np.zeros(d), max_norm + 1.0 / config.constants.ball_beta + 1.0)
    family = spherical_gaussian_family(d, s2, param_set=ball, constants=config.constants)
    return MixtureAuditInstance(
        group_probs=np.asarray(config.group_probs, dtype=float),
        label_probs=np.asarray(config.label_probs, dtype=float),
        family=family,
        params=theta,
        meta={"sigma2": s2, "radii": radii, "config": config},
    )


# ---------------------------------------------------------------------------
# Population summaries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PopulationSummary:
    """All the audit-relevant population quantities of (instance, classifier).

    Values are floats in Monte Carlo / empirical mode and exact ``Fraction``s
    for the lower-bound family.
    """

    group_probs: dict  # a -> P[A = a]
    beta_neg_rate: Number  # P[f = 0]
    beta_a: dict  # a -> P[f = 0 | A = a]
    p_joint: dict  # (y, a) -> P[f=1, Y=y, A=a]
    q_joint: dict  # (y, a) -> P[Y=y, A=a]
    p_cond: dict  # (y, a) -> P[f=1, Y=y | A=a]
    q_cond: dict  # (y, a) -> P[Y=y | A=a]
    gamma: dict  # (i, j) -> P[f=i, Y=j]
    q_min_a: dict  # a -> min_y q_{y|a}
    q_max_a: dict
    eod: Number


def _summary_from_cells(groups, pa, q_ya, p_ya):
    """Assemble a summary from P[A=a], P[Y=y|A=a] and P[f=1,Y=y|A=a]."""
    q_joint = {(y, a): q_ya[(y, a)] * pa[a] for y in (0, 1) for a in groups}
    p_joint = {(y, a): p_ya[(y, a)] * pa[a] for y in (0, 1) for a in groups}
    for key in q_joint:
        if q_joint[key] == 0:
            raise IllPosed(f"q_{key} is zero; the audit target is undefined")
    beta_a = {a: 1 - sum(p_ya[(y, a)] for y in (0, 1)) for a in groups}
    beta = sum(beta_a[a] * pa[a] for a in groups)
    gamma = {}
    for j in (0, 1):
        g1 = sum(p_joint[(j, a)] for a in groups)
        q_j = sum(q_joint[(j, a)] for a in groups)
        gamma[(1, j)] = g1
        gamma[(0, j)] = q_j - g1
    ratios = {k: p_ya[k] / q_ya[k] for k in p_ya}
    eod = max(
        abs(ratios[(y, a)] - ratios[(y, b)])
        for y in (0, 1)
        for a in groups
        for b in groups
    )
    return PopulationSummary(
        group_probs=dict(pa),
        beta_neg_rate=beta,
        beta_a=beta_a,
        p_joint=p_joint,
        q_joint=q_joint,
        p_cond=p_ya,
        q_cond=q_ya,
        gamma=gamma,
        q_min_a={a: min(q_ya[(0, a)], q_ya[(1, a)]) for a in groups},
        q_max_a={a: max(q_ya[(0, a)], q_ya[(1, a)]) for a in groups},
        eod=eod,
    )


def _tabulated_summary(a, y, f, groups):
    n = len(a)
    pa, q_ya, p_ya = {}, {}, {}
    for g in groups:
        in_g = a == g
        n_g = int(in_g.sum())
        if n_g == 0:
            raise IllPosed(f"group {g} absent")
        pa[g] = n_g / n
        for yy in (0, 1):
            cell = in_g & (y == yy)
            n_cell = int(cell.sum())
            if n_cell == 0:
                raise IllPosed(f"cell (y={yy}, a={g}) empty")
            q_ya[(yy, g)] = n_cell / n_g
            p_ya[(yy, g)] = int((cell & (f == 1)).sum()) / n_g
    return _summary_from_cells(groups, pa, q_ya, p_ya)


def population_summary(
    instance: AuditInstance,
    classifier: Optional[Classifier],
    mode: str = "exact",
    n: int = 100_000,
    rng: Optional[RngStream] = None,
) -> PopulationSummary:
    """Population quantities of the pair (instance, classifier).

    ``mode="exact"`` is available for empirical and lower-bound instances
    (finite support / closed form, the latter in exact rational arithmetic);
    mixtures use ``mode="monte_carlo"`` with ``n`` draws.
    """
    if isinstance(instance, LowerBoundInstance):
        if mode != "exact":
            raise DomainError("lower-bound instances are summarized exactly")
        groups = instance.groups
        pa = {a: instance.group_probs[a] for a in groups}
        q_ya = {}
        p_ya = {}
        for a in groups:
            q1 = instance.q1(a)
            q_ya[(1, a)], q_ya[(0, a)] = q1, 1 - q1
            for yy in (0, 1):
                p_ya[(yy, a)] = instance.joint_conditional(1, yy, a)
        return _summary_from_cells(groups, pa, q_ya, p_ya)

    if isinstance(instance, EmpiricalAuditInstance):
        if mode != "exact":
            raise DomainError("empirical instances are summarized exactly")
        f = instance.predict_all(classifier)
        return _tabulated_summary(instance.a, instance.y, f, instance.groups)

    if isinstance(instance, MixtureAuditInstance):
        if mode != "monte_carlo":
            raise DomainError("mixture instances require monte_carlo summaries")
        if rng is None:
            raise DomainError("monte_carlo mode needs an RngStream")
        X, A, Y = instance.sample_batch(n, rng)
        F = classifier.predict_batch(X, A)
        return _tabulated_summary(A, Y, F, instance.groups)

    raise DomainError(f"unknown instance type {type(instance)!r}")

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from audit_lab.environment import (
    CostLedger,
    Individual,
    PartialFeedbackEnv,
    generate_past_database,
)
from audit_lab.errors import AccessError, DomainError
from audit_lab.instances import (
    ConstantClassifier,
    MixtureConfig,
    empirical_instance_from_numeric,
    generate_separated_mixture,
    make_lower_bound_pair,
    population_summary,
    train_logistic_numeric,
)
from audit_lab.rng import RngStream


def _tiny_instance():
    X = np.array([[0.0], [1.0], [2.0], [3.0]] * 4)
    a = np.array([0, 0, 1, 1] * 4)
    y = np.array([0, 1, 0, 1] * 4)
    return empirical_instance_from_numeric(X, a, y)


class Threshold(ConstantClassifier):
    """f = 1 iff x >= cut; group-blind."""

    def __init__(self, cut=1.5):
        self.cut = cut

    def predict_batch(self, X, A):
        return (np.asarray(X)[:, 0] >= self.cut).astype(np.int8)


class TestProtocol:
    def test_positive_draw_is_free_and_open(self):
        env = PartialFeedbackEnv(_tiny_instance(), ConstantClassifier(1), 0.5, 3.0, RngStream(0))
        ind = env.draw_individual()
        assert ind.f == 1
        _ = ind.x, ind.y  # no AccessError
        assert env.ledger.total_cost == 0.0

    def test_negative_draw_hides_fields(self):
        env = PartialFeedbackEnv(_tiny_instance(), ConstantClassifier(0), 0.5, 3.0, RngStream(0))
        ind = env.draw_individual()
        assert ind.f == 0
        with pytest.raises(AccessError):
            _ = ind.y
        with pytest.raises(AccessError):
            _ = ind.x

    def test_reveal_label_charges(self):
        env = PartialFeedbackEnv(_tiny_instance(), ConstantClassifier(0), 0.5, 3.0, RngStream(0))
        ind = Individual(a=0, f=0, x=np.zeros(1), y=0)
        env.reveal_label(ind)
        assert env.ledger.total_cost == pytest.approx(3.5)
        env.reveal_label(ind)  # idempotent
        assert env.ledger.total_cost == pytest.approx(3.5)

        ind1 = Individual(a=0, f=0, x=np.zeros(1), y=1)
        env.reveal_label(ind1)
        assert env.ledger.total_cost == pytest.approx(4.0)  # += 0.5, no default

    def test_positive_reveal_free(self):
        env = PartialFeedbackEnv(_tiny_instance(), ConstantClassifier(1), 0.5, 3.0, RngStream(0))
        ind = Individual(a=0, f=1, x=np.zeros(1), y=0)
        env.reveal_label(ind)
        env.reveal_feature(ind)
        assert env.ledger.total_cost == 0.0

    def test_feature_then_label_no_double_fee(self):
        env = PartialFeedbackEnv(_tiny_instance(), ConstantClassifier(0), 0.5, 3.0, RngStream(0))
        ind = Individual(a=0, f=0, x=np.zeros(1), y=0)
        env.reveal_feature(ind)
        assert env.ledger.total_cost == pytest.approx(0.5)
        env.reveal_label(ind)
        assert env.ledger.total_cost == pytest.approx(3.5)
        assert env.ledger.n_feature_requests == 0
        assert env.ledger.n_label_requests == 1

    def test_feature_only_charge(self):
        env = PartialFeedbackEnv(_tiny_instance(), ConstantClassifier(0), 0.5, 3.0, RngStream(0))
        ind = Individual(a=1, f=0, x=np.ones(1), y=1)
        env.reveal_feature(ind)
        env.reveal_feature(ind)
        assert env.ledger.total_cost == pytest.approx(0.5)
        assert env.ledger.n_feature_requests == 1

    def test_group_rates_match_summary(self):
        cfg = MixtureConfig(eps=0.2, sep_scale=0.4)
        inst = generate_separated_mixture(cfg, RngStream(1))
        Xt, At, Yt = inst.sample_batch(3000, RngStream(2))
        clf = train_logistic_numeric(Xt, At, Yt)
        summary = population_summary(inst, clf, "monte_carlo", n=150_000, rng=RngStream(3))
        env = PartialFeedbackEnv(inst, clf, 0.0, 1.0, RngStream(4))
        A, F, Y, _ = env._draw_arrays(100_000)
        for a in inst.groups:
            emp = float((F[A == a] == 0).mean())
            assert emp == pytest.approx(float(summary.beta_a[a]), abs=0.02)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.tuples(
            st.integers(0, 1),  # f
            st.integers(0, 1),  # y
            st.sampled_from(["L", "F", "FL", "LF", "FF", "LL", "FLF"]),
        ),
        min_size=1,
        max_size=30,
    )
)
def test_ledger_identity_any_interleaving(ops):
    env = PartialFeedbackEnv(_tiny_instance(), ConstantClassifier(1), 0.7, 2.3, RngStream(0))
    ledger = env.ledger
    prev_total = 0.0
    for f, y, seq in ops:
        ind = Individual(a=0, f=f, x=np.zeros(1), y=y)
        for op in seq:
            if op == "L":
                env.reveal_label(ind)
            else:
                env.reveal_feature(ind)
            assert ledger.total_cost >= prev_total - 1e-12  # monotone
            prev_total = ledger.total_cost
    assert ledger.total_cost == pytest.approx(
        ledger.c_feat * (ledger.n_label_requests + ledger.n_feature_requests)
        + ledger.c_lab * ledger.n_defaults
    )
    assert ledger.n_defaults <= ledger.n_label_requests


class TestPastDatabase:
    def test_always_positive(self):
        db = generate_past_database(_tiny_instance(), ConstantClassifier(1), 100, RngStream(0))
        x, a, y = db.positives()
        assert len(a) == 100
        assert np.all(db.y >= 0)

    def test_always_negative(self):
        db = generate_past_database(_tiny_instance(), ConstantClassifier(0), 100, RngStream(0))
        x, a, y = db.positives()
        assert len(a) == 0
        assert np.all(db.y == -1)  # no labels stored for f=0

    def test_positive_count_binomial(self):
        cfg = MixtureConfig(eps=0.2, sep_scale=0.4)
        inst = generate_separated_mixture(cfg, RngStream(1))
        Xt, At, Yt = inst.sample_batch(3000, RngStream(2))
        clf = train_logistic_numeric(Xt, At, Yt)
        summary = population_summary(inst, clf, "monte_carlo", n=150_000, rng=RngStream(3))
        n = 200_000
        db = generate_past_database(inst, clf, n, RngStream(4))
        beta = float(summary.beta_neg_rate)
        expect = n * (1 - beta)
        sigma = np.sqrt(n * beta * (1 - beta))
        assert abs(int((db.f == 1).sum()) - expect) <= 3.3 * sigma

    def test_zero_cost_and_ordering(self):
        inst = _tiny_instance()
        db = generate_past_database(inst, Threshold(), 500, RngStream(9))
        assert db.n == 500
        # masked labels exactly on negatives
        assert np.all((db.y == -1) == (db.f == 0))

    def test_csv_roundtrip_shape(self, tmp_path):
        db = generate_past_database(_tiny_instance(), Threshold(), 50, RngStream(0))
        path = tmp_path / "past.csv"
        db.to_csv(path)
        lines = path.read_text().strip().split("\n")
        assert len(lines) == 51
        assert lines[0] == "x_0,a,f,y"
        neg_rows = [l for l in lines[1:] if l.endswith(",")]
        assert len(neg_rows) == int((db.f == 0).sum())

    def test_n_validation(self):
        with pytest.raises(DomainError):
            generate_past_database(_tiny_instance(), Threshold(), 0, RngStream(0))


class TestCostExpectation:
    def test_always_request_policy_matches_analytic_cost(self):
        # mean ledger total over repeated runs of the always-request policy
        # approaches N (c_feat beta + c_lab gamma_00)
        _, unfair = make_lower_bound_pair(0.1, 0.3, 0.3)
        summary = population_summary(unfair, None, "exact")
        c_feat, c_lab, n_draws, n_runs = 0.5, 3.0, 100, 2000
        analytic = n_draws * (
            c_feat * float(summary.beta_neg_rate) + c_lab * float(summary.gamma[(0, 0)])
        )
        totals = np.empty(n_runs)
        rng = RngStream(77)
        for i in range(n_runs):
            env = PartialFeedbackEnv(unfair, None, c_feat, c_lab, rng)
            A, F, Y, _ = env._draw_arrays(n_draws)
            pay = F == 0
            env.ledger.charge_labels_batch(int(pay.sum()), int((pay & (Y == 0)).sum()))
            totals[i] = env.ledger.total_cost
        assert totals.mean() == pytest.approx(analytic, rel=0.05)

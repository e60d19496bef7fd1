import math
from fractions import Fraction

import numpy as np
import pytest

from audit_lab.errors import DomainError, IllPosed
from audit_lab.instances import (
    ConstantClassifier,
    EmpiricalAuditInstance,
    LogisticConfig,
    MixtureConfig,
    builtin_classifier,
    empirical_instance_from_numeric,
    generate_separated_mixture,
    make_lower_bound_pair,
    population_summary,
    separation_radius,
    train_logistic,
    train_logistic_numeric,
)
from audit_lab.prob_core import SmoothnessConstants
from audit_lab.rng import RngStream

CONSTS = SmoothnessConstants(kappa=1.0, lam=4.0, lipschitz_L=4.0, ball_beta=2.0, positivity_alpha=0.1)


class TestSeparationRadius:
    def test_spec_point(self):
        # sqrt( (48*4*2 + 12) / 16 * ln(10*0.7/(0.3*0.1)) ) = sqrt(24.75 ln 233.33)
        got = separation_radius(CONSTS, 0.1, 0.7, 0.3)
        expected = math.sqrt(24.75 * math.log(10 * 0.7 / (0.3 * 0.1)))
        assert got == pytest.approx(expected, abs=1e-12)
        assert got == pytest.approx(11.617, abs=1e-3)

    def test_sqrt_homogeneity(self):
        # doubling the numerator constant multiplies the radius by sqrt(2):
        # (48 (L v b) b + 3 lam) doubles when both L-term and lam double
        # with kappa and b fixed
        c1 = SmoothnessConstants(kappa=1.0, lam=4.0, lipschitz_L=4.0, ball_beta=2.0)
        c2 = SmoothnessConstants(kappa=1.0, lam=8.0, lipschitz_L=8.0, ball_beta=2.0)
        r1 = separation_radius(c1, 0.2, 0.6, 0.4)
        r2 = separation_radius(c2, 0.2, 0.6, 0.4)
        assert r2 == pytest.approx(math.sqrt(2) * r1, rel=1e-12)

    def test_log10_floor(self):
        r = separation_radius(CONSTS, 1.0, 0.5, 0.5)
        coef = (48 * 4 * 2 + 3 * 4) / (4 * 1 * 4)
        assert r == pytest.approx(math.sqrt(coef * math.log(10.0)), rel=1e-12)
        assert r > 0

    def test_domain(self):
        with pytest.raises(DomainError):
            separation_radius(CONSTS, 0.0, 0.5, 0.5)
        with pytest.raises(DomainError):
            separation_radius(CONSTS, 0.1, 0.3, 0.5)


class TestGenerateSeparatedMixture:
    def test_mean_gap_is_radius(self):
        cfg = MixtureConfig(eps=0.1, constants=CONSTS)
        inst = generate_separated_mixture(cfg, RngStream(7))
        s2 = cfg.sigma2
        for a in inst.groups:
            q1 = cfg.label_probs[a]
            r = cfg.sep_scale * separation_radius(CONSTS, cfg.eps, max(q1, 1 - q1), min(q1, 1 - q1))
            mu1 = np.asarray(inst.params[(1, a)]) * s2
            mu0 = np.asarray(inst.params[(0, a)]) * s2
            assert np.linalg.norm(mu1 - mu0) == pytest.approx(r, rel=1e-9)
            # natural-parameter gap times sigma^2 equals the mean gap
            gap = np.linalg.norm(np.asarray(inst.params[(1, a)]) - np.asarray(inst.params[(0, a)]))
            assert gap * s2 == pytest.approx(r, rel=1e-9)

    def test_defaults(self):
        cfg = MixtureConfig()
        assert cfg.d == 5 and cfg.sigma2 == 4.0
        assert cfg.group_probs[1] == 0.7

    def test_seed_determinism(self):
        cfg = MixtureConfig(eps=0.2)
        a = generate_separated_mixture(cfg, RngStream(5))
        b = generate_separated_mixture(cfg, RngStream(5))
        for k in a.params:
            assert np.array_equal(a.params[k], b.params[k])

    def test_json_roundtrip(self):
        from audit_lab.instances import MixtureAuditInstance

        cfg = MixtureConfig(eps=0.2)
        inst = generate_separated_mixture(cfg, RngStream(5))
        back = MixtureAuditInstance.from_json(inst.to_json())
        for k in inst.params:
            assert np.allclose(back.params[k], inst.params[k])
        assert np.allclose(back.group_probs, inst.group_probs)


class TestLowerBoundPair:
    def test_fair_eod_exactly_zero(self):
        fair, _ = make_lower_bound_pair(Fraction(1, 10), Fraction(3, 10), Fraction(3, 10))
        assert population_summary(fair, None, "exact").eod == 0

    def test_unfair_eod_exact_value(self):
        _, unfair = make_lower_bound_pair(Fraction(1, 10), Fraction(3, 10), Fraction(3, 10))
        eod = population_summary(unfair, None, "exact").eod
        assert eod == Fraction(1, 7)  # 2 eps / (1 + 4 eps) at eps = 1/10
        assert eod > Fraction(1, 10)

    def test_unfair_joint_cell(self):
        e, p, q = Fraction(1, 10), Fraction(3, 10), Fraction(3, 10)
        _, unfair = make_lower_bound_pair(e, p, q)
        assert unfair.joint_conditional(0, 1, 1) == (q / 2) * (1 + 8 * e)

    def test_indistinguishable_free_structure(self):
        # P[f=1 | A=a] and P[Y=1 | f=1, A=a] agree exactly across hypotheses
        e, p, q = Fraction(1, 8), Fraction(1, 4), Fraction(2, 5)
        fair, unfair = make_lower_bound_pair(e, p, q)
        for a in (0, 1):
            pf_fair = sum(fair.joint_conditional(1, y, a) for y in (0, 1))
            pf_unfair = sum(unfair.joint_conditional(1, y, a) for y in (0, 1))
            assert pf_fair == pf_unfair
            assert (
                fair.joint_conditional(1, 1, a) / pf_fair
                == unfair.joint_conditional(1, 1, a) / pf_unfair
            )

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            make_lower_bound_pair(Fraction(3, 10), Fraction(1, 4), Fraction(1, 4))  # eps >= 1/4
        with pytest.raises(DomainError):
            make_lower_bound_pair(Fraction(1, 10), Fraction(1, 4), Fraction(3, 5))  # q >= 1/2

    def test_sampling_matches_exact_summary(self):
        _, unfair = make_lower_bound_pair(0.1, 0.3, 0.3)
        summary = population_summary(unfair, None, "exact")
        X, A, Y = unfair.sample_batch(200_000, RngStream(3))
        f = X[:, 0].astype(int)
        for a in (0, 1):
            mask = A == a
            assert (Y[mask] == 1).mean() == pytest.approx(float(summary.q_cond[(1, a)]), abs=0.01)
            assert ((f == 1) & (Y == 1))[mask].mean() == pytest.approx(
                float(summary.p_cond[(1, a)]), abs=0.01
            )

    def test_json_roundtrip(self):
        from audit_lab.instances import LowerBoundInstance

        _, unfair = make_lower_bound_pair(Fraction(1, 10), Fraction(3, 10), Fraction(3, 10))
        back = LowerBoundInstance.from_json(unfair.to_json())
        assert back.true_eod() == unfair.true_eod()


class TestTrainLogistic:
    def test_separable_two_points(self):
        rows = {
            "x": np.array([0.0, 2.0]),
            "a": np.array([0, 1]),
            "y": np.array([0, 1]),
        }
        model = train_logistic(rows, "y", LogisticConfig(iterations=500))
        f = model.predict_rows({"x": rows["x"]}, ["x"], rows["a"])
        assert np.array_equal(f, rows["y"])

    def test_constant_labels_predict_constant(self):
        rows = {
            "x": np.array([0.0, 1.0, 2.0, 3.0]),
            "a": np.array([0, 1, 0, 1]),
            "y": np.array([1, 1, 1, 1]),
        }
        model = train_logistic(rows, "y", LogisticConfig(iterations=300))
        f = model.predict_rows({"x": rows["x"]}, ["x"], rows["a"])
        assert np.all(f == 1)

    def test_loss_nonincreasing(self):
        rng = RngStream(0)
        X = rng.np.standard_normal((200, 3))
        y = (X[:, 0] + 0.5 * rng.np.standard_normal(200) > 0).astype(int)
        model = train_logistic_numeric(X, np.zeros(200, dtype=int), y)
        hist = model.loss_history
        assert all(a >= b - 1e-12 for a, b in zip(hist, hist[1:]))

    def test_adult_fixture_beats_majority(self):
        from audit_lab.harness import ingest_adult

        ds = ingest_adult("data/adult_fixture.csv")
        idx = RngStream(1).np.choice(ds.n, 100, replace=False)
        model = train_logistic(ds.training_table(idx), "y")
        preds = ds.to_instance().predict_all(model)
        acc = float((preds == ds.y).mean())
        majority = max(ds.y.mean(), 1 - ds.y.mean())
        assert acc > majority

    def test_exclude_sensitive_changes_kind(self):
        rows = {
            "x": np.array([0.0, 1.0, 2.0, 3.0]),
            "a": np.array([0, 1, 0, 1]),
            "y": np.array([0, 0, 1, 1]),
        }
        m = train_logistic(rows, "y", LogisticConfig(exclude_sensitive=True))
        assert m.kind == "wo_A_LR"
        assert not m.include_group


class TestBuiltinClassifiers:
    def test_sense_attr(self):
        clf = builtin_classifier("sense_attr")
        assert clf.predict(np.array([3.0]), 1) == 1
        assert clf.predict(np.array([3.0]), 0) == 0

    def test_random_rate_and_determinism(self):
        clf = builtin_classifier("random", seed=1)
        X = np.arange(10_000, dtype=float).reshape(-1, 1)
        A = np.zeros(10_000, dtype=int)
        f = clf.predict_batch(X, A)
        assert abs(f.mean() - 0.5) < 0.02
        assert np.array_equal(f, clf.predict_batch(X, A))

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            builtin_classifier("nope")


def _four_cell_instance():
    # two groups, both labels in each group, simple numeric feature
    X = np.array([[0.0], [1.0], [2.0], [3.0]] * 25)
    a = np.array(([0] * 4 + [1] * 4) * 12 + [0, 1, 0, 1])
    y = np.tile(np.array([0, 1, 0, 1]), 25)
    return empirical_instance_from_numeric(X, a, y)


class TestPopulationSummary:
    def test_always_positive_classifier(self):
        inst = _four_cell_instance()
        s = population_summary(inst, ConstantClassifier(1), "exact")
        assert s.eod == 0
        assert s.beta_neg_rate == 0
        assert s.gamma[(0, 0)] == 0

    def test_symmetric_groups_blind_classifier(self):
        # identical feature/label distribution in both groups and a
        # group-blind rule: disparity is exactly zero in exact mode
        X = np.array([[0.0], [1.0], [2.0], [3.0]] * 2)
        a = np.array([0] * 4 + [1] * 4)
        y = np.array([0, 0, 1, 1] * 2)
        inst = empirical_instance_from_numeric(X, a, y)

        class Threshold(ConstantClassifier):
            def __init__(self):
                pass

            def predict_batch(self, X, A):
                return (np.asarray(X)[:, 0] >= 1.5).astype(np.int8)

        s = population_summary(inst, Threshold(), "exact")
        assert s.eod == 0

    def test_marginal_identities(self):
        from audit_lab.harness import ingest_adult

        ds = ingest_adult("data/adult_fixture.csv")
        inst = ds.to_instance()
        clf = builtin_classifier("random", seed=3)
        s = population_summary(inst, clf, "exact")
        assert sum(s.q_joint.values()) == pytest.approx(1.0, abs=1e-12)
        assert sum(s.gamma.values()) == pytest.approx(1.0, abs=1e-12)
        for (yv, av), q in s.q_joint.items():
            assert s.p_joint[(yv, av)] <= q + 1e-12
            assert s.p_joint[(yv, av)] == pytest.approx(
                s.p_cond[(yv, av)] * s.group_probs[av], abs=1e-12
            )
        assert 0 <= s.eod <= 1

    def test_ill_posed_group_without_label(self):
        X = np.zeros((4, 1))
        with pytest.raises(IllPosed):
            empirical_instance_from_numeric(X, np.array([0, 0, 1, 1]), np.array([0, 1, 1, 1]))

    def test_monte_carlo_convergence(self):
        cfg = MixtureConfig(eps=0.2, constants=CONSTS, sep_scale=0.4)
        inst = generate_separated_mixture(cfg, RngStream(2))
        Xt, At, Yt = inst.sample_batch(3000, RngStream(3))
        clf = train_logistic_numeric(Xt, At, Yt)
        d1 = population_summary(inst, clf, "monte_carlo", n=10_000, rng=RngStream(4)).eod
        d2 = population_summary(inst, clf, "monte_carlo", n=40_000, rng=RngStream(5)).eod
        assert abs(d1 - d2) <= 0.03

import math

import pytest

from audit_lab.errors import DomainError
from audit_lab.stats import chernoff_bound, kl_bernoulli, negbin_bounds, ratio_bounds


class TestNegbinBounds:
    def test_spec_point(self):
        b = negbin_bounds(100, 0.5, 0.2)
        assert (b.lo, b.hi) == (160.0, 240.0)
        assert b.failure_prob == pytest.approx(2 * math.exp(-1), abs=1e-12)

    def test_zero_eps_degenerate(self):
        b = negbin_bounds(50, 0.25, 0.0)
        assert b.lo == b.hi == 200.0
        assert b.failure_prob == 2.0  # vacuous, returned raw

    def test_large_tau(self):
        b = negbin_bounds(2000, 0.5, 0.1)
        assert b.failure_prob == pytest.approx(2 * math.exp(-5), abs=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            negbin_bounds(0, 0.5, 0.1)
        with pytest.raises(DomainError):
            negbin_bounds(10, 1.5, 0.1)
        with pytest.raises(DomainError):
            negbin_bounds(10, 0.5, 2.0)


class TestChernoff:
    def test_values(self):
        assert chernoff_bound(300, 0.1) == pytest.approx(2 * math.exp(-1), abs=1e-12)
        assert chernoff_bound(3000, 0.1) == pytest.approx(2 * math.exp(-10), rel=1e-12)

    def test_monotone_in_mu(self):
        vals = [chernoff_bound(mu, 0.1) for mu in (10, 100, 1000, 10000)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_domain(self):
        with pytest.raises(DomainError):
            chernoff_bound(-1.0, 0.1)
        with pytest.raises(DomainError):
            chernoff_bound(10.0, 1.0)


class TestKlBernoulli:
    def test_identical_is_zero(self):
        assert kl_bernoulli(0.5, 0.5) == 0.0

    def test_frozen_value(self):
        # 0.1 ln(1/2) + 0.9 ln(9/8) = 0.0366900...
        expected = 0.1 * math.log(0.5) + 0.9 * math.log(1.125)
        assert kl_bernoulli(0.1, 0.2) == pytest.approx(expected, abs=1e-15)
        assert kl_bernoulli(0.1, 0.2) == pytest.approx(0.036690014, abs=1e-9)

    def test_quadratic_upper_bound_first(self):
        # kl(q, q(1+8e)) <= 64 q e^2 whenever 8 q e / (1 - q) <= 1
        q, e = 0.3, 0.05
        assert 8 * q * e / (1 - q) <= 1
        assert kl_bernoulli(q, q * (1 + 8 * e)) <= 64 * q * e * e == pytest.approx(0.048)

    def test_quadratic_upper_bound_second_on_grid(self):
        # kl(q(1+8e), q) <= 128 q e^2 on the constrained grid
        for q in (0.1, 0.3):
            for e in (0.02, 0.05):
                assert 8 * q * e / (1 - q) <= 1
                assert kl_bernoulli(q * (1 + 8 * e), q) <= 128 * q * e * e

    def test_pinsker_consistent(self):
        # kl(p, q) >= 2 (p - q)^2 on a 20 x 20 grid
        grid = [i / 21 for i in range(1, 21)]
        for p in grid:
            for q in grid:
                assert kl_bernoulli(p, q) >= 2 * (p - q) ** 2 - 1e-15

    def test_domain(self):
        with pytest.raises(DomainError):
            kl_bernoulli(0.0, 0.5)
        with pytest.raises(DomainError):
            kl_bernoulli(0.5, 1.0)


class TestRatioBounds:
    def test_eps_01(self):
        lo, hi = ratio_bounds(0.1)
        assert (lo, hi) == (0.8, 1.4)
        assert (1 - 0.1) / (1 + 0.1) >= lo
        assert (1 + 0.1) / (1 - 0.1) <= hi

    def test_eps_quarter(self):
        assert ratio_bounds(0.25) == (0.5, 2.0)

    def test_limit_toward_zero(self):
        lo, hi = ratio_bounds(1e-9)
        assert lo == pytest.approx(1.0, abs=1e-8)
        assert hi == pytest.approx(1.0, abs=1e-8)

    def test_brackets_hold_on_grid(self):
        for i in range(1, 50):
            e = i / 100.0
            lo, hi = ratio_bounds(e)
            assert (1 - e) / (1 + e) >= lo - 1e-15
            assert (1 + e) / (1 - e) <= hi + 1e-15

    def test_domain(self):
        with pytest.raises(DomainError):
            ratio_bounds(0.5)

"""Tests for the worst-case constructions and the counterexample search."""

import math

import numpy as np
import pytest

from convexmix.audit import (
    AuditInstance,
    construction_instances,
    evaluate_instance,
    lemma_bounds,
    search_violations,
)
from convexmix.bounds import constants_from_eps

REF = constants_from_eps(0.1, 1.0, 0.08)


class TestLemmaBounds:
    def test_reference_triple(self):
        lb = lemma_bounds(REF.a, REF.mu, 0.08)
        assert lb.mu_min == pytest.approx(0.7957959563888537, rel=1e-12)
        assert lb.b_min_via_mu == pytest.approx(0.4918019010483116, rel=1e-12)
        assert lb.b_min_combined == pytest.approx(0.4332313186580919, rel=1e-12)

    def test_reference_constants_clear_their_own_bounds(self):
        """The derived (a, b, mu) triple satisfies the necessary conditions
        the constructions impose on it."""
        lb = lemma_bounds(REF.a, REF.mu, 0.08)
        assert REF.mu >= lb.mu_min
        # b alone need not dominate b_min; the slack lives in the full
        # inequality, which the construction tests below certify.

    def test_linear_in_a(self):
        lb1 = lemma_bounds(0.01, 1.0, 0.1)
        lb2 = lemma_bounds(0.02, 1.0, 0.1)
        assert lb2.mu_min == pytest.approx(2 * lb1.mu_min, rel=1e-15)
        assert lb2.b_min_combined == pytest.approx(2 * lb1.b_min_combined, rel=1e-15)

    def test_midpoint_floor_limit(self):
        """As the floor approaches 1/2, k0 -> 1/4 and the combined bound
        tends to 4a + a = 5a."""
        lb = lemma_bounds(0.01, 1.0, 0.499999)
        assert lb.b_min_combined == pytest.approx(0.05, rel=1e-4)

    def test_domain(self):
        with pytest.raises(ValueError):
            lemma_bounds(0.0, 1.0, 0.1)
        with pytest.raises(ValueError):
            lemma_bounds(0.01, -1.0, 0.1)
        with pytest.raises(ValueError):
            lemma_bounds(0.01, 1.0, 0.5)


class TestConstructionInstances:
    def test_unit_cap(self):
        first, second = construction_instances(1.0, 0.08)
        assert first == AuditInstance(y=1.0, yhat1=1.0, yhat2=0.0, lambda_t=0.08, beta=1.0)
        assert second == AuditInstance(y=-0.5, yhat1=0.0, yhat2=1.0, lambda_t=0.5, beta=1.0)

    def test_signals_scale_with_cap(self):
        first, second = construction_instances(0.5, 0.08)
        assert (first.y, first.yhat1, first.yhat2) == (0.5, 0.5, 0.0)
        assert (second.y, second.yhat1, second.yhat2) == (-0.25, 0.0, 0.5)
        assert (first.lambda_t, second.lambda_t) == (0.08, 0.5)

    def test_domain(self):
        with pytest.raises(ValueError):
            construction_instances(0.0, 0.08)
        with pytest.raises(ValueError):
            construction_instances(1.0, 0.6)


class TestEvaluateInstance:
    def test_floor_construction_margin(self):
        """Weight at the floor, comparator on the accurate expert: the
        progress term clears the loss difference with margin ~0.0144."""
        first, _ = construction_instances(1.0, 0.08)
        rep = evaluate_instance(REF.a, REF.b, REF.mu, first)
        assert rep.lhs == pytest.approx(0.04957414093512029, abs=1e-9)
        assert rep.progress == pytest.approx(0.06398620364160835, abs=1e-9)
        assert rep.margin == pytest.approx(0.014412062706488063, abs=1e-9)
        assert not rep.violated

    def test_midpoint_construction_margin(self):
        """Both experts miss; the exact progress is positive (~0.1205), so
        the requirement holds with margin ~0.0869 rather than binding."""
        _, second = construction_instances(1.0, 0.08)
        rep = evaluate_instance(REF.a, REF.b, REF.mu, second)
        assert rep.lhs == pytest.approx(0.03357058239021963, abs=1e-9)
        assert rep.progress == pytest.approx(0.1204930492688809, abs=1e-9)
        assert rep.progress > 0.0
        assert rep.margin == pytest.approx(0.08692246687866127, abs=1e-9)
        assert not rep.violated

    def test_agreeing_experts_inert(self):
        inst = AuditInstance(y=0.3, yhat1=0.3, yhat2=0.3, lambda_t=0.4, beta=0.7)
        rep = evaluate_instance(REF.a, REF.b, REF.mu, inst)
        assert rep.margin == 0.0
        assert not rep.violated

    def test_oversized_a_is_caught(self):
        """a > mu*k0 breaks the floor construction: the update cannot make
        enough progress (its log gain is below mu*k0*(1-lp)^2*Y^2) while the
        loss side charges a*(1-lp)^2*Y^2."""
        first, _ = construction_instances(1.0, 0.08)
        k0 = 0.08 * 0.92
        rep = evaluate_instance(1.5 * k0, 1e-6, 1.0, first)
        assert rep.violated
        assert rep.margin < 0.0

    def test_saturation_raises(self):
        first, _ = construction_instances(1.0, 0.08)
        with pytest.raises(ArithmeticError, match="degenerated"):
            evaluate_instance(0.1, 0.1, 1e6, first)

    def test_domain(self):
        with pytest.raises(ValueError):
            evaluate_instance(REF.a, REF.b, REF.mu, AuditInstance(0, 0, 0, 0.0, 0.5))
        with pytest.raises(ValueError):
            evaluate_instance(REF.a, REF.b, REF.mu, AuditInstance(0, 0, 0, 0.5, 1.5))


class TestSearchViolations:
    def test_derived_constants_survive_grid(self):
        assert search_violations(REF.a, REF.b, REF.mu, 0.08, 1.0, budget=1875, seed=3) == []

    def test_derived_constants_survive_random_fill(self):
        assert search_violations(REF.a, REF.b, REF.mu, 0.08, 1.0, budget=4000, seed=3) == []

    def test_undersized_b_is_found(self):
        """b far below the combined necessary bound yields grid witnesses;
        the worst sits at the midpoint weight with opposed experts."""
        found = search_violations(0.0586, 0.005, 1.03, 0.08, 1.0, budget=1875, seed=0)
        assert found
        worst_inst, worst_rep = found[0]
        assert worst_rep.margin == pytest.approx(-0.3418285434612441, rel=1e-12)
        assert worst_inst == AuditInstance(y=-1.0, yhat1=1.0, yhat2=-0.5, lambda_t=0.5, beta=1.0)
        margins = [rep.margin for _, rep in found]
        assert margins == sorted(margins)
        assert all(m < -1e-9 for m in margins)
        assert all(rep.violated for _, rep in found)

    def test_random_fill_extends_search(self):
        a_grid = search_violations(0.0586, 0.005, 1.03, 0.08, 1.0, budget=1875, seed=0)
        a_fill = search_violations(0.0586, 0.005, 1.03, 0.08, 1.0, budget=5000, seed=0)
        assert len(a_fill) > len(a_grid)
        # grid worst still dominates: random interior draws are milder
        assert a_fill[0][1].margin == a_grid[0][1].margin

    def test_deterministic(self):
        kw = dict(budget=3000, seed=11)
        one = search_violations(0.0586, 0.005, 1.03, 0.08, 1.0, **kw)
        two = search_violations(0.0586, 0.005, 1.03, 0.08, 1.0, **kw)
        assert one == two

    def test_single_instance_budget(self):
        assert search_violations(0.0586, 0.005, 1.03, 0.08, 1.0, budget=1, seed=0) == []

    def test_saturating_rate_raises(self):
        with pytest.raises(ArithmeticError, match="saturated"):
            search_violations(0.1, 0.1, 1e6, 0.08, 1.0, budget=50, seed=0)

    def test_validation(self):
        with pytest.raises(ValueError):
            search_violations(REF.a, REF.b, REF.mu, 0.08, 1.0, budget=0, seed=0)
        with pytest.raises(ValueError):
            search_violations(-0.1, REF.b, REF.mu, 0.08, 1.0, budget=10, seed=0)
        with pytest.raises(ValueError):
            search_violations(REF.a, REF.b, REF.mu, 0.55, 1.0, budget=10, seed=0)
        with pytest.raises(ValueError):
            search_violations(REF.a, REF.b, REF.mu, 0.08, math.inf, budget=10, seed=0)


class TestLogMixLowerBound:
    def test_holds_on_grid(self):
        """-ln(lp + (1-lp)e^{-x}) <= (1-lp)x for x >= 0: the log gain of a
        floor-weight update never exceeds its linearization, which is what
        caps the progress available to the floor construction."""
        x = np.linspace(0.0, 10.0, 2001)
        for lp in (0.01, 0.08, 0.25, 0.49):
            gain = -np.log(lp + (1.0 - lp) * np.exp(-x))
            assert np.all(gain <= (1.0 - lp) * x + 1e-12)

import math
from fractions import Fraction
from unittest import TestCase

from cumubound import tail
from cumubound.asymptotics import rate
from cumubound.constants import PartitionClass
from cumubound.distributions import Bernoulli, Exponential, Gaussian, Rademacher, cumulant_sequence
from cumubound.errors import ConsistencyError, InvalidOrderError, ParameterError
from cumubound.transforms import CumulantSequence

UNIT = tail.BernsteinParams(1, 1)


class TestBernsteinTail(TestCase):
    def test_reference_value(self):
        self.assertAlmostEqual(tail.bernstein_tail(UNIT, 3), math.exp(-9 / 8))
        self.assertAlmostEqual(tail.bernstein_tail(UNIT, 3), 0.324652, places=6)

    def test_two_sided_is_capped(self):
        self.assertEqual(tail.bernstein_tail(UNIT, 0.5, two_sided=True), 1.0)
        self.assertAlmostEqual(tail.bernstein_tail(UNIT, 3, two_sided=True), 2 * math.exp(-9 / 8))

    def test_monotone_in_deviation(self):
        values = [tail.bernstein_tail(UNIT, x) for x in (0.5, 1, 2, 4, 8, 16)]
        self.assertEqual(values, sorted(values, reverse=True))

    def test_extreme_deviations_underflow_to_zero(self):
        self.assertEqual(tail.bernstein_tail(UNIT, 1e200), 0.0)
        self.assertEqual(tail.bernstein_tail(UNIT, 10**400), 0.0)
        self.assertEqual(tail.bernstein_tail(UNIT, 1e200, two_sided=True), 0.0)
        values = [tail.bernstein_tail(UNIT, 10.0**k) for k in range(0, 310, 10)]
        self.assertEqual(values, sorted(values, reverse=True))
        self.assertEqual(values[-1], 0.0)

    def test_tiny_deviation_is_near_one(self):
        self.assertEqual(tail.bernstein_tail(UNIT, 1e-300), 1.0)

    def test_monotone_in_parameters(self):
        for x in (0.5, 1, 3, 10):
            by_v = [tail.bernstein_tail(tail.BernsteinParams(v, 1), x) for v in (Fraction(1, 4), 1, 2, 8)]
            by_b = [tail.bernstein_tail(tail.BernsteinParams(1, b), x) for b in (Fraction(1, 10), 1, 2, 8)]
            self.assertEqual(by_v, sorted(by_v))
            self.assertEqual(by_b, sorted(by_b))

    def test_dominates_exponential_tail(self):
        for x in (1, 2, 3, 5):
            exact = math.exp(-(1 + x))
            self.assertLessEqual(exact, tail.bernstein_tail(UNIT, x))

    def test_invalid_arguments(self):
        with self.assertRaises(ParameterError):
            tail.BernsteinParams(0, 1)
        with self.assertRaises(ParameterError):
            tail.BernsteinParams(1, -1)
        with self.assertRaises(ParameterError):
            tail.bernstein_tail(UNIT, 0)


class TestChernoff(TestCase):
    def test_optimal_point(self):
        params = tail.BernsteinParams(2, Fraction(1, 2))
        for x in (1, 2, 3, 5):
            t_star = tail.chernoff_point(params, x)
            self.assertTrue(0 < t_star < params.domain_end)
            self.assertAlmostEqual(t_star, x / (2 + x / 2))
            expected = -(x**2) / (2 * (2 + x / 2))
            self.assertAlmostEqual(tail.chernoff_exponent(params, t_star, x), expected)
            self.assertAlmostEqual(math.exp(expected), tail.bernstein_tail(params, x))

    def test_quadratic_bound_domain(self):
        self.assertEqual(tail.cgf_quadratic_bound(UNIT, 0), 0)
        self.assertAlmostEqual(tail.cgf_quadratic_bound(UNIT, 0.5), 0.25)
        with self.assertRaises(ParameterError):
            tail.cgf_quadratic_bound(UNIT, 1)
        with self.assertRaises(ParameterError):
            tail.cgf_quadratic_bound(UNIT, -0.1)

    def test_quadratic_bound_overflows_to_infinity(self):
        wide = tail.BernsteinParams(1, Fraction(1, 10**300))
        self.assertEqual(tail.cgf_quadratic_bound(wide, 1e200), math.inf)
        self.assertAlmostEqual(tail.cgf_quadratic_bound(wide, 1e100), 5e199, delta=1e186)

    def test_elementary_gap(self):
        self.assertEqual(tail.elementary_gap(0), 0)
        for i in range(100):
            self.assertGreaterEqual(tail.elementary_gap(i / 100), 0)
        with self.assertRaises(ParameterError):
            tail.elementary_gap(1)


class TestCgfDominance(TestCase):
    def test_exponential(self):
        margins = tail.cgf_dominance(Exponential().centered_cgf, UNIT)
        self.assertEqual(len(margins), 100)
        self.assertAlmostEqual(margins[-1].t, 0.99)
        self.assertTrue(all(margin.holds for margin in margins))

    def test_gaussian_and_rademacher(self):
        for law in (Gaussian(), Rademacher()):
            margins = tail.cgf_dominance(law.centered_cgf, tail.BernsteinParams(1, Fraction(1, 10)), points=50)
            self.assertTrue(all(margin.holds for margin in margins))

    def test_detects_failure(self):
        margins = tail.cgf_dominance(Gaussian(2).centered_cgf, UNIT, points=10)
        self.assertFalse(all(margin.holds for margin in margins))

    def test_grid_size(self):
        with self.assertRaises(ParameterError):
            tail.cgf_dominance(Gaussian().centered_cgf, UNIT, points=1)


class TestDerivedParams(TestCase):
    def test_a_cen(self):
        rho = rate(PartitionClass.NO_SINGLETONS).rho
        self.assertAlmostEqual(tail.compute_A_cen(), rho**2, places=10)
        self.assertAlmostEqual(tail.compute_A_cen(), 1.3138, places=3)
        ratios = tail.a_cen_ratios(8)
        self.assertEqual(ratios[0][0], 2)
        self.assertAlmostEqual(ratios[1][1], rho**3 / 2)
        with self.assertRaises(InvalidOrderError):
            tail.a_cen_ratios(1)

    def test_scaling(self):
        rho = rate(PartitionClass.NO_SINGLETONS).rho
        base = tail.derive_params(1, 1)
        self.assertAlmostEqual(base.v_prime, base.A_cen / rho**2)
        self.assertAlmostEqual(base.b, 1 / rho)
        scaled = tail.derive_params(4, 2)
        self.assertAlmostEqual(scaled.v_prime, 4 * base.v_prime)
        self.assertAlmostEqual(scaled.b, 2 * base.b)
        self.assertEqual(scaled.bernstein(), tail.BernsteinParams(scaled.v_prime, scaled.b))

    def test_growth_assumption_is_checked(self):
        with self.assertRaises(ConsistencyError):
            tail.derive_params(1, 1, law=Exponential())
        tail.derive_params(Fraction(1, 4), Fraction(1, 2), law=Bernoulli(Fraction(1, 2)))
        tail.derive_params(1, 1, law=Rademacher())

    def test_invalid(self):
        with self.assertRaises(ParameterError):
            tail.derive_params(0, 1)
        with self.assertRaises(ParameterError):
            tail.derive_params(1, -1)


class TestCumulantCondition(TestCase):
    def test_derived_params_satisfy_condition(self):
        for law, v, L in ((Rademacher(), 1, 1), (Bernoulli(Fraction(1, 2)), Fraction(1, 4), Fraction(1, 2))):
            derived = tail.derive_params(v, L, law=law)
            cumulants = cumulant_sequence(law, tail.GROWTH_CHECK_ORDER).centered()
            check = tail.cumulant_condition_check(cumulants, derived.bernstein())
            self.assertTrue(check.ok, msg=law.label)
            self.assertIsNone(check.first_violation)

    def test_exact_violation(self):
        cumulants = cumulant_sequence(Rademacher(), 8)
        check = tail.cumulant_condition_check(cumulants, tail.BernsteinParams(1, Fraction(1, 5)))
        self.assertFalse(check.ok)
        self.assertEqual(check.first_violation, 4)
        self.assertIn(6, check.violations)

    def test_gaussian_holds_for_any_scale(self):
        cumulants = cumulant_sequence(Gaussian(), 12)
        self.assertTrue(tail.cumulant_condition_check(cumulants, tail.BernsteinParams(1, Fraction(1, 1000))).ok)

    def test_exponential_cumulants_meet_unit_condition(self):
        cumulants = cumulant_sequence(Exponential(), 20).centered()
        for n in range(2, 21):
            self.assertEqual(abs(cumulants.cumulant(n)), math.factorial(n - 1))
        self.assertTrue(tail.cumulant_condition_check(cumulants, UNIT).ok)

    def test_requires_centered_law(self):
        with self.assertRaises(ConsistencyError):
            tail.cumulant_condition_check(CumulantSequence((1, 1, 1)), UNIT)

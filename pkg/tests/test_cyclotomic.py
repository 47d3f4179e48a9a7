"""Tests for cyclotomic polynomials, valuations and contribution estimates."""

import unittest
import sys
from pathlib import Path

# Add the repository root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from math import gcd

from sympy import Poly, cyclotomic_poly, divisors, symbols

from src.cyclotomic import (
    ContributionKind,
    IntPolynomial,
    PrimitiveDivisorError,
    ValuationContext,
    ValuationContextError,
    contribution_bound,
    cyclotomic_polynomial,
    cyclotomic_value,
    direct_valuation,
    euler_totient,
    factor_power_difference,
    ordp_cyclotomic,
    ordp_power_difference,
    prime_contributions,
    primitive_divisor,
    verify_contribution_bound,
    verify_cyclotomic_identity,
    verify_inequality_monotonicity,
    verify_primitive_divisors,
    verify_valuation_rules,
)


class TestPolynomials(unittest.TestCase):
    """Test cyclotomic polynomial construction."""

    def test_totient(self):
        self.assertEqual(euler_totient(1), 1)
        self.assertEqual(euler_totient(12), 4)
        self.assertEqual(euler_totient(30), 8)
        for n in range(1, 60):
            brute = sum(1 for k in range(1, n + 1) if gcd(k, n) == 1)
            self.assertEqual(euler_totient(n), brute)

    def test_small_polynomials(self):
        self.assertEqual(cyclotomic_polynomial(1).coefficients, (-1, 1))
        self.assertEqual(cyclotomic_polynomial(2).coefficients, (1, 1))
        self.assertEqual(cyclotomic_polynomial(4).coefficients, (1, 0, 1))
        self.assertEqual(cyclotomic_polynomial(6).coefficients, (1, -1, 1))

    def test_agrees_with_sympy(self):
        x = symbols("x")
        for n in range(1, 41):
            expected = [int(c) for c in reversed(Poly(cyclotomic_poly(n, x), x).all_coeffs())]
            self.assertEqual(list(cyclotomic_polynomial(n).coefficients), expected, f"n={n}")

    def test_phi_105_has_coefficient_minus_two(self):
        coeffs = cyclotomic_polynomial(105).coefficients
        self.assertEqual(coeffs[7], -2)
        self.assertEqual(min(coeffs), -2)

    def test_identity_report(self):
        report = verify_cyclotomic_identity(105)
        self.assertTrue(report.passed, report.failures[:5])
        self.assertEqual(report.details["phi105_min_coefficient"], -2)

    def test_values(self):
        self.assertEqual(cyclotomic_value(2, 3), 4)
        self.assertEqual(cyclotomic_value(6, 2), 3)
        self.assertEqual(cyclotomic_value(4, 3, 2), 13)
        self.assertEqual(IntPolynomial((1, 2, 3))(2), 17)

    def test_exact_division_rejects_remainder(self):
        with self.assertRaises(ValueError):
            IntPolynomial((1, 0, 1)).exact_div(IntPolynomial((-1, 1)))

    def test_factor_power_difference(self):
        self.assertEqual(factor_power_difference(2, 6), {1: 1, 2: 3, 3: 7, 6: 3})
        self.assertEqual(factor_power_difference(3, 2), {1: 2, 2: 4})
        self.assertEqual(factor_power_difference(5, 1), {1: 4})
        for q in (2, 3, 7):
            for d in range(1, 13):
                product = 1
                for value in factor_power_difference(q, d).values():
                    product *= value
                self.assertEqual(product, q ** d - 1)


class TestValuations(unittest.TestCase):
    """Test the p-adic valuation rules."""

    def test_examples(self):
        ctx = ValuationContext.create(3, 2)
        self.assertEqual(ctx.f, 2)
        self.assertEqual(ordp_cyclotomic(ctx, 6), 1)
        self.assertEqual(ordp_cyclotomic(ctx, 4), 0)
        self.assertEqual(ordp_power_difference(ctx, 6), 2)
        self.assertEqual(ordp_power_difference(ctx, 5), 0)
        self.assertEqual(ordp_cyclotomic(ValuationContext.create(2, 3), 4), 1)
        self.assertEqual(ordp_power_difference(ValuationContext.create(7, 2), 3), 1)

    def test_two_adic(self):
        ctx = ValuationContext.create(2, 7)
        self.assertEqual(ordp_cyclotomic(ctx, 1), 1)
        self.assertEqual(ordp_cyclotomic(ctx, 2), 3)
        self.assertEqual(ordp_power_difference(ctx, 2), 4)
        self.assertEqual(ordp_cyclotomic(ctx, 3), 0)

    def test_divisor_sum(self):
        """ord_p(a^n - b^n) is the sum of ord_p Phi_m(a, b) over m | n."""
        for p, a, b in ((2, 5, 3), (3, 7, -2), (5, 12, 7), (13, -11, 4)):
            ctx = ValuationContext.create(p, a, b)
            for n in range(1, 25):
                total = sum(ordp_cyclotomic(ctx, m) for m in divisors(n))
                self.assertEqual(ordp_power_difference(ctx, n), total)
                self.assertEqual(total, direct_valuation(p, a ** n - b ** n))

    def test_invalid_contexts(self):
        for args in ((4, 3, 1), (3, 6, 1), (5, 4, 2), (5, 2, 2), (5, 1, 1), (3, 2, 0)):
            with self.assertRaises(ValuationContextError):
                ValuationContext.create(*args)

    def test_rules_over_full_grid(self):
        report = verify_valuation_rules(13, 12, 24)
        self.assertTrue(report.passed, report.failures[:5])
        self.assertGreater(report.checked, 10000)


class TestPrimitiveDivisors(unittest.TestCase):
    """Test primitive prime divisors."""

    def test_examples(self):
        self.assertIsNone(primitive_divisor(2, 6))
        self.assertEqual(primitive_divisor(2, 4), 5)
        self.assertEqual(primitive_divisor(3, 5), 11)
        self.assertEqual(primitive_divisor(2, 3), 7)
        self.assertEqual(primitive_divisor(2, 10), 11)

    def test_invalid_arguments(self):
        with self.assertRaises(PrimitiveDivisorError):
            primitive_divisor(1, 5)
        with self.assertRaises(PrimitiveDivisorError):
            primitive_divisor(2, 2)

    def test_only_exception(self):
        report = verify_primitive_divisors(12, 30)
        self.assertTrue(report.passed, report.failures[:5])
        self.assertEqual(report.details["missing"], [[2, 6]])


class TestContributions(unittest.TestCase):
    """Test the prime power contribution estimate."""

    def test_bound_values(self):
        self.assertEqual(contribution_bound(ContributionKind.A_EQ_PM_Q, 2, 3), 216)
        self.assertEqual(contribution_bound(ContributionKind.A_EQ_Q_SQUARED, 2, 3), 1728)
        self.assertEqual(contribution_bound(ContributionKind.A_EQ_PM_Q, 3, 1), 8)
        self.assertEqual(contribution_bound(ContributionKind.A_EQ_PM_Q, 3, 2), 64)
        self.assertEqual(contribution_bound("a_eq_q_squared", 2, 1), 12)

    def test_prime_contributions(self):
        # (2 - 1)(4 - 1)(8 - 1)(16 - 1) = 3^2 * 5 * 7
        self.assertEqual(prime_contributions([1, 3, 7, 15]), {3: 9, 5: 5, 7: 7})

    def test_bound_holds(self):
        report = verify_contribution_bound((2, 3, 4, 5, 7, 8, 9), 6)
        self.assertTrue(report.passed, report.failures[:5])

    def test_monotonicity(self):
        report = verify_inequality_monotonicity(16, 16, (2, 4))
        self.assertTrue(report.passed, report.failures[:5])


if __name__ == "__main__":
    unittest.main()

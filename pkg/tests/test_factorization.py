"""Tests for integer factorization and group order factorizations."""

import os
import random
import unittest
import sys
from pathlib import Path
from unittest.mock import patch

# Add the repository root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from sympy import factorint

from src.factorization import (
    EmptyFactorizationError,
    FactorizationBudgetError,
    Factorization,
    factor_cyclotomic_value,
    factor_group_order,
    factorize,
    is_prime,
    largest_prime_power_contribution,
    trial_division,
)
from src.lie_core import PrimePowerField, enumerate_groups, group_order, parse_group, prime_powers


class TestFactorize(unittest.TestCase):
    """Test the trial division and rho pipeline."""

    def test_small_values(self):
        self.assertEqual(factorize(2 ** 61 - 1).factors, {2305843009213693951: 1})
        self.assertEqual(factorize(1).factors, {})
        self.assertEqual(factorize(720).factors, {2: 4, 3: 2, 5: 1})
        self.assertEqual(str(factorize(720)), "2^4 * 3^2 * 5")
        self.assertEqual(str(factorize(1)), "1")

    def test_rho_splits_semiprime(self):
        n = 1000003 * 998244353
        self.assertEqual(factorize(n).factors, {1000003: 1, 998244353: 1})

    def test_matches_sympy(self):
        rng = random.Random(7)
        for _ in range(50):
            n = rng.randrange(2, 10 ** 14)
            self.assertEqual(factorize(n).factors, {int(p): e for p, e in factorint(n).items()})

    def test_deterministic(self):
        n = 2 ** 64 + 1
        self.assertEqual(factorize(n, seed=3), factorize(n, seed=3))
        self.assertEqual(factorize(n).factors, {274177: 1, 67280421310721: 1})

    def test_invalid_and_budget(self):
        with self.assertRaises(ValueError):
            factorize(0)
        with self.assertRaises(FactorizationBudgetError):
            factorize(10 ** 30, max_digits=20)
        with self.assertRaises(FactorizationBudgetError):
            factorize(1000003 * 998244353, rho_iterations=0)

    def test_environment_read_on_every_call(self):
        factorize(720)
        with patch.dict(os.environ, {"LIEORDER_MAX_DIGITS": "3"}):
            with self.assertRaises(FactorizationBudgetError):
                factorize(10 ** 10 + 1)
        self.assertEqual(factorize(10 ** 10 + 1).value, 10 ** 10 + 1)

    def test_trial_division(self):
        found, rest = trial_division(2 ** 3 * 7 * 10007, 100)
        self.assertEqual(found, {2: 3, 7: 1})
        self.assertEqual(rest, 10007)
        self.assertTrue(is_prime(rest))
        self.assertFalse(is_prime(1))

    def test_factorization_validation(self):
        with self.assertRaises(ValueError):
            Factorization({4: 1}, 4)
        with self.assertRaises(ValueError):
            Factorization({2: 1}, 3)


class TestGroupOrderFactorization(unittest.TestCase):
    """Test factorization through cyclotomic pieces."""

    def test_cyclotomic_value(self):
        self.assertEqual(factor_cyclotomic_value(6, 2), ((3, 1),))
        self.assertEqual(factor_cyclotomic_value(1, 9), ((2, 3),))
        self.assertEqual(factor_cyclotomic_value(5, 3), ((11, 2),))

    def test_reassembles_order(self):
        cases = [("A1", 9), ("B2", 2), ("E8", 49), ("A2*G2", 16), ("D5", 7)]
        for text, q in cases:
            g, f = parse_group(text), PrimePowerField.from_q(q)
            fac = factor_group_order(g, f)
            self.assertEqual(fac.value, group_order(g, f), text)

    def test_known_order(self):
        fac = factor_group_order(parse_group("A1"), PrimePowerField(3, 2))
        self.assertEqual(fac.factors, {2: 4, 3: 2, 5: 1})
        self.assertEqual(factor_group_order(parse_group("B2"), PrimePowerField(3)).factors, {2: 7, 3: 4, 5: 1})
        self.assertEqual(factor_group_order(parse_group("G2"), PrimePowerField(2)).factors, {2: 6, 3: 3, 7: 1})

    def test_agrees_with_direct_factorization(self):
        for g in enumerate_groups(6):
            for f in prime_powers(9):
                self.assertEqual(factor_group_order(g, f), factorize(group_order(g, f)), f"{g} over F_{f.q}")

    def test_largest_contribution(self):
        largest, second = largest_prime_power_contribution(factorize(720))
        self.assertEqual(largest, (2, 4))
        self.assertEqual(second, (3, 2))
        self.assertEqual(largest_prime_power_contribution(factorize(7)), ((7, 1), None))
        with self.assertRaises(EmptyFactorizationError):
            largest_prime_power_contribution(factorize(1))


if __name__ == "__main__":
    unittest.main()

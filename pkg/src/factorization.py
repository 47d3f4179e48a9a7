"""Exact integer factorization and prime-power bookkeeping for group orders.

Small factors are removed by trial division; what is left is split with
Brent's variant of Pollard's rho, seeded deterministically so that repeated
runs take the same path.
"""

import logging
import random
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, prod
from typing import Dict, List, Optional, Tuple

from sympy import divisors, isprime, primerange

from .config import get_config
from .cyclotomic import cyclotomic_value
from .lie_core import PrimePowerField, SemisimpleGroup, exponent_N, group_degrees

logger = logging.getLogger(__name__)


class FactorizationBudgetError(RuntimeError):
    """Raised when a number is too large or rho runs out of iterations."""
    pass


class EmptyFactorizationError(ValueError):
    """Raised when ranking prime powers of the factorization of 1."""
    pass


@lru_cache(maxsize=8)
def _small_primes(bound: int) -> Tuple[int, ...]:
    return tuple(int(p) for p in primerange(2, bound + 1))


@dataclass(frozen=True)
class Factorization:
    """Prime factorization of a positive integer."""

    factors: Dict[int, int]
    value: int

    def __post_init__(self):
        for p, e in self.factors.items():
            if e < 1 or not isprime(p):
                raise ValueError(f"Invalid factor {p}^{e}")
        if prod(p ** e for p, e in self.factors.items()) != self.value:
            raise ValueError(f"Factors do not reassemble to {self.value}")

    @classmethod
    def from_factors(cls, factors: Dict[int, int]) -> "Factorization":
        clean = {int(p): int(e) for p, e in sorted(factors.items()) if e}
        return cls(clean, prod(p ** e for p, e in clean.items()))

    def prime_powers(self) -> List[Tuple[int, int]]:
        return sorted(self.factors.items())

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        return " * ".join(f"{p}^{e}" if e > 1 else str(p) for p, e in self.prime_powers())


def is_prime(n: int) -> bool:
    return n >= 2 and bool(isprime(n))


def trial_division(n: int, bound: int) -> Tuple[Dict[int, int], int]:
    """
    Strip all prime factors up to bound.

    Returns:
        (factors found, cofactor with no prime factor <= bound)
    """
    found: Dict[int, int] = {}
    for p in _small_primes(bound):
        if p * p > n:
            break
        while n % p == 0:
            n //= p
            found[p] = found.get(p, 0) + 1
    if 1 < n <= bound:
        found[n] = found.get(n, 0) + 1
        n = 1
    return found, n


def _brent(n: int, rng: random.Random, budget: List[int]) -> int:
    """Find a nontrivial factor of the odd composite n; budget[0] counts down iterations."""
    g = n
    while g == n:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), rng.randrange(1, n)
        g, r, q = 1, 1, 1
        x = ys = y
        while g == 1:
            x, k = y, 0
            for _ in range(r):
                y = (y * y + c) % n
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                budget[0] -= min(m, r - k)
                if budget[0] < 0:
                    raise FactorizationBudgetError(f"Rho iteration budget exhausted on {n}")
                g, k = gcd(q, n), k + m
            r *= 2
        if g == n:
            while True:
                ys = (ys * ys + c) % n
                g = gcd(x - ys, n)
                budget[0] -= 1
                if g > 1:
                    break
    return g


def factorize(n: int, seed: Optional[int] = None, max_digits: Optional[int] = None,
              trial_bound: Optional[int] = None,
              rho_iterations: Optional[int] = None) -> Factorization:
    """
    Completely factor a positive integer.

    Settings left as None are read from get_config() on each call.

    Args:
        n: Integer to factor, at least 1
        seed: Seed for the rho method (configured default if None)
        max_digits: Refuse inputs with more decimal digits than this
        trial_bound: Largest trial divisor
        rho_iterations: Iteration budget shared by all rho calls

    Returns:
        Factorization of n (empty for n = 1)

    Raises:
        ValueError: If n < 1
        FactorizationBudgetError: If n is too large or rho does not finish
    """
    if n < 1:
        raise ValueError(f"Can only factor positive integers, got {n}")
    settings = get_config()["factorization"]
    seed = settings["seed"] if seed is None else seed
    max_digits = settings["max_digits"] if max_digits is None else max_digits
    trial_bound = settings["trial_bound"] if trial_bound is None else trial_bound
    budget = [settings["rho_iterations"] if rho_iterations is None else rho_iterations]

    if len(str(n)) > max_digits:
        raise FactorizationBudgetError(f"{len(str(n))}-digit input exceeds the {max_digits}-digit budget")

    found, rest = trial_division(n, trial_bound)
    factors = Counter(found)
    rng = random.Random(seed)
    stack = [rest] if rest > 1 else []
    while stack:
        m = stack.pop()
        if is_prime(m):
            factors[m] += 1
            continue
        d = _brent(m, rng, budget)
        logger.debug(f"Split {m} as {d} * {m // d}")
        stack.extend([d, m // d])
    return Factorization.from_factors(dict(factors))


@lru_cache(maxsize=4096)
def factor_cyclotomic_value(n: int, q: int, seed: Optional[int] = None) -> Tuple[Tuple[int, int], ...]:
    """
    Factor Phi_n(q).

    Every prime dividing Phi_n(q) either divides n or is 1 mod n, so trial
    division only tries those classes before falling back to factorize.
    """
    value = cyclotomic_value(n, q)
    bound = get_config()["factorization"]["trial_bound"]
    found: Counter = Counter()
    for p in _small_primes(bound):
        if p > value:
            break
        if p % n != 1 % n and n % p:
            continue
        while value % p == 0:
            value //= p
            found[p] += 1
    if value > 1:
        found.update(factorize(value, seed=seed).factors)
    return tuple(sorted(found.items()))


def factor_group_order(g: SemisimpleGroup, f: PrimePowerField, seed: Optional[int] = None) -> Factorization:
    """
    Factor |g(F_q)| through its cyclotomic pieces.

    Args:
        g: Split semisimple group
        f: Field of definition
        seed: Rho seed

    Returns:
        Factorization of the order
    """
    q = f.q
    exponents: Counter = Counter()
    N = exponent_N(g)
    if N:
        exponents[f.p] = f.t * N
    for d in group_degrees(g):
        for n in divisors(d):
            for p, e in factor_cyclotomic_value(n, q, seed):
                exponents[p] += e
    return Factorization.from_factors(dict(exponents))


def largest_prime_power_contribution(fac: Factorization) -> Tuple[Tuple[int, int], Optional[Tuple[int, int]]]:
    """
    The two prime powers p^e of largest value dividing fac.value.

    Ties between distinct primes cannot occur; ordering still falls back
    to the smaller prime so the result is deterministic.

    Returns:
        ((p, e) largest, (p, e) second largest or None)

    Raises:
        EmptyFactorizationError: If fac.value == 1
    """
    if fac.value == 1:
        raise EmptyFactorizationError("The factorization of 1 has no prime powers")
    ranked = sorted(fac.factors.items(), key=lambda pe: (-(pe[0] ** pe[1]), pe[0]))
    return ranked[0], (ranked[1] if len(ranked) > 1 else None)

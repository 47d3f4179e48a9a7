"""Cyclotomic polynomials, their valuations and the estimates built on them."""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from math import gcd
from typing import Dict, Iterable, Optional, Sequence, Tuple

from sympy import divisors, factorint, isprime, multiplicity, n_order, primerange

from .models import VerificationReport

logger = logging.getLogger(__name__)


class ValuationContextError(ValueError):
    """Raised when (p, a, b) do not satisfy the valuation context invariants."""
    pass


class PrimitiveDivisorError(ValueError):
    """Raised when primitive_divisor is called outside a > 1, n > 2."""
    pass


@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial, coefficients stored lowest degree first."""

    coefficients: Tuple[int, ...]

    def __post_init__(self):
        coeffs = list(self.coefficients)
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @classmethod
    def x_power_minus_one(cls, n: int) -> "IntPolynomial":
        return cls((-1,) + (0,) * (n - 1) + (1,))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        if not self.coefficients or not other.coefficients:
            return IntPolynomial(())
        out = [0] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, a in enumerate(self.coefficients):
            if a:
                for j, b in enumerate(other.coefficients):
                    out[i + j] += a * b
        return IntPolynomial(tuple(out))

    def exact_div(self, divisor: "IntPolynomial") -> "IntPolynomial":
        """Divide by a monic polynomial; the remainder must be zero."""
        den = divisor.coefficients
        if not den or den[-1] != 1:
            raise ValueError("Divisor must be monic")
        rem = list(self.coefficients)
        m = len(den) - 1
        if len(rem) - 1 < m:
            raise ValueError("Division is not exact")
        quotient = [0] * (len(rem) - m)
        for k in range(len(rem) - 1, m - 1, -1):
            c = rem[k]
            if c:
                quotient[k - m] = c
                for j in range(m + 1):
                    rem[k - m + j] -= c * den[j]
        if any(rem):
            raise ValueError("Division is not exact")
        return IntPolynomial(tuple(quotient))

    def __call__(self, x: int) -> int:
        value = 0
        for c in reversed(self.coefficients):
            value = value * x + c
        return value

    def homogeneous(self, a: int, b: int) -> int:
        """b^deg * P(a / b), evaluated exactly."""
        d = self.degree
        return sum(c * a ** i * b ** (d - i) for i, c in enumerate(self.coefficients))


def euler_totient(n: int) -> int:
    if n < 1:
        raise ValueError(f"Totient needs n >= 1, got {n}")
    result = n
    for p in factorint(n):
        result = result // p * (p - 1)
    return result


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> IntPolynomial:
    """
    The nth cyclotomic polynomial.

    Computed from x^n - 1 = prod_{d | n} Phi_d(x) by exact division.
    """
    if n < 1:
        raise ValueError(f"Cyclotomic index must be >= 1, got {n}")
    poly = IntPolynomial.x_power_minus_one(n)
    for d in divisors(n)[:-1]:
        poly = poly.exact_div(cyclotomic_polynomial(d))
    return poly


def cyclotomic_value(n: int, a: int, b: int = 1) -> int:
    """Homogeneous value Phi_n(a, b) = b^phi(n) * Phi_n(a / b)."""
    return cyclotomic_polynomial(n).homogeneous(a, b)


def factor_power_difference(q: int, d: int) -> Dict[int, int]:
    """Split q^d - 1 into its cyclotomic pieces {n: Phi_n(q)} over n | d."""
    if q < 2 or d < 1:
        raise ValueError(f"Need q >= 2 and d >= 1, got q={q}, d={d}")
    return {n: cyclotomic_value(n, q) for n in divisors(d)}


def direct_valuation(p: int, m: int) -> int:
    """Exponent of the largest power of p dividing the nonzero integer m."""
    if m == 0:
        raise ValueError("Valuation of zero is undefined")
    return int(multiplicity(p, abs(m)))


@dataclass(frozen=True)
class ValuationContext:
    """A prime p and coprime a, b with f the order of a/b modulo p."""

    p: int
    a: int
    b: int
    f: int

    @classmethod
    def create(cls, p: int, a: int, b: int = 1) -> "ValuationContext":
        """
        Validate (p, a, b) and compute f.

        Raises:
            ValuationContextError: If p is not prime, gcd(a, b) != 1,
                |a| < |b| + 1 or |b| < 1, or p divides a or b
        """
        if not isprime(p):
            raise ValuationContextError(f"p must be prime, got {p}")
        if gcd(a, b) != 1:
            raise ValuationContextError(f"a and b must be coprime, got a={a}, b={b}")
        if not abs(a) >= abs(b) + 1 >= 2:
            raise ValuationContextError(f"Need |a| >= |b| + 1 >= 2, got a={a}, b={b}")
        if a % p == 0 or b % p == 0:
            raise ValuationContextError(f"p={p} divides a={a} or b={b}")
        ratio = a * pow(b, -1, p) % p
        return cls(p, a, b, n_order(ratio, p))


def _power_of(k: int, p: int) -> Optional[int]:
    """Return i with k = p^i, or None."""
    i = int(multiplicity(p, k))
    return i if p ** i == k else None


def ordp_cyclotomic(ctx: ValuationContext, n: int) -> int:
    """
    Exact p-adic valuation of Phi_n(a, b).

    Follows the valuation rules: for odd p only n = f p^i contributes, with
    value 1 once i >= 1. For p = 2 the residue of a -/+ b mod 4 decides which
    powers of two contribute. Cases the rules leave open are evaluated directly.
    """
    if n < 1:
        raise ValueError(f"Cyclotomic index must be >= 1, got {n}")
    p = ctx.p
    if p != 2:
        if n % ctx.f:
            return 0
        i = _power_of(n // ctx.f, p)
        if i is None:
            return 0
        if i == 0:
            return direct_valuation(p, cyclotomic_value(ctx.f, ctx.a, ctx.b))
        return 1

    i = _power_of(n, 2)
    if i is None:
        return 0
    if (ctx.a - ctx.b) % 4 == 0:
        if i == 0:
            return direct_valuation(2, ctx.a - ctx.b)
        return 1
    # a + b = 0 mod 4
    if i == 1:
        return direct_valuation(2, ctx.a + ctx.b)
    return 1


def ordp_power_difference(ctx: ValuationContext, n: int) -> int:
    """
    Exact p-adic valuation of a^n - b^n.

    For odd p this is ord_p(a^f - b^f) + ord_p(n) when f | n and 0 otherwise.
    For p = 2 the cyclotomic valuations are summed over the divisors of n.
    """
    if n < 1:
        raise ValueError(f"Exponent must be >= 1, got {n}")
    if ctx.p == 2:
        return sum(ordp_cyclotomic(ctx, m) for m in divisors(n))
    if n % ctx.f:
        return 0
    return direct_valuation(ctx.p, ctx.a ** ctx.f - ctx.b ** ctx.f) + direct_valuation(ctx.p, n)


def primitive_divisor(a: int, n: int, scan_limit: int = 10 ** 6) -> Optional[int]:
    """
    Smallest prime dividing Phi_n(a) but no Phi_i(a) with i < n.

    Primes of Phi_n(a) that are not primitive divide n, so they are divided
    out first. Every remaining prime is 1 mod n, and the first member of
    1 + kn dividing the rest is its smallest prime.

    Args:
        a: Base, at least 2
        n: Index, at least 3
        scan_limit: Largest candidate tried before factoring the rest

    Returns:
        The prime, or None in the single exceptional case (a, n) = (2, 6)

    Raises:
        PrimitiveDivisorError: If a <= 1 or n <= 2
    """
    if a <= 1 or n <= 2:
        raise PrimitiveDivisorError(f"Need a > 1 and n > 2, got a={a}, n={n}")
    rest = cyclotomic_value(n, a)
    g = gcd(rest, n)
    while g > 1:
        rest //= g
        g = gcd(rest, n)
    if rest == 1:
        return None
    for candidate in range(n + 1, min(scan_limit, rest) + 1, n):
        if rest % candidate == 0:
            return candidate
    from .factorization import factorize

    for prime in sorted(factorize(rest).factors):
        if n_order(a % prime, prime) == n:
            return prime
    return None


class ContributionKind(str, Enum):
    """Which base a the contribution estimate is applied with."""

    A_EQ_PM_Q = "a_eq_pm_q"
    A_EQ_Q_SQUARED = "a_eq_q_squared"


def contribution_bound(kind: ContributionKind, q: int, l: int) -> int:
    """Upper bound for any prime power dividing prod_{i <= l} (a^i - 1) with p1 not dividing q."""
    kind = ContributionKind(kind)
    base = 2 if kind is ContributionKind.A_EQ_PM_Q else 4
    return base ** l * (q + 1) ** l


def prime_contributions(terms: Iterable[int]) -> Dict[int, int]:
    """Map each prime dividing prod(terms) to its full prime power p^e."""
    from .factorization import factorize

    exponents: Dict[int, int] = {}
    for m in terms:
        for p, e in factorize(abs(m)).factors.items():
            exponents[p] = exponents.get(p, 0) + e
    return {p: p ** e for p, e in exponents.items()}


def verify_cyclotomic_identity(n_max: int = 105) -> VerificationReport:
    """Check prod_{d | n} Phi_d(x) == x^n - 1 coefficient by coefficient."""
    report = VerificationReport(name="cyclotomic-identity")
    for n in range(1, n_max + 1):
        product = IntPolynomial((1,))
        for d in divisors(n):
            product = product * cyclotomic_polynomial(d)
        report.record(product == IntPolynomial.x_power_minus_one(n),
                      f"divisor product for n={n} differs from x^{n} - 1")
        report.record(cyclotomic_polynomial(n).degree == euler_totient(n),
                      f"deg Phi_{n} != phi({n})")
    if n_max >= 105:
        report.details["phi105_min_coefficient"] = min(cyclotomic_polynomial(105).coefficients)
    return report


def _valuation_triples(p_max: int, a_max: int) -> Iterable[ValuationContext]:
    for p in primerange(2, p_max + 1):
        for a in range(-a_max, a_max + 1):
            for b in range(-abs(a) + 1, abs(a)):
                if b == 0 or abs(a) < 2 or gcd(a, b) != 1 or a % p == 0 or b % p == 0:
                    continue
                yield ValuationContext.create(int(p), a, b)


def verify_valuation_rules(p_max: int = 13, a_max: int = 12, n_max: int = 24) -> VerificationReport:
    """Compare the rule-based valuations with direct valuations over a full grid."""
    report = VerificationReport(name="valuation-rules")
    for ctx in _valuation_triples(p_max, a_max):
        for n in range(1, n_max + 1):
            direct = direct_valuation(ctx.p, cyclotomic_value(n, ctx.a, ctx.b))
            report.record(ordp_cyclotomic(ctx, n) == direct,
                          f"ord_{ctx.p} Phi_{n}({ctx.a},{ctx.b}): rule != {direct}")
            direct_diff = direct_valuation(ctx.p, ctx.a ** n - ctx.b ** n)
            report.record(ordp_power_difference(ctx, n) == direct_diff,
                          f"ord_{ctx.p} ({ctx.a}^{n} - {ctx.b}^{n}): rule != {direct_diff}")
    logger.info(f"Valuation rules: {report.checked} comparisons, {len(report.failures)} failures")
    return report


def verify_primitive_divisors(a_max: int = 12, n_max: int = 30) -> VerificationReport:
    """A primitive prime divisor exists for every (a, n) except (2, 6)."""
    report = VerificationReport(name="primitive-divisors")
    missing = []
    for a in range(2, a_max + 1):
        for n in range(3, n_max + 1):
            prime = primitive_divisor(a, n)
            if prime is None:
                missing.append([a, n])
            report.record((prime is None) == ((a, n) == (2, 6)),
                          f"a={a}, n={n}: primitive divisor {prime}")
    report.details["missing"] = missing
    return report


def verify_contribution_bound(q_values: Sequence[int] = (2, 3, 4, 5, 7, 8, 9),
                              l_max: int = 6) -> VerificationReport:
    """
    Check every prime power p1^e (p1 not dividing q) of prod_{i <= l} (a^i - 1)
    against the contribution bound, for a = q, a = -q and a = q^2.
    """
    report = VerificationReport(name="contribution-bound")
    for q in q_values:
        for l in range(1, l_max + 1):
            for a, kind in ((q, ContributionKind.A_EQ_PM_Q),
                            (-q, ContributionKind.A_EQ_PM_Q),
                            (q * q, ContributionKind.A_EQ_Q_SQUARED)):
                bound = contribution_bound(kind, q, l)
                terms = [a ** i - 1 for i in range(1, l + 1)]
                for p1, power in prime_contributions(terms).items():
                    if q % p1 == 0:
                        continue
                    report.record(power <= bound, f"a={a}, l={l}: {p1}-part {power} > {bound}")
    return report


def verify_inequality_monotonicity(q_max: int = 16, n_max: int = 16,
                                   alphas: Sequence[float] = (2, 4)) -> VerificationReport:
    """If q^n >= alpha (q + 1) holds at (q, n) it holds at every larger grid point."""
    report = VerificationReport(name="inequality-monotonicity")
    for alpha in alphas:
        for q in range(2, q_max + 1):
            for n in range(1, n_max + 1):
                if q ** n < alpha * (q + 1):
                    continue
                for q2, n2 in ((q + 1, n), (q, n + 1)):
                    if q2 <= q_max and n2 <= n_max:
                        report.record(q2 ** n2 >= alpha * (q2 + 1),
                                      f"alpha={alpha}: holds at ({q},{n}) but not ({q2},{n2})")
    return report

"""Group symbols, Weyl degree tables and exact orders over finite fields.

A split semisimple group is stored as a canonical multiset of simple types.
Its order over F_q is q^N * prod (q^d - 1) where d runs over the degrees of
the basic invariants of the Weyl group and N = sum (d - 1).
"""

import logging
import re
from collections import Counter
from dataclasses import dataclass
from functools import total_ordering
from math import gcd, prod
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

from sympy import factorint, isprime, primerange

from .models import VerificationReport

logger = logging.getLogger(__name__)

FAMILY_ORDER = ("A", "B", "D", "G2", "F4", "E6", "E7", "E8")

EXCEPTIONAL_DEGREES: Dict[str, Tuple[int, ...]] = {
    "G2": (2, 6),
    "F4": (2, 6, 8, 12),
    "E6": (2, 5, 6, 8, 9, 12),
    "E7": (2, 6, 8, 10, 12, 14, 18),
    "E8": (2, 8, 12, 14, 18, 20, 24, 30),
}

MIN_CLASSICAL_RANK = {"A": 1, "B": 2, "D": 4}

# Sorted tuple of Weyl degrees, each at least 2
DegreeMultiset = Tuple[int, ...]

_TOKEN = re.compile(r"^([A-Z])(\d+)$")


class GroupParseError(ValueError):
    """Raised when a group string contains a malformed token."""
    pass


class InvalidRankError(ValueError):
    """Raised when a rank lies outside the range of its family."""
    pass


class FieldError(ValueError):
    """Raised when a field size is not a prime power."""
    pass


@total_ordering
@dataclass(frozen=True)
class SimpleType:
    """A split simple group symbol: family letter(s) plus rank."""

    family: str
    rank: int

    def __post_init__(self):
        if self.family in EXCEPTIONAL_DEGREES:
            expected = len(EXCEPTIONAL_DEGREES[self.family])
            if self.rank != expected:
                raise InvalidRankError(f"{self.family} has rank {expected}, got {self.rank}")
        elif self.family in MIN_CLASSICAL_RANK:
            if self.rank < MIN_CLASSICAL_RANK[self.family]:
                raise InvalidRankError(
                    f"Invalid rank for family {self.family}: {self.rank} "
                    f"(minimum {MIN_CLASSICAL_RANK[self.family]})"
                )
        else:
            raise GroupParseError(f"Unknown family: {self.family}")

    @classmethod
    def make(cls, family: str, rank: int) -> "SimpleType":
        """Build a type, applying the C = B and B1 = A1 conventions."""
        if family == "C":
            family = "B"
        if family == "B" and rank == 1:
            family = "A"
        return cls(family, rank)

    @property
    def sort_key(self) -> Tuple[int, int]:
        return FAMILY_ORDER.index(self.family), self.rank

    def __lt__(self, other: "SimpleType") -> bool:
        if not isinstance(other, SimpleType):
            return NotImplemented
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        if self.family in EXCEPTIONAL_DEGREES:
            return self.family
        return f"{self.family}{self.rank}"

    def __repr__(self) -> str:
        return f"SimpleType({self})"


@dataclass(frozen=True)
class SemisimpleGroup:
    """Direct product of simple types, stored as a sorted tuple of factors."""

    factors: Tuple[SimpleType, ...] = ()

    def __post_init__(self):
        ordered = tuple(sorted(self.factors))
        if ordered != self.factors:
            object.__setattr__(self, "factors", ordered)

    @classmethod
    def of(cls, *factors: SimpleType) -> "SemisimpleGroup":
        return cls(tuple(factors))

    @classmethod
    def from_counts(cls, counts: Dict[SimpleType, int]) -> "SemisimpleGroup":
        factors = []
        for t, m in counts.items():
            if m < 0:
                raise ValueError(f"Negative multiplicity {m} for {t}")
            factors.extend([t] * m)
        return cls(tuple(factors))

    @property
    def rank(self) -> int:
        return sum(t.rank for t in self.factors)

    @property
    def counts(self) -> Counter:
        return Counter(self.factors)

    def is_trivial(self) -> bool:
        return not self.factors

    def __mul__(self, other: "SemisimpleGroup") -> "SemisimpleGroup":
        return SemisimpleGroup(self.factors + other.factors)

    def __lt__(self, other: "SemisimpleGroup") -> bool:
        return group_sort_key(self) < group_sort_key(other)

    def __str__(self) -> str:
        return serialize_group(self)

    def __repr__(self) -> str:
        return f"SemisimpleGroup({serialize_group(self)!r})"


def group_sort_key(g: SemisimpleGroup) -> Tuple[int, Tuple[Tuple[int, int], ...]]:
    """Deterministic total order on groups: by rank, then by factor list."""
    return g.rank, tuple(t.sort_key for t in g.factors)


@dataclass(frozen=True)
class PrimePowerField:
    """The finite field F_q with q = p^t."""

    p: int
    t: int = 1

    def __post_init__(self):
        if self.t < 1:
            raise FieldError(f"Field exponent must be at least 1, got {self.t}")
        if not isprime(self.p):
            raise FieldError(f"Characteristic is not prime: {self.p}")

    @property
    def q(self) -> int:
        return self.p ** self.t

    @classmethod
    def from_q(cls, q: int) -> "PrimePowerField":
        """Validate q as a prime power and split it into (p, t)."""
        if q < 2:
            raise FieldError(f"Field size must be at least 2, got {q}")
        fac = factorint(q)
        if len(fac) != 1:
            raise FieldError(f"Field size is not a prime power: {q}")
        (p, t), = fac.items()
        return cls(p, t)

    def extension(self, k: int) -> "PrimePowerField":
        """The degree k extension F_{q^k}."""
        return PrimePowerField(self.p, self.t * k)

    def __str__(self) -> str:
        return str(self.q)


def parse_simple(token: str) -> SimpleType:
    """Parse one factor token such as 'A3', 'C2' or 'E8'."""
    text = token.strip().upper()
    match = _TOKEN.match(text)
    if not match:
        raise GroupParseError(f"Malformed factor token: {token!r}")
    letter, digits = match.group(1), int(match.group(2))
    if letter in ("A", "B", "C", "D"):
        return SimpleType.make(letter, digits)
    if letter in ("G", "F", "E"):
        family = f"{letter}{digits}"
        if family not in EXCEPTIONAL_DEGREES:
            raise InvalidRankError(f"Invalid rank for exceptional family {letter}: {token!r}")
        return SimpleType(family, len(EXCEPTIONAL_DEGREES[family]))
    raise GroupParseError(f"Unknown family letter in token: {token!r}")


def parse_group(text: str) -> SemisimpleGroup:
    """
    Parse a group string like 'A3*B2'.

    Args:
        text: Factors joined by '*'; the empty string is the trivial group

    Returns:
        The canonicalized group

    Raises:
        GroupParseError: If a token is malformed
        InvalidRankError: If a rank is out of range for its family
    """
    text = text.strip()
    if not text:
        return SemisimpleGroup()
    return SemisimpleGroup(tuple(parse_simple(token) for token in text.split("*")))


def serialize_group(g: SemisimpleGroup) -> str:
    return "*".join(str(t) for t in g.factors)


def degrees(t: SimpleType) -> DegreeMultiset:
    """Degrees of the basic invariants of the Weyl group of t."""
    if t.family in EXCEPTIONAL_DEGREES:
        return EXCEPTIONAL_DEGREES[t.family]
    n = t.rank
    if t.family == "A":
        return tuple(range(2, n + 2))
    if t.family == "B":
        return tuple(range(2, 2 * n + 1, 2))
    return tuple(sorted(list(range(2, 2 * n - 1, 2)) + [n]))


def max_degree(t: SimpleType) -> int:
    return max(degrees(t))


def group_degrees(g: SemisimpleGroup) -> DegreeMultiset:
    return tuple(sorted(d for t in g.factors for d in degrees(t)))


def exponent_N(g: SemisimpleGroup) -> int:
    return sum(d - 1 for d in group_degrees(g))


def order_polynomial(g: SemisimpleGroup) -> Tuple[int, DegreeMultiset]:
    """The data (N, degrees) fixing the order as a polynomial in q."""
    return exponent_N(g), group_degrees(g)


def order_from_degrees(q: int, degs: Iterable[int]) -> int:
    """q^N * prod (q^d - 1) for an explicit degree list."""
    degs = list(degs)
    return q ** sum(d - 1 for d in degs) * prod(q ** d - 1 for d in degs)


def group_order(g: SemisimpleGroup, f: PrimePowerField) -> int:
    """
    Exact order of the finite group g(F_q).

    Args:
        g: Split semisimple group
        f: Field of definition

    Returns:
        |g(F_q)| as an arbitrary-precision integer (1 for the trivial group)
    """
    return order_from_degrees(f.q, group_degrees(g))


def simple_types(max_rank: int, include_exceptional: bool = True) -> List[SimpleType]:
    """All simple types of rank at most max_rank in canonical order."""
    types = []
    for family, lo in MIN_CLASSICAL_RANK.items():
        types.extend(SimpleType(family, n) for n in range(lo, max_rank + 1))
    if include_exceptional:
        for family, degs in EXCEPTIONAL_DEGREES.items():
            if len(degs) <= max_rank:
                types.append(SimpleType(family, len(degs)))
    return sorted(types)


def types_with_max_degree(n: int) -> List[SimpleType]:
    """All simple types whose largest Weyl degree is exactly n."""
    found = []
    if n >= 2:
        found.append(SimpleType("A", n - 1))
    if n % 2 == 0 and n // 2 >= 2:
        found.append(SimpleType("B", n // 2))
    if n % 2 == 0 and n // 2 + 1 >= 4:
        found.append(SimpleType("D", n // 2 + 1))
    for family, degs in EXCEPTIONAL_DEGREES.items():
        if degs[-1] == n:
            found.append(SimpleType(family, len(degs)))
    return sorted(found)


def enumerate_groups(max_rank: int, max_factors: Optional[int] = None,
                     include_trivial: bool = False) -> Iterator[SemisimpleGroup]:
    """
    Yield every group of total rank at most max_rank.

    Args:
        max_rank: Bound on the sum of factor ranks
        max_factors: Optional bound on the number of simple factors
        include_trivial: Whether to yield the empty product first
    """
    atoms = simple_types(max_rank)

    def extend(start: int, budget: int, chosen: List[SimpleType]):
        if chosen or include_trivial:
            yield SemisimpleGroup(tuple(chosen))
        if max_factors is not None and len(chosen) >= max_factors:
            return
        for i in range(start, len(atoms)):
            t = atoms[i]
            if t.rank <= budget:
                chosen.append(t)
                yield from extend(i, budget - t.rank, chosen)
                chosen.pop()

    yield from extend(0, max_rank, [])


def prime_powers(q_max: int) -> List[PrimePowerField]:
    """All fields F_q with q <= q_max, sorted by q."""
    fields = []
    for p in primerange(2, q_max + 1):
        t = 1
        while p ** t <= q_max:
            fields.append(PrimePowerField(int(p), t))
            t += 1
    return sorted(fields, key=lambda f: f.q)


def simple_group_order(t: SimpleType, f: PrimePowerField) -> int:
    """
    Order of the finite simple group of type t over F_q.

    The simply connected order is divided by the order of the centre.
    """
    q, n = f.q, t.rank
    if t.family == "A":
        centre = gcd(n + 1, q - 1)
    elif t.family == "B":
        centre = gcd(2, q - 1)
    elif t.family == "D":
        centre = gcd(4, q ** n - 1)
    elif t.family == "E6":
        centre = gcd(3, q - 1)
    elif t.family == "E7":
        centre = gcd(2, q - 1)
    else:
        centre = 1
    return group_order(SemisimpleGroup.of(t), f) // centre


def symplectic_simple_order(n: int, f: PrimePowerField) -> int:
    """|PSp_2n(F_q)| from the classical formula q^(n^2) prod (q^(2i) - 1) / gcd(2, q - 1)."""
    q = f.q
    return q ** (n * n) * prod(q ** (2 * i) - 1 for i in range(1, n + 1)) // gcd(2, q - 1)


def verify_artin_tits(n_max: int = 6, q_max: int = 9) -> VerificationReport:
    """
    Check the known equalities between orders of non-isomorphic simple groups.

    PSL_4(F_2) and PSL_3(F_4) both have order 20160, and for n >= 3 and odd q
    the simple groups of types B_n and C_n have the same order.
    """
    report = VerificationReport(name="artin-tits")
    psl4_2 = simple_group_order(SimpleType("A", 3), PrimePowerField(2))
    psl3_4 = simple_group_order(SimpleType("A", 2), PrimePowerField(2, 2))
    report.record(psl4_2 == psl3_4 == 20160,
                  f"PSL_4(F_2)={psl4_2}, PSL_3(F_4)={psl3_4}")
    pairs = []
    for n in range(3, n_max + 1):
        for f in prime_powers(q_max):
            if f.p == 2:
                continue
            b_side = simple_group_order(SimpleType("B", n), f)
            c_side = symplectic_simple_order(n, f)
            report.record(b_side == c_side, f"B{n} vs C{n} at q={f.q}: {b_side} != {c_side}")
            pairs.append(f"B{n}/C{n}@{f.q}")
    report.details = {"psl4_2": str(psl4_2), "psl3_4": str(psl3_4), "bc_pairs": pairs}
    logger.info(f"Artin-Tits check: {report.checked} cases, {len(report.failures)} failures")
    return report

"""
The group of order coincidences.

A coincidence is a pair of groups with the same Weyl degree multiset, hence
the same order over every finite field. Pairs are modelled as signed
multisets of simple types (left factors positive, right factors negative),
so composition is addition and cancellation of common factors is automatic.
"""

import logging
import re
import time
from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement
from typing import Dict, Iterable, List, Sequence, Tuple

from sympy import Matrix

from .config import get_config
from .lie_core import (
    EXCEPTIONAL_DEGREES,
    GroupParseError,
    PrimePowerField,
    SemisimpleGroup,
    SimpleType,
    enumerate_groups,
    group_degrees,
    group_order,
    group_sort_key,
    max_degree,
    parse_group,
    simple_types,
)
from .models import VerificationReport

logger = logging.getLogger(__name__)

GENERATOR_KINDS = ("B", "D", "G2", "F4", "E6", "E7", "E8")


class NotACoincidenceError(ValueError):
    """Raised when the two sides of a pair have different degree multisets."""
    pass


class NoConnectorError(ValueError):
    """Raised when no connector exists between two simple types."""
    pass


class GeneratorError(ValueError):
    """Raised for a generator parameter outside its family range."""
    pass


class WordParseError(ValueError):
    """Raised when a generator word string is malformed."""
    pass


class SearchBudgetError(RuntimeError):
    """Raised when a bounded search would enumerate too many groups."""
    pass


def _t(family: str, rank: int) -> SimpleType:
    return SimpleType.make(family, rank)


def _g(*pairs: Tuple[str, int]) -> SemisimpleGroup:
    return SemisimpleGroup(tuple(_t(f, r) for f, r in pairs))


@dataclass(frozen=True)
class CoincidenceClass:
    """Reduced class of an order coincidence, stored as a signed multiset."""

    delta: Tuple[Tuple[SimpleType, int], ...] = ()

    @property
    def left(self) -> SemisimpleGroup:
        return SemisimpleGroup.from_counts({t: m for t, m in self.delta if m > 0})

    @property
    def right(self) -> SemisimpleGroup:
        return SemisimpleGroup.from_counts({t: -m for t, m in self.delta if m < 0})

    def as_dict(self) -> Dict[SimpleType, int]:
        return dict(self.delta)

    def __str__(self) -> str:
        return serialize_pair(self)

    def __repr__(self) -> str:
        return f"CoincidenceClass({serialize_pair(self)!r})"


def _from_delta(delta: Dict[SimpleType, int]) -> CoincidenceClass:
    return CoincidenceClass(tuple(sorted((t, m) for t, m in delta.items() if m)))


def make_class(left: SemisimpleGroup, right: SemisimpleGroup) -> CoincidenceClass:
    """
    Reduce (left, right) by common factors and validate degree balance.

    Raises:
        NotACoincidenceError: If the reduced sides have different degrees
    """
    delta: Dict[SimpleType, int] = defaultdict(int)
    for t in left.factors:
        delta[t] += 1
    for t in right.factors:
        delta[t] -= 1
    c = _from_delta(delta)
    if group_degrees(c.left) != group_degrees(c.right):
        raise NotACoincidenceError(f"Degree multisets differ: {left} vs {right}")
    return c


IDENTITY = CoincidenceClass()


def compose(c1: CoincidenceClass, c2: CoincidenceClass) -> CoincidenceClass:
    delta: Dict[SimpleType, int] = defaultdict(int)
    for t, m in c1.delta + c2.delta:
        delta[t] += m
    return _from_delta(delta)


def inverse(c: CoincidenceClass) -> CoincidenceClass:
    return CoincidenceClass(tuple((t, -m) for t, m in c.delta))


def is_identity(c: CoincidenceClass) -> bool:
    return not c.delta


def power(c: CoincidenceClass, k: int) -> CoincidenceClass:
    return CoincidenceClass(tuple((t, m * k) for t, m in c.delta if k))


def class_sort_key(c: CoincidenceClass):
    top = max((max_degree(t) for t, _ in c.delta), default=0)
    return top, group_sort_key(c.left), group_sort_key(c.right)


def canonical_orientation(c: CoincidenceClass) -> CoincidenceClass:
    """Pick c or its inverse, whichever lists the smaller group on the left."""
    flipped = inverse(c)
    return min(c, flipped, key=lambda x: (group_sort_key(x.left), group_sort_key(x.right)))


def parse_pair(text: str) -> CoincidenceClass:
    """Parse 'LEFT|RIGHT' where each side uses the group grammar."""
    parts = text.split("|")
    if len(parts) != 2:
        raise GroupParseError(f"Pair must contain exactly one '|': {text!r}")
    return make_class(parse_group(parts[0]), parse_group(parts[1]))


def serialize_pair(c: CoincidenceClass) -> str:
    return f"{c.left}|{c.right}"


@dataclass(frozen=True)
class GeneratorId:
    """One generator of the coincidence group: B_n (n >= 2), D_n (n >= 4) or an exceptional one."""

    kind: str
    n: int = 0

    def __post_init__(self):
        if self.kind in ("B", "D"):
            lo = 2 if self.kind == "B" else 4
            if self.n < lo:
                raise GeneratorError(f"Generator {self.kind}{self.n} needs n >= {lo}")
        elif self.kind in EXCEPTIONAL_DEGREES:
            object.__setattr__(self, "n", len(EXCEPTIONAL_DEGREES[self.kind]))
        else:
            raise GeneratorError(f"Unknown generator kind: {self.kind!r}")

    @property
    def sort_key(self) -> Tuple[int, int]:
        return GENERATOR_KINDS.index(self.kind), self.n

    def __lt__(self, other: "GeneratorId") -> bool:
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        return self.kind if self.kind in EXCEPTIONAL_DEGREES else f"{self.kind}{self.n}"


def parse_generator(token: str) -> GeneratorId:
    text = token.strip().upper()
    if text in EXCEPTIONAL_DEGREES:
        return GeneratorId(text)
    match = re.match(r"^([BD])(\d+)$", text)
    if not match:
        raise WordParseError(f"Unknown generator: {token!r}")
    return GeneratorId(match.group(1), int(match.group(2)))


@dataclass(frozen=True)
class GeneratorWord:
    """Finitely supported exponent vector over generators."""

    exponents: Tuple[Tuple[GeneratorId, int], ...] = ()

    @classmethod
    def from_dict(cls, exponents: Dict[GeneratorId, int]) -> "GeneratorWord":
        return cls(tuple(sorted((g, e) for g, e in exponents.items() if e)))

    def as_dict(self) -> Dict[GeneratorId, int]:
        return dict(self.exponents)

    def __add__(self, other: "GeneratorWord") -> "GeneratorWord":
        total = self.as_dict()
        for g, e in other.exponents:
            total[g] = total.get(g, 0) + e
        return GeneratorWord.from_dict(total)

    def __neg__(self) -> "GeneratorWord":
        return GeneratorWord(tuple((g, -e) for g, e in self.exponents))

    def __sub__(self, other: "GeneratorWord") -> "GeneratorWord":
        return self + (-other)

    def __str__(self) -> str:
        return serialize_word(self)


def serialize_word(w: GeneratorWord) -> str:
    """Positive exponents first, then negative ones; '1' for the empty word."""
    if not w.exponents:
        return "1"
    ordered = [x for x in w.exponents if x[1] > 0] + [x for x in w.exponents if x[1] < 0]
    return " * ".join(f"{g}^{e}" for g, e in ordered)


def parse_word(text: str) -> GeneratorWord:
    """Parse words like 'G2^1 * D4^-1'; '' and '1' give the empty word."""
    text = text.strip()
    if text in ("", "1"):
        return GeneratorWord()
    total: Dict[GeneratorId, int] = {}
    for term in text.split("*"):
        match = re.match(r"^\s*([A-Za-z]+\d+)\s*(?:\^\s*(-?\d+))?\s*$", term)
        if not match:
            raise WordParseError(f"Malformed word term: {term!r}")
        g = parse_generator(match.group(1))
        total[g] = total.get(g, 0) + int(match.group(2) or 1)
    return GeneratorWord.from_dict(total)


def generator(gid: GeneratorId) -> CoincidenceClass:
    """The coincidence class of one generator."""
    n = gid.n
    if gid.kind == "B":
        pair = _g(("A", 2 * n - 2), ("B", n)), _g(("A", 2 * n - 1), ("B", n - 1))
    elif gid.kind == "D":
        pair = _g(("A", n - 2), ("D", n)), _g(("A", n - 1), ("B", n - 1))
    elif gid.kind == "G2":
        pair = parse_group("A2*B3"), parse_group("A3*G2")
    elif gid.kind == "F4":
        pair = parse_group("A1*B4*B6"), parse_group("B2*B5*F4")
    elif gid.kind == "E6":
        pair = parse_group("A4*G2*A8*B6"), parse_group("A3*A6*B5*E6")
    elif gid.kind == "E7":
        pair = parse_group("A1*B7*B9"), parse_group("B2*B8*E7")
    else:
        pair = parse_group("A1*B4*B7*B10*B12*B15"), parse_group("B3*B5*B8*B11*B14*E8")
    return make_class(*pair)


def generator_catalog(b_max: int = 15, d_max: int = 16) -> List[GeneratorId]:
    """B_2..B_b_max, D_4..D_d_max and the five exceptional generators."""
    gens = [GeneratorId("B", n) for n in range(2, b_max + 1)]
    gens += [GeneratorId("D", n) for n in range(4, d_max + 1)]
    gens += [GeneratorId(kind) for kind in GENERATOR_KINDS[2:]]
    return gens


def evaluate_word(w: GeneratorWord) -> CoincidenceClass:
    c = IDENTITY
    for gid, e in w.exponents:
        c = compose(c, power(generator(gid), e))
    return c


def _spoke(t: SimpleType) -> GeneratorWord:
    """
    Word whose class has the hub B_m on the left and t on the right, where
    2m is the largest degree of t; all other factors have smaller degrees.
    """
    m = max_degree(t) // 2
    if t == SimpleType.make("B", m):
        return GeneratorWord()
    if t.family == "A":
        return GeneratorWord.from_dict({GeneratorId("B", m): 1})
    if t.family == "D":
        return GeneratorWord.from_dict({GeneratorId("D", m + 1): -1})
    return GeneratorWord.from_dict({GeneratorId(t.family): 1})


def connector(t1: SimpleType, t2: SimpleType) -> GeneratorWord:
    """
    Word W such that evaluate_word(W) has t1 on the left, t2 on the right and
    every other factor of strictly smaller maximal degree.

    Raises:
        NoConnectorError: If t1 == t2 or their maximal degrees differ
    """
    if t1 == t2:
        raise NoConnectorError(f"No connector from {t1} to itself")
    if max_degree(t1) != max_degree(t2):
        raise NoConnectorError(f"Maximal degrees differ: {t1} has {max_degree(t1)}, {t2} has {max_degree(t2)}")
    return _spoke(t2) - _spoke(t1)


def reduce_to_word(c: CoincidenceClass) -> GeneratorWord:
    """
    Express c as a word in the generators.

    Repeatedly pairs the first left factor and the first right factor of the
    current largest degree and divides out their connector, which removes
    both and only introduces factors of smaller degree.
    """
    word = GeneratorWord()
    current = c
    while not is_identity(current):
        left, right = current.left, current.right
        top = max(max_degree(t) for t, _ in current.delta)
        k1 = next(t for t in left.factors if max_degree(t) == top)
        k2 = next(t for t in right.factors if max_degree(t) == top)
        step = connector(k1, k2)
        logger.debug(f"Degree {top}: pairing {k1} with {k2} via {step}")
        current = compose(current, inverse(evaluate_word(step)))
        word = word + step
    if evaluate_word(word) != c:
        raise RuntimeError(f"Reduction of {c} does not recompose")
    return word


def _products_up_to_degree(max_degree_bound: int) -> List[SemisimpleGroup]:
    atoms = [t for t in simple_types(max_degree_bound) if max_degree(t) <= max_degree_bound]
    return [SemisimpleGroup.of(a, b) for a, b in combinations_with_replacement(atoms, 2)]


def _join_buckets(groups: Iterable[SemisimpleGroup]) -> List[CoincidenceClass]:
    buckets: Dict[Tuple[int, ...], List[SemisimpleGroup]] = defaultdict(list)
    for g in groups:
        buckets[group_degrees(g)].append(g)
    found = set()
    for members in buckets.values():
        for g1, g2 in combinations(members, 2):
            c = make_class(g1, g2)
            if not is_identity(c):
                found.add(canonical_orientation(c))
    return sorted(found, key=class_sort_key)


def search_two_factor_pairs(max_degree_bound: int) -> List[CoincidenceClass]:
    """
    All reduced coincidences with two simple factors on each side and every
    degree at most max_degree_bound, found by a hash join on degree multisets.
    """
    products = _products_up_to_degree(max_degree_bound)
    classes = [c for c in _join_buckets(products) if len(c.left.factors) == len(c.right.factors) == 2]
    logger.info(f"Two-factor join over {len(products)} products found {len(classes)} classes")
    return classes


def two_factor_families(max_degree_bound: int) -> List[CoincidenceClass]:
    """The known two-factor coincidences: three infinite families and five sporadic pairs."""
    pairs = []
    for n in range(2, max_degree_bound // 2 + 1):
        pairs.append((_g(("A", 2 * n - 2), ("B", n)), _g(("A", 2 * n - 1), ("B", n - 1))))
    for n in range(4, max_degree_bound // 2 + 2):
        pairs.append((_g(("A", n - 2), ("D", n)), _g(("A", n - 1), ("B", n - 1))))
    for n in range(2, (max_degree_bound + 2) // 4 + 1):
        pairs.append((_g(("B", n - 1), ("D", 2 * n)), _g(("B", 2 * n - 1), ("B", n))))
    for left, right in (("A1*A5", "A4*G2"), ("A1*B3", "B2*G2"), ("A1*D6", "B5*G2"),
                        ("A2*B3", "A3*G2"), ("B3*B3", "D4*G2")):
        pairs.append((parse_group(left), parse_group(right)))
    classes = {canonical_orientation(make_class(l, r)) for l, r in pairs}
    return sorted((c for c in classes if class_sort_key(c)[0] <= max_degree_bound), key=class_sort_key)


def search_coincidences(max_rank: int, max_factors: int) -> List[CoincidenceClass]:
    """
    All reduced coincidences between groups of rank <= max_rank with at most
    max_factors simple factors, by bucketing groups on their degree multiset.

    Raises:
        SearchBudgetError: If the enumeration exceeds the configured group budget
    """
    budget = get_config()["search"]["max_groups"]
    groups = []
    for g in enumerate_groups(max_rank, max_factors):
        groups.append(g)
        if len(groups) > budget:
            raise SearchBudgetError(f"More than {budget} groups at rank {max_rank}, factors {max_factors}")
    start = time.time()
    classes = _join_buckets(groups)
    logger.info(f"Searched {len(groups)} groups in {time.time() - start:.2f}s, found {len(classes)} classes")
    return classes


def check_remark_41(c: CoincidenceClass) -> VerificationReport:
    """Both sides have the same rank and factor count, and a nonidentity class is never simple vs simple."""
    report = VerificationReport(name="rank-balance")
    left, right = c.left, c.right
    report.record(left.rank == right.rank, f"{c}: ranks {left.rank} != {right.rank}")
    report.record(len(left.factors) == len(right.factors),
                  f"{c}: factor counts {len(left.factors)} != {len(right.factors)}")
    if not is_identity(c):
        report.record(len(left.factors) > 1, f"{c}: simple groups on both sides")
    report.details = {"ranks": [left.rank, right.rank], "factors": [len(left.factors), len(right.factors)]}
    return report


def verify_generators(b_max: int = 15, d_max: int = 16,
                      q_values: Sequence[int] = (2, 3, 4, 5, 7, 8, 9)) -> VerificationReport:
    """Each generator balances degrees, has equal orders at every q and satisfies the rank checks."""
    report = VerificationReport(name="generators")
    fields = [PrimePowerField.from_q(q) for q in q_values]
    for gid in generator_catalog(b_max, d_max):
        c = generator(gid)
        report.record(group_degrees(c.left) == group_degrees(c.right), f"{gid}: degree imbalance")
        for f in fields:
            report.record(group_order(c.left, f) == group_order(c.right, f), f"{gid}: orders differ at q={f.q}")
        report.failures.extend(check_remark_41(c).failures)
    if report.failures:
        report.status = "failed"
    return report


def verify_generator_independence(b_max: int = 15, d_max: int = 16) -> VerificationReport:
    """Exact rank of the generator delta vectors equals the number of generators."""
    report = VerificationReport(name="generator-independence")
    gens = generator_catalog(b_max, d_max)
    columns = sorted({t for gid in gens for t, _ in generator(gid).delta})
    index = {t: i for i, t in enumerate(columns)}
    rows = []
    for gid in gens:
        row = [0] * len(columns)
        for t, m in generator(gid).delta:
            row[index[t]] = m
        rows.append(row)
    rank = Matrix(rows).rank()
    report.record(rank == len(gens), f"rank {rank} < {len(gens)} generators")
    report.details = {"generators": len(gens), "rank": int(rank), "columns": len(columns)}
    return report


def verify_reduction(classes: Iterable[CoincidenceClass]) -> VerificationReport:
    """evaluate_word(reduce_to_word(c)) == c for every class given."""
    report = VerificationReport(name="reduction")
    for c in classes:
        report.record(evaluate_word(reduce_to_word(c)) == c, f"{c} does not recompose")
    return report


def verify_two_factor_classification(max_degree_bound: int = 30) -> VerificationReport:
    """The two-factor join finds exactly the known families and sporadic pairs."""
    report = VerificationReport(name="two-factor-classification")
    found = search_two_factor_pairs(max_degree_bound)
    expected = two_factor_families(max_degree_bound)
    missing = sorted(set(expected) - set(found), key=class_sort_key)
    extra = sorted(set(found) - set(expected), key=class_sort_key)
    report.checked = len(found)
    for c in missing:
        report.failures.append(f"expected {c} not found")
    for c in extra:
        report.failures.append(f"unexpected {c}")
    if report.failures:
        report.status = "failed"
    report.details = {"pairs": [str(c) for c in found]}
    return report

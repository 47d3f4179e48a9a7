"""Recovering a group and its field of definition from a group order."""

import logging
import time
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

from sympy import divisors, multiplicity, primerange

from .config import get_config
from .cyclotomic import ContributionKind, contribution_bound
from .factorization import (
    Factorization,
    factor_group_order,
    factorize,
    is_prime,
    largest_prime_power_contribution,
)
from .lie_core import (
    EXCEPTIONAL_DEGREES,
    PrimePowerField,
    SemisimpleGroup,
    SimpleType,
    degrees,
    enumerate_groups,
    exponent_N,
    group_order,
    group_sort_key,
    prime_powers,
    simple_types,
    types_with_max_degree,
)
from .models import ScanRow, VerificationReport

logger = logging.getLogger(__name__)

A1 = SimpleType("A", 1)
B2 = SimpleType("B", 2)


class RecoveryError(ValueError):
    """Raised for invalid recovery inputs."""
    pass


class PersistencePreconditionError(ValueError):
    """Raised when extension persistence is checked on groups of different order."""
    pass


@dataclass(frozen=True)
class RecoveryCandidate:
    """A (group, field) pair whose order matched the query. field is None only for the trivial group."""

    group: SemisimpleGroup
    field: Optional[PrimePowerField]

    @property
    def sort_key(self):
        return (self.field.q if self.field else 0), group_sort_key(self.group)

    def __lt__(self, other: "RecoveryCandidate") -> bool:
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        name = str(self.group) or "1"
        return f"{name} over F_{self.field.q}" if self.field else name


def _is_power_of_two(m: int) -> bool:
    return m >= 1 and m & (m - 1) == 0


def is_counterexample(t: SimpleType, f: PrimePowerField) -> bool:
    """
    Whether q^N fails to be the largest prime power dividing |t(F_q)|.

    The exceptions are A_1 over F_q for q = 8, 9, for q = 2^r with 2^r + 1
    prime, and for primes q of the form 2^s +/- 1, together with B_2(F_3).
    """
    q = f.q
    if t == B2:
        return q == 3
    if t != A1:
        return False
    if q in (8, 9):
        return True
    if f.p == 2 and is_prime(q + 1):
        return True
    return f.t == 1 and (_is_power_of_two(q + 1) or _is_power_of_two(q - 1))


def estimate_parameters(t: SimpleType) -> Tuple[ContributionKind, int]:
    """Base kind and product length used to bound non-defining prime powers of |t(F_q)|."""
    table = {
        "G2": (ContributionKind.A_EQ_Q_SQUARED, 3),
        "F4": (ContributionKind.A_EQ_Q_SQUARED, 6),
        "E6": (ContributionKind.A_EQ_PM_Q, 12),
        "E7": (ContributionKind.A_EQ_Q_SQUARED, 9),
        "E8": (ContributionKind.A_EQ_Q_SQUARED, 15),
    }
    if t.family in table:
        return table[t.family]
    if t.family == "A":
        return ContributionKind.A_EQ_PM_Q, t.rank + 1
    return ContributionKind.A_EQ_Q_SQUARED, t.rank


def dominance_guaranteed(t: SimpleType, f: PrimePowerField) -> bool:
    """True when q^N alone exceeds the bound on every other prime power."""
    kind, l = estimate_parameters(t)
    return f.q ** exponent_N(SemisimpleGroup.of(t)) >= contribution_bound(kind, f.q, l)


def _format_power(pe: Optional[Tuple[int, int]]) -> Optional[str]:
    return None if pe is None else f"{pe[0]}^{pe[1]}"


def scan_row(t: SimpleType, f: PrimePowerField, seed: Optional[int] = None) -> ScanRow:
    """Factor |t(F_q)| and rank the defining characteristic among its prime powers."""
    g = SemisimpleGroup.of(t)
    fac = factor_group_order(g, f, seed=seed)
    largest, second = largest_prime_power_contribution(fac)
    return ScanRow(
        group=str(t),
        q=f.q,
        order=str(fac.value),
        p_contribution=str(f.q ** exponent_N(g)),
        largest=_format_power(largest),
        second=_format_power(second),
        p_is_largest=largest[0] == f.p,
        p_is_second=second is not None and second[0] == f.p,
        counterexample=is_counterexample(t, f),
        dominance_guaranteed=dominance_guaranteed(t, f),
    )


def _scan_task(args: Tuple[SimpleType, PrimePowerField, Optional[int]]) -> ScanRow:
    return scan_row(*args)


def scan_types(max_rank: int) -> List[SimpleType]:
    """Classical types up to max_rank plus every exceptional type."""
    types = set(simple_types(max_rank, include_exceptional=False))
    types.update(SimpleType(family, len(degs)) for family, degs in EXCEPTIONAL_DEGREES.items())
    return sorted(types)


def scan_dominance(max_rank: int, q_max: int, workers: Optional[int] = None,
                   seed: Optional[int] = None) -> List[ScanRow]:
    """
    Build the characteristic-dominance table for all simple types and q <= q_max.

    Rows are sorted by (q, type) whatever the completion order.
    """
    if workers is None:
        workers = get_config()["scan"]["workers"]
    tasks = [(t, f, seed) for f in prime_powers(q_max) for t in scan_types(max_rank)]
    start = time.time()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_scan_task, tasks, chunksize=8))
    else:
        rows = [_scan_task(task) for task in tasks]
    order = {str(t): i for i, t in enumerate(scan_types(max_rank))}
    rows.sort(key=lambda row: (row.q, order[row.group]))
    logger.info(f"Scanned {len(rows)} (type, q) pairs in {time.time() - start:.2f}s")
    return rows


def verify_counterexample_classification(max_rank: int, q_max: int, workers: Optional[int] = None,
                                         seed: Optional[int] = None) -> VerificationReport:
    """
    Check that q^N is the largest prime power of |t(F_q)| exactly outside the
    counterexample set, and the second largest inside it.
    """
    report = VerificationReport(name="counterexample-classification")
    rows = scan_dominance(max_rank, q_max, workers=workers, seed=seed)
    for row in rows:
        label = f"{row.group} at q={row.q}"
        report.record(row.p_is_largest != row.counterexample,
                      f"{label}: largest={row.largest}, predicted counterexample={row.counterexample}")
        if row.counterexample:
            report.record(row.p_is_second, f"{label}: q^N is not second largest")
        if row.dominance_guaranteed:
            report.record(row.p_is_largest, f"{label}: bound guarantees dominance but {row.largest} wins")
    report.details = {
        "counterexamples": [f"{row.group}@{row.q}" for row in rows if not row.p_is_largest],
        "rows": [row.model_dump() for row in rows],
    }
    return report


def has_counterexample_factor(c: RecoveryCandidate) -> bool:
    """Whether some simple factor of the candidate is a counterexample over its field."""
    return c.field is not None and any(is_counterexample(t, c.field) for t in c.group.factors)


def recover_characteristic(fac: Factorization, max_rank: int = 8) -> int:
    """
    The prime with the largest prime-power contribution.

    This is the defining characteristic unless the order has a factor from
    the counterexample set, e.g. 720 = |A_1(F_9)| gives 2, not 3. A warning
    is logged when some candidate of rank at most max_rank for fac.value has
    such a factor.
    """
    (p, e), _ = largest_prime_power_contribution(fac)
    flagged = [c for c in recover_candidates(fac.value, max_rank) if has_counterexample_factor(c)]
    if flagged:
        logger.warning(f"Characteristic {p} of {fac.value} is unreliable: "
                       f"{', '.join(str(c) for c in flagged)} has a counterexample factor")
    return p


def _peel_degrees(q: int, target_n: int, cofactor: int, max_rank: int) -> Iterator[Tuple[int, ...]]:
    """Every degree multiset D with sum(d - 1) = target_n, |D| <= max_rank and prod(q^d - 1) = cofactor."""

    def dfs(remaining: int, m: int, top: int, slots: int, chosen: List[int]):
        if remaining == 0:
            if m == 1:
                yield tuple(sorted(chosen))
            return
        if slots == 0 or remaining > slots * (top - 1):
            return
        for d in range(min(top, remaining + 1), 1, -1):
            piece = q ** d - 1
            if piece > m or m % piece:
                continue
            chosen.append(d)
            yield from dfs(remaining - (d - 1), m // piece, d, slots - 1, chosen)
            chosen.pop()

    yield from dfs(target_n, cofactor, target_n + 1, max_rank, [])


@lru_cache(maxsize=None)
def _decompose(degs: Tuple[int, ...]) -> FrozenSet[Tuple[SimpleType, ...]]:
    if not degs:
        return frozenset({()})
    remaining = Counter(degs)
    found = set()
    for t in types_with_max_degree(degs[-1]):
        need = Counter(degrees(t))
        if all(remaining[d] >= c for d, c in need.items()):
            rest = tuple(sorted((remaining - need).elements()))
            for tail in _decompose(rest):
                found.add(tuple(sorted(tail + (t,))))
    return frozenset(found)


def decompose_degrees(degs: Iterable[int]) -> List[SemisimpleGroup]:
    """All groups whose Weyl degree multiset is exactly degs."""
    return sorted((SemisimpleGroup(f) for f in _decompose(tuple(sorted(degs)))), key=group_sort_key)


def recover_candidates(N: int, max_rank: int, q_max: Optional[int] = None,
                       seed: Optional[int] = None) -> List[RecoveryCandidate]:
    """
    Find every (group, q) with |group(F_q)| = N.

    Args:
        N: The order, at least 1
        max_rank: Bound on the rank of candidate groups
        q_max: Bound on the field size; defaults to N itself
        seed: Rho seed used when N has to be factored

    Returns:
        Sorted candidates across all characteristics

    Raises:
        RecoveryError: If N < 1 or max_rank < 0
    """
    if N < 1:
        raise RecoveryError(f"Order must be positive, got {N}")
    if max_rank < 0:
        raise RecoveryError(f"max_rank must be non-negative, got {max_rank}")
    if N == 1:
        return [RecoveryCandidate(SemisimpleGroup(), None)]

    if q_max is None:
        q_limit = N
        primes = sorted(factorize(N, seed=seed).factors)
    else:
        q_limit = q_max
        primes = [int(p) for p in primerange(2, q_max + 1) if N % p == 0]

    found = set()
    for p in primes:
        v = int(multiplicity(p, N))
        for t in divisors(v):
            q = p ** t
            if q > q_limit:
                break
            n_exp = v // t
            for degs in _peel_degrees(q, n_exp, N // q ** n_exp, max_rank):
                for g in decompose_degrees(degs):
                    found.add(RecoveryCandidate(g, PrimePowerField(p, t)))

    candidates = sorted(found)
    for c in candidates:
        if group_order(c.group, c.field) != N:
            raise RecoveryError(f"Internal mismatch for candidate {c}")
    logger.debug(f"Recovered {len(candidates)} candidates for {N}")
    return candidates


def check_extension_persistence(g1: SemisimpleGroup, g2: SemisimpleGroup,
                                f: PrimePowerField, k: int) -> bool:
    """
    Confirm that equal orders over F_q stay equal over F_{q^2}, ..., F_{q^k}.

    Raises:
        PersistencePreconditionError: If |g1(F_q)| != |g2(F_q)|
    """
    if k < 1:
        raise PersistencePreconditionError(f"Extension degree must be >= 1, got {k}")
    if group_order(g1, f) != group_order(g2, f):
        raise PersistencePreconditionError(f"{g1} and {g2} have different orders over F_{f.q}")
    return all(group_order(g1, f.extension(j)) == group_order(g2, f.extension(j)) for j in range(2, k + 1))


def build_order_atlas(max_rank: int, q_values: Sequence[int]) -> Dict[int, List[Tuple[SemisimpleGroup, PrimePowerField]]]:
    """Hash every (group, q) within bounds by its order."""
    atlas: Dict[int, List[Tuple[SemisimpleGroup, PrimePowerField]]] = defaultdict(list)
    fields = [PrimePowerField.from_q(q) for q in sorted(set(q_values))]
    groups = list(enumerate_groups(max_rank))
    for f in fields:
        for g in groups:
            atlas[group_order(g, f)].append((g, f))
    logger.info(f"Atlas holds {len(atlas)} orders from {len(groups)} groups x {len(fields)} fields")
    return dict(atlas)


def recover_from_atlas(N: int, atlas: Dict[int, List[Tuple[SemisimpleGroup, PrimePowerField]]],
                       max_rank: int, q_max: Optional[int] = None) -> List[RecoveryCandidate]:
    """Look N up in a prebuilt atlas, applying the same bounds as recover_candidates."""
    if N == 1:
        return [RecoveryCandidate(SemisimpleGroup(), None)]
    return sorted(
        RecoveryCandidate(g, f) for g, f in atlas.get(N, [])
        if g.rank <= max_rank and (q_max is None or f.q <= q_max)
    )


def search_cross_characteristic(max_rank: int, q_max: int) -> List[Tuple[int, List[RecoveryCandidate]]]:
    """
    Orders shared by groups over fields of different characteristic.

    Bounded search only; nothing is claimed about orders beyond the bounds.
    """
    atlas = build_order_atlas(max_rank, [f.q for f in prime_powers(q_max)])
    hits = []
    for order, pairs in atlas.items():
        if len({f.p for _, f in pairs}) > 1:
            hits.append((order, sorted(RecoveryCandidate(g, f) for g, f in pairs)))
    hits.sort(key=lambda hit: hit[0])
    logger.info(f"Cross-characteristic search found {len(hits)} shared orders")
    return hits

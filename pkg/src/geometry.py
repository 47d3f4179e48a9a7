"""Compact Lie group symbols, their split forms and the transitive triple catalog.

For a triple (H, H1, H2) where H2 acts transitively on H/H1, the finite
groups of the split forms satisfy |H| * |H1 n H2| = |H1| * |H2| over every
F_q, so every catalog row is an order coincidence.
"""

import logging
import re
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .coincidence import (
    CoincidenceClass,
    GeneratorId,
    GeneratorWord,
    evaluate_word,
    make_class,
    reduce_to_word,
    serialize_word,
)
from .lie_core import (
    EXCEPTIONAL_DEGREES,
    PrimePowerField,
    SemisimpleGroup,
    SimpleType,
    group_degrees,
    group_order,
    max_degree,
)
from .models import CatalogDocument, TripleRow, VerificationReport

logger = logging.getLogger(__name__)

CLASSICAL_SERIES = ("SU", "Sp", "SO", "Spin")
EXCEPTIONAL_SERIES = ("G2", "F4", "E6")


class SymbolError(ValueError):
    """Raised for a compact group symbol with no split form in the dictionary."""
    pass


@dataclass(frozen=True)
class CompactGroupSymbol:
    """A compact Lie group such as SU_4, Sp_2, SO_7, Spin_9 or G_2."""

    series: str
    parameter: int = 0

    def __post_init__(self):
        if self.series in EXCEPTIONAL_SERIES:
            object.__setattr__(self, "parameter", len(EXCEPTIONAL_DEGREES[self.series]))
        elif self.series not in CLASSICAL_SERIES:
            raise SymbolError(f"Unknown series: {self.series!r}")
        elif self.parameter < (0 if self.series == "Sp" else 1):
            raise SymbolError(f"Parameter out of range for {self.series}: {self.parameter}")

    def __str__(self) -> str:
        if self.series in EXCEPTIONAL_SERIES:
            return self.series
        return f"{self.series}{self.parameter}"


def parse_symbol(text: str) -> CompactGroupSymbol:
    """Parse 'SU4', 'Sp2', 'SO7', 'Spin9', 'G2', 'F4' or 'E6'."""
    text = text.strip()
    if text in EXCEPTIONAL_SERIES:
        return CompactGroupSymbol(text)
    match = re.match(r"^(SU|Sp|SO|Spin)(\d+)$", text)
    if not match:
        raise SymbolError(f"Malformed compact group symbol: {text!r}")
    return CompactGroupSymbol(match.group(1), int(match.group(2)))


def serialize_symbol(c: CompactGroupSymbol) -> str:
    return str(c)


def split_form(c: CompactGroupSymbol) -> SemisimpleGroup:
    """
    Split group with the same point counts as c.

    Raises:
        SymbolError: For SO_2, SO_4 and their spin covers, which are not simple
    """
    n = c.parameter
    if c.series in EXCEPTIONAL_SERIES:
        return SemisimpleGroup.of(SimpleType(c.series, n))
    if c.series == "SU":
        return SemisimpleGroup() if n == 1 else SemisimpleGroup.of(SimpleType("A", n - 1))
    if c.series == "Sp":
        return SemisimpleGroup() if n == 0 else SemisimpleGroup.of(SimpleType.make("B", n))
    # SO and Spin share a split form up to isogeny
    if n == 1:
        return SemisimpleGroup()
    if n % 2:
        return SemisimpleGroup.of(SimpleType.make("B", n // 2))
    if n >= 8:
        return SemisimpleGroup.of(SimpleType("D", n // 2))
    if n == 6:
        return SemisimpleGroup.of(SimpleType("A", 3))
    raise SymbolError(f"{c} is not simple and has no split form here")


@dataclass(frozen=True)
class TransitiveTriple:
    """H with subgroups H1, H2 where H2 acts transitively on H/H1."""

    ambient: CompactGroupSymbol
    sub1: CompactGroupSymbol
    sub2: CompactGroupSymbol
    intersection: CompactGroupSymbol
    family: str = "sporadic"
    n: Optional[int] = None

    def __str__(self) -> str:
        return f"({self.ambient}, {self.sub1}, {self.sub2}; {self.intersection})"


def _triple(ambient: str, sub1: str, sub2: str, intersection: str,
            family: str = "sporadic", n: Optional[int] = None) -> TransitiveTriple:
    return TransitiveTriple(parse_symbol(ambient), parse_symbol(sub1), parse_symbol(sub2),
                            parse_symbol(intersection), family, n)


def triple_catalog(n_max: int) -> List[TransitiveTriple]:
    """All catalog triples with family parameter at most n_max, sporadic rows always included."""
    rows = []
    for n in range(2, n_max + 1):
        rows.append(_triple(f"SU{2 * n}", f"Sp{n}", f"SU{2 * n - 1}", f"Sp{n - 1}", "SU2n", n))
    for n in range(2, n_max + 1):
        rows.append(_triple(f"SO{4 * n}", f"SO{4 * n - 1}", f"Sp{n}", f"Sp{n - 1}", "SO4n", n))
    rows.append(_triple("SO7", "G2", "SO6", "SU3", "SO7-G2-SO6"))
    rows.append(_triple("SO7", "G2", "SO5", "SU2"))
    rows.append(_triple("SO16", "SO15", "Spin9", "Spin7"))
    for n in range(4, n_max + 1):
        rows.append(_triple(f"SO{2 * n}", f"SO{2 * n - 1}", f"SU{n}", f"SU{n - 1}", "SO2n", n))
    rows.append(_triple("SO8", "Spin7", "SO7", "G2"))
    rows.append(_triple("SO8", "Spin7", "SO6", "SU3"))
    rows.append(_triple("SO8", "Spin7", "SO5", "SU2"))
    return rows


def _sides(t: TransitiveTriple) -> Tuple[SemisimpleGroup, SemisimpleGroup]:
    return split_form(t.ambient) * split_form(t.intersection), split_form(t.sub1) * split_form(t.sub2)


def verify_triple(t: TransitiveTriple, f: PrimePowerField) -> bool:
    """Exact check of |H| * |H1 n H2| == |H1| * |H2| over F_q."""
    left, right = _sides(t)
    return group_order(left, f) == group_order(right, f)


def triple_to_class(t: TransitiveTriple) -> CoincidenceClass:
    """The coincidence (H x (H1 n H2) | H1 x H2) of the split forms."""
    return make_class(*_sides(t))


def expected_word(t: TransitiveTriple) -> Optional[GeneratorWord]:
    """Generator word a triple family is known to produce, if any."""
    if t.family == "SU2n":
        return GeneratorWord.from_dict({GeneratorId("B", t.n): -1})
    if t.family == "SO2n":
        return GeneratorWord.from_dict({GeneratorId("D", t.n): 1})
    if t.family == "SO7-G2-SO6":
        return GeneratorWord.from_dict({GeneratorId("G2"): 1})
    return None


def verify_triples(n_max: int = 8, q_values: Sequence[int] = (2, 3, 5)) -> VerificationReport:
    """Order identity, degree balance and reduction for every catalog row."""
    report = VerificationReport(name="triples")
    fields = [PrimePowerField.from_q(q) for q in q_values]
    for t in triple_catalog(n_max):
        left, right = _sides(t)
        report.record(group_degrees(left) == group_degrees(right), f"{t}: degree multisets differ")
        for f in fields:
            report.record(verify_triple(t, f), f"{t}: order identity fails at q={f.q}")
        c = triple_to_class(t)
        word = reduce_to_word(c)
        report.record(evaluate_word(word) == c, f"{t}: reduction does not recompose")
        expected = expected_word(t)
        if expected is not None:
            report.record(word == expected, f"{t}: reduced to {word}, expected {expected}")
    logger.info(f"Triple catalog up to n={n_max}: {report.checked} checks")
    return report


def maximal_exponent_pairs(n_max: int = 8) -> List[Tuple[CompactGroupSymbol, CompactGroupSymbol]]:
    """Pairs (H1, H) of a simple compact group H and a subgroup of the same maximal exponent."""
    pairs = [(parse_symbol(f"Sp{n}"), parse_symbol(f"SU{2 * n}")) for n in range(2, n_max + 1)]
    pairs.append((parse_symbol("G2"), parse_symbol("SO7")))
    pairs += [(parse_symbol(f"SO{2 * n - 1}"), parse_symbol(f"SO{2 * n}")) for n in range(4, n_max + 1)]
    pairs.append((parse_symbol("Spin7"), parse_symbol("SO8")))
    pairs.append((parse_symbol("G2"), parse_symbol("SO8")))
    pairs.append((parse_symbol("F4"), parse_symbol("E6")))
    return pairs


def _top_degree(c: CompactGroupSymbol) -> int:
    return max(max_degree(t) for t in split_form(c).factors)


def verify_maximal_exponent_pairs(n_max: int = 8) -> VerificationReport:
    """Each subgroup's split form has the same largest Weyl degree as the ambient group."""
    report = VerificationReport(name="maximal-exponent")
    for sub, ambient in maximal_exponent_pairs(n_max):
        a, b = _top_degree(sub), _top_degree(ambient)
        report.record(a == b, f"{sub} in {ambient}: max degrees {a} != {b}")
    return report


def catalog_document(n_max: int = 8) -> CatalogDocument:
    """Catalog rows as plain strings for export."""
    rows = []
    for t in triple_catalog(n_max):
        c = triple_to_class(t)
        rows.append(TripleRow(
            ambient=str(t.ambient),
            sub1=str(t.sub1),
            sub2=str(t.sub2),
            intersection=str(t.intersection),
            left=str(c.left),
            right=str(c.right),
            word=serialize_word(reduce_to_word(c)),
        ))
    return CatalogDocument(n_max=n_max, rows=rows)

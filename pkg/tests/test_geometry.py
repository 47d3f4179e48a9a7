"""Tests for compact group symbols and the transitive triple catalog."""

import unittest
import sys
from pathlib import Path

# Add the repository root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.coincidence import GeneratorId, GeneratorWord, reduce_to_word, serialize_word
from src.lie_core import PrimePowerField, parse_group
from src.geometry import (
    SymbolError,
    catalog_document,
    parse_symbol,
    serialize_symbol,
    split_form,
    triple_catalog,
    triple_to_class,
    verify_maximal_exponent_pairs,
    verify_triple,
    verify_triples,
)


class TestSymbols(unittest.TestCase):
    """Test compact group symbols and split forms."""

    def test_parse_round_trip(self):
        for text in ("SU4", "Sp2", "SO7", "Spin9", "G2", "F4", "E6"):
            self.assertEqual(serialize_symbol(parse_symbol(text)), text)

    def test_split_forms(self):
        cases = {
            "SU4": "A3", "SU1": "", "Sp0": "", "Sp1": "A1", "Sp3": "B3",
            "SO3": "A1", "SO5": "B2", "SO6": "A3", "SO7": "B3", "Spin7": "B3",
            "SO8": "D4", "SO16": "D8", "G2": "G2", "E6": "E6",
        }
        for text, expected in cases.items():
            self.assertEqual(split_form(parse_symbol(text)), parse_group(expected), text)

    def test_invalid_symbols(self):
        for text in ("SU", "XY3", "SO-1", "E7"):
            with self.assertRaises(SymbolError):
                parse_symbol(text)
        with self.assertRaises(SymbolError):
            parse_symbol("SU0")
        for text in ("SO4", "SO2", "Spin4"):
            with self.assertRaises(SymbolError):
                split_form(parse_symbol(text))


class TestTriples(unittest.TestCase):
    """Test the transitive triple catalog."""

    def test_catalog_size(self):
        self.assertEqual(len(triple_catalog(8)), 7 + 7 + 3 + 5 + 3)

    def test_so7_g2_so6(self):
        row = next(t for t in triple_catalog(4) if t.family == "SO7-G2-SO6")
        self.assertEqual(str(triple_to_class(row)), "A2*B3|A3*G2")
        for q in (2, 3, 4, 5):
            self.assertTrue(verify_triple(row, PrimePowerField.from_q(q)))

    def test_family_words(self):
        for t in triple_catalog(8):
            word = reduce_to_word(triple_to_class(t))
            if t.family == "SU2n":
                self.assertEqual(word, GeneratorWord.from_dict({GeneratorId("B", t.n): -1}), str(t))
            elif t.family == "SO2n":
                self.assertEqual(word, GeneratorWord.from_dict({GeneratorId("D", t.n): 1}), str(t))

    def test_spin7_g2_row(self):
        row = next(t for t in triple_catalog(4) if str(t) == "(SO8, Spin7, SO7; G2)")
        self.assertEqual(serialize_word(reduce_to_word(triple_to_class(row))), "D4^1 * G2^-1")

    def test_verify_triples(self):
        report = verify_triples(8, (2, 3, 5))
        self.assertTrue(report.passed, report.failures[:5])

    def test_maximal_exponent_pairs(self):
        self.assertTrue(verify_maximal_exponent_pairs(8).passed)


class TestCatalogDocument(unittest.TestCase):
    """Test the exported catalog document."""

    def test_rows(self):
        document = catalog_document(4)
        self.assertEqual(document.n_max, 4)
        self.assertEqual(len(document.rows), len(triple_catalog(4)))
        row = next(r for r in document.rows if (r.ambient, r.sub1, r.sub2) == ("SO7", "G2", "SO6"))
        self.assertEqual(row.word, "G2^1")
        self.assertEqual((row.left, row.right), ("A2*B3", "A3*G2"))


if __name__ == "__main__":
    unittest.main()

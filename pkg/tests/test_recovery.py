"""Tests for characteristic dominance, order recovery and the order atlas."""

import json
import logging
import random
import shutil
import tempfile
import unittest
import sys
from pathlib import Path
from unittest.mock import patch

# Add the repository root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.coincidence import search_coincidences, search_two_factor_pairs
from src.factorization import factorize
from src.lie_core import (
    PrimePowerField,
    SimpleType,
    enumerate_groups,
    group_degrees,
    group_order,
    parse_group,
    prime_powers,
)
from src.recovery import (
    PersistencePreconditionError,
    RecoveryCandidate,
    RecoveryError,
    build_order_atlas,
    check_extension_persistence,
    decompose_degrees,
    dominance_guaranteed,
    has_counterexample_factor,
    is_counterexample,
    recover_candidates,
    recover_characteristic,
    recover_from_atlas,
    scan_row,
    search_cross_characteristic,
    verify_counterexample_classification,
)
from src.utils import atlas_from_file, atlas_to_file, load_atlas, save_atlas

A1 = SimpleType("A", 1)
B2 = SimpleType("B", 2)


class TestDominance(unittest.TestCase):
    """Test the characteristic-dominance scan."""

    def test_counterexample_set(self):
        for q in (2, 3, 4, 5, 7, 8, 9, 16, 17, 31):
            self.assertTrue(is_counterexample(A1, PrimePowerField.from_q(q)), q)
        for q in (11, 13, 25, 27, 32, 49):
            self.assertFalse(is_counterexample(A1, PrimePowerField.from_q(q)), q)
        self.assertTrue(is_counterexample(B2, PrimePowerField(3)))
        self.assertFalse(is_counterexample(B2, PrimePowerField(5)))
        self.assertFalse(is_counterexample(SimpleType("G2", 2), PrimePowerField(2)))

    def test_scan_row_a1_f9(self):
        row = scan_row(A1, PrimePowerField(3, 2))
        self.assertEqual(row.order, "720")
        self.assertEqual(row.largest, "2^4")
        self.assertEqual(row.second, "3^2")
        self.assertFalse(row.p_is_largest)
        self.assertTrue(row.p_is_second)
        self.assertTrue(row.counterexample)

    def test_guarantee_never_claimed_for_counterexamples(self):
        for f in prime_powers(49):
            self.assertFalse(dominance_guaranteed(A1, f))
        self.assertTrue(dominance_guaranteed(SimpleType("A", 8), PrimePowerField.from_q(49)))

    def test_classification_rank_8_q_49(self):
        report = verify_counterexample_classification(8, 49)
        self.assertTrue(report.passed, report.failures[:5])
        self.assertEqual(report.details["counterexamples"], [
            "A1@2", "A1@3", "B2@3", "A1@4", "A1@5", "A1@7",
            "A1@8", "A1@9", "A1@16", "A1@17", "A1@31",
        ])

    def test_recover_characteristic(self):
        with patch.object(logging.getLogger("src.recovery"), "warning") as warn:
            self.assertEqual(recover_characteristic(factorize(5616)), 3)
            self.assertEqual(recover_characteristic(factorize(group_order(parse_group("A2"), PrimePowerField(5)))), 5)
            self.assertEqual(recover_characteristic(factorize(group_order(parse_group("E7"), PrimePowerField(2)))), 2)
        warn.assert_not_called()
        with self.assertLogs("src.recovery", level="WARNING") as logs:
            self.assertEqual(recover_characteristic(factorize(720)), 2)
        self.assertIn("A1 over F_9", logs.output[0])
        self.assertTrue(has_counterexample_factor(RecoveryCandidate(parse_group("A1"), PrimePowerField(3, 2))))
        self.assertFalse(has_counterexample_factor(RecoveryCandidate(parse_group("B2"), PrimePowerField(2))))

    def test_small_scan(self):
        report = verify_counterexample_classification(2, 9)
        self.assertTrue(report.passed, report.failures[:5])
        self.assertEqual(report.details["counterexamples"],
                         ["A1@2", "A1@3", "B2@3", "A1@4", "A1@5", "A1@7", "A1@8", "A1@9"])
        self.assertTrue(scan_row(SimpleType("A", 2), PrimePowerField(2)).p_is_largest)
        for f in prime_powers(9):
            self.assertTrue(scan_row(SimpleType("G2", 2), f).p_is_largest, f.q)


class TestRecovery(unittest.TestCase):
    """Test recovering (group, q) from an order."""

    def test_order_720(self):
        found = recover_candidates(720, max_rank=2)
        self.assertEqual([str(c) for c in found], ["B2 over F_2", "A1 over F_9"])
        found = recover_candidates(720, max_rank=4)
        self.assertEqual([str(c) for c in found], ["B2 over F_2", "A1 over F_9"])

    def test_order_12096(self):
        self.assertEqual([str(c) for c in recover_candidates(12096, max_rank=4)], ["G2 over F_2"])

    def test_small_orders(self):
        self.assertEqual([str(c) for c in recover_candidates(24, max_rank=3)], ["A1 over F_3"])
        self.assertEqual([str(c) for c in recover_candidates(6, max_rank=3)], ["A1 over F_2"])
        self.assertEqual(recover_candidates(5, max_rank=3), [])

    def test_trivial_and_invalid(self):
        found = recover_candidates(1, max_rank=3)
        self.assertEqual(len(found), 1)
        self.assertTrue(found[0].group.is_trivial())
        self.assertIsNone(found[0].field)
        with self.assertRaises(RecoveryError):
            recover_candidates(0, max_rank=3)
        with self.assertRaises(RecoveryError):
            recover_candidates(720, max_rank=-1)

    def test_round_trip(self):
        """Every (H, q) is recovered, and candidates sharing a characteristic share q and degrees."""
        fields = [PrimePowerField.from_q(q) for q in (2, 3, 4, 5, 8, 9, 16, 25, 27)]
        for g in enumerate_groups(6):
            for f in fields:
                found = recover_candidates(group_order(g, f), max_rank=6, q_max=27)
                self.assertIn(RecoveryCandidate(g, f), found, f"{g} over F_{f.q}")
                for c in found:
                    if c.field.p == f.p:
                        self.assertEqual(c.field, f)
                        self.assertEqual(group_degrees(c.group), group_degrees(g))

    def test_decompose_degrees(self):
        self.assertEqual([str(g) for g in decompose_degrees((2, 2, 3, 4))], ["A1*A3", "A2*B2"])
        self.assertEqual([str(g) for g in decompose_degrees((2, 6))], ["G2"])
        self.assertEqual(decompose_degrees((3,)), [])


class TestPersistence(unittest.TestCase):
    """Test that coincidences survive field extensions."""

    def test_two_factor_classes_persist(self):
        classes = search_two_factor_pairs(30)
        fields = [PrimePowerField.from_q(q) for q in (2, 3, 4, 5, 7, 8, 9)]
        rng = random.Random(20050720)
        for _ in range(200):
            c, f = rng.choice(classes), rng.choice(fields)
            self.assertTrue(check_extension_persistence(c.left, c.right, f, 3), f"{c} over F_{f.q}")

    def test_coincidences_persist(self):
        classes = search_coincidences(5, 3)[:200]
        self.assertGreater(len(classes), 0)
        for c in classes:
            for q in (2, 3, 4):
                self.assertTrue(check_extension_persistence(c.left, c.right, PrimePowerField.from_q(q), 4))

    def test_precondition(self):
        self.assertTrue(check_extension_persistence(parse_group("A2*B2"), parse_group("A1*A3"), PrimePowerField(3), 3))
        self.assertTrue(check_extension_persistence(parse_group("E8"), parse_group("E8"), PrimePowerField(5), 2))
        with self.assertRaises(PersistencePreconditionError):
            check_extension_persistence(parse_group("A1"), parse_group("A2"), PrimePowerField(2), 3)
        with self.assertRaises(PersistencePreconditionError):
            check_extension_persistence(parse_group("A1"), parse_group("A1"), PrimePowerField(2), 0)


class TestAtlas(unittest.TestCase):
    """Test building, persisting and querying the order atlas."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.q_values = [2, 3, 4, 5, 7, 8, 9]
        self.atlas = build_order_atlas(3, self.q_values)

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def test_matches_direct_recovery(self):
        for order in (6, 24, 720, group_order(parse_group("A1*B2"), PrimePowerField(7))):
            self.assertEqual(recover_from_atlas(order, self.atlas, 3, 9),
                             recover_candidates(order, 3, q_max=9))

    def test_save_and_load(self):
        path = Path(self.temp_dir) / "nested" / "atlas.json"
        save_atlas(atlas_to_file(self.atlas, 3, self.q_values), path)
        data = load_atlas(path)
        self.assertTrue(data.covers(2, [2, 9]))
        self.assertFalse(data.covers(4, [2]))
        self.assertFalse(data.covers(3, [11]))
        self.assertEqual(atlas_from_file(data), self.atlas)

    def test_missing_and_tampered(self):
        self.assertIsNone(load_atlas(Path(self.temp_dir) / "missing.json"))
        path = Path(self.temp_dir) / "atlas.json"
        save_atlas(atlas_to_file(self.atlas, 3, self.q_values), path)
        raw = json.loads(path.read_text())
        raw["entries"]["720"] = [{"group": "A2", "q": "9"}]
        path.write_text(json.dumps(raw))
        with self.assertRaises(ValueError):
            atlas_from_file(load_atlas(path))

    def test_cross_characteristic_needs_counterexample_factor(self):
        for order, candidates in search_cross_characteristic(6, 9):
            for c1 in candidates:
                for c2 in candidates:
                    if c1.field.p != c2.field.p:
                        self.assertTrue(has_counterexample_factor(c1) or has_counterexample_factor(c2),
                                        f"{order}: {c1} vs {c2}")

    def test_cross_characteristic(self):
        hits = dict(search_cross_characteristic(2, 9))
        self.assertIn(720, hits)
        self.assertEqual([str(c) for c in hits[720]], ["B2 over F_2", "A1 over F_9"])


if __name__ == "__main__":
    unittest.main()

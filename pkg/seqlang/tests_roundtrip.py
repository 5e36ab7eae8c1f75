"""
Property test: parse(serialize(doc)) == doc for randomly generated documents.

Generated values carry at most 6 significant digits in ns/deg, converted
the same way the parser converts literals.
"""
import numpy as np
from django.test import SimpleTestCase

from feedback.device import DEVICE_KEYS

from .parser import (
    MeasureStmt, PulseStmt, ReadoutStmt, SequenceDoc, WaitStmt, deg_to_radians, ns_to_seconds, parse,
)
from .serializer import serialize

NUMERIC_KEYS = sorted(key for key in DEVICE_KEYS if key != 'shift_curve')


def six_digits(value):
    return float(f"{value:.6g}")


class RandomDocuments:

    def __init__(self, seed):
        self.rng = np.random.default_rng(seed)

    def time(self):
        return ns_to_seconds(six_digits(self.rng.uniform(0, 50)))

    def angle(self):
        return deg_to_radians(six_digits(self.rng.uniform(-720, 720)))

    def statement(self):
        choice = self.rng.integers(6)
        if choice == 0:
            return PulseStmt(angle=self.angle())
        if choice == 1:
            at = self.time() if self.rng.random() < 0.5 else None
            return PulseStmt(duration=self.time(), at=at)
        if choice == 2:
            return PulseStmt(angle=self.angle(), at=self.time())
        if choice == 3:
            return WaitStmt(self.time(), bool(self.rng.random() < 0.5))
        if choice == 4:
            return ReadoutStmt(bool(self.rng.random() < 0.5))
        return MeasureStmt()

    def settings(self):
        overrides = {}
        for key in self.rng.choice(NUMERIC_KEYS, size=self.rng.integers(3), replace=False):
            overrides[str(key)] = float(self.rng.uniform(0, 1000))
        if self.rng.random() < 0.3:
            overrides['drive_convention'] = 'resonant_with_high'
        return overrides

    def document(self):
        statements = tuple(self.statement() for _ in range(self.rng.integers(0, 15)))
        return SequenceDoc(self.settings(), statements)


class RoundTripTest(SimpleTestCase):

    def test_random_documents(self):
        documents = RandomDocuments(2024)
        for case in range(200):
            doc = documents.document()
            with self.subTest(case=case):
                self.assertEqual(parse(serialize(doc)), doc)

    def test_serialization_is_idempotent(self):
        documents = RandomDocuments(7)
        for _ in range(50):
            text = serialize(documents.document())
            self.assertEqual(serialize(parse(text)), text)

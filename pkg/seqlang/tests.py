"""
Tokenizer, parser and lowering tests for the sequence language.
"""
import math
from pathlib import Path

from django.test import SimpleTestCase

from feedback.device import default_device, initialization_device
from feedback.protocol import FeedbackSpec, build_arbitrary_prep, build_initialization
from feedback.schedule import DriveConvention, PulseKind

from .errors import ParseError
from .lexer import IDENTIFIER, KEYWORD, NUMBER, PUNCTUATION, UNIT, tokenize
from .lowering import lower, lower_source
from .parser import MeasureStmt, ReadoutStmt, WaitStmt, parse
from .serializer import from_schedule, serialize

GOLDEN = Path(__file__).resolve().parent / 'golden'


class TokenizeTest(SimpleTestCase):

    def test_wait_statement(self):
        tokens = tokenize("wait 5.5ns")
        self.assertEqual([(t.kind, t.lexeme) for t in tokens], [
            (KEYWORD, 'wait'), (NUMBER, '5.5'), (UNIT, 'ns'),
        ])
        self.assertEqual(tokens[1].position, (1, 6))

    def test_empty_source(self):
        self.assertEqual(tokenize(""), [])

    def test_stray_character_position(self):
        with self.assertRaises(ParseError) as caught:
            tokenize("pulse x 90deg @#")
        self.assertEqual(caught.exception.position, (1, 15))

    def test_comments_and_exponents(self):
        tokens = tokenize("# header\nwait 1.5e3ns  # trailing\nset delta_omega_mhz = 150MHz\n")
        self.assertEqual([t.lexeme for t in tokens], [
            'wait', '1.5e3', 'ns', 'set', 'delta_omega_mhz', '=', '150', 'MHz',
        ])
        self.assertEqual(tokens[0].line, 2)
        self.assertEqual(tokens[4].kind, IDENTIFIER)
        self.assertEqual(tokens[5].kind, PUNCTUATION)

    def test_signed_numbers(self):
        tokens = tokenize("pulse x -30deg")
        self.assertEqual(tokens[2].lexeme, '-30')


class ParseTest(SimpleTestCase):

    def test_initialization_demo_has_nine_statements(self):
        doc = parse((GOLDEN / 'initialization_demo.seq').read_text(encoding='utf-8'))
        self.assertEqual(len(doc.statements), 9)
        self.assertIsInstance(doc.statements[-1], MeasureStmt)
        self.assertAlmostEqual(doc.statements[0].angle, math.pi)
        self.assertTrue(doc.statements[4].selective)

    def test_negative_duration(self):
        with self.assertRaises(ParseError) as caught:
            parse("wait -3ns")
        self.assertEqual(caught.exception.position, (1, 6))

    def test_time_needs_unit(self):
        with self.assertRaises(ParseError) as caught:
            parse("wait 3")
        self.assertIn("'ns'", caught.exception.expected)

    def test_one_statement_per_line(self):
        with self.assertRaises(ParseError) as caught:
            parse("measure measure")
        self.assertEqual(caught.exception.position, (1, 9))

    def test_unknown_statement(self):
        with self.assertRaises(ParseError):
            parse("rotate x 90deg")

    def test_units_are_normalized(self):
        doc = parse("wait 2us\nwait 2000ns\npulse x 1rad\npulse x 0.5\n")
        self.assertEqual(doc.statements[0], doc.statements[1])
        self.assertEqual(doc.statements[2].angle, 1.0)
        self.assertEqual(doc.statements[3].angle, 0.5)

    def test_pulse_variants(self):
        doc = parse("pulse x for 0.45ns\npulse x 90deg at 12ns\n")
        self.assertIsNone(doc.statements[0].angle)
        self.assertAlmostEqual(doc.statements[0].duration, 0.45e-9, delta=1e-21)
        self.assertAlmostEqual(doc.statements[1].at, 12e-9, delta=1e-21)

    def test_settings(self):
        doc = parse("set delta_omega_mhz = 100\nset drive_convention = resonant_with_high\nreadout on\n")
        self.assertEqual(doc.device_overrides, {
            'delta_omega_mhz': 100.0, 'drive_convention': 'resonant_with_high',
        })
        self.assertEqual(doc.override_positions['drive_convention'], (2, 1))
        self.assertEqual(doc.statements, (ReadoutStmt(True),))

    def test_setting_unit_must_match_key(self):
        parse("set delta_omega_mhz = 150MHz")
        with self.assertRaises(ParseError):
            parse("set delta_omega_mhz = 1GHz")

    def test_duplicate_setting(self):
        with self.assertRaises(ParseError):
            parse("set q_factor = 40\nset q_factor = 50\n")

    def test_positions_do_not_affect_equality(self):
        self.assertEqual(parse("wait 1ns"), parse("\n\n   wait 1ns"))


class SerializeTest(SimpleTestCase):

    def test_empty_doc(self):
        self.assertEqual(serialize(parse("")), "")

    def test_single_wait(self):
        self.assertEqual(serialize(parse("wait 5.5ns")), "wait 5.5ns\n")

    def test_golden_files_are_canonical(self):
        for path in sorted(GOLDEN.glob('*.seq')):
            text = path.read_text(encoding='utf-8')
            with self.subTest(path=path.name):
                self.assertEqual(serialize(parse(text)), text)
                self.assertEqual(parse(serialize(parse(text))), parse(text))

    def test_arbitrary_prep_golden_matches_builder(self):
        device = default_device()
        spec = FeedbackSpec.for_device(math.pi / 2, math.pi / 3, math.pi / 4, device)
        text = serialize(from_schedule(build_arbitrary_prep(spec, device)))
        self.assertEqual(text, (GOLDEN / 'arbitrary_prep.seq').read_text(encoding='utf-8'))

    def test_statement_forms(self):
        doc = parse("pulse x for 0.45ns at 3ns\nwait 1ns selective\nreadout off\n")
        self.assertEqual(serialize(doc), "pulse x for 0.45ns at 3ns\nwait 1ns selective\nreadout off\n")


class LowerTest(SimpleTestCase):

    def setUp(self):
        self.device = default_device()

    def test_builder_equivalence(self):
        for device in (default_device(), initialization_device()):
            built = build_initialization(device)
            lowered = lower(parse(serialize(from_schedule(built))), device)
            self.assertEqual(len(lowered.events), len(built.events))
            for a, b in zip(lowered.events, built.events):
                self.assertEqual(a.kind, b.kind)
                self.assertEqual(a.selective, b.selective)
                self.assertAlmostEqual(a.start, b.start, delta=1e-5 * max(b.start, 1e-9))
                self.assertAlmostEqual(a.duration, b.duration, delta=1e-5 * max(b.duration, 1e-9))

    def test_measure_before_readout(self):
        with self.assertRaises(ParseError) as caught:
            lower_source("pulse x 90deg\nmeasure\n", self.device)
        self.assertEqual(caught.exception.position, (2, 1))

    def test_overlapping_pulses_cite_both(self):
        with self.assertRaises(ParseError) as caught:
            lower_source("pulse x 90deg\npulse x 90deg at 0.1ns\n", self.device)
        self.assertEqual(caught.exception.position, (2, 1))
        self.assertIn("1:1", caught.exception.message)
        self.assertIn("2:1", caught.exception.message)

    def test_selective_wait_needs_window(self):
        with self.assertRaises(ParseError) as caught:
            lower_source("wait 1ns\nwait 2ns selective\n", self.device)
        self.assertEqual(caught.exception.position, (2, 1))

    def test_short_window(self):
        with self.assertRaises(ParseError):
            lower_source("readout on\nwait 1ns\nreadout off\n", self.device)

    def test_bad_setting_is_positioned(self):
        with self.assertRaises(ParseError) as caught:
            lower_source("readout on\nset projection_error = 1.5\n", self.device)
        self.assertEqual(caught.exception.position, (2, 1))
        with self.assertRaises(ParseError):
            lower_source("set no_such_key = 1\n", self.device)

    def test_settings_reach_the_schedule(self):
        schedule = lower_source(
            "set delta_omega_mhz = 100\nset drive_convention = resonant_with_high\n"
            "readout on\nwait 7ns\nreadout off\n",
            self.device,
        )
        self.assertEqual(schedule.drive_convention, DriveConvention.RESONANT_WITH_HIGH)
        self.assertAlmostEqual(schedule.device.jba.delta_omega, 2 * math.pi * 100e6, delta=1e-3)

    def test_duration_pulse_becomes_angle(self):
        schedule = lower_source("pulse x for 0.45ns\n", self.device)
        self.assertAlmostEqual(schedule.events[0].angle, math.pi / 2, places=9)

    def test_absolute_start_is_sorted(self):
        schedule = lower_source("wait 5ns\npulse x 90deg at 1ns\n", self.device)
        self.assertEqual([e.kind for e in schedule.events], [PulseKind.WAIT, PulseKind.X_ROTATION])
        self.assertAlmostEqual(schedule.events[1].start, 1e-9, delta=1e-20)

    def test_lowering_is_deterministic(self):
        text = (GOLDEN / 'initialization_demo.seq').read_text(encoding='utf-8')
        self.assertEqual(lower_source(text, self.device), lower_source(text, self.device))

    def test_wait_statement_type(self):
        doc = parse("wait 1ns selective")
        self.assertEqual(doc.statements[0], WaitStmt(1e-9, True))

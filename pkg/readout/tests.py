"""
Readout-channel tests: Born-rule statistics, QND repeatability, error
knobs and the readout-height shift table.
"""
import math
import tempfile
from pathlib import Path

from django.core.exceptions import ImproperlyConfigured, ValidationError
from django.test import SimpleTestCase

from qubit.core import PureState, fidelity

from .jba import (
    JbaParams, Outcome, RandomSource, load_shift_curve, outcome_distribution, project,
    shift_from_height, stark_shift_during_readout,
)

G = PureState.basis('g')
E = PureState.basis('e')
PLUS = PureState(1 / math.sqrt(2), 1 / math.sqrt(2))


def three_sigma(p, n):
    return 3 * math.sqrt(p * (1 - p) / n)


class JbaParamsTest(SimpleTestCase):

    def test_latch_time_is_q_over_f(self):
        p = JbaParams()
        self.assertAlmostEqual(p.tau_jba, 7e-9, delta=1e-12)
        self.assertAlmostEqual(p.tau_jba, p.q_factor / p.f_jba, delta=1e-21)

    def test_error_probabilities_bounded(self):
        with self.assertRaises(ValidationError):
            JbaParams(projection_error=1.5)
        with self.assertRaises(ValidationError):
            JbaParams(assignment_error=-0.1)

    def test_decreasing_table_rejected(self):
        with self.assertRaises(ValidationError):
            JbaParams(shift_curve=((0.0, 2.0), (1.0, 1.0)))


class ProjectTest(SimpleTestCase):

    def test_excited_eigenstate(self):
        rng = RandomSource(1)
        for _ in range(100):
            record = project(E, JbaParams(), rng)
            self.assertEqual(record.outcome, Outcome.HIGH)
            self.assertEqual(record.post_state, E)
            self.assertEqual(record.latch_time, JbaParams().tau_jba)

    def test_born_rule_frequency(self):
        rng = RandomSource(2)
        shots = 10_000
        highs = sum(project(PLUS, JbaParams(), rng).outcome == Outcome.HIGH for _ in range(shots))
        self.assertLess(abs(highs / shots - 0.5), three_sigma(0.5, shots))

    def test_projection_error_frequency(self):
        rng = RandomSource(3)
        params = JbaParams(projection_error=0.02)
        shots = 100_000
        flipped = sum(project(G, params, rng).post_state == E for _ in range(shots))
        self.assertLess(abs(flipped / shots - 0.02), three_sigma(0.02, shots))

    def test_assignment_error_keeps_post_state(self):
        rng = RandomSource(4)
        params = JbaParams(assignment_error=1.0)
        record = project(E, params, rng)
        self.assertEqual(record.outcome, Outcome.LOW)
        self.assertEqual(record.post_state, E)
        self.assertEqual(record.stark_shift, params.delta_low)

    def test_qnd_repeatability(self):
        rng = RandomSource(5)
        for _ in range(10_000):
            first = project(PLUS, JbaParams(), rng)
            second = project(first.post_state, JbaParams(), rng)
            self.assertEqual(first.outcome, second.outcome)

    def test_expectation_preserved(self):
        state = PureState.from_bloch(1.1, 0.4)
        rng = RandomSource(6)
        shots = 10_000
        highs = sum(project(state, JbaParams(), rng).outcome == Outcome.HIGH for _ in range(shots))
        expected = state.p_excited
        self.assertLess(abs(highs / shots - expected), three_sigma(expected, shots))

    def test_identical_streams_give_identical_records(self):
        params = JbaParams(projection_error=0.1)
        a, b = RandomSource(9, 4), RandomSource(9, 4)
        run_a = [project(PLUS, params, a) for _ in range(200)]
        run_b = [project(PLUS, params, b) for _ in range(200)]
        self.assertEqual(run_a, run_b)

    def test_distinct_streams_differ(self):
        stream_a, stream_b = RandomSource(9, 0), RandomSource(9, 1)
        run_a = [project(PLUS, JbaParams(), stream_a).outcome for _ in range(64)]
        run_b = [project(PLUS, JbaParams(), stream_b).outcome for _ in range(64)]
        self.assertNotEqual(run_a, run_b)


class OutcomeDistributionTest(SimpleTestCase):

    def test_probabilities_sum_to_one(self):
        params = JbaParams(projection_error=0.03, assignment_error=0.05)
        branches = outcome_distribution(PureState.from_bloch(0.8, 1.0), params)
        self.assertAlmostEqual(sum(b.probability for b in branches), 1.0, places=12)

    def test_noiseless_superposition_has_two_branches(self):
        branches = outcome_distribution(PLUS, JbaParams())
        self.assertEqual(len(branches), 2)
        for branch in branches:
            self.assertAlmostEqual(branch.probability, 0.5, places=12)
            expected = E if branch.outcome == Outcome.HIGH else G
            self.assertEqual(fidelity(branch.post_state, expected), 1.0)

    def test_assignment_error_flips_reported_outcome_only(self):
        branches = outcome_distribution(E, JbaParams(assignment_error=1.0))
        self.assertEqual(len(branches), 1)
        self.assertEqual(branches[0].outcome, Outcome.LOW)
        self.assertEqual(fidelity(branches[0].post_state, E), 1.0)

    def test_flipped(self):
        self.assertEqual(Outcome.HIGH.flipped(), Outcome.LOW)
        self.assertEqual(Outcome.LOW.flipped(), Outcome.HIGH)


class StarkShiftTest(SimpleTestCase):

    def test_default_shift_difference(self):
        params = JbaParams()
        difference = (stark_shift_during_readout(Outcome.HIGH, params)
                      - stark_shift_during_readout(Outcome.LOW, params))
        self.assertAlmostEqual(difference, 2 * math.pi * 150e6, delta=1e-3)
        self.assertAlmostEqual(params.delta_omega, difference)

    def test_low_state_is_resonant_by_default(self):
        self.assertEqual(stark_shift_during_readout(Outcome.LOW, JbaParams()), 0.0)

    def test_compensated_configuration(self):
        params = JbaParams(delta_low=2 * math.pi * 20e6).compensated()
        self.assertEqual(params.delta_low, 0.0)
        self.assertEqual(stark_shift_during_readout(Outcome.LOW, params), 0.0)


class ShiftCurveTest(SimpleTestCase):

    def setUp(self):
        self.params = JbaParams(shift_curve=load_shift_curve())

    def test_bundled_table_loads_in_rad_per_second(self):
        heights = [h for h, _ in self.params.shift_curve]
        self.assertEqual(heights[0], 0.0)
        self.assertAlmostEqual(self.params.shift_curve[-1][1], 2 * math.pi * 216e6, delta=1e-3)

    def test_lowest_point(self):
        first_height, first_shift = self.params.shift_curve[0]
        self.assertEqual(shift_from_height(first_height, self.params), first_shift)

    def test_midpoint_is_mean(self):
        (h1, s1), (h2, s2) = self.params.shift_curve[2:4]
        self.assertAlmostEqual(shift_from_height((h1 + h2) / 2, self.params), (s1 + s2) / 2)

    def test_monotone(self):
        heights = [i * 0.01 for i in range(121)]
        shifts = [shift_from_height(h, self.params) for h in heights]
        self.assertTrue(all(b >= a for a, b in zip(shifts, shifts[1:])))

    def test_out_of_range_and_missing_table(self):
        with self.assertRaises(ImproperlyConfigured):
            shift_from_height(5.0, self.params)
        with self.assertRaises(ImproperlyConfigured):
            shift_from_height(0.5, JbaParams())

    def test_with_amplitudes_sets_both_shifts(self):
        params = self.params.with_amplitudes(1.0, 0.0)
        self.assertAlmostEqual(params.delta_omega, 2 * math.pi * 150e6, delta=1e-3)

    def test_comments_and_malformed_lines(self):
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / 'table.txt'
            path.write_text("# h shift\n0 0\n1 10  # trailing\n", encoding='utf-8')
            self.assertEqual(len(load_shift_curve(path)), 2)
            path.write_text("0 0 0\n", encoding='utf-8')
            with self.assertRaises(ImproperlyConfigured):
                load_shift_curve(path)

"""
Executor tests: the simulated sequence against the closed-form branch
states, initialization from arbitrary inputs, selective Ramsey behaviour
and the feed-forward preset.
"""
import math
from dataclasses import replace

import numpy as np
from django.test import SimpleTestCase

from dynamics.propagators import RotatingFrameParams, rwa_propagator
from qubit.core import PureState, apply, excited_population, fidelity, haar_random_state, rot_x
from readout.jba import Outcome, RandomSource

from .device import DeviceParams, default_device, initialization_device
from .protocol import (
    DetectedBranch, FeedbackSpec, build_arbitrary_prep, build_initialization, build_initialization_demo,
    build_ramsey_probe, predict_final, two_qubit_feedforward,
)
from .schedule import DriveConvention, ScheduleBuilder
from .simulate import PulseMode, high_probability, run_branches, run_shots, simulate_schedule

G = PureState.basis('g')
E = PureState.basis('e')
PLUS = PureState(1 / math.sqrt(2), 1 / math.sqrt(2))
ORACLE_TOL = 1e-9


class OracleEquivalenceTest(SimpleTestCase):

    def check_oracle(self, convention):
        device = default_device()
        angles = np.random.default_rng(11)
        rng = RandomSource(0)
        for theta1, theta2, phi in zip(
            angles.uniform(-2 * math.pi, 2 * math.pi, 200),
            angles.uniform(-2 * math.pi, 2 * math.pi, 200),
            angles.uniform(0, 2 * math.pi, 200),
        ):
            spec = FeedbackSpec.for_device(theta1, theta2, phi, device, drive_convention=convention)
            schedule = build_arbitrary_prep(spec, device)
            for initial in (G, E):
                record, final = simulate_schedule(schedule, initial, rng)
                branch = DetectedBranch.from_outcome(record.outcome)
                self.assertGreater(fidelity(final, predict_final(branch, spec)), 1 - ORACLE_TOL)

    def test_resonant_with_low(self):
        self.check_oracle(DriveConvention.RESONANT_WITH_LOW)

    def test_resonant_with_high(self):
        self.check_oracle(DriveConvention.RESONANT_WITH_HIGH)

    def test_basis_inputs_pick_expected_branch(self):
        device = default_device()
        schedule = build_initialization(device)
        record, final = simulate_schedule(schedule, G, RandomSource(1))
        self.assertEqual(record.outcome, Outcome.LOW)
        self.assertAlmostEqual(final.amp_e, 1j, places=9)
        record, final = simulate_schedule(schedule, E, RandomSource(1))
        self.assertEqual(record.outcome, Outcome.HIGH)
        self.assertGreater(fidelity(final, E), 1 - ORACLE_TOL)


class InitializationTest(SimpleTestCase):

    def test_haar_random_inputs_end_excited(self):
        device = initialization_device()
        schedule = build_initialization(device)
        draws = np.random.default_rng(5)
        rng = RandomSource(2)
        for _ in range(100):
            _, final = simulate_schedule(schedule, haar_random_state(draws), rng)
            self.assertGreater(fidelity(final, E), 1 - ORACLE_TOL)

    def test_projection_error_mean_population(self):
        device = initialization_device()
        device = replace(device, jba=replace(device.jba, projection_error=0.02))
        results = run_shots(build_initialization(device), PLUS, 10_000, seed=3)
        mean = sum(excited_population(r.final_state) for r in results) / len(results)
        self.assertGreaterEqual(mean, 0.96)

    def test_shots_are_reproducible(self):
        device = replace(default_device(), jba=replace(default_device().jba, assignment_error=0.1))
        schedule = build_initialization(device)
        first = [r.record.outcome for r in run_shots(schedule, PLUS, 300, seed=8)]
        second = [r.record.outcome for r in run_shots(schedule, PLUS, 300, seed=8)]
        self.assertEqual(first, second)

    def test_branch_probabilities_sum_to_one(self):
        device = default_device()
        device = replace(device, jba=replace(device.jba, projection_error=0.05, assignment_error=0.02))
        results = run_branches(build_ramsey_probe(math.pi / 3, 2e-9, device), PLUS)
        self.assertAlmostEqual(sum(r.probability for r in results), 1.0, places=12)


class SelectiveRamseyTest(SimpleTestCase):

    def test_ground_branch_ignores_wait_lengths(self):
        device = default_device()
        a, b = 0.7, -1.9
        reference = apply(rot_x(b) @ rot_x(a), G)
        for first_wait, second_wait in ((1e-9, 2e-9), (3.3e-9, 0.1e-9), (7.7e-9, 5e-9)):
            schedule = (
                ScheduleBuilder(device)
                .readout_on().wait(device.tau_jba)
                .rotate(a).wait(first_wait, selective=True)
                .rotate(b).wait(second_wait, selective=True)
                .readout_off()
                .build()
            )
            record, final = simulate_schedule(schedule, G, RandomSource(0))
            self.assertEqual(record.outcome, Outcome.LOW)
            self.assertGreater(fidelity(final, reference), 1 - ORACLE_TOL)

    def test_excited_branch_follows_sin_squared(self):
        device = initialization_device()
        delta_omega = device.jba.delta_omega
        for gap in np.linspace(0, 20e-9, 21):
            schedule = build_initialization_demo(1.7e-9, gap, device, time_offset=0.8e-9)
            p_high = high_probability(run_branches(schedule, G))
            self.assertAlmostEqual(p_high, math.sin(delta_omega * gap / 2) ** 2, places=9)

    def test_ground_prep_rows_flip_for_every_gap(self):
        device = initialization_device()
        for prep_width in (2.6e-9, 4.4e-9):
            for gap in (0.0, 3e-9, 5.5e-9, 11e-9):
                schedule = build_initialization_demo(prep_width, gap, device, time_offset=0.8e-9)
                self.assertGreater(high_probability(run_branches(schedule, G)), 0.99)

    def test_ramsey_probe_at_zero_gap(self):
        device = default_device()
        pi_trace = high_probability(run_branches(build_ramsey_probe(math.pi, 0.0, device), G))
        two_pi_trace = high_probability(run_branches(build_ramsey_probe(2 * math.pi, 0.0, device), G))
        self.assertAlmostEqual(pi_trace, 0.0, places=9)
        self.assertAlmostEqual(two_pi_trace, 1.0, places=9)

    def test_finite_pulses_stay_close_on_low_branch(self):
        device = initialization_device()
        schedule = build_initialization_demo(2.6e-9, 5.5e-9, device, time_offset=0.8e-9)
        p_high = high_probability(run_branches(schedule, G, pulse_mode=PulseMode.FINITE))
        self.assertGreater(p_high, 0.99)

    def test_finite_mode_resonant_rotation_matches_instantaneous(self):
        device = default_device()
        schedule = ScheduleBuilder(device).rotate(1.3).rotate(-0.4).build()
        _, exact = simulate_schedule(schedule, G, RandomSource(0))
        _, finite = simulate_schedule(schedule, G, RandomSource(0), pulse_mode=PulseMode.FINITE)
        self.assertGreater(fidelity(exact, finite), 1 - ORACLE_TOL)


class FeedForwardTest(SimpleTestCase):

    def test_excited_control_rotates_target_exactly(self):
        device = default_device()
        spec = FeedbackSpec.for_device(0.0, 1.1, 0.0, device)
        record, target = two_qubit_feedforward(E, spec, device, RandomSource(4))
        self.assertEqual(record.outcome, Outcome.HIGH)
        self.assertGreater(fidelity(target, apply(rot_x(1.1), G)), 1 - ORACLE_TOL)

    def test_ground_control_leaks_off_resonance(self):
        delta_omega = 2 * math.pi * 150e6
        device = DeviceParams(rabi_omega=20 * delta_omega)
        spec = FeedbackSpec.for_device(0.0, math.pi, 0.0, device)
        record, target = two_qubit_feedforward(G, spec, device, RandomSource(4))
        self.assertEqual(record.outcome, Outcome.LOW)
        expected = apply(rwa_propagator(RotatingFrameParams(
            -delta_omega, device.rabi_omega, device.rotation_duration(math.pi),
        )), G)
        self.assertGreater(target.p_excited, 0.0)
        self.assertLess(target.p_excited, 1.0)
        self.assertAlmostEqual(target.p_excited, expected.p_excited, places=12)

    def test_superposed_control_rotates_half_the_time(self):
        device = default_device()
        spec = FeedbackSpec.for_device(0.0, math.pi, 0.0, device)
        rng = RandomSource(6)
        shots = 10_000
        rotated = sum(
            two_qubit_feedforward(PLUS, spec, device, rng)[0].outcome == Outcome.HIGH for _ in range(shots)
        )
        self.assertLess(abs(rotated / shots - 0.5), 3 * math.sqrt(0.25 / shots))

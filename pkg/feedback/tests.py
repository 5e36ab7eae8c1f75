"""
Schedule construction and validation, device overrides and the
closed-form branch predictions.
"""
import math

from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from qubit.core import PureState, fidelity, to_bloch

from .device import DeviceParams, apply_overrides, default_device, initialization_device
from .protocol import (
    DetectedBranch, FeedbackSpec, build_arbitrary_prep, build_initialization, build_initialization_demo,
    build_ramsey_probe, predict_final,
)
from .schedule import DriveConvention, PulseEvent, PulseKind, PulseSchedule, ScheduleBuilder, ScheduleError

E = PureState.basis('e')
G = PureState.basis('g')


def selective_waits(schedule):
    return [e for e in schedule.events if e.kind == PulseKind.WAIT and e.selective]


class DeviceTest(SimpleTestCase):

    def test_defaults_from_settings(self):
        device = default_device()
        self.assertAlmostEqual(device.pi_duration, 0.9e-9, delta=1e-18)
        self.assertAlmostEqual(device.tau_jba, 7e-9, delta=1e-12)
        self.assertAlmostEqual(device.jba.delta_omega, 2 * math.pi * 150e6, delta=1e-3)

    def test_initialization_device_quarter_turns_sum_to_5_5_ns(self):
        device = initialization_device()
        self.assertAlmostEqual(math.pi / device.jba.delta_omega, 5.5e-9, delta=1e-15)

    def test_overrides_with_units(self):
        device = apply_overrides(DeviceParams(), {
            'pi_duration_ns': 1.0, 'delta_low_mhz': 10, 'delta_omega_mhz': 100, 'q_factor': 65,
        })
        self.assertAlmostEqual(device.pi_duration, 1e-9, delta=1e-18)
        self.assertAlmostEqual(device.jba.delta_low, 2 * math.pi * 10e6, delta=1e-3)
        self.assertAlmostEqual(device.jba.delta_omega, 2 * math.pi * 100e6, delta=1e-3)
        self.assertAlmostEqual(device.tau_jba, 1e-8, delta=1e-15)

    def test_unknown_key_rejected(self):
        with self.assertRaises(ValidationError):
            apply_overrides(DeviceParams(), {'delta_omega_hz': 1})

    def test_t2_bound(self):
        with self.assertRaises(ValidationError):
            DeviceParams(t1=1e-6, t2=3e-6)


class FeedbackSpecTest(SimpleTestCase):

    def test_zero_delta_omega_rejected(self):
        with self.assertRaises(ValidationError):
            FeedbackSpec(1.0, 1.0, 0.0, 0.0)

    def test_negative_phi_rejected_at_build(self):
        spec = FeedbackSpec.for_device(1.0, 1.0, -0.1, DeviceParams())
        with self.assertRaises(ValidationError):
            build_arbitrary_prep(spec, DeviceParams())

    def test_non_finite_angle_rejected(self):
        with self.assertRaises(ValidationError):
            FeedbackSpec(float('nan'), 1.0, 0.0, 1e9)


class BuildArbitraryPrepTest(SimpleTestCase):

    def setUp(self):
        self.device = initialization_device()

    def test_initialization_shape(self):
        schedule = build_initialization(self.device)
        rotations = schedule.rotations()
        self.assertEqual([r.angle for r in rotations], [math.pi / 2, math.pi / 2])
        waits = selective_waits(schedule)
        self.assertAlmostEqual(sum(w.duration for w in waits), 5.5e-9, delta=1e-15)
        self.assertEqual(schedule.events[0].kind, PulseKind.READOUT_ON)
        self.assertEqual(schedule.events[-1].kind, PulseKind.READOUT_OFF)

    def test_equal_thetas_drop_middle_rotation(self):
        spec = FeedbackSpec.for_device(1.2, 1.2, 0.7, self.device)
        angles = [r.angle for r in build_arbitrary_prep(spec, self.device).rotations()]
        self.assertEqual(len(angles), 2)
        self.assertAlmostEqual(angles[1], 1.2 - math.pi / 2)

    def test_golden_schedule(self):
        spec = FeedbackSpec.for_device(math.pi / 2, math.pi / 3, math.pi / 4, self.device)
        schedule = build_arbitrary_prep(spec, self.device)
        tau, omega = self.device.tau_jba, self.device.rabi_omega
        quarter = (math.pi / 2) / self.device.jba.delta_omega
        golden = [
            (PulseKind.READOUT_ON, 0.0, 0.0, None),
            (PulseKind.WAIT, 0.0, tau, None),
            (PulseKind.X_ROTATION, tau, (math.pi / 2) / omega, math.pi / 2),
            (PulseKind.WAIT, tau + (math.pi / 2) / omega, quarter, None),
            (PulseKind.X_ROTATION, tau + (math.pi / 2) / omega + quarter, (math.pi / 6) / omega, math.pi / 6),
            (PulseKind.WAIT, None, quarter, None),
            (PulseKind.X_ROTATION, None, (math.pi / 6) / omega, -math.pi / 6),
            (PulseKind.WAIT, None, (math.pi / 4) / self.device.jba.delta_omega, None),
            (PulseKind.READOUT_OFF, None, 0.0, None),
        ]
        self.assertEqual(len(schedule.events), len(golden))
        previous_end = 0.0
        for event, (kind, start, duration, angle) in zip(schedule.events, golden):
            self.assertEqual(event.kind, kind)
            expected_start = previous_end if start is None else start
            self.assertAlmostEqual(event.start, expected_start, delta=1e-18)
            self.assertAlmostEqual(event.duration, duration, delta=1e-18)
            if angle is not None:
                self.assertAlmostEqual(event.angle, angle, places=12)
            previous_end = max(previous_end, event.end)

    def test_total_conditional_time_within_10_to_20_ns(self):
        for device in (default_device(), initialization_device()):
            schedule = build_initialization(device)
            waits = selective_waits(schedule)
            total = device.tau_jba + sum(w.duration for w in waits)
            self.assertGreaterEqual(total, 10e-9)
            self.assertLessEqual(total, 20e-9)

    def test_negative_delta_omega_rejected(self):
        spec = FeedbackSpec(1.0, 0.5, 0.0, -1e9)
        with self.assertRaises(ValidationError):
            build_arbitrary_prep(spec, self.device)

    def test_mismatched_delta_omega_is_logged(self):
        spec = FeedbackSpec(1.0, 0.5, 0.0, 2 * math.pi * 50e6)
        with self.assertLogs('feedback.protocol', level='WARNING'):
            build_arbitrary_prep(spec, self.device)


class DemoBuildersTest(SimpleTestCase):

    def test_ramsey_probe_layout(self):
        device = default_device()
        schedule = build_ramsey_probe(math.pi, 2e-9, device)
        kinds = [e.kind for e in schedule.events]
        self.assertEqual(kinds, [
            PulseKind.X_ROTATION, PulseKind.READOUT_ON, PulseKind.WAIT, PulseKind.X_ROTATION,
            PulseKind.WAIT, PulseKind.X_ROTATION, PulseKind.READOUT_OFF, PulseKind.READOUT_ON,
            PulseKind.MEASURE,
        ])
        self.assertEqual(len(schedule.windows), 2)

    def test_demo_prep_angle_uses_time_offset(self):
        device = default_device()
        schedule = build_initialization_demo(1.7e-9, 1e-9, device, time_offset=0.8e-9)
        self.assertAlmostEqual(schedule.rotations()[0].angle, math.pi, places=9)

    def test_demo_prep_shorter_than_offset_is_omitted(self):
        schedule = build_initialization_demo(0.5e-9, 1e-9, default_device(), time_offset=0.8e-9)
        self.assertEqual(schedule.events[0].kind, PulseKind.READOUT_ON)


class PredictFinalTest(SimpleTestCase):

    def spec(self, theta1, theta2, phi, convention=DriveConvention.RESONANT_WITH_LOW):
        return FeedbackSpec(theta1, theta2, phi, 2 * math.pi * 150e6, convention)

    def test_ground_branch_pi_is_excited(self):
        state = predict_final(DetectedBranch.GROUND_DETECTED, self.spec(math.pi, 0.3, 0.0))
        self.assertAlmostEqual(fidelity(state, E), 1.0, places=12)
        self.assertAlmostEqual(state.amp_e, 1j, places=12)

    def test_excited_branch_pi(self):
        state = predict_final(DetectedBranch.EXCITED_DETECTED, self.spec(0.2, math.pi, 0.0))
        self.assertAlmostEqual(fidelity(state, E), 1.0, places=12)

    def test_ground_branch_zero_is_ground(self):
        state = predict_final(DetectedBranch.GROUND_DETECTED, self.spec(0.0, 1.0, 1.0))
        self.assertAlmostEqual(fidelity(state, G), 1.0, places=12)

    def test_half_pi_bloch_direction(self):
        bloch = to_bloch(predict_final(DetectedBranch.GROUND_DETECTED, self.spec(math.pi / 2, 0.0, 0.0)))
        self.assertAlmostEqual(bloch.y, -1.0, places=12)
        self.assertAlmostEqual(bloch.z, 0.0, places=12)

    def test_high_convention_is_flipped(self):
        low = predict_final(DetectedBranch.GROUND_DETECTED, self.spec(0.9, 2.0, 0.4))
        high = predict_final(
            DetectedBranch.EXCITED_DETECTED, self.spec(0.9, 2.0, 0.4, DriveConvention.RESONANT_WITH_HIGH),
        )
        self.assertAlmostEqual(low.p_excited, 1 - high.p_excited, places=12)


class ScheduleValidationTest(SimpleTestCase):

    def setUp(self):
        self.device = default_device()
        self.tau = self.device.tau_jba
        self.half_pi = self.device.rotation_duration(math.pi / 2)

    def rotation(self, start, angle=math.pi / 2):
        return PulseEvent(PulseKind.X_ROTATION, start, self.device.rotation_duration(angle), angle=angle)

    def on(self, start):
        return PulseEvent(PulseKind.READOUT_ON, start)

    def off(self, start):
        return PulseEvent(PulseKind.READOUT_OFF, start)

    def assertRejected(self, events, indices):
        with self.assertRaises(ScheduleError) as caught:
            PulseSchedule(events, self.device)
        self.assertEqual(caught.exception.event_indices, tuple(indices))

    def test_valid_schedule_has_window(self):
        schedule = PulseSchedule([self.on(0.0), self.rotation(self.tau), self.off(2 * self.tau)], self.device)
        self.assertEqual(len(schedule.windows), 1)
        self.assertAlmostEqual(schedule.windows[0].latch_time, self.tau)

    def test_overlapping_rotations(self):
        self.assertRejected([self.rotation(0.0), self.rotation(self.half_pi / 2)], [0, 1])

    def test_touching_rotations_allowed(self):
        PulseSchedule([self.rotation(0.0), self.rotation(self.half_pi)], self.device)

    def test_rotation_duration_must_match_angle(self):
        bad = PulseEvent(PulseKind.X_ROTATION, 0.0, 1e-9, angle=math.pi / 2)
        self.assertRejected([bad], [0])

    def test_double_readout_on(self):
        self.assertRejected([self.on(0.0), self.on(1e-9)], [0, 1])

    def test_readout_off_without_on(self):
        self.assertRejected([self.off(0.0)], [0])

    def test_window_shorter_than_latch(self):
        self.assertRejected([self.on(0.0), self.off(self.tau / 2)], [0, 1])

    def test_rotation_straddling_latch(self):
        self.assertRejected(
            [self.on(0.0), self.rotation(self.tau - self.half_pi / 2), self.off(2 * self.tau)], [0, 1],
        )

    def test_selective_wait_outside_window(self):
        wait = PulseEvent(PulseKind.WAIT, 0.0, 1e-9, selective=True)
        self.assertRejected([wait], [0])

    def test_measure_outside_window(self):
        self.assertRejected([PulseEvent(PulseKind.MEASURE, 0.0)], [0])

    def test_unsorted_events(self):
        self.assertRejected([self.rotation(2e-9), self.rotation(0.0)], [0, 1])

    def test_negative_wait(self):
        self.assertRejected([PulseEvent(PulseKind.WAIT, 0.0, -1e-9)], [0])

    def test_builder_rejects_measure_before_readout(self):
        with self.assertRaises(ScheduleError):
            ScheduleBuilder(self.device).measure().build()

    def test_unclosed_window_is_valid(self):
        schedule = ScheduleBuilder(self.device).readout_on().measure().build()
        self.assertEqual(schedule.windows[0].off_index, None)

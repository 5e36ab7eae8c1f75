"""
Calibration fit, decoherence channel, latency budget and fringe fitting.
"""
import math

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from feedback.device import initialization_device
from qubit.core import DensityMatrix, PureState, trace_distance
from qubit.exceptions import InvalidArgument

from .calibration import (
    EXCITED_ANCHORS_S, GROUND_ANCHORS_S, RabiCalibration, calibrate_rabi, default_calibration,
)
from .decoherence import DecoherenceParams, apply_decoherence, decoherence_channel, kraus_operators
from .fringe import fft_peak, fringe_frequency
from .latency import LatencyMode, LatencyModel, latency_budget, speedup

NS = 1e-9
G = PureState.basis('g')
E = PureState.basis('e')
PLUS = PureState(1 / math.sqrt(2), 1 / math.sqrt(2))


class CalibrationTest(SimpleTestCase):

    def test_measured_anchors(self):
        cal = calibrate_rabi(EXCITED_ANCHORS_S, GROUND_ANCHORS_S)
        self.assertAlmostEqual(cal.pi_duration, 0.9 * NS, delta=1e-15)
        self.assertAlmostEqual(cal.time_offset, 0.8 * NS, delta=1e-15)
        self.assertLess(cal.rms_residual, 1e-15)

    def test_symmetric_anchors(self):
        cal = calibrate_rabi([1 * NS, 3 * NS], [2 * NS])
        self.assertAlmostEqual(cal.pi_duration, 1 * NS, delta=1e-15)
        self.assertAlmostEqual(cal.time_offset, 0.0, delta=1e-15)

    def test_perturbed_anchors_stay_close(self):
        offsets = [0.05, -0.05, 0.05, -0.05, 0.05]
        anchors = sorted(EXCITED_ANCHORS_S + GROUND_ANCHORS_S)
        moved = {t: t + d * NS for t, d in zip(anchors, offsets)}
        cal = calibrate_rabi(
            [moved[t] for t in EXCITED_ANCHORS_S], [moved[t] for t in GROUND_ANCHORS_S],
        )
        self.assertAlmostEqual(cal.pi_duration, 0.9 * NS, delta=0.1 * NS)
        self.assertGreater(cal.rms_residual, 0.0)

    def test_calibration_predicts_anchor_populations(self):
        cal = default_calibration()
        for width in EXCITED_ANCHORS_S:
            self.assertAlmostEqual(cal.p_excited(width), 1.0, places=9)
        for width in GROUND_ANCHORS_S:
            self.assertAlmostEqual(cal.p_excited(width), 0.0, places=9)
        self.assertEqual(cal.prep_angle(0.5 * NS), 0.0)

    def test_non_alternating_anchors_rejected(self):
        with self.assertRaises(ValidationError):
            calibrate_rabi([1.7 * NS, 2.0 * NS], [2.6 * NS])
        with self.assertRaises(ValidationError):
            calibrate_rabi([1.7 * NS], [])

    def test_negative_offset_rejected(self):
        with self.assertRaises(ValidationError):
            calibrate_rabi([0.5 * NS, 2.5 * NS], [1.5 * NS])

    def test_invalid_calibration_values(self):
        with self.assertRaises(ValidationError):
            RabiCalibration(0.0)
        with self.assertRaises(ValidationError):
            RabiCalibration(0.9 * NS, time_offset=-1 * NS)


class DecoherenceTest(SimpleTestCase):

    def test_no_noise_is_identity(self):
        rho = DensityMatrix.from_pure(PLUS)
        out = apply_decoherence(rho, 1e-6, DecoherenceParams())
        np.testing.assert_allclose(out.rho, rho.rho, atol=1e-15)
        self.assertIsNone(decoherence_channel(DecoherenceParams()))

    def test_long_wait_relaxes_to_ground(self):
        out = apply_decoherence(E, 1e-4, DecoherenceParams(t1=1e-6))
        self.assertLess(trace_distance(out, DensityMatrix.from_pure(G)), 1e-6)

    def test_coherence_decays_at_t2(self):
        out = apply_decoherence(PLUS, 1e-6, DecoherenceParams(t1=5e-6, t2=1e-6))
        self.assertAlmostEqual(abs(out.rho[0, 1]), math.exp(-1) / 2, delta=1e-9)

    def test_kraus_operators_are_complete(self):
        noise = DecoherenceParams(t1=5e-6, t2=2e-6)
        for duration in (0.0, 1e-9, 3e-7, 1e-5):
            total = sum(k.conj().T @ k for k in kraus_operators(duration, noise))
            np.testing.assert_allclose(total, np.eye(2), atol=1e-12)

    def test_output_is_a_valid_state(self):
        channel = decoherence_channel(DecoherenceParams(t1=2e-6, t2=3e-6))
        rho = channel(PureState(0.6, 0.8j), 5e-7)
        self.assertAlmostEqual(np.trace(rho.rho).real, 1.0, delta=1e-12)
        self.assertLessEqual(rho.purity(), 1.0 + 1e-12)

    def test_invalid_parameters(self):
        with self.assertRaises(ValidationError):
            DecoherenceParams(t1=1e-6, t2=3e-6)
        with self.assertRaises(ValidationError):
            DecoherenceParams(t1=0.0)
        with self.assertRaises(InvalidArgument):
            kraus_operators(-1e-9, DecoherenceParams(t1=1e-6))

    def test_dephasing_rate(self):
        self.assertAlmostEqual(DecoherenceParams(t1=5e-6, t2=1e-6).dephasing_rate, 9e5)
        self.assertEqual(DecoherenceParams(t1=5e-6).dephasing_rate, 0.0)


class LatencyTest(SimpleTestCase):

    def test_on_chip_total(self):
        budget = latency_budget(LatencyModel())
        self.assertAlmostEqual(budget.total, 12.5 * NS, delta=1e-18)
        self.assertTrue(10 * NS <= budget.total <= 20 * NS)
        self.assertEqual([name for name, _ in budget.components], ['bifurcation', 'ramsey_rotation'])

    def test_model_from_initialization_device(self):
        model = LatencyModel.for_device(initialization_device())
        self.assertAlmostEqual(model.tau_jba, 7 * NS, delta=1e-15)
        self.assertAlmostEqual(model.tau_pi, 5.5 * NS, delta=1e-15)

    def test_cable_component(self):
        budget = latency_budget(LatencyModel(LatencyMode.OFF_CHIP, cable_length=20, cable_delay_rate=5 * NS))
        self.assertAlmostEqual(budget.component('cable'), 100 * NS, delta=1e-18)
        self.assertAlmostEqual(budget.total, 112.5 * NS, delta=1e-18)

    def test_processing_dominates(self):
        on_chip = latency_budget(LatencyModel())
        off_chip = latency_budget(LatencyModel(LatencyMode.OFF_CHIP, processing_delay=2e-6))
        self.assertGreater(off_chip.total, 2e-6)
        self.assertGreater(speedup(on_chip, off_chip), 150)

    def test_negative_values_rejected(self):
        with self.assertRaises(ValidationError):
            LatencyModel(cable_length=-1.0)
        with self.assertRaises(ValidationError):
            LatencyModel(processing_delay=float('nan'))


class FringeTest(SimpleTestCase):

    def trace(self, frequency, phase=0.0):
        times = np.arange(201) * 0.1 * NS
        return times, 0.5 - 0.5 * np.cos(2 * np.pi * frequency * times + phase)

    def test_recovers_configured_frequency(self):
        for frequency in (100e6, 150e6, 90.9e6):
            with self.subTest(frequency=frequency):
                times, values = self.trace(frequency, phase=0.3)
                self.assertAlmostEqual(fringe_frequency(times, values), frequency, delta=0.01 * frequency)

    def test_fft_peak_is_within_a_bin(self):
        times, values = self.trace(150e6)
        self.assertAlmostEqual(fft_peak(times, values), 150e6, delta=1 / (times[-1] - times[0]))

    def test_noisy_trace(self):
        times, values = self.trace(150e6)
        noisy = np.clip(values + np.random.default_rng(3).normal(0, 0.01, values.size), 0, 1)
        self.assertAlmostEqual(fringe_frequency(times, noisy), 150e6, delta=1.5e6)

    def test_flat_trace_has_no_frequency(self):
        times = np.arange(50) * NS
        self.assertEqual(fringe_frequency(times, np.ones(50)), 0.0)

    def test_sampling_requirements(self):
        with self.assertRaises(ValidationError):
            fringe_frequency([0, 1, 2], [0, 1, 0])
        with self.assertRaises(ValidationError):
            fringe_frequency([0, 1, 3, 4, 5], [0, 1, 0, 1, 0])

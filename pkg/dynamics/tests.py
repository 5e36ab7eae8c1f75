"""
Propagator tests: closed-form limits, RK4 convergence order and the
rotating-wave-approximation error at device-scale drive strengths.
"""
import math

import numpy as np
from django.core.exceptions import ImproperlyConfigured
from django.test import SimpleTestCase

from qubit.core import PureState, Unitary2, apply, fidelity, phase_z, rot_x, to_bloch

from .propagators import (
    DriveParams, IntegratorConfig, RotatingFrameParams, average_gate_fidelity, frame_align,
    lab_propagator, rwa_error, rwa_propagator,
)

TWO_PI = 2 * math.pi
OMEGA_QUBIT = TWO_PI * 3.4e9
G = PureState.basis('g')


def constant_h_rk4(detuning, rabi_omega, duration, steps):
    """Reference RK4 for the time-independent rotating-frame generator."""
    generator = 0.5j * np.array([[-detuning, rabi_omega], [rabi_omega, detuning]], dtype=complex)
    h = duration / steps
    u = np.eye(2, dtype=complex)
    for _ in range(steps):
        k1 = generator @ u
        k2 = generator @ (u + h / 2 * k1)
        k3 = generator @ (u + h / 2 * k2)
        k4 = generator @ (u + h * k3)
        u = u + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return u


class IntegratorConfigTest(SimpleTestCase):

    def test_rejects_non_positive_step(self):
        with self.assertRaises(ImproperlyConfigured):
            IntegratorConfig(step=0.0)

    def test_coarse_step_refused(self):
        drive = DriveParams(OMEGA_QUBIT, OMEGA_QUBIT, TWO_PI * 100e6, duration=1e-9)
        with self.assertRaises(ImproperlyConfigured):
            lab_propagator(drive, IntegratorConfig(step=10e-12))

    def test_default_step_resolves_jba_frequency(self):
        IntegratorConfig().check_resolves(TWO_PI * 6.5e9)
        self.assertEqual(IntegratorConfig(max_frequency=TWO_PI * 6.5e9).step, 1e-12)

    def test_coarse_step_refused_at_construction(self):
        with self.assertRaises(ImproperlyConfigured):
            IntegratorConfig(step=10e-12, max_frequency=OMEGA_QUBIT)
        with self.assertRaises(ImproperlyConfigured):
            IntegratorConfig(step=10e-12).resolving(OMEGA_QUBIT)

    def test_resolving_keeps_the_faster_frequency(self):
        cfg = IntegratorConfig(max_frequency=TWO_PI * 6.5e9).resolving(OMEGA_QUBIT)
        self.assertEqual(cfg.max_frequency, TWO_PI * 6.5e9)


class LabPropagatorTest(SimpleTestCase):

    def test_zero_duration_is_identity(self):
        drive = DriveParams(OMEGA_QUBIT, OMEGA_QUBIT, TWO_PI * 100e6, duration=0.0)
        self.assertTrue(lab_propagator(drive).close_to(Unitary2.identity()))

    def test_free_precession_matches_phase_z(self):
        tau = 2e-9
        drive = DriveParams(OMEGA_QUBIT, OMEGA_QUBIT, 0.0, duration=tau)
        u = lab_propagator(drive)
        self.assertLess(np.linalg.norm(u.u - phase_z(tau, OMEGA_QUBIT).u), 1e-6)

    def test_resonant_pi_pulse(self):
        rabi = TWO_PI * 100e6
        drive = DriveParams(OMEGA_QUBIT, OMEGA_QUBIT, rabi, duration=math.pi / rabi)
        final = apply(lab_propagator(drive), G)
        self.assertGreater(fidelity(final, apply(rot_x(math.pi), G)), 0.999)

    def test_result_is_unitary(self):
        drive = DriveParams(OMEGA_QUBIT, OMEGA_QUBIT * 0.98, TWO_PI * 300e6, start=0.2e-9, duration=0.7e-9)
        u = lab_propagator(drive).u
        self.assertLess(np.linalg.norm(u.conj().T @ u - np.eye(2)), 1e-8)

    def test_fourth_order_convergence(self):
        drive = DriveParams(OMEGA_QUBIT, OMEGA_QUBIT, TWO_PI * 500e6, duration=0.5e-9)
        coarse = lab_propagator(drive, IntegratorConfig(step=4e-12)).u
        fine = lab_propagator(drive, IntegratorConfig(step=2e-12)).u
        reference = lab_propagator(drive, IntegratorConfig(step=0.5e-12)).u
        ratio = np.linalg.norm(coarse - reference) / np.linalg.norm(fine - reference)
        self.assertGreaterEqual(ratio, 8)
        self.assertLessEqual(ratio, 32)

    def test_frames_agree_without_drive(self):
        s = PureState.from_vector([0.6, 0.8j])
        detuning = TWO_PI * 40e6
        for tau in (0.3e-9, 1.1e-9, 2.0e-9):
            drive = DriveParams(OMEGA_QUBIT, OMEGA_QUBIT - detuning, 0.0, duration=tau)
            lab_z = to_bloch(apply(lab_propagator(drive), s)).z
            rot_z = to_bloch(apply(rwa_propagator(drive.rotating_frame()), s)).z
            self.assertAlmostEqual(lab_z, rot_z, places=9)


class RwaPropagatorTest(SimpleTestCase):

    def test_resonant_limit_is_rot_x(self):
        rabi = TWO_PI * 200e6
        u = rwa_propagator(RotatingFrameParams(0.0, rabi, (math.pi / 2) / rabi))
        self.assertTrue(u.close_to(rot_x(math.pi / 2)))

    def test_ramsey_limit_is_phase_z(self):
        detuning = TWO_PI * 150e6
        u = rwa_propagator(RotatingFrameParams(detuning, 0.0, 3e-9))
        self.assertTrue(u.close_to(phase_z(3e-9, detuning)))

    def test_tilted_axis_against_constant_h_integrator(self):
        rabi = TWO_PI * 100e6
        duration = math.pi / (rabi * math.sqrt(2))
        u = rwa_propagator(RotatingFrameParams(rabi, rabi, duration))
        reference = constant_h_rk4(rabi, rabi, duration, steps=4000)
        self.assertLess(np.linalg.norm(u.u - reference), 1e-10)

    def test_drive_phase_pi_reverses_rotation(self):
        rabi = TWO_PI * 200e6
        u = rwa_propagator(RotatingFrameParams(0.0, rabi, 1e-9, drive_phase=math.pi))
        self.assertTrue(u.close_to(rot_x(-rabi * 1e-9)))


class RwaErrorTest(SimpleTestCase):

    def pi_pulse(self, rabi):
        return DriveParams(OMEGA_QUBIT, OMEGA_QUBIT, rabi, duration=math.pi / rabi)

    def test_no_drive_has_no_error(self):
        drive = DriveParams(OMEGA_QUBIT, OMEGA_QUBIT, 0.0, duration=1e-9)
        self.assertLessEqual(rwa_error(drive), 1e-8)

    def test_device_scale_ratio(self):
        self.assertLess(rwa_error(self.pi_pulse(0.03 * OMEGA_QUBIT)), 1e-3)

    def test_error_grows_with_drive_strength(self):
        weak = rwa_error(self.pi_pulse(0.03 * OMEGA_QUBIT))
        strong = rwa_error(self.pi_pulse(0.3 * OMEGA_QUBIT))
        self.assertGreater(strong, weak)

    def test_calibrated_rabi_rate_and_scaling(self):
        # Omega = pi / 0.9 ns from the Rabi calibration, then scaled down x10 and x100.
        rabi = math.pi / 0.9e-9
        errors = [rwa_error(self.pi_pulse(rabi * scale)) for scale in (1.0, 0.1, 0.01)]
        self.assertLess(errors[0], 2e-2)
        self.assertGreater(errors[0], errors[1])
        self.assertGreater(errors[1], errors[2])

    def test_frame_alignment_of_free_evolution(self):
        tau = 1.3e-9
        aligned = frame_align(phase_z(tau, OMEGA_QUBIT), OMEGA_QUBIT, tau)
        self.assertAlmostEqual(average_gate_fidelity(aligned, Unitary2.identity()), 1.0, places=12)

"""
Grid harness: Ramsey-during-readout fringes, the initialization map,
seed determinism across worker counts and binomial shot statistics.
"""
import io
import math
from dataclasses import replace

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from feedback.device import default_device, initialization_device
from feedback.protocol import build_selective_ramsey
from feedback.simulate import PulseMode

from .calibration import default_calibration
from .decoherence import DecoherenceParams
from .fringe import fringe_frequency
from .reports import GRID_HEADER, write_grid_csv
from .sweeps import (
    GridResult, PrepPulse, SweepAxis, SweepSpec, convergence_columns, initialization_map,
    predicted_convergence_gaps, ramsey_during_readout, run_grid,
)

NS = 1e-9
TWO_PI = 2 * math.pi


def gap_sweep(stop=20 * NS, step=0.1 * NS, shots=10_000, seed=5):
    return SweepSpec(SweepAxis('gap', 0.0, stop, step), None, shots, seed)


class SweepSpecTest(SimpleTestCase):

    def test_axis_is_inclusive(self):
        values = SweepAxis('gap', 0.0, 20 * NS, 0.1 * NS).values
        self.assertEqual(len(values), 201)
        self.assertAlmostEqual(values[-1], 20 * NS, delta=1e-20)
        self.assertEqual(len(SweepAxis.single('tau2', 5.5 * NS).values), 1)

    def test_invalid_axes(self):
        with self.assertRaises(ValidationError):
            SweepAxis('gap', 0.0, 1 * NS, 0.0)
        with self.assertRaises(ValidationError):
            SweepAxis('gap', 2 * NS, 1 * NS, 0.1 * NS)
        with self.assertRaises(ValidationError):
            SweepAxis('gap', -1 * NS, 1 * NS, 0.1 * NS)

    def test_invalid_shots_and_seed(self):
        axis = SweepAxis('gap', 0.0, 1 * NS, 0.1 * NS)
        with self.assertRaises(ValidationError):
            SweepSpec(axis, shots_per_point=0)
        with self.assertRaises(ValidationError):
            SweepSpec(axis, seed=-1)

    def test_grid_shape_is_checked(self):
        with self.assertRaises(ValidationError):
            GridResult((np.zeros(2), np.zeros(3)), np.zeros((3, 2)), 10)


class RamseyDuringReadoutTest(SimpleTestCase):

    def test_high_branch_fringe_and_flat_low_branch(self):
        device = default_device()
        sweep = gap_sweep()
        high = ramsey_during_readout(PrepPulse.PI_PULSE, sweep, device)
        low = ramsey_during_readout(PrepPulse.TWO_PI_PULSE, sweep, device)
        f_high = fringe_frequency(high.axes[1], high.p_excited[0])
        self.assertAlmostEqual(f_high, 150e6, delta=1.5e6)
        self.assertLess(np.ptp(low.p_excited[0]), 0.01)
        self.assertEqual(fringe_frequency(low.axes[1], low.p_excited[0]), 0.0)

    def test_fringe_tracks_configured_shift_difference(self):
        device = default_device().with_delta_omega(TWO_PI * 100e6)
        sweep = gap_sweep(shots=2000)
        high = ramsey_during_readout(PrepPulse.PI_PULSE, sweep, device)
        low = ramsey_during_readout(PrepPulse.TWO_PI_PULSE, sweep, device)
        difference = (
            fringe_frequency(high.axes[1], high.p_excited[0]) - fringe_frequency(low.axes[1], low.p_excited[0])
        )
        self.assertAlmostEqual(difference, 100e6, delta=1e6)

    def test_zero_gap_values(self):
        device = default_device()
        sweep = gap_sweep(stop=0.0, step=0.1 * NS, shots=100)
        self.assertAlmostEqual(ramsey_during_readout(PrepPulse.PI_PULSE, sweep, device).exact[0, 0], 0.0, places=9)
        self.assertAlmostEqual(ramsey_during_readout(PrepPulse.TWO_PI_PULSE, sweep, device).exact[0, 0], 1.0, places=9)

    def test_prep_width_is_the_tau1_coordinate(self):
        device = default_device()
        grid = ramsey_during_readout(PrepPulse.TWO_PI_PULSE, gap_sweep(stop=1 * NS, shots=10), device)
        self.assertAlmostEqual(grid.axes[0][0], 2 * device.pi_duration, delta=1e-20)

    def test_readout_errors_are_switched_off(self):
        device = default_device()
        noisy = replace(device, jba=replace(device.jba, projection_error=0.2, assignment_error=0.1))
        grid = ramsey_during_readout(PrepPulse.TWO_PI_PULSE, gap_sweep(stop=1 * NS, shots=10), noisy)
        np.testing.assert_allclose(grid.exact, 1.0, atol=1e-9)


class InitializationMapTest(SimpleTestCase):

    def setUp(self):
        self.device = initialization_device()
        self.cal = default_calibration()

    def test_first_convergence_column(self):
        sweep = SweepSpec(SweepAxis('tau1', 0.0, 6 * NS, 0.1 * NS), SweepAxis.single('tau2', 5.5 * NS), 1000, 3)
        grid = initialization_map(sweep, self.device, self.cal)
        self.assertGreater(grid.exact.min(), 0.99)
        self.assertGreater(grid.p_excited.min(), 0.99)

    def test_ground_prep_rows_are_flat(self):
        sweep = SweepSpec(SweepAxis('tau1', 2.6 * NS, 4.4 * NS, 1.8 * NS), SweepAxis('tau2', 0.0, 20 * NS, 0.5 * NS), 1000, 3)
        grid = initialization_map(sweep, self.device, self.cal)
        self.assertEqual(len(grid.axes[0]), 2)
        self.assertGreater(grid.exact.min(), 0.99)

    def test_excited_prep_row_oscillates(self):
        shots = 2000
        sweep = SweepSpec(SweepAxis.single('tau1', 1.7 * NS), SweepAxis('tau2', 0.0, 20 * NS, 0.5 * NS), shots, 9)
        grid = initialization_map(sweep, self.device, self.cal)
        expected = np.sin(self.device.jba.delta_omega * grid.axes[1] / 2) ** 2
        np.testing.assert_allclose(grid.exact[0], expected, atol=1e-9)
        bound = 5 * np.sqrt(expected * (1 - expected) / shots) + 1e-12
        self.assertTrue(np.all(np.abs(grid.p_excited[0] - expected) <= bound + 1.0 / shots))

    def test_convergence_columns(self):
        sweep = SweepSpec(SweepAxis('tau1', 0.0, 6 * NS, 0.5 * NS), SweepAxis('tau2', 0.0, 20 * NS, 0.5 * NS), 20_000, 1)
        grid = initialization_map(sweep, self.device, self.cal)
        columns = convergence_columns(grid)
        self.assertEqual(len(columns), 2)
        self.assertAlmostEqual(columns[0], 5.5 * NS, delta=1e-15)
        self.assertAlmostEqual(columns[1], 16.5 * NS, delta=1e-15)
        self.assertLess(grid.column(11 * NS).min(), 0.01)

    def test_predicted_gaps(self):
        gaps = predicted_convergence_gaps(self.device.jba.delta_omega)
        self.assertAlmostEqual(gaps[0], 5.5 * NS, delta=1e-15)
        self.assertAlmostEqual(gaps[1], 16.5 * NS, delta=1e-15)

    def test_decoherence_lowers_the_converged_column(self):
        sweep = SweepSpec(SweepAxis('tau1', 0.0, 6 * NS, 0.5 * NS), SweepAxis.single('tau2', 5.5 * NS), 100, 3)
        clean = initialization_map(sweep, self.device, self.cal)
        noisy = initialization_map(sweep, self.device, self.cal, DecoherenceParams(t1=2e-6, t2=1e-6))
        self.assertTrue(np.all(noisy.exact < clean.exact))
        self.assertGreater(noisy.exact.min(), 0.98)

    def test_finite_pulses_shift_the_high_branch(self):
        sweep = SweepSpec(SweepAxis.single('tau1', 1.7 * NS), SweepAxis.single('tau2', 5.5 * NS), 100, 3)
        finite = initialization_map(sweep, self.device, self.cal, pulse_mode=PulseMode.FINITE)
        self.assertLess(finite.exact[0, 0], 0.999)
        self.assertGreater(finite.exact[0, 0], 0.9)

    def test_needs_second_axis(self):
        with self.assertRaises(ValidationError):
            initialization_map(SweepSpec(SweepAxis.single('tau1', 1 * NS)), self.device, self.cal)


class DeterminismTest(SimpleTestCase):

    def render(self, workers):
        sweep = SweepSpec(SweepAxis('tau1', 0.0, 3 * NS, 0.25 * NS), SweepAxis('tau2', 0.0, 10 * NS, 0.5 * NS), 300, 77)
        grid = initialization_map(sweep, initialization_device(), default_calibration(), workers=workers)
        out = io.StringIO()
        write_grid_csv(out, grid)
        return out.getvalue()

    def test_worker_count_does_not_change_output(self):
        serial = self.render(1)
        self.assertEqual(serial, self.render(8))
        self.assertEqual(serial, self.render(1))
        lines = serial.split('\n')
        self.assertEqual(lines[0], ','.join(GRID_HEADER))
        self.assertEqual(lines[-1], '')
        self.assertNotIn('\r', serial)

    def test_seed_changes_draws(self):
        device = initialization_device()

        def half(tau1, tau2):
            return build_selective_ramsey(math.pi / 2, 0.0, device)

        a = run_grid(half, np.arange(20), [0.0], 1000, seed=1)
        b = run_grid(half, np.arange(20), [0.0], 1000, seed=2)
        np.testing.assert_array_equal(a.exact, b.exact)
        self.assertFalse(np.array_equal(a.p_excited, b.p_excited))


class ShotScalingTest(SimpleTestCase):

    def spread(self, shots):
        device = initialization_device()
        # a pi/2 prep splits the latch 50/50 and each branch ends with the opposite outcome
        grid = run_grid(
            lambda _, __: build_selective_ramsey(math.pi / 2, 0.0, device),
            np.arange(200), [0.0], shots, seed=shots,
        )
        np.testing.assert_allclose(grid.exact, 0.5, atol=1e-9)
        return float(np.std(grid.p_excited[:, 0]))

    def test_standard_error_scales_with_shots(self):
        for shots in (100, 10_000):
            expected = math.sqrt(0.25 / shots)
            with self.subTest(shots=shots):
                self.assertAlmostEqual(self.spread(shots), expected, delta=0.25 * expected)

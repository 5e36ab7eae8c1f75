"""
Management commands, run configuration files and the run ledger.
"""
import math
import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock

from django.conf import settings
from django.core.management import call_command, load_command_class
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase

from feedback.device import default_device
from feedback.schedule import DriveConvention

from .config import ConfigError, load_config, parse_config
from .models import ExperimentRun
from .utils import recent_runs, record_run

GOLDEN = Path(settings.BASE_DIR) / 'seqlang' / 'golden'


def run_command(name, *args, **kwargs):
    out, err = StringIO(), StringIO()
    call_command(name, *args, stdout=out, stderr=err, **kwargs)
    return out.getvalue(), err.getvalue()


class CommandTestCase(TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def write(self, name, text):
        path = self.dir / name
        path.write_text(text, encoding='utf-8')
        return str(path)

    def assertExitCode(self, code, name, *args, **kwargs):
        with self.assertRaises(CommandError) as ctx:
            run_command(name, *args, **kwargs)
        self.assertEqual(ctx.exception.returncode, code)
        return str(ctx.exception)


class PredictCommandTest(CommandTestCase):

    def test_half_turn_ground_branch(self):
        out, _ = run_command('predict', '--theta1', '180deg')
        ground = next(line for line in out.splitlines() if 'Ground detected' in line)
        self.assertIn('i|e>', ground)
        self.assertIn('Bloch (0, 0, 1)', ground)

    def test_zero_angles_leave_ground_state(self):
        out, _ = run_command('predict', '--theta1', '0', '--theta2', '0')
        for label in ('Ground detected', 'Excited detected'):
            line = next(line for line in out.splitlines() if label in line)
            self.assertIn(': |g>', line)
            self.assertIn('Bloch (0, 0, -1)', line)

    def test_quarter_turn_is_on_the_equator(self):
        out, _ = run_command('predict', '--theta1', '90deg')
        ground = next(line for line in out.splitlines() if 'Ground detected' in line)
        self.assertRegex(ground, r'Bloch \(0, -?1, 0\)')

    def test_malformed_angle(self):
        message = self.assertExitCode(2, 'predict', '--theta1', 'ninety')
        self.assertIn('--theta1', message)
        self.assertExitCode(2, 'predict', '--theta1', '90ns')

    def test_records_run(self):
        run_command('predict', '--theta1', '1.5')
        run = ExperimentRun.objects.get()
        self.assertEqual(run.command, 'predict')
        self.assertIn('ground', run.summary)


class RunCommandTest(CommandTestCase):

    def test_initialization_sequence_ends_excited(self):
        out_path = self.dir / 'shots.csv'
        _, err = run_command(
            'run', str(GOLDEN / 'initialization.seq'), '--shots', '1000', '--seed', '4', '--out', str(out_path),
        )
        lines = out_path.read_text().splitlines()
        self.assertEqual(lines[0], 'shot,outcome,p_excited')
        self.assertEqual(len(lines), 1001)
        self.assertTrue(all(line.endswith(',1') for line in lines[1:]))
        self.assertIn('mean final P(e) = 1', err)

    def test_same_seed_same_bytes(self):
        sequence = self.write('measure.seq', 'pulse x 90deg\nreadout on\nwait 7ns\nmeasure\n')
        first, second = self.dir / 'a.csv', self.dir / 'b.csv'
        run_command('run', sequence, '--shots', '200', '--seed', '11', '--out', str(first), '--no-record')
        run_command('run', sequence, '--shots', '200', '--seed', '11', '--out', str(second), '--no-record')
        self.assertEqual(first.read_bytes(), second.read_bytes())
        self.assertIn(',high,', first.read_text())
        self.assertIn(',low,', first.read_text())

    def test_csv_to_stdout(self):
        out, _ = run_command('run', str(GOLDEN / 'initialization.seq'), '--shots', '3', '--no-record')
        self.assertEqual(out.splitlines()[0], 'shot,outcome,p_excited')
        self.assertEqual(len(out.splitlines()), 4)

    def test_malformed_sequence_reports_position(self):
        sequence = self.write('broken.seq', 'readout on\nwait 7\n')
        message = self.assertExitCode(2, 'run', sequence)
        self.assertTrue(message.startswith(f"{sequence}:2:"))

    def test_lowering_error_reports_position(self):
        sequence = self.write('early.seq', 'wait 1ns\nreadout off\n')
        message = self.assertExitCode(2, 'run', sequence)
        self.assertTrue(message.startswith(f"{sequence}:"))

    def test_missing_files(self):
        self.assertExitCode(2, 'run', str(self.dir / 'nope.seq'))
        self.assertExitCode(2, 'run', str(GOLDEN / 'initialization.seq'), '--config', str(self.dir / 'nope.yaml'))

    def test_invalid_shot_count(self):
        self.assertExitCode(2, 'run', str(GOLDEN / 'initialization.seq'), '--shots', '0')

    def test_ledger_row_and_opt_out(self):
        out_path = self.dir / 'shots.csv'
        run_command('run', str(GOLDEN / 'initialization.seq'), '--shots', '5', '--seed', '9', '--out', str(out_path))
        run = ExperimentRun.objects.get()
        self.assertEqual((run.command, run.seed, run.output_path), ('run', '9', str(out_path)))
        self.assertEqual(run.parameters['shots'], 5)
        run_command('run', str(GOLDEN / 'initialization.seq'), '--shots', '5', '--out', str(out_path), '--no-record')
        self.assertEqual(ExperimentRun.objects.count(), 1)


class ValidateCommandTest(CommandTestCase):

    def test_golden_file(self):
        out, _ = run_command('validate', str(GOLDEN / 'initialization.seq'))
        self.assertIn('OK: 7 events', out)
        self.assertIn('readout window 0: on 0 ns, latch 7 ns', out)
        self.assertIn('selective', out)

    def test_config_overrides_apply(self):
        config = self.write('device.yaml', 'pi_duration_ns: 2\n')
        sequence = self.write('pulse.seq', 'pulse x 180deg\n')
        out, _ = run_command('validate', sequence, '--config', config)
        self.assertIn('ends at 2 ns', out)

    def test_unknown_setting(self):
        sequence = self.write('bad.seq', 'set warp_factor = 9\n')
        message = self.assertExitCode(2, 'validate', sequence)
        self.assertIn(f"{sequence}:1:1", message)


class CalibrateCommandTest(CommandTestCase):

    def test_default_anchors(self):
        out, _ = run_command('calibrate')
        self.assertIn('pi_duration 0.9 ns', out)
        self.assertIn('time_offset 0.8 ns', out)
        self.assertAlmostEqual(ExperimentRun.objects.get().summary['pi_duration_ns'], 0.9, places=9)

    def test_custom_anchors(self):
        out, _ = run_command('calibrate', '--excited', '1ns,3ns', '--ground', '2ns', '--no-record')
        self.assertIn('pi_duration 1 ns', out)

    def test_non_alternating_anchors(self):
        self.assertExitCode(2, 'calibrate', '--excited', '1ns,1.5ns', '--ground', '2ns')


class LatencyCommandTest(CommandTestCase):

    def test_on_chip_total(self):
        out, _ = run_command('latency', '--mode', 'on-chip')
        total = next(line for line in out.splitlines() if line.startswith('total'))
        self.assertIn('12.5 ns', total)

    def test_both_modes_and_csv(self):
        out_path = self.dir / 'latency.csv'
        out, _ = run_command('latency', '--processing', '2us', '--out', str(out_path))
        self.assertIn('faster', out)
        rows = out_path.read_text().splitlines()
        self.assertEqual(rows[0], 'component,delay_ns')
        self.assertIn('off_chip.cable,100', rows)
        self.assertIn('on_chip.total,12.5', rows)
        self.assertGreater(ExperimentRun.objects.get().summary['off_chip_over_on_chip'], 150)

    def test_negative_length(self):
        self.assertExitCode(2, 'latency', '--cable-length', '-3')

    def test_unexpected_failure_is_internal_error(self):
        target = 'experiments.management.commands.latency.Command.run'
        for failure in (RuntimeError('boom'), ZeroDivisionError(), FloatingPointError('overflow')):
            with self.subTest(failure=type(failure).__name__):
                with mock.patch(target, side_effect=failure), self.assertLogs('experiments', 'ERROR'):
                    message = self.assertExitCode(3, 'latency')
                self.assertIn('internal error', message)
        self.assertFalse(ExperimentRun.objects.exists())

    def test_assertion_failure_is_internal_error(self):
        target = 'experiments.management.commands.latency.Command.run'
        with mock.patch(target, side_effect=AssertionError('window order')), self.assertLogs('experiments', 'ERROR'):
            self.assertIn('window order', self.assertExitCode(3, 'latency'))


class GridCommandTest(CommandTestCase):

    def test_init_map_worker_count_is_invisible(self):
        paths = []
        for workers in ('1', '8'):
            path = self.dir / f'map_{workers}.csv'
            run_command(
                'init_map', '--tau1-stop', '2ns', '--tau1-step', '0.5ns', '--tau2-stop', '6ns',
                '--tau2-step', '0.5ns', '--shots', '200', '--seed', '3', '--workers', workers,
                '--out', str(path), '--no-record',
            )
            paths.append(path)
        self.assertEqual(paths[0].read_bytes(), paths[1].read_bytes())
        self.assertTrue(paths[0].read_text().startswith('tau1_ns,tau2_ns,p_excited,shots\n'))

    def test_init_map_reports_convergence(self):
        path = self.dir / 'map.csv'
        _, err = run_command(
            'init_map', '--tau1-step', '0.5ns', '--tau2-step', '0.5ns', '--shots', '20000', '--out', str(path),
        )
        self.assertIn('5.5', err)
        summary = ExperimentRun.objects.get().summary
        self.assertAlmostEqual(summary['convergence_columns_ns'][0], 5.5, places=6)
        self.assertAlmostEqual(summary['predicted_columns_ns'][1], 16.5, places=6)

    def test_init_map_names_its_pulse_mode(self):
        parser = load_command_class('experiments', 'init_map').create_parser('manage.py', 'init_map')
        self.assertIn('instantaneous', ' '.join(parser.format_help().split()))
        _, err = run_command(
            'init_map', '--tau1-start', '1.7ns', '--tau1-stop', '1.7ns', '--tau2-start', '5.5ns',
            '--tau2-stop', '5.5ns', '--shots', '10', '--pulse-mode', 'finite',
        )
        self.assertIn('pulse mode: finite', err)
        self.assertEqual(ExperimentRun.objects.get().summary['pulse_mode'], 'finite')

    def test_init_map_rejects_bad_axis(self):
        self.assertExitCode(2, 'init_map', '--tau1-step', '0ns')
        self.assertExitCode(2, 'init_map', '--tau2-start', '5ns', '--tau2-stop', '1ns')

    def test_ramsey_fringe_summary(self):
        path = self.dir / 'ramsey.csv'
        _, err = run_command('ramsey', '--shots', '2000', '--seed', '1', '--out', str(path))
        self.assertIn('fringe difference', err)
        summary = ExperimentRun.objects.get().summary
        self.assertAlmostEqual(summary['difference_mhz'], 150, delta=1.5)
        rows = path.read_text().splitlines()
        self.assertEqual(len(rows), 1 + 2 * 201)


class RunConfigTest(SimpleTestCase):

    def test_keys_are_applied(self):
        config = parse_config('delta_omega_mhz: 100\nprojection_error: 0.02\ndrive_convention: resonant_with_high\nseed: 5\n')
        self.assertAlmostEqual(config.device.jba.delta_omega, 2 * math.pi * 100e6, delta=1e-3)
        self.assertEqual(config.device.jba.projection_error, 0.02)
        self.assertEqual(config.drive_convention, DriveConvention.RESONANT_WITH_HIGH)
        self.assertEqual(config.seed, 5)

    def test_empty_document_keeps_defaults(self):
        self.assertEqual(parse_config('').device, default_device())

    def test_unknown_key(self):
        with self.assertRaisesMessage(ConfigError, 'warp_factor'):
            parse_config('warp_factor: 9\n')

    def test_syntax_error_has_position(self):
        with self.assertRaises(ConfigError) as ctx:
            parse_config('q_factor: 45\n  bad: [\n')
        self.assertIsNotNone(ctx.exception.position)

    def test_invalid_values(self):
        for text in ('projection_error: 2\n', 'q_factor: fast\n', 'seed: -1\n', 'drive_convention: sideways\n', '- 1\n'):
            with self.subTest(text=text), self.assertRaises(ConfigError):
                parse_config(text)

    def test_shift_curve_is_relative_to_the_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            curve = Path(tmp) / 'curve.txt'
            curve.write_text('0.0 0.0\n1.0 100.0\n')
            path = Path(tmp) / 'device.yaml'
            path.write_text('shift_curve: curve.txt\n')
            config = load_config(path)
        self.assertEqual(len(config.device.jba.shift_curve), 2)
        self.assertEqual(config.source, path)

    def test_sample_configs_load(self):
        for name in ('device.yaml', 'noisy.yaml'):
            with self.subTest(name=name):
                load_config(Path(settings.BASE_DIR) / 'config' / name)


class LedgerTest(TestCase):

    def test_record_and_list(self):
        record_run('latency', summary={'on_chip_total_ns': 12.5})
        record_run('run', seed=2 ** 63 + 1, parameters={'out': Path('x.csv')}, output_path='x.csv')
        self.assertEqual(recent_runs().count(), 2)
        run = recent_runs('run').get()
        self.assertEqual(run.seed, str(2 ** 63 + 1))
        self.assertEqual(run.parameters, {'out': 'x.csv'})
        self.assertIn('run', str(run))

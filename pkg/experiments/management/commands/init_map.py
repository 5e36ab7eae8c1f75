"""
The (tau1, tau2) initialization map: prep width against selective Ramsey gap.
Usage: python manage.py init_map --shots 1000 --workers 8 --out init_map.csv
"""
from experiments.calibration import RabiCalibration, default_calibration
from experiments.decoherence import DecoherenceParams
from experiments.reports import write_grid_csv
from experiments.sweeps import (
    SweepAxis, SweepSpec, convergence_columns, initialization_map, predicted_convergence_gaps,
)
from feedback.device import initialization_device

from ._common import ExperimentCommand, flag_time


class Command(ExperimentCommand):
    help = (
        'Runs the initialization sequence over a grid of prep widths and Ramsey gaps. '
        'Pulses are instantaneous rotations unless --pulse-mode finite is given; finite pulses '
        'accrue phase under the readout shift and move the first converged column below 5.5 ns.'
    )
    uses_seed = True
    uses_shots = True
    uses_pulse_mode = True
    base_device = staticmethod(initialization_device)

    def add_experiment_arguments(self, parser):
        parser.add_argument('--tau1-start', default='0ns')
        parser.add_argument('--tau1-stop', default='6ns')
        parser.add_argument('--tau1-step', default='0.1ns')
        parser.add_argument('--tau2-start', default='0ns')
        parser.add_argument('--tau2-stop', default='20ns')
        parser.add_argument('--tau2-step', default='0.1ns')
        parser.add_argument('--pi-duration', help='Skip the anchor calibration and use this pi pulse length')
        parser.add_argument('--time-offset', default='0ns', help='Prep offset used with --pi-duration')
        parser.add_argument('--threshold', type=float, default=0.99)

    def _axis(self, options, name):
        return SweepAxis(
            name,
            flag_time(f'--{name}-start', options[f'{name}_start']),
            flag_time(f'--{name}-stop', options[f'{name}_stop']),
            flag_time(f'--{name}-step', options[f'{name}_step']),
        )

    def run(self, config, **options):
        seed = self.resolve_seed(options, config)
        sweep = SweepSpec(
            self._axis(options, 'tau1'), self._axis(options, 'tau2'),
            self.check_shots(options['shots']), seed,
        )
        if options.get('pi_duration'):
            cal = RabiCalibration(
                flag_time('--pi-duration', options['pi_duration']),
                flag_time('--time-offset', options['time_offset']),
            )
        else:
            cal = default_calibration()
        grid = initialization_map(
            sweep, config.device, cal, DecoherenceParams.from_device(config.device),
            pulse_mode=options['pulse_mode'], workers=self.resolve_workers(options),
        )
        write_grid_csv(self.output_target(options), grid)

        columns = convergence_columns(grid, options['threshold'])
        predicted = [gap for gap in predicted_convergence_gaps(config.device.jba.delta_omega)
                     if gap <= sweep.axis2.stop]
        shown = ', '.join(f"{tau2 * 1e9:.4g}" for tau2 in columns) or 'none'
        self.stderr.write(f"pulse mode: {options['pulse_mode']}")
        self.stderr.write(f"columns with min P(e) > {options['threshold']}: {shown} ns")
        self.stderr.write(self.style.SUCCESS(
            "predicted convergence gaps: " + ', '.join(f"{gap * 1e9:.4g}" for gap in predicted) + " ns"
        ))
        return options.get('out') or '', {
            'seed': seed,
            'pulse_mode': str(options['pulse_mode']),
            'convergence_columns_ns': [tau2 * 1e9 for tau2 in columns],
            'predicted_columns_ns': [gap * 1e9 for gap in predicted],
            'pi_duration_ns': cal.pi_duration * 1e9,
            'time_offset_ns': cal.time_offset * 1e9,
        }

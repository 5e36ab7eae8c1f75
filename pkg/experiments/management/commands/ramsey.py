"""
Ramsey fringes taken during the readout pulse for pi and 2*pi preparations.
Usage: python manage.py ramsey --gap-stop 20ns --gap-step 0.1ns --shots 10000 --out ramsey.csv
"""
import math

from experiments.fringe import fringe_frequency
from experiments.reports import write_grid_csv
from experiments.sweeps import PrepPulse, SweepAxis, SweepSpec, ramsey_during_readout

from ._common import ExperimentCommand, flag_time

BOTH = 'both'


class Command(ExperimentCommand):
    help = 'Sweeps the Ramsey gap while the readout is latched High (pi prep) or Low (2*pi prep)'
    uses_seed = True
    uses_shots = True
    default_shots = 10_000
    uses_pulse_mode = True

    def add_experiment_arguments(self, parser):
        parser.add_argument('--prep', choices=PrepPulse.values + [BOTH], default=BOTH)
        parser.add_argument('--gap-start', default='0ns')
        parser.add_argument('--gap-stop', default='20ns')
        parser.add_argument('--gap-step', default='0.1ns')

    def run(self, config, **options):
        axis = SweepAxis(
            'gap',
            flag_time('--gap-start', options['gap_start']),
            flag_time('--gap-stop', options['gap_stop']),
            flag_time('--gap-step', options['gap_step']),
        )
        seed = self.resolve_seed(options, config)
        sweep = SweepSpec(axis, None, self.check_shots(options['shots']), seed)
        workers = self.resolve_workers(options)
        preps = list(PrepPulse) if options['prep'] == BOTH else [PrepPulse(options['prep'])]

        grids, frequencies = [], {}
        for prep in preps:
            grid = ramsey_during_readout(prep, sweep, config.device, workers, options['pulse_mode'])
            grids.append(grid)
            if len(axis.values) >= 4:
                frequencies[prep.value] = fringe_frequency(grid.axes[1], grid.p_excited[0])
        write_grid_csv(self.output_target(options), *grids)

        summary = {'seed': seed, 'configured_mhz': abs(config.device.jba.delta_omega) / (2 * math.pi) / 1e6}
        for prep, frequency in frequencies.items():
            self.stderr.write(f"{PrepPulse(prep).label}: fringe {frequency / 1e6:.6g} MHz")
            summary[f"{prep}_fringe_mhz"] = frequency / 1e6
        if len(frequencies) == 2:
            difference = frequencies[PrepPulse.PI_PULSE.value] - frequencies[PrepPulse.TWO_PI_PULSE.value]
            summary['difference_mhz'] = difference / 1e6
            self.stderr.write(self.style.SUCCESS(
                f"fringe difference {difference / 1e6:.6g} MHz "
                f"(configured {summary['configured_mhz']:.6g} MHz)"
            ))
        return options.get('out') or '', summary

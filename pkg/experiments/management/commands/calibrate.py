"""
Fit the Rabi frequency and pulse time offset to initialization-map anchors.
Usage: python manage.py calibrate --excited 1.7ns,3.5ns,5.3ns --ground 2.6ns,4.4ns
"""
import math

from experiments.calibration import EXCITED_ANCHORS_S, GROUND_ANCHORS_S, calibrate_rabi

from ._common import ExperimentCommand, flag_times, seconds_to_ns


def _default(anchors):
    return ','.join(f"{t * 1e9:g}ns" for t in anchors)


class Command(ExperimentCommand):
    help = 'Fits pi_duration and the prep-pulse time offset to excited/ground anchor widths'

    def add_experiment_arguments(self, parser):
        parser.add_argument('--excited', default=_default(EXCITED_ANCHORS_S),
                            help='Comma-separated prep widths where the qubit ends excited')
        parser.add_argument('--ground', default=_default(GROUND_ANCHORS_S),
                            help='Comma-separated prep widths where the qubit ends in the ground state')

    def run(self, config, **options):
        excited = flag_times('--excited', options['excited'])
        ground = flag_times('--ground', options['ground'])
        cal = calibrate_rabi(excited, ground)
        self.stdout.write(self.style.SUCCESS(f"pi_duration {seconds_to_ns(cal.pi_duration)}"))
        self.stdout.write(f"time_offset {seconds_to_ns(cal.time_offset)}")
        self.stdout.write(f"rabi frequency {cal.rabi_omega / (2 * math.pi) / 1e6:.6g} MHz")
        self.stdout.write(f"rms residual {seconds_to_ns(cal.rms_residual)}")
        return '', {
            'pi_duration_ns': cal.pi_duration * 1e9,
            'time_offset_ns': cal.time_offset * 1e9,
            'rms_residual_ns': cal.rms_residual * 1e9,
        }

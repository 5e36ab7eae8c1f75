"""
Parse and lower a pulse sequence file, then print the resulting schedule.
Usage: python manage.py validate sequence.seq [--config device.yaml]
"""
from pathlib import Path

from seqlang.lowering import lower_source

from ._common import ExperimentCommand, seconds_to_ns


class Command(ExperimentCommand):
    help = 'Checks a .seq file and prints its events and readout windows'

    def add_experiment_arguments(self, parser):
        parser.add_argument('sequence', help='Pulse sequence (.seq) file')

    def run(self, config, **options):
        source = Path(options['sequence']).read_text(encoding='utf-8')
        schedule = lower_source(source, config.device)
        for index, event in enumerate(schedule.events):
            marker = ' selective' if event.selective else ''
            self.stdout.write(f"{index:3d}  {event.describe()}{marker}")
        for number, window in enumerate(schedule.windows):
            off = 'open' if window.off_index is None else seconds_to_ns(window.off_time)
            self.stdout.write(
                f"readout window {number}: on {seconds_to_ns(window.on_time)}, "
                f"latch {seconds_to_ns(window.latch_time)}, off {off}"
            )
        self.stdout.write(self.style.SUCCESS(
            f"OK: {len(schedule.events)} events, ends at {seconds_to_ns(schedule.end)}"
        ))
        return '', {'events': len(schedule.events), 'end_ns': schedule.end * 1e9}

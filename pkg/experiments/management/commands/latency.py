"""
Feedback latency budget, on-chip against a room-temperature loop.
Usage: python manage.py latency --mode both --cable-length 20 --processing 2us
"""
from experiments.latency import LatencyMode, LatencyModel, latency_budget, speedup
from experiments.reports import format_latency_table, write_latency_csv
from feedback.device import initialization_device

from ._common import ExperimentCommand, flag_time

BOTH = 'both'


def _mode(text):
    return text.replace('-', '_')


class Command(ExperimentCommand):
    help = 'Prints the latency budget of on-chip and off-chip feedback'
    base_device = staticmethod(initialization_device)

    def add_experiment_arguments(self, parser):
        parser.add_argument('--mode', type=_mode, choices=LatencyMode.values + [BOTH], default=BOTH)
        parser.add_argument('--cable-length', type=float, default=20.0, help='Loop cable length in meters')
        parser.add_argument('--cable-delay', default='5ns', help='Cable delay per meter')
        parser.add_argument('--processing', default='0ns', help='Room-temperature processing delay')

    def run(self, config, **options):
        modes = list(LatencyMode) if options['mode'] == BOTH else [LatencyMode(options['mode'])]
        budgets = [
            latency_budget(LatencyModel.for_device(
                config.device, mode,
                cable_length=options['cable_length'],
                cable_delay_rate=flag_time('--cable-delay', options['cable_delay']),
                processing_delay=flag_time('--processing', options['processing']),
            ))
            for mode in modes
        ]
        self.stdout.write(format_latency_table(*budgets))
        summary = {f"{budget.mode}_total_ns": budget.total * 1e9 for budget in budgets}
        if len(budgets) == 2:
            ratio = speedup(budgets[0], budgets[1])
            summary['off_chip_over_on_chip'] = ratio
            self.stdout.write(self.style.SUCCESS(f"on-chip feedback is {ratio:.4g}x faster"))
        if options.get('out'):
            write_latency_csv(options['out'], *budgets)
        return options.get('out') or '', summary

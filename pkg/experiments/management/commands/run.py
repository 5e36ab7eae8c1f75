"""
Execute a pulse sequence file shot by shot.
Usage: python manage.py run sequence.seq --config device.yaml --shots 1000 --seed 7 --out shots.csv
"""
from pathlib import Path

from experiments.decoherence import DecoherenceParams, decoherence_channel
from experiments.reports import write_shots_csv
from feedback.simulate import run_shots
from qubit.core import PureState
from readout.jba import Outcome
from seqlang.lowering import lower_source

from ._common import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Runs a .seq file for N shots and writes one CSV row per shot'
    uses_seed = True
    uses_shots = True
    uses_pulse_mode = True

    def add_experiment_arguments(self, parser):
        parser.add_argument('sequence', help='Pulse sequence (.seq) file')
        parser.add_argument('--initial', choices=['g', 'e'], default='g', help='Initial basis state')

    def run(self, config, **options):
        shots = self.check_shots(options['shots'])
        seed = self.resolve_seed(options, config)
        source = Path(options['sequence']).read_text(encoding='utf-8')
        schedule = lower_source(source, config.device)
        channel = decoherence_channel(DecoherenceParams.from_device(schedule.device))

        results = run_shots(
            schedule, PureState.basis(options['initial']), shots, seed,
            pulse_mode=options['pulse_mode'], channel=channel,
        )
        write_shots_csv(self.output_target(options), results)

        reported = [r.record for r in results if r.record is not None]
        p_high = sum(r.outcome == Outcome.HIGH for r in reported) / len(reported) if reported else 0.0
        mean_excited = sum(float(r.final_state.p_excited) for r in results) / shots
        self.stderr.write(f"{shots} shots, P(High) = {p_high:.6g}, mean final P(e) = {mean_excited:.6g}")
        return options.get('out') or '', {'seed': seed, 'p_high': p_high, 'mean_p_excited': mean_excited}

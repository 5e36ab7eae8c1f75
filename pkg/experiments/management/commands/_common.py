"""
Shared option handling and error translation for the experiment commands.

Exit codes: 0 success, 2 input error, 3 internal invariant violation.
"""
import logging
from pathlib import Path

from django.conf import settings
from django.core.exceptions import ImproperlyConfigured, ValidationError
from django.core.management.base import BaseCommand, CommandError

from experiments.config import ConfigError, RunConfig, load_config
from experiments.utils import record_run
from feedback.device import default_device
from feedback.schedule import ScheduleError
from feedback.simulate import PulseMode
from qubit.exceptions import InvalidArgument
from seqlang.errors import ParseError
from seqlang.parser import parse_angle, parse_time

logger = logging.getLogger(__name__)

INPUT_ERROR = 2
INTERNAL_ERROR = 3


def _message(exc):
    if isinstance(exc, ValidationError):
        return '; '.join(exc.messages)
    return str(exc)


def flag_value(parse, flag, text):
    """Parse one flag literal, reporting failures against the flag name."""
    try:
        return parse(text)
    except ParseError as exc:
        raise CommandError(f"{flag} {text!r}: {exc.message}", returncode=INPUT_ERROR) from exc


def flag_time(flag, text):
    return flag_value(parse_time, flag, text)


def flag_angle(flag, text):
    return flag_value(parse_angle, flag, text)


def flag_times(flag, text):
    return [flag_time(flag, item.strip()) for item in text.split(',') if item.strip()]


def seconds_to_ns(value):
    return f"{value * 1e9:.6g} ns"


class ExperimentCommand(BaseCommand):
    """
    Base for commands that load a config, run a computation and write output.

    Subclasses implement ``run(config, **options)`` and return
    (output_path, summary) for the run ledger.
    """
    uses_seed = False
    uses_shots = False
    default_shots = 1000
    uses_pulse_mode = False
    base_device = staticmethod(default_device)

    def add_arguments(self, parser):
        parser.add_argument('--config', help='YAML file of unit-suffixed device keys')
        parser.add_argument('--out', help='Output file (stdout when omitted)')
        parser.add_argument('--no-record', action='store_true', help='Do not add the run to the ledger')
        if self.uses_seed:
            parser.add_argument('--seed', type=int, help='Seed for every random draw of the run')
            parser.add_argument('--workers', type=int, default=None, help='Worker threads for grid cells')
        if self.uses_shots:
            parser.add_argument('--shots', type=int, default=self.default_shots)
        if self.uses_pulse_mode:
            parser.add_argument(
                '--pulse-mode', choices=PulseMode.values, default=PulseMode.INSTANTANEOUS.value,
                help='Rotation model for drive pulses (default: instantaneous)',
            )
        self.add_experiment_arguments(parser)

    def add_experiment_arguments(self, parser):
        pass

    def load_run_config(self, path):
        if path is None:
            return RunConfig(self.base_device())
        try:
            return load_config(path, device=self.base_device())
        except ConfigError as exc:
            where = f"{path}:{exc.line}:{exc.column}" if exc.position else str(path)
            raise CommandError(f"{where}: {_message(exc)}", returncode=INPUT_ERROR) from exc

    def resolve_seed(self, options, config):
        if options.get('seed') is not None:
            seed = options['seed']
        elif config.seed is not None:
            seed = config.seed
        else:
            seed = getattr(settings, 'FEEDBACK_LAB', {}).get('SEED', 0)
        if not 0 <= seed < 2 ** 64:
            raise CommandError(f"--seed must lie in [0, 2**64), got {seed}", returncode=INPUT_ERROR)
        return seed

    def resolve_workers(self, options):
        workers = options.get('workers')
        if workers is None:
            workers = getattr(settings, 'FEEDBACK_LAB', {}).get('WORKERS', 1)
        if workers < 1:
            raise CommandError(f"--workers must be at least 1, got {workers}", returncode=INPUT_ERROR)
        return workers

    def check_shots(self, shots):
        if shots < 1:
            raise CommandError(f"--shots must be positive, got {shots}", returncode=INPUT_ERROR)
        return shots

    def output_target(self, options):
        return Path(options['out']) if options.get('out') else self.stdout

    def handle(self, *args, **options):
        try:
            config = self.load_run_config(options.get('config'))
            output_path, summary = self.run(config, **{k: v for k, v in options.items() if k != 'config'})
        except CommandError:
            raise
        except ParseError as exc:
            source = options.get('sequence') or '<input>'
            raise CommandError(exc.located(source), returncode=INPUT_ERROR) from exc
        except ScheduleError as exc:
            logger.error("schedule invariant broken after construction: %s", exc)
            raise CommandError(f"internal error: {_message(exc)}", returncode=INTERNAL_ERROR) from exc
        except (ValidationError, ImproperlyConfigured, InvalidArgument) as exc:
            raise CommandError(_message(exc), returncode=INPUT_ERROR) from exc
        except OSError as exc:
            raise CommandError(f"{exc.filename or 'output'}: {exc.strerror or exc}", returncode=INPUT_ERROR) from exc
        except AssertionError as exc:
            logger.error("internal invariant violated", exc_info=True)
            raise CommandError(f"internal error: {exc}", returncode=INTERNAL_ERROR) from exc
        except Exception as exc:
            logger.exception("unexpected failure in %s", self.command_name)
            raise CommandError(f"internal error: {exc!r}", returncode=INTERNAL_ERROR) from exc

        if not options.get('no_record'):
            parameters = {
                key: value for key, value in options.items()
                if key not in ('verbosity', 'settings', 'pythonpath', 'traceback', 'no_color',
                               'force_color', 'skip_checks', 'no_record')
            }
            record_run(self.command_name, summary.get('seed'), parameters, output_path or '', summary)
        if output_path:
            self.stderr.write(self.style.SUCCESS(f"Wrote {output_path}"))

    @property
    def command_name(self):
        return self.__module__.rsplit('.', 1)[-1]

    def run(self, config, **options):
        raise NotImplementedError('subclasses of ExperimentCommand must provide a run() method')

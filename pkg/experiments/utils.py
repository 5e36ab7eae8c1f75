"""
Run ledger helpers.
"""
import logging

from django.db import DatabaseError, transaction

from .models import ExperimentRun

logger = logging.getLogger(__name__)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    if hasattr(value, 'item'):
        return value.item()
    return str(value)


def record_run(command, seed=None, parameters=None, output_path='', summary=None):
    """
    Store one ExperimentRun row.

    Args:
        command: management command name
        seed: seed the run used, or None for deterministic commands
        parameters: resolved options (paths and enums are stored as strings)
        output_path: file the run wrote, '' for stdout
        summary: headline results

    Returns:
        The saved ExperimentRun, or None when the ledger table is unavailable.
    """
    try:
        with transaction.atomic():
            run = ExperimentRun.objects.create(
                command=command,
                seed='' if seed is None else str(seed),
                parameters=_jsonable(parameters or {}),
                output_path=str(output_path or ''),
                summary=_jsonable(summary or {}),
            )
    except DatabaseError as exc:
        logger.warning("run of %s not recorded: %s", command, exc)
        return None
    logger.debug("recorded %s run %s", command, run.pk)
    return run


def recent_runs(command=None, limit=10):
    runs = ExperimentRun.objects.all()
    if command:
        runs = runs.filter(command=command)
    return runs.order_by('-created_at')[:limit]

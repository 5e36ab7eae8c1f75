"""
Run configuration files.

A config file is a flat YAML mapping of unit-suffixed device keys (the
same keys ``set`` accepts in a sequence file), plus ``drive_convention``
and ``seed``::

    delta_omega_mhz: 90.9091
    projection_error: 0.02
    t1_us: 5
    shift_curve: curves/device_a.txt   # relative to the config file
    seed: 42
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import yaml
from django.core.exceptions import ValidationError

from feedback.device import DEVICE_KEYS, DeviceParams, apply_overrides, default_device
from feedback.schedule import DriveConvention

logger = logging.getLogger(__name__)

RUN_KEYS = {'drive_convention', 'seed'}


class ConfigError(ValidationError):
    """Invalid config file; ``line``/``column`` are 1-based when known."""

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column

    @property
    def position(self):
        return None if self.line is None else (self.line, self.column)


@dataclass(frozen=True)
class RunConfig:
    device: DeviceParams
    drive_convention: DriveConvention = DriveConvention.RESONANT_WITH_LOW
    seed: Optional[int] = None
    source: Optional[Path] = None


def parse_config(text, base_dir=None, device=None):
    try:
        mapping = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, 'problem_mark', None)
        problem = getattr(exc, 'problem', None) or str(exc)
        if mark is None:
            raise ConfigError(problem) from exc
        raise ConfigError(problem, mark.line + 1, mark.column + 1) from exc
    if mapping is None:
        mapping = {}
    if not isinstance(mapping, dict):
        raise ConfigError("config file must be a mapping of key: value pairs")

    unknown = sorted(str(key) for key in mapping if key not in DEVICE_KEYS and key not in RUN_KEYS)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")

    convention = mapping.get('drive_convention', DriveConvention.RESONANT_WITH_LOW)
    if convention not in DriveConvention.values:
        raise ConfigError(f"drive_convention must be one of {', '.join(DriveConvention.values)}")
    seed = mapping.get('seed')
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2 ** 64):
        raise ConfigError(f"seed must be an integer in [0, 2**64), got {seed!r}")

    overrides = {key: value for key, value in mapping.items() if key in DEVICE_KEYS}
    if 'shift_curve' in overrides and base_dir is not None:
        overrides['shift_curve'] = Path(base_dir) / str(overrides['shift_curve'])
    base = device if device is not None else default_device()
    try:
        configured = apply_overrides(base, overrides)
    except ValidationError as exc:
        raise ConfigError(exc.messages[0] if exc.messages else str(exc)) from exc
    logger.debug("config keys: %s", sorted(mapping))
    return RunConfig(configured, DriveConvention(convention), seed)


def load_config(path, device=None):
    """RunConfig from a YAML file; a missing file is a ConfigError."""
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc.strerror or exc}") from exc
    config = parse_config(text, base_dir=path.parent, device=device)
    return RunConfig(config.device, config.drive_convention, config.seed, path)

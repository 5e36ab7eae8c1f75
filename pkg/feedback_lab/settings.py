"""
Django settings for feedback_lab project.

The project has no HTTP surface: it is driven through management commands
(``python manage.py predict``, ``run``, ``ramsey``, ``init_map``, ...).

For more information on this file, see
https://docs.djangoproject.com/en/4.2/topics/settings/
"""
import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# No sessions or signing are used; the key only satisfies Django's startup checks.
SECRET_KEY = os.environ.get('FEEDBACK_LAB_SECRET_KEY', 'feedback-lab-local-only')

DEBUG = False

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'qubit',
    'dynamics',
    'readout',
    'feedback',
    'seqlang',
    'experiments',
]


# Database
# The run ledger (experiments.ExperimentRun) is the only persisted data.

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': os.environ.get('FEEDBACK_LAB_DB', BASE_DIR / 'db.sqlite3'),
        'OPTIONS': {
            'timeout': 20,  # Wait up to 20 seconds for database lock
        },
    }
}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

USE_TZ = True

TIME_ZONE = 'UTC'


# Logging

LOG_LEVEL = os.environ.get('FEEDBACK_LAB_LOG_LEVEL', 'WARNING').upper()

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        app: {'handlers': ['console'], 'level': LOG_LEVEL, 'propagate': False}
        for app in ('qubit', 'dynamics', 'readout', 'feedback', 'seqlang', 'experiments')
    },
}


# Simulator defaults
# Frequencies are cyclic (Hz) here; the code converts to rad/s.

FEEDBACK_LAB = {
    'OMEGA_QUBIT_HZ': 3.4e9,         # operating point near degeneracy
    'QUBIT_GAP_HZ': 3.3e9,
    'PI_DURATION_S': 0.9e-9,         # Rabi calibration: Omega = pi / pi_duration
    'F_JBA_HZ': 6.5e9,
    'Q_JBA': 45.5,                   # tau_jba = Q / f = 7 ns
    'DELTA_HIGH_HZ': 150e6,          # shift difference read from the Ramsey fringes
    'DELTA_LOW_HZ': 0.0,
    'INIT_DELTA_OMEGA_HZ': 1.0 / (2 * 5.5e-9),   # tau_pi = pi / delta_omega = 5.5 ns
    'TIME_OFFSET_S': 0.8e-9,         # Rabi calibration offset t0
    'INTEGRATOR_STEP_S': 1e-12,
    'CABLE_DELAY_S_PER_M': 5e-9,
    'SEED': 20240101,
    'WORKERS': 1,
}

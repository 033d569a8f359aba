"""
Django settings for pgmkit project.

For more information on this file, see
https://docs.djangoproject.com/en/4.2/topics/settings/

For the full list of settings and their values, see
https://docs.djangoproject.com/en/4.2/ref/settings/
"""

import os

# Build paths inside the project like this: os.path.join(BASE_DIR, ...)
BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.getenv(
    'PGMKIT_SECRET_KEY',
    'pgmkit-local-only-8e1f0c2b7d4a4f6c9a35d1e0b2c7f9a1'
)

DEBUG = False


# Application definition

INSTALLED_APPS = [
    'core.apps.CoreConfig',
    'mask_io.apps.MaskIoConfig',
    'pgm_core.apps.PgmCoreConfig',
    'frequency.apps.FrequencyConfig',
    'losses.apps.LossesConfig',
    'metrics.apps.MetricsConfig',
    'cli.apps.CliConfig',
]

# Инструментарий работает только с файлами, база данных не нужна.
DATABASES = {}


# Logging
# https://docs.djangoproject.com/en/4.2/topics/logging/

LOG_LEVEL = os.getenv('PGMKIT_LOG_LEVEL', 'WARNING').upper()

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        name: {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        }
        for name in (
            'core', 'mask_io', 'pgm_core', 'frequency',
            'losses', 'metrics', 'cli',
        )
    },
}


# Internationalization
# https://docs.djangoproject.com/en/4.2/topics/i18n/

LANGUAGE_CODE = 'ru'

USE_I18N = True


# Photometric Gaussian Mixture

PGM_DEFAULT_LAMBDAS = [1.0, 5.0, 10.0, 20.0]
PGM_TRUNCATION_FACTOR = 4
PGM_FFT_MEMORY_BUDGET = 512 * 1024 * 1024
PGM_DEFAULT_NORMALIZATION = 'max_one'


# Frequency gain (Butterworth high-pass)

FAN_RHO0 = 0.25
FAN_SHARPNESS = 2.0
FAN_ALPHA = 1.0


# Losses

LOSS_WEIGHTS = {
    'cls': 0.2,
    'obj': 0.2,
    'mask': 0.2,
    'dice': 0.2,
    'gh': 0.2,
}
LOSS_CLAMP_EPS = 1e-7
DICE_SMOOTH = 1e-6


# Evaluation

EVAL_IOU_THRESHOLDS = [round(0.5 + 0.05 * i, 2) for i in range(10)]
EVAL_RECALL_POINTS = 101
EVAL_AREA_RANGES = {
    'small': (0, 32 ** 2),
    'medium': (32 ** 2, 96 ** 2),
    'large': (96 ** 2, float('inf')),
}
EVAL_MAX_DETECTIONS = 100


# Benchmark

BENCH_DEFAULT_SIZE = (640, 480)
BENCH_REPEATS = 5
BENCH_SEED = 20240601
BENCH_EXACT_PIXEL_BUDGET = 128 * 128


# Worker pool

PGMKIT_WORKERS = int(os.getenv('PGMKIT_THREADS') or os.cpu_count() or 1)

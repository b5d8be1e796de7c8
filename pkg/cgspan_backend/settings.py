"""
Django settings for cgspan_backend project.

The project has no web surface: Django provides the management commands,
logging configuration and test runner around the cg_app library.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/4.2/ref/settings/
"""

from pathlib import Path

from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# No sessions or auth are used; the default key is not a secret.
SECRET_KEY = config('SECRET_KEY', default='cgspan-development-key-not-secret')

DEBUG = config('CGSPAN_DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',
    'rest_framework',
    'cg_app',
]


# Database
# Only needed by Django itself; the miner reads and writes JSON files.

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}


# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# cgSpan settings

# Default process count for `mine` and `generate` when --workers is omitted
CGSPAN_WORKERS = config('CGSPAN_WORKERS', default=1, cast=int)

CGSPAN_LOG_LEVEL = config('CGSPAN_LOG_LEVEL', default='WARNING').upper()

# Runs the full-size recall test (200 generated graphs of about 30 nodes)
CGSPAN_SLOW_TESTS = config('CGSPAN_SLOW_TESTS', default=False, cast=bool)


# Logging

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '%(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'cg_app': {
            'handlers': ['console'],
            'level': CGSPAN_LOG_LEVEL,
            'propagate': False,
        },
    },
}

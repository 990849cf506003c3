"""
Django settings for the optdesign project.

Generated by 'django-admin startproject' using Django 5.2.4 and trimmed to
what a database-less numerical service needs.

For more information on this file, see
https://docs.djangoproject.com/en/5.2/topics/settings/

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

from pathlib import Path

from decouple import config, Csv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# Quick-start development settings - unsuitable for production
# See https://docs.djangoproject.com/en/5.2/howto/deployment/checklist/

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = config(
    'DJANGO_SECRET_KEY',
    default='django-insecure-optdesign-local-development-key',
)

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = config('DJANGO_DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = config('DJANGO_ALLOWED_HOSTS', default='localhost,127.0.0.1,testserver', cast=Csv())


# Application definition

INSTALLED_APPS = [
    "django.contrib.contenttypes",
    "django.contrib.auth",
    "rest_framework",
    "core",
    "model_core",
    "criteria",
    "transforms",
    "invariance",
    "optimize",
    "cli",
    "api",
]

MIDDLEWARE = [
    "django.middleware.security.SecurityMiddleware",
    "django.middleware.common.CommonMiddleware",
]

ROOT_URLCONF = "optdesign.urls"

TEMPLATES = []

WSGI_APPLICATION = "optdesign.wsgi.application"


# No persistence: every operation is a pure function of its inputs.
DATABASES = {}

# Django REST Framework
REST_FRAMEWORK = {
    'DEFAULT_AUTHENTICATION_CLASSES': [],
    'DEFAULT_PERMISSION_CLASSES': [
        'rest_framework.permissions.AllowAny',
    ],
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
    ],
    'DEFAULT_PARSER_CLASSES': [
        'rest_framework.parsers.JSONParser',
    ],
    'UNAUTHENTICATED_USER': None,
}


# Numerical defaults for design computations
# Every entry can be overridden through the environment (or a .env file).

OPTDESIGN = {
    # Gamma shape parameter; only a factor of the information matrix.
    'KAPPA': config('OPTDESIGN_KAPPA', default=1.0, cast=float),
    # Gauss-Legendre nodes per coordinate for continuous uniform weighting.
    'QUADRATURE_ORDER': config('OPTDESIGN_QUADRATURE_ORDER', default=32, cast=int),
    'MAX_ITERS': config('OPTDESIGN_MAX_ITERS', default=10000, cast=int),
    'WEIGHT_TOL': config('OPTDESIGN_WEIGHT_TOL', default=1e-10, cast=float),
    'SENSITIVITY_TOL': config('OPTDESIGN_SENSITIVITY_TOL', default=1e-6, cast=float),
    'PRUNE_THRESHOLD': config('OPTDESIGN_PRUNE_THRESHOLD', default=1e-8, cast=float),
    'CHECK_GRID_POINTS': config('OPTDESIGN_CHECK_GRID_POINTS', default=101, cast=int),
    'CHECK_GRID_CAP': config('OPTDESIGN_CHECK_GRID_CAP', default=10201, cast=int),
    'POSITIVITY_GRID_POINTS': config('OPTDESIGN_POSITIVITY_GRID_POINTS', default=16, cast=int),
    'POSITIVITY_GRID_CAP': config('OPTDESIGN_POSITIVITY_GRID_CAP', default=65536, cast=int),
    'MAX_GROUP_SIZE': config('OPTDESIGN_MAX_GROUP_SIZE', default=64, cast=int),
    'MAX_AUGMENTATIONS': config('OPTDESIGN_MAX_AUGMENTATIONS', default=50, cast=int),
    'GOLDEN_TOL': config('OPTDESIGN_GOLDEN_TOL', default=1e-8, cast=float),
    'SEED': config('OPTDESIGN_SEED', default=20240101, cast=int),
}


# Logging

LOG_LEVEL = config('OPTDESIGN_LOG_LEVEL', default='WARNING')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        name: {'handlers': ['console'], 'level': LOG_LEVEL, 'propagate': False}
        for name in (
            'core', 'model_core', 'criteria', 'transforms',
            'invariance', 'optimize', 'cli', 'api',
        )
    },
}


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = False

USE_TZ = True


# Default primary key field type
# https://docs.djangoproject.com/en/5.2/ref/settings/#default-auto-field

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

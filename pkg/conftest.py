"""Configure Django before pytest collects the app test modules."""

import os

import django


os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'optdesign.settings')
django.setup()


def pytest_configure(config):
    from django.test.utils import setup_test_environment

    setup_test_environment()

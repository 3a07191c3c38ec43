import pytest


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: timing and scaling checks that take seconds")

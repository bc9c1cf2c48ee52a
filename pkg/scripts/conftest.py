"""
Shared pytest configuration for the scripts package.
"""

import logging

import pytest

from scripts.numeric import QuadratureOptions


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: numeric searches and high-order exact benchmarks")


@pytest.fixture(autouse=True)
def _quiet_library_logs(caplog):
    caplog.set_level(logging.WARNING, logger="scripts")


@pytest.fixture
def opts():
    """Default quadrature options, independent of BELLSHAPE_PRECISION."""
    return QuadratureOptions()

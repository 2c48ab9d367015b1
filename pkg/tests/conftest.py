from __future__ import annotations

import sys

import pytest

from behavdt import Dataset, generate_synthetic
from helpers import bundled_spec, meeting_dataset


@pytest.fixture
def meeting() -> Dataset:
    return meeting_dataset()


@pytest.fixture(scope="session")
def call_data() -> Dataset:
    return generate_synthetic(bundled_spec("call_tree.yaml"))


@pytest.fixture(scope="session")
def acceptance_data() -> Dataset:
    return generate_synthetic(bundled_spec("acceptance.yaml"))


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is not None and module.RESULTS:
        RESULTS = module.RESULTS
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])

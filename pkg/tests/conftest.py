import sys

import pytest

from craftplan import _kernels
from craftplan.knowledge.similarity import LexicalSimilarity
from craftplan.textworld import load_spec


@pytest.fixture(params=sorted(_kernels.backends()))
def backend(request, monkeypatch):
    """Run the test once per importable kernel implementation."""
    impl = _kernels.backends()[request.param]
    for name in ("aggregate", "reachable", "trigram_cosine"):
        monkeypatch.setattr(_kernels, name, getattr(impl, name))
    return request.param


@pytest.fixture(scope="session")
def vanilla():
    return load_spec()


@pytest.fixture
def sim():
    return LexicalSimilarity()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.VERDICTS):
        terminalreporter.write_line(mod.VERDICTS[n])

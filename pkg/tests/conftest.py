import contextlib

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("spintorsion", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("spintorsion")

_CRITERIA: dict[int, str] = {}


class _Criterion:
    def __init__(self, num, title):
        self.num, self.title = num, title
        self.failures = []
        self.details = []

    def check(self, ok, what):
        (self.details if ok else self.failures).append(what)


@pytest.fixture
def criterion():
    """Context manager recording one pass/fail line per acceptance criterion."""

    @contextlib.contextmanager
    def _open(num, title):
        c = _Criterion(num, title)
        try:
            yield c
        except Exception as exc:  # noqa: BLE001 - any crash is a failed criterion
            c.failures.append(f"{type(exc).__name__}: {exc}")
        verdict = "PASS" if not c.failures else "FAIL"
        line = f"[{verdict}] criterion {num:>2}: {title}"
        if c.failures:
            line += " | " + "; ".join(c.failures[:3])
        _CRITERIA[num] = line
        print(line)
        assert not c.failures, line

    return _open


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for num in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[num])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)

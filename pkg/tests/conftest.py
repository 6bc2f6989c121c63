import time
from contextlib import contextmanager

import pytest

from uiroutines.uilog import ContextSchema, NormalizedUI, sample_path

_ACCEPTANCE: list[tuple[str, bool, str]] = []

WEB = "Web"


def key(ui_type, label):
    return NormalizedUI(ui_type, (("Application", WEB), ("Element Label", label))).key


# the five normalized UIs of the worked example
N = key("Click button", "New Record")
F = key("Edit field", "Full Name")
D = key("Edit field", "Date")
P = key("Edit field", "Phone")
S = key("Click button", "Submit")
EXAMPLE = [N, F, D, P, S, N, D, P, F, S]


@pytest.fixture
def worked_example_text():
    return sample_path("worked_example.csv").read_text(encoding="utf-8")


@pytest.fixture
def worked_example_schema():
    return ContextSchema.loads(sample_path("worked_example_config.json").read_text(encoding="utf-8"))


@pytest.fixture
def criterion():
    """``with criterion(name) as note:`` records PASS, or FAIL with the first error line."""

    @contextmanager
    def record(name):
        note = {"detail": ""}
        t0 = time.perf_counter()
        try:
            yield note
        except BaseException as exc:
            first = (str(exc).splitlines() or [""])[0]
            _ACCEPTANCE.append((name, False, f"{type(exc).__name__}: {first}"[:160]))
            raise
        _ACCEPTANCE.append((name, True, f"{note['detail']} ({time.perf_counter() - t0:.2f}s)"))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")

import pytest

_RESULTS = []


class _Criterion:
    def __init__(self, number, title):
        self.number = number
        self.title = title
        self.details = []

    def note(self, text):
        self.details.append(str(text))

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        _RESULTS.append((self.number, self.title, exc_type is None, "; ".join(self.details)))
        return False


@pytest.fixture
def criterion():
    """Context manager recording one acceptance criterion's outcome."""
    return _Criterion


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, details in sorted(_RESULTS, key=lambda r: r[0]):
        line = f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}"
        if details:
            line += f"  ({details})"
        terminalreporter.write_line(line)

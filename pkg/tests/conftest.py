import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("qrc", deadline=None, max_examples=40)
settings.load_profile("qrc")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_complex(rng, rows, cols):
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))


def random_hermitian(rng, n):
    A = random_complex(rng, n, n)
    return (A + A.conj().T) / 2


def random_density(rng, n, rank=None):
    A = random_complex(rng, n, rank or n)
    rho = A @ A.conj().T
    return rho / np.trace(rho).real


# acceptance reporting: one line per criterion in the terminal summary

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): numbered acceptance criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = _ACCEPTANCE_MARKS.get(report.nodeid)
    if marker is not None:
        number, title = marker
        prev = _ACCEPTANCE.get(number, (title, True))
        _ACCEPTANCE[number] = (title, prev[1] and report.outcome == "passed")


_ACCEPTANCE_MARKS = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("acceptance")
        if m is not None:
            _ACCEPTANCE_MARKS[item.nodeid] = tuple(m.args)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, ok = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}")

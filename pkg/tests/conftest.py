import functools
from collections import OrderedDict

import mpmath
import pytest

from crosspoly.critline import all_roots

_RESULTS: "OrderedDict[str, list]" = OrderedDict()


def pytest_addoption(parser):
    parser.addoption("--slow", action="store_true", default=False,
                     help="run the long reproduction cases (d > 300 exact roots)")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running reproduction runs")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--slow"):
        return
    skip = pytest.mark.skip(reason="long-running; enable with --slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def record(criterion: str, ok: bool, detail: str = "") -> None:
    _RESULTS.setdefault(criterion, []).append((bool(ok), detail))


@pytest.fixture
def acceptance():
    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_RESULTS, key=lambda c: (int("".join(ch for ch in c if ch.isdigit()) or 0), c)):
        parts = _RESULTS[crit]
        status = "PASS" if all(ok for ok, _ in parts) else "FAIL"
        detail = "; ".join(d for _, d in parts if d)
        terminalreporter.write_line(f"criterion {crit}: {status}  {detail}")


@functools.lru_cache(maxsize=None)
def cached_roots(d: int, bits: int = 128):
    return all_roots(d, bits)


@pytest.fixture(autouse=True)
def _fresh_precision():
    saved = mpmath.mp.prec
    yield
    mpmath.mp.prec = saved

import struct

import numpy as np
import pytest

from atomsim import Trace


def pcap_bytes(records, magic=0xA1B2C3D4, order="<"):
    """Hand-assembled libpcap file; ``records`` holds (incl_len, orig_len)."""
    out = struct.pack(order + "IHHiIII", magic, 2, 4, 0, 0, 65535, 1)
    for i, (incl, orig) in enumerate(records):
        out += struct.pack(order + "IIII", 1000 + i, 500, incl, orig)
        out += bytes([0xAB]) * incl
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_trace(rng, n_max=500, lo=64, hi=1518):
    n = int(rng.integers(1, n_max + 1))
    return Trace(rng.integers(lo, hi + 1, size=n))


# --- acceptance report -------------------------------------------------------

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call" and report.passed:
        return
    number, title = marker.args
    ok = report.passed and _CRITERIA.get(number, (None, True))[1]
    _CRITERIA[number] = (title, ok)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok = _CRITERIA[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {title}")

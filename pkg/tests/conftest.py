import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from monobayes.model import Edge, MonotoneSign, QualitativeModel, Variable

settings.register_profile("default", deadline=None, max_examples=100,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")
    config.addinivalue_line("markers", "slow: takes more than a few seconds")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when != "call":
        return
    detail = dict(item.user_properties).get("detail", "")
    status = "PASS" if rep.passed else "FAIL"
    _ACCEPTANCE[marker.args[0]] = (status, detail)
    line = f"ACCEPTANCE {marker.args[0]:>2} {status}  {item.name}  {detail}"
    reporter = item.config.pluginmanager.get_plugin("terminalreporter")
    if reporter is not None:
        reporter.write_line("")
        reporter.write_line(line)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        status, detail = _ACCEPTANCE[n]
        terminalreporter.line(f"criterion {n:>2}: {status}  {detail}")


@pytest.fixture
def detail(record_property):
    """Attach a one-line summary to the acceptance report of the calling test."""
    def _set(text: str):
        record_property("detail", text)
    return _set


def make_model(cards: dict[str, int], edges, cls: str, name: str = "t") -> QualitativeModel:
    """Compact builder: ``edges`` is a list of ``(parent, child, sign)`` triples."""
    return QualitativeModel(
        tuple(Variable(n, c) for n, c in cards.items()),
        tuple(Edge(p, c, MonotoneSign.parse(s)) for p, c, s in edges),
        cls, name,
    ).check()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

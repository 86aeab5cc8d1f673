import pytest

from ppk import kernels
from ppk.taxonomy import default_taxonomy

BACKENDS = [kernels.python_backend]
if kernels.compiled_backend is not None:
    BACKENDS.append(kernels.compiled_backend)


@pytest.fixture
def taxonomy():
    return default_taxonomy()


@pytest.fixture(params=BACKENDS, ids=lambda b: b.__name__.rsplit(".", 1)[-1])
def backend(request):
    return request.param


_acceptance: list[tuple[str, str, float]] = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "acceptance" in report.keywords:
        doc = getattr(report, "criterion", None) or report.nodeid.rsplit("::", 1)[-1]
        if report.nodeid.endswith("]"):
            doc += f" [{report.nodeid.rsplit('[', 1)[-1]}"
        _acceptance.append((report.outcome.upper(), doc, report.duration))
    elif report.when == "setup" and report.outcome != "passed" and "acceptance" in report.keywords:
        _acceptance.append((report.outcome.upper(), report.nodeid.rsplit("::", 1)[-1], 0.0))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker:
        rep.criterion = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for outcome, doc, dur in _acceptance:
        terminalreporter.write_line(f"{outcome:<6} {doc}  ({dur:.2f}s)")

import pytest

from weiltrace.zeros import compute_zeros


@pytest.fixture(scope="session")
def zeta_zeros():
    return compute_zeros("zeta", 1000.0)


@pytest.fixture(scope="session")
def zeta_zeros_200(zeta_zeros):
    return zeta_zeros.below(200.0)


@pytest.fixture(scope="session")
def dirichlet_zeros():
    return {label: compute_zeros(f"dirichlet:{label}", 200.0) for label in ("3.1", "4.1")}


ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture(scope="session")
def acceptance_log(request):
    return request.config.stash.setdefault(ACCEPTANCE, {})


def pytest_terminal_summary(terminalreporter, config):
    log = config.stash.get(ACCEPTANCE, {})
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(log):
        ok, detail = log[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")

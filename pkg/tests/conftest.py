import pytest

from rotcyl import GeneratingParams, SolverConfig, shoot_closed_curve
from rotcyl.verify import CORPUS_SOLVED, builtin_corpus


@pytest.fixture(scope="session")
def config():
    return SolverConfig()


@pytest.fixture(scope="session")
def corpus(config):
    return builtin_corpus(config)


@pytest.fixture(scope="session")
def peanut(config):
    """Two-fold non-circular closed curve (a=1, b=-0.5), finely sampled."""
    a, b, k, bracket = CORPUS_SOLVED[1]
    return shoot_closed_curve(GeneratingParams(a, b, k), bracket, config, n_samples=4096)


@pytest.fixture(scope="session")
def four_finger(config):
    a, b, k, bracket = CORPUS_SOLVED[2]
    return shoot_closed_curve(GeneratingParams(a, b, k), bracket, config, n_samples=4096)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion; call with (label, detail)."""
    state = {}

    def record(label, detail):
        state["label"], state["detail"] = label, detail

    yield record
    rep = getattr(request.node, "rep_call", None)
    passed = rep is not None and rep.passed
    label = state.get("label", request.node.name)
    ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {label}: {state.get('detail', '')}")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

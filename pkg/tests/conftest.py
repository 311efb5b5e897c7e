import pytest

from obsmode.belief import build_belief
from obsmode.casestudy import GRID_FORMULA, RUNNING_FORMULA, grid_casestudy, running_example
from obsmode.product import build_product
from obsmode.scltl import compile_to_dfa, parse_formula

# filled by tests/test_acceptance.py, printed at the end of the session
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])


def belief_product(model, text, labeling="target"):
    f = parse_formula(text, model.atomic_props)
    dfa = compile_to_dfa(f, model.atomic_props)
    return f, build_belief(build_product(model, dfa, labeling))


@pytest.fixture(scope="session")
def running():
    return running_example()


@pytest.fixture(scope="session")
def running_bp(running):
    return belief_product(running, RUNNING_FORMULA)


@pytest.fixture(scope="session")
def grid():
    return grid_casestudy()


@pytest.fixture(scope="session")
def grid_bp(grid):
    return belief_product(grid, GRID_FORMULA)

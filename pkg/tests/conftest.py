import pytest

from tanglefree.freegroup import parse_word
from tanglefree.homspace import hom_from_cycles

EXAMPLE_IMAGES = ["(15)(687)", "(172569)", "(1934)(58)"]


@pytest.fixture
def example_phi():
    return hom_from_cycles(EXAMPLE_IMAGES, 9)


@pytest.fixture
def example_words():
    return parse_word("A B a b", 3), parse_word("A C a B c", 3)


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            props = dict(getattr(rep, "user_properties", []))
            if rep.when == "call" and "criterion" in props:
                runtime = props.get("runtime")
                timing = f" ({runtime:.3g} s)" if runtime is not None else ""
                lines.append((props["criterion"], f"{'PASS' if rep.passed else 'FAIL'}  criterion {props['criterion']}{timing}"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from drample import examples  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def corpus3():
    return examples.enumerate_dr_corpus(3)


@pytest.fixture(scope="session")
def corpus4():
    return examples.enumerate_dr_corpus(4)


@pytest.fixture(scope="session")
def curated():
    return examples.curated_instances()


@pytest.fixture(scope="session")
def everything(corpus4, curated):
    """Enumerated members of order <= 4 and the curated instances."""
    return list(corpus4) + [S for _, S in curated]


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


def pytest_terminal_summary(terminalreporter):
    import acceptance_log

    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(acceptance_log.LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

from importlib import resources
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from rnaqubo.scoring import SecondaryStructure
from rnaqubo.seq_model import RnaSequence

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

FIXTURES = Path(__file__).parent / "fixtures"
EXAMPLE_SEQUENCE = "GGAAGCAAACAUCCCUGU"

ACCEPTANCE_LINES: list[str] = []


def toy_dir() -> Path:
    return Path(str(resources.files("rnaqubo.data").joinpath("toy")))


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


def rna(min_size=1, max_size=20, alphabet="ACGU"):
    return st.text(alphabet=alphabet, min_size=min_size, max_size=max_size).map(RnaSequence)


@st.composite
def structures(draw, min_n=2, max_n=30):
    """Random valid secondary structures (crossings allowed)."""
    n = draw(st.integers(min_n, max_n))
    free = list(range(1, n + 1))
    order = draw(st.permutations(free))
    k = draw(st.integers(0, n // 2))
    pairs = [tuple(sorted(order[2 * t : 2 * t + 2])) for t in range(k)]
    return SecondaryStructure(n, pairs)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

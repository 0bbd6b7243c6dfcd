from __future__ import annotations

import re
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"
POS = sorted((FIXTURES / "rtl" / "pos").glob("*.v"))
NEG = sorted((FIXTURES / "rtl" / "neg").glob("*.v"))
GRAPHS = FIXTURES / "graphs"
SHA3_DIR = FIXTURES / "sha3"
SHA3 = sorted(str(p) for p in SHA3_DIR.glob("*.v"))
TOY_DIR = FIXTURES / "toy"


def expected_message(path: Path) -> str:
    m = re.search(r"^// expect: (.*)$", path.read_text(), re.M)
    assert m, f"{path} has no expect line"
    return m.group(1).strip()


@pytest.fixture
def toy_files():
    return [str(TOY_DIR / "fifo1.v")]


@pytest.fixture(scope="session")
def sha3():
    from deepsva.pipeline import analyze_design
    from deepsva.structure import ChainLimits
    s, _ = analyze_design(SHA3, None, ChainLimits())
    return s


@pytest.fixture(scope="session")
def sha3_spec_text():
    return (SHA3_DIR / "sha3_spec.md").read_text()


# -- acceptance verdict lines ------------------------------------------------

ACCEPTANCE: list[str] = []


def verdict(name: str, ok: bool, detail: str) -> None:
    """Print and remember one acceptance line, then fail the test if ``ok`` is false."""
    line = f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} ({detail})"
    ACCEPTANCE.append(line)
    print(line)
    assert ok, line


def acceptance_skip(name: str, reason: str) -> None:
    line = f"ACCEPTANCE {name}: SKIP ({reason})"
    ACCEPTANCE.append(line)
    print(line)
    pytest.skip(reason)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)

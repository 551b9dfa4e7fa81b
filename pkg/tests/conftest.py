from pathlib import Path

import pytest

from semdiff import parse_ad, parse_cd

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def fixture_path(name: str) -> str:
    return str(FIXTURES / name)


@pytest.fixture(scope="session")
def cd1v1():
    return parse_cd(fixture_text("cd1v1.cd"))


@pytest.fixture(scope="session")
def cd1v2():
    return parse_cd(fixture_text("cd1v2.cd"))


@pytest.fixture(scope="session")
def cd5v1():
    return parse_cd(fixture_text("cd5v1.cd"))


@pytest.fixture(scope="session")
def cd5v2():
    return parse_cd(fixture_text("cd5v2.cd"))


@pytest.fixture(scope="session")
def adv():
    return tuple(parse_ad(fixture_text(f"adv{n}.ad")) for n in (1, 2, 3, 4))

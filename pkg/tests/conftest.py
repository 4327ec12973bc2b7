from pathlib import Path

import pytest

from genesyst.frontend import parse, resolve_refinement
from genesyst.lts import build, build_refined
from genesyst.prover import ProverConfig

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def parking_text():
    return (DATA / "parking.mch").read_text()


@pytest.fixture(scope="session")
def parking(parking_text):
    return parse(parking_text)


@pytest.fixture(scope="session")
def linked(parking):
    return resolve_refinement(parse((DATA / "parking_r1.ref").read_text()), parking)


@pytest.fixture(scope="session")
def cfg():
    return ProverConfig({"NbPlaces": (1, 2, 3)})


@pytest.fixture(scope="session")
def parking_build(parking, cfg):
    return build(parking, cfg)


@pytest.fixture(scope="session")
def refined_build(linked, parking_build, cfg):
    return build_refined(linked, parking_build.lts, cfg)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)

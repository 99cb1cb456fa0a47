import pytest

from gatekeep import fixtures, report_io


@pytest.fixture(scope="session")
def plato_plan():
    return report_io.parse_plan(fixtures.read_fixture("plato_plan.json"))


@pytest.fixture(scope="session")
def plato_results():
    return report_io.parse_results(fixtures.read_fixture("plato_results.csv"))


@pytest.fixture(scope="session")
def plato_claims():
    return report_io.parse_claims(fixtures.read_fixture("plato_claims.txt"))


@pytest.fixture(scope="session")
def fixture_dir():
    return fixtures.fixture_path("plato_plan.json").parent

import pytest


def pytest_addoption(parser):
    parser.addoption("--pvsde-bin", action="store", default="pvsde", help="path to the pvsde executable")


@pytest.fixture
def pvsde_bin(request):
    return request.config.getoption("--pvsde-bin")

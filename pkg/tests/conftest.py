import pytest

from eslab.gen import FIXTURE_NAMES, fixture


@pytest.fixture
def S():
    return fixture("S")


@pytest.fixture(params=FIXTURE_NAMES)
def any_fixture(request):
    return request.param, fixture(request.param)

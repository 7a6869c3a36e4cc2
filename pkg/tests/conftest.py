import pytest

from thermolight.units import make_context
from thermolight import pulsekit, mixturekit


@pytest.fixture(scope="session")
def ctx():
    return make_context(5777.0)


@pytest.fixture(scope="session")
def thermal_family(ctx):
    # shared so the envelope tables are built once per session
    return pulsekit.make_thermal_family(ctx)


@pytest.fixture(scope="session")
def matched_weights(ctx):
    return mixturekit.make_matched_improper_weights(ctx)

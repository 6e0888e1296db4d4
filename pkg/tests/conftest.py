from importlib.resources import files

import pytest

from hetnet.config import parse_config
from hetnet.demand import DemandRates, ServiceProfile
from hetnet.geometry import ClusterGeometry, SubCell
from hetnet.markov import ChainContext
from hetnet.metrics import LinkProfile, SensitivityFactors
from hetnet.mobility import SpatialDensity


@pytest.fixture(scope="session")
def density():
    return SpatialDensity()


@pytest.fixture(scope="session")
def table5_geom():
    """Reference geometry: 600 m cluster, one 200 m sub-cell at 300 m."""
    return ClusterGeometry(600.0, (SubCell(200.0, 300.0),))


@pytest.fixture(scope="session")
def ref_cfg():
    text = files("hetnet").joinpath("data/reference.toml").read_text()
    return parse_config(text)


def small_context(lte_units=2, wifi_units=1, prb=1, p_switch=0.5):
    """Hand-set demand figures for the 12-state reference instance."""
    svc = ServiceProfile(1, 0.5, 30.0, prb)
    rates = DemandRates(
        service_id=1,
        zone=2,
        fresh_zone=0.08,
        fresh_residual=0.3,
        residence_time=40.0,
        exit_residual=0.015,
        mean_users_residual=9.0,
        horizontal=0.135,
        vertical=0.135,
    )
    return ChainContext(
        services=(svc,),
        lte_units=lte_units,
        wifi_units={2: wifi_units},
        zone_rates={2: (rates,)},
        link=LinkProfile(1.4e6, 72, 6.0, 1.4766, 0.5),
        sensitivity=SensitivityFactors(1.0, 1.0),
        wifi_rate_bps=5.4e7,
        p_switch=p_switch,
        zone=2,
    )


@pytest.fixture
def ctx12():
    return small_context()

import math

import numpy as np
import pytest

from hetnet.demand import ServiceProfile
from hetnet.errors import ConfigInvalid
from hetnet.geometry import ClusterGeometry, SubCell
from hetnet.metrics import LinkProfile, SensitivityFactors, erlang_block
from hetnet.mobility import RwpParams, SpatialDensity, cell_probability
from hetnet.simulate import SimConfig, run, total_variation
from hetnet.simulate.agents import select_network
from hetnet.simulate.trajectory import simulate_trajectory

LINK = LinkProfile(1.4e6, 72, 6.0, 1.4766, bler=0.5)
GEOM = ClusterGeometry(600.0, (SubCell(200.0, 300.0),))
MOBILITY = RwpParams(v_max=20.0, v_min=0.1)


def base_config(**kw):
    defaults = dict(
        geometry=GEOM,
        mobility=MOBILITY,
        services=(ServiceProfile(1, 0.2, 10.0, 1),),
        lte_units=3,
        wifi_units={2: 2},
        link=LINK,
        sensitivity=SensitivityFactors(1.0, 1.0),
        wifi_rate_bps=5.4e7,
        n_users=10,
        horizon=5000.0,
        seed=11,
    )
    defaults.update(kw)
    return SimConfig(**defaults)


# -- admission policy ---------------------------------------------------------


def test_select_network_residual_zone():
    cfg = base_config()
    assert select_network(0, 0, 0, cfg, 0) == "lte"
    assert select_network(0, 3, 0, cfg, 0) == "blocked"


def test_select_network_prefers_higher_bitrate():
    # an empty LTE pool outruns the Wi-Fi nominal rate; a Wi-Fi rate beyond
    # any LTE figure wins instead
    cfg = base_config()
    assert select_network(2, 0, 0, cfg, 0) == "lte"
    fast = base_config(wifi_rate_bps=1e12)
    assert select_network(2, 0, 0, fast, 0) == "wifi"


def test_select_network_falls_back_when_one_side_full():
    cfg = base_config()
    assert select_network(2, 3, 0, cfg, 0) == "wifi"  # LTE full
    fast = base_config(wifi_rate_bps=1e12)
    assert select_network(2, 0, 2, fast, 0) == "lte"  # Wi-Fi full
    assert select_network(2, 3, 2, cfg, 0) == "blocked"


def test_config_check_rejects_bad_values():
    with pytest.raises(ConfigInvalid):
        base_config(horizon=-1.0).check()
    with pytest.raises(ConfigInvalid):
        base_config(n_users=0).check()
    with pytest.raises(ConfigInvalid):
        base_config(warmup_fraction=1.0).check()
    bad_geom = ClusterGeometry(600.0, (SubCell(300.0, 400.0),))
    with pytest.raises(ConfigInvalid):
        base_config(geometry=bad_geom).check()


# -- full runs ----------------------------------------------------------------


def test_run_is_deterministic():
    a = run(base_config())
    b = run(base_config())
    assert a.state_freq == b.state_freq
    assert a.attempts == b.attempts and a.blocked == b.blocked
    assert (a.handovers_h, a.handovers_v, a.losses) == (
        b.handovers_h,
        b.handovers_v,
        b.losses,
    )


def test_different_seeds_differ():
    a = run(base_config())
    b = run(base_config(seed=12))
    assert a.state_freq != b.state_freq


def test_capacity_never_exceeded():
    report = run(base_config(horizon=20000.0))
    for (lte_rows, wifi_rows), frac in report.state_freq.items():
        assert frac > 0.0
        assert sum(sum(r) for r in lte_rows) <= 3
        assert sum(r[0] for r in wifi_rows) <= 2


def test_state_frequencies_normalized():
    report = run(base_config())
    assert sum(report.state_freq.values()) == pytest.approx(1.0, abs=1e-9)


def test_static_offered_load_matches_erlang_loss():
    # static users, no sub-cell traffic to speak of: the LTE pool is an
    # M/M/s/s queue, so occupancy and blocking follow the Erlang-B law
    geom = ClusterGeometry(600.0, ())
    cfg = base_config(
        geometry=geom,
        wifi_units={},
        services=(ServiceProfile(1, 0.2, 10.0, 1),),
        lte_units=3,
        static_users=True,
        n_users=50,
        horizon=200_000.0,
        seed=3,
    )
    report = run(cfg)
    load = 0.2 * 10.0
    weights = [load**k / math.factorial(k) for k in range(4)]
    expected = np.array(weights) / sum(weights)
    empirical = np.zeros(4)
    for (lte_rows, _), frac in report.state_freq.items():
        empirical[sum(sum(r) for r in lte_rows)] += frac
    assert total_variation(empirical, expected) <= 0.02
    assert report.blocking_ratio(0, 0) == pytest.approx(
        erlang_block(load, 3), abs=0.02
    )


def test_mobile_run_reports_handovers_and_entries():
    report = run(base_config(horizon=20000.0, n_users=20))
    assert report.subcell_entries[2] > 0
    assert report.handovers_h + report.handovers_v >= 0
    assert 0.0 < report.zone_time[2] < report.zone_time[0]
    assert report.mean_sojourn[2] > 0.0


def test_blocking_ratio_nan_without_observations():
    report = run(base_config(horizon=100.0, warmup_fraction=0.9))
    assert math.isnan(report.blocking_ratio(7, 0))


def test_max_events_stops_early():
    report = run(base_config(horizon=1e9, max_events=500))
    assert report.events == 500
    assert report.horizon < 1e9


# -- trajectory statistics ----------------------------------------------------


@pytest.fixture(scope="module")
def traj():
    return simulate_trajectory(GEOM, MOBILITY, n_legs=200_000, seed=5)


def test_trajectory_histogram_normalized(traj):
    assert traj.bin_mass.sum() == pytest.approx(1.0, abs=1e-12)
    assert len(traj.bin_mass) == 20


def test_trajectory_density_shape(traj):
    # time per unit area falls off toward the rim; compare the first and
    # last ring after dividing out the ring areas
    edges = traj.bin_edges
    areas = np.pi * (edges[1:] ** 2 - edges[:-1] ** 2)
    level = traj.bin_mass / areas
    assert level[0] > 2.0 * level[-1]


def test_trajectory_occupancy_matches_analytic(traj):
    density = SpatialDensity(table_size=256)
    analytic = cell_probability(GEOM, 2, density)
    stats = traj.subcells[2]
    assert stats.occupancy == pytest.approx(analytic, rel=0.02)


def test_trajectory_renewal_identity(traj):
    stats = traj.subcells[2]
    assert stats.entry_rate * stats.mean_sojourn == pytest.approx(
        stats.occupancy, rel=1e-12
    )
    assert stats.entries > 0 and stats.inside_time > 0.0


def test_trajectory_deterministic():
    a = simulate_trajectory(GEOM, MOBILITY, n_legs=2000, seed=9)
    b = simulate_trajectory(GEOM, MOBILITY, n_legs=2000, seed=9)
    assert np.array_equal(a.bin_mass, b.bin_mass)
    assert a.subcells[2].entries == b.subcells[2].entries


def test_trajectory_pause_adds_time():
    pausing = RwpParams(v_max=20.0, v_min=0.1, pause_mean=30.0)
    a = simulate_trajectory(GEOM, MOBILITY, n_legs=5000, seed=2)
    b = simulate_trajectory(GEOM, pausing, n_legs=5000, seed=2)
    assert b.total_time > a.total_time

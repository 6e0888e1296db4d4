import math

import pytest

from hetnet.markov import build_generator, enumerate_states, stationary
from hetnet.metrics import (
    LinkProfile,
    SensitivityFactors,
    congestion_factor,
    erlang_block,
    erlang_block_direct,
    instantaneous_bitrate,
    mean_bitrate,
    mean_block,
    offered_load,
    state_bitrate,
    state_block,
)

REFERENCE_LINK = LinkProfile(1.4e6, 72, 6.0, 1.4766, bler=0.5)


def test_instantaneous_bitrate_reference_value():
    # 72 * 6 * 1.4766 * (1 - 0.5) = 318.9456 effective sub-carriers
    assert instantaneous_bitrate(REFERENCE_LINK) == pytest.approx(
        1.4e6 * 318.9456, rel=1e-12
    )


def test_instantaneous_bitrate_bler_endpoints():
    clean = LinkProfile(1.4e6, 72, 6.0, 1.4766, bler=0.0)
    dead = LinkProfile(1.4e6, 72, 6.0, 1.4766, bler=1.0)
    assert instantaneous_bitrate(clean) == pytest.approx(1.4e6 * 637.8912, rel=1e-12)
    assert instantaneous_bitrate(dead) == 0.0


def test_instantaneous_bitrate_linear_in_each_factor():
    half_k = LinkProfile(1.4e6, 36, 6.0, 1.4766, bler=0.5)
    assert instantaneous_bitrate(half_k) == pytest.approx(
        0.5 * instantaneous_bitrate(REFERENCE_LINK), rel=1e-12
    )


def test_link_profile_validation():
    with pytest.raises(ValueError):
        LinkProfile(1.4e6, 72, 6.0, 1.4766, bler=1.5)
    with pytest.raises(ValueError):
        LinkProfile(-1.0, 72, 6.0, 1.4766)


def test_sensitivity_range():
    SensitivityFactors(0.0, 1.0)
    with pytest.raises(ValueError):
        SensitivityFactors(1.1, 0.5)


def test_congestion_factor_values():
    assert congestion_factor(0, 10, 1.0) == 1.0
    assert congestion_factor(10, 10, 1.0) == 0.0
    assert congestion_factor(4, 16, 1.0) == pytest.approx(0.5)
    assert congestion_factor(4, 16, 0.0) == 1.0
    # sqrt coupling, not linear
    assert congestion_factor(5, 10, 1.0) == pytest.approx(1.0 - math.sqrt(0.5))


def test_congestion_factor_clamps_at_zero():
    assert congestion_factor(10, 10, 1.0) == 0.0
    with pytest.raises(ValueError):
        congestion_factor(11, 10, 1.0)
    with pytest.raises(ValueError):
        congestion_factor(1, 0, 1.0)


def test_state_bitrate_and_block_scale_the_base():
    assert state_bitrate(100.0, 4, 16, 1.0) == pytest.approx(50.0)
    assert state_block(0.3, 4, 16, 1.0) == pytest.approx(0.15)
    assert state_block(0.3, 0, 16, 1.0) == 0.3


def test_erlang_known_values():
    assert erlang_block(1.0, 1) == pytest.approx(0.5, abs=1e-12)
    assert erlang_block(2.0, 2) == pytest.approx(0.4, abs=1e-12)
    assert erlang_block(0.0, 5) == 0.0


def test_erlang_recurrence_matches_factorial_form():
    for s in range(1, 21):
        for load in (0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 19.5):
            assert erlang_block(load, s) == pytest.approx(
                erlang_block_direct(load, s), abs=1e-12
            )


def test_erlang_monotone():
    # more servers block less, more load blocks more
    assert erlang_block(3.0, 4) < erlang_block(3.0, 2)
    assert erlang_block(4.0, 3) > erlang_block(2.0, 3)
    with pytest.raises(ValueError):
        erlang_block(-1.0, 2)
    with pytest.raises(ValueError):
        erlang_block(1.0, 0)


def test_offered_load():
    assert offered_load(0.5, 8.0) == 4.0


def _solved(ctx):
    states = enumerate_states(ctx.lte_units, ctx.wifi_units, ctx.services)
    model = build_generator(states, ctx)
    return model, stationary(model)


def test_mean_bitrate_bounds_and_sensitivity(ctx12):
    import dataclasses

    model, pi = _solved(ctx12)
    d_avg = instantaneous_bitrate(ctx12.link)
    full = mean_bitrate(pi, model, ctx12)
    assert 0.0 < full < d_avg
    # a congestion-blind link always reports the nominal rate
    blind = dataclasses.replace(ctx12, sensitivity=SensitivityFactors(0.0, 0.0))
    assert mean_bitrate(pi, model, blind) == pytest.approx(d_avg, rel=1e-12)
    assert mean_bitrate(pi, model, blind) > full


def test_mean_block_bounds_and_sensitivity(ctx12):
    import dataclasses

    model, pi = _solved(ctx12)
    blocked = mean_block(pi, model, ctx12)
    assert 0.0 < blocked < 1.0
    # higher blocking sensitivity discounts congested states harder
    softer = dataclasses.replace(ctx12, sensitivity=SensitivityFactors(1.0, 0.5))
    assert mean_block(pi, model, softer) > blocked


def test_mean_block_bounded_by_base_blocking(ctx12):
    model, pi = _solved(ctx12)
    load = sum(
        offered_load(ctx12.rates[k].fresh_zone, svc.mean_holding_time)
        for k, svc in enumerate(ctx12.services)
    )
    base = erlang_block(load, len(ctx12.services))
    assert mean_block(pi, model, ctx12) <= base

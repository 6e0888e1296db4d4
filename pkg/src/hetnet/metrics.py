"""Bit-rate and blocking-probability figures with congestion sensitivity."""

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class LinkProfile:
    """LTE downlink parameters feeding the instantaneous bit rate."""

    subcarrier_bandwidth: float  # Hz
    frequencies: int  # sub-carrier count K
    symbol_rate: float  # symbols per second
    modulation_efficiency: float  # bits per symbol class
    bler: float = 0.0

    def __post_init__(self):
        if min(self.subcarrier_bandwidth, self.frequencies, self.symbol_rate,
               self.modulation_efficiency) < 0:
            raise ValueError("link parameters must be >= 0")
        if not 0.0 <= self.bler <= 1.0:
            raise ValueError("bler must be in [0, 1]")


@dataclass(frozen=True)
class SensitivityFactors:
    """Congestion-coupling coefficients for bit rate and blocking."""

    bitrate: float = 1.0  # Lambda
    blocking: float = 1.0  # Theta

    def __post_init__(self):
        if not (0.0 <= self.bitrate <= 1.0 and 0.0 <= self.blocking <= 1.0):
            raise ValueError("sensitivity factors must be in [0, 1]")


def instantaneous_bitrate(link: LinkProfile):
    """Nominal LTE bit rate in bits/s: sub-carrier bandwidth times the
    effective number of modulated sub-carriers."""
    n_sub = link.frequencies * link.symbol_rate * link.modulation_efficiency * (1.0 - link.bler)
    return link.subcarrier_bandwidth * n_sub


def congestion_factor(occupied, capacity, sensitivity):
    """1 - sensitivity * sqrt(occupied / capacity), clamped at 0."""
    if capacity <= 0:
        raise ValueError("capacity must be > 0")
    ratio = occupied / capacity
    if not 0.0 <= ratio <= 1.0 + 1e-12:
        raise ValueError(f"occupancy ratio {ratio:.6g} outside [0, 1]")
    return max(0.0, 1.0 - sensitivity * math.sqrt(min(ratio, 1.0)))


def state_bitrate(d_avg, occupied, capacity, bitrate_sensitivity):
    """Bit rate degraded by current occupancy of the LTE + Wi-Fi pool."""
    return d_avg * congestion_factor(occupied, capacity, bitrate_sensitivity)


def erlang_block(load, servers):
    """Erlang-B loss probability via the overflow-safe recurrence."""
    if load < 0:
        raise ValueError("offered load must be >= 0")
    if servers < 1 or int(servers) != servers:
        raise ValueError("server count must be a positive integer")
    if load == 0.0:
        return 0.0
    inv_b = 1.0
    for j in range(1, int(servers) + 1):
        inv_b = 1.0 + inv_b * j / load
    return 1.0 / inv_b


def erlang_block_direct(load, servers):
    """Erlang-B by the factorial formula; numeric cross-check only."""
    if load == 0.0:
        return 0.0
    top = load**servers / math.factorial(servers)
    bottom = sum(load**k / math.factorial(k) for k in range(int(servers) + 1))
    return top / bottom


def state_block(p_block, occupied, capacity, blocking_sensitivity):
    """Blocking probability scaled by the congestion factor; in [0, p_block]."""
    return p_block * congestion_factor(occupied, capacity, blocking_sensitivity)


def offered_load(arrival_rate, holding_time):
    """Traffic intensity in erlangs."""
    return arrival_rate * holding_time


def mean_bitrate(pi, model, ctx):
    """Stationary mean bit rate received from the LTE network in the
    sub-cell of interest, in bits/s.

    A weighted mean of the occupancy-degraded bit rate over states that can
    still admit a session, weight per service = fresh sub-cell demand plus
    the vertical-handover transfer rate.
    """
    d_avg = instantaneous_bitrate(ctx.link)
    pool_cap = ctx.lte_units + ctx.wifi_units[ctx.zone]
    num = 0.0
    den = 0.0
    for k, svc in enumerate(ctx.services):
        w = ctx.rates[k].fresh_zone + ctx.rates[k].vertical
        need = svc.prb_demand
        for idx, state in enumerate(model.states):
            if state.lte_total() + need > ctx.lte_units:
                continue
            occ = state.pool_occupancy(ctx.zone)
            num += w * pi[idx] * state_bitrate(d_avg, occ, pool_cap, ctx.sensitivity.bitrate)
            den += w * pi[idx]
    return num / den if den > 0 else 0.0


def mean_block(pi, model, ctx):
    """Stationary mean blocking probability for the sub-cell of interest.

    Sums the occupancy-scaled base blocking over states where admitting one
    more session of the service would exceed the LTE capacity, normalized by
    the total demand weight.
    """
    load = sum(
        offered_load(ctx.rates[k].fresh_zone, svc.mean_holding_time)
        for k, svc in enumerate(ctx.services)
    )
    p_base = erlang_block(load, len(ctx.services))
    pool_cap = ctx.lte_units + ctx.wifi_units[ctx.zone]
    num = 0.0
    den = 0.0
    for k, svc in enumerate(ctx.services):
        w = ctx.rates[k].fresh_zone + ctx.rates[k].vertical
        need = svc.prb_demand
        den += w
        for idx, state in enumerate(model.states):
            if state.lte_total() + need <= ctx.lte_units:
                continue
            occ = state.pool_occupancy(ctx.zone)
            num += w * pi[idx] * state_block(p_base, occ, pool_cap, ctx.sensitivity.blocking)
    return num / den if den > 0 else 0.0

"""Per-zone traffic demand: fresh arrivals, exit flows and handover rates."""

from dataclasses import dataclass, field

from .errors import DivisionByZero
from .geometry import ClusterGeometry
from .mobility import RwpParams, SpatialDensity, mean_residence_time, zone_probabilities


@dataclass(frozen=True)
class ServiceProfile:
    """One service class: cluster-wide arrival rate, mean session length and
    the number of LTE bandwidth units one session occupies."""

    service_id: int
    cluster_arrival_rate: float  # sessions/s over the whole cluster
    mean_holding_time: float  # s
    prb_demand: int  # LTE bandwidth units per session

    def __post_init__(self):
        if self.cluster_arrival_rate <= 0:
            raise ValueError("cluster_arrival_rate must be > 0")
        if self.mean_holding_time <= 0:
            raise ValueError("mean_holding_time must be > 0")
        if self.prb_demand < 1:
            raise ValueError("prb_demand must be >= 1")


def fresh_rate(p_zone, lambda_cluster):
    """Fresh session demand in a zone: occupancy probability times the
    cluster-wide arrival rate."""
    if not 0.0 <= p_zone <= 1.0:
        raise ValueError("zone probability must be in [0, 1]")
    if lambda_cluster < 0:
        raise ValueError("arrival rate must be >= 0")
    return p_zone * lambda_cluster


def exit_flow(p_zone, residence_time):
    """Outflow rate of users from a zone with occupancy probability p_zone
    and mean residence time residence_time."""
    if residence_time <= 0:
        raise DivisionByZero("residence time must be > 0")
    return p_zone / residence_time


def handover_rate(mean_users, flow):
    """Handover demand: mean connected population times the exit flow.
    The same product serves the horizontal and vertical cases; they differ
    only in which exit flow is supplied."""
    if mean_users < 0:
        raise ValueError("mean user count must be >= 0")
    return mean_users * flow


def mean_population(lambda_zone, holding_time):
    """Little's-law estimate of the connected population in a zone."""
    if lambda_zone < 0 or holding_time < 0:
        raise ValueError("inputs must be >= 0")
    return lambda_zone * holding_time


@dataclass(frozen=True)
class DemandRates:
    """All derived demand figures for one service in one sub-cell zone."""

    service_id: int
    zone: int
    fresh_zone: float  # fresh demand in the sub-cell
    fresh_residual: float  # fresh demand in the LTE-only zone
    residence_time: float  # mean sojourn in the sub-cell, s
    exit_residual: float  # outflow rate of the LTE-only zone
    mean_users_residual: float
    horizontal: float  # handover demand toward the LTE-only zone's network
    vertical: float  # handover demand toward the sub-cell's Wi-Fi


def demand_rates(
    geom: ClusterGeometry,
    density: SpatialDensity,
    params: RwpParams,
    service: ServiceProfile,
    zone: int,
) -> DemandRates:
    """Assemble the full demand picture for one service and one sub-cell."""
    probs = zone_probabilities(geom, density)
    res = mean_residence_time(geom, zone, density, params)
    lam_zone = fresh_rate(probs[zone], service.cluster_arrival_rate)
    lam_res = fresh_rate(probs[0], service.cluster_arrival_rate)
    eta = exit_flow(probs[0], res)
    users = mean_population(lam_res, service.mean_holding_time)
    return DemandRates(
        service_id=service.service_id,
        zone=zone,
        fresh_zone=lam_zone,
        fresh_residual=lam_res,
        residence_time=res,
        exit_residual=eta,
        mean_users_residual=users,
        horizontal=handover_rate(users, eta),
        vertical=handover_rate(users, eta),
    )

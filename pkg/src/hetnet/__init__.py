"""Optimal-performance evaluation of a heterogeneous LTE/Wi-Fi cluster under
bit-rate-based network selection."""

from ._kernels import BACKEND as KERNEL_BACKEND
from .demand import DemandRates, ServiceProfile
from .geometry import ClusterGeometry, Point, SubCell, validate, zone_of
from .markov import (
    ChainContext,
    OccupancyState,
    TransitionModel,
    build_generator,
    enumerate_states,
    stage_rates,
    stationary,
)
from .metrics import (
    LinkProfile,
    SensitivityFactors,
    erlang_block,
    instantaneous_bitrate,
    mean_bitrate,
    mean_block,
    state_bitrate,
    state_block,
)
from .mobility import RwpParams, SpatialDensity, arrival_rate, cell_probability, mean_residence_time

__version__ = "0.1.0"

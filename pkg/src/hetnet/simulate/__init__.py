"""Simulation oracles: trajectory statistics, occupancy-chain sampling and
the full agent-based discrete-event model."""

from .agents import SimConfig, SimReport, UserAgent, run, select_network
from .markov_events import sample_occupancy, total_variation
from .trajectory import TrajectoryStats, simulate_trajectory

__all__ = [
    "SimConfig",
    "SimReport",
    "UserAgent",
    "run",
    "select_network",
    "sample_occupancy",
    "total_variation",
    "TrajectoryStats",
    "simulate_trajectory",
]

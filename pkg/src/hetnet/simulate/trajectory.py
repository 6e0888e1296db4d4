"""Vectorized random-waypoint trajectory statistics.

Sequential waypoint legs are generated in bulk with numpy; sub-cell
crossings use the exact segment-circle intersection, so no crossing can be
missed regardless of speed.  This is the measurement-side oracle for the
analytic density, occupancy and crossing-rate formulas.
"""

from dataclasses import dataclass

import numpy as np

from ..geometry import ClusterGeometry
from ..mobility import RwpParams


@dataclass
class SubcellStats:
    entries: int
    inside_time: float
    occupancy: float  # inside_time / total_time
    entry_rate: float  # entries / total_time
    mean_sojourn: float  # inside_time / entries


@dataclass
class TrajectoryStats:
    n_legs: int
    total_time: float
    bin_edges: np.ndarray
    bin_mass: np.ndarray  # time-weighted radial position histogram
    subcells: dict  # zone id -> SubcellStats


def _uniform_disk(rng, n, radius):
    r = radius * np.sqrt(rng.random(n))
    t = 2.0 * np.pi * rng.random(n)
    return np.column_stack([r * np.cos(t), r * np.sin(t)])


def simulate_trajectory(
    geom: ClusterGeometry,
    params: RwpParams,
    n_legs,
    seed,
    n_bins=20,
):
    """Simulate one user for ``n_legs`` waypoint legs and aggregate."""
    rng = np.random.default_rng(seed)
    pts = _uniform_disk(rng, n_legs + 1, geom.service_radius)
    p0, p1 = pts[:-1], pts[1:]
    speeds = rng.uniform(params.v_min, params.v_max, n_legs)
    lengths = np.linalg.norm(p1 - p0, axis=1)
    move_time = lengths / speeds
    pauses = (
        rng.exponential(params.pause_mean, n_legs)
        if params.pause_mean > 0
        else np.zeros(n_legs)
    )
    total_time = move_time.sum() + pauses.sum()

    # radial histogram: one uniform sample per leg, weighted by the leg's
    # travel time, plus the pause weight at the waypoint itself
    u = rng.random(n_legs)
    sample = p0 + u[:, None] * (p1 - p0)
    radii = np.linalg.norm(sample, axis=1) / geom.service_radius
    edges = np.linspace(0.0, 1.0, n_bins + 1)
    mass, _ = np.histogram(radii, bins=edges, weights=move_time)
    if pauses.any():
        wp_radii = np.linalg.norm(p1, axis=1) / geom.service_radius
        pause_mass, _ = np.histogram(wp_radii, bins=edges, weights=pauses)
        mass = mass + pause_mass
    mass = mass / mass.sum()

    subcells = {}
    d = p1 - p0
    a = np.einsum("ij,ij->i", d, d)
    for zone in geom.zone_ids():
        sc = geom.subcell(zone)
        c = np.array([sc.center.x, sc.center.y])
        f = p0 - c
        b = 2.0 * np.einsum("ij,ij->i", d, f)
        cc = np.einsum("ij,ij->i", f, f) - sc.radius**2
        disc = b * b - 4.0 * a * cc
        root = np.sqrt(np.maximum(disc, 0.0))
        t1 = (-b - root) / (2.0 * a)
        t2 = (-b + root) / (2.0 * a)
        crosses = disc > 0.0
        inside_all = (disc <= 0.0) & (cc < 0.0)  # leg fully inside
        # inward crossing strictly within the leg
        entries = int(np.count_nonzero(crosses & (t1 > 0.0) & (t1 < 1.0)))
        frac = np.where(
            crosses,
            np.clip(np.minimum(t2, 1.0) - np.maximum(t1, 0.0), 0.0, 1.0),
            np.where(inside_all, 1.0, 0.0),
        )
        inside_time = float(np.sum(frac * move_time))
        end_inside = np.where(crosses, (t1 < 1.0) & (t2 > 1.0), inside_all)
        inside_time += float(np.sum(pauses[end_inside]))
        subcells[zone] = SubcellStats(
            entries=entries,
            inside_time=inside_time,
            occupancy=inside_time / total_time,
            entry_rate=entries / total_time,
            mean_sojourn=inside_time / entries if entries else float("nan"),
        )

    return TrajectoryStats(
        n_legs=n_legs,
        total_time=float(total_time),
        bin_edges=edges,
        bin_mass=mass,
        subcells=subcells,
    )

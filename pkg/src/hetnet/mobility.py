"""Random-waypoint spatial statistics on the service disk.

Everything is computed on the unit disk (lengths scaled by 1/R) and mapped
back where a dimensional quantity is needed.  The stationary user density is
radial; it is tabulated once and interpolated with a monotone cubic.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.interpolate import PchipInterpolator

from .errors import DivisionByZero, QuadratureFailure
from .geometry import ClusterGeometry

# Calibrated against the trajectory simulator's sub-cell crossing rate on the
# reference geometry (R = 600 m, r = 200 m, d = 300 m); see
# benchmarks/calibrate_cv.py.  Frozen.
DEFAULT_CV = 6.266142595552441

QUAD_ABS_TOL = 1e-8
QUAD_REL_TOL = 1e-6
RADIAL_TABLE_SIZE = 1024


@dataclass(frozen=True)
class RwpParams:
    """Random-waypoint movement parameters.

    v_min > 0 guards against the divergent time spent at near-zero speeds.
    c_v is the calibration constant of the boundary-crossing rate formula.
    """

    v_max: float
    v_min: float = 0.1
    pause_mean: float = 0.0
    c_v: float = DEFAULT_CV

    def __post_init__(self):
        if not 0 < self.v_min <= self.v_max:
            raise ValueError("need 0 < v_min <= v_max")
        if self.pause_mean < 0:
            raise ValueError("pause_mean must be >= 0")
        if self.c_v <= 0:
            raise ValueError("c_v must be > 0")

    @property
    def v_eff(self):
        """Time-average speed 1/E[1/V] for V uniform on [v_min, v_max]."""
        if self.v_max == self.v_min:
            return self.v_max
        return (self.v_max - self.v_min) / math.log(self.v_max / self.v_min)


def _quad(f, a, b):
    """Adaptive quadrature with the package-wide tolerances."""
    out = integrate.quad(
        f, a, b, epsabs=QUAD_ABS_TOL, epsrel=QUAD_REL_TOL, limit=200, full_output=1
    )
    if len(out) > 3:
        raise QuadratureFailure(out[3])
    return out[0]


def density_kernel(x):
    """Unnormalized radial waypoint density at radius fraction x.

    (1 - x^2) times the angular integral of sqrt(1 - x^2 cos^2(phi)) over
    [0, pi], evaluated by adaptive quadrature.
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError("radius fraction must be in [0, 1]")
    if x == 1.0:
        return 0.0
    xx = x * x
    return (1.0 - xx) * _quad(lambda p: math.sqrt(1.0 - xx * math.cos(p) ** 2), 0.0, math.pi)


class SpatialDensity:
    """Normalized stationary density over the unit disk.

    Radial profile tabulated at RADIAL_TABLE_SIZE points with monotone cubic
    interpolation; immutable after construction.
    """

    def __init__(self, table_size=RADIAL_TABLE_SIZE):
        grid = np.linspace(0.0, 1.0, table_size)
        raw = np.array([density_kernel(x) for x in grid])
        spline = PchipInterpolator(grid, raw)
        z = _quad(lambda r: spline(r) * 2.0 * math.pi * r, 0.0, 1.0)
        self._grid = grid
        self._table = raw / z
        self._spline = PchipInterpolator(grid, self._table)
        self.normalizer = z

    def __call__(self, radius_fraction):
        """Density per unit area of the unit disk; vectorized."""
        x = np.asarray(radius_fraction, dtype=float)
        if np.any(x < 0.0) or np.any(x > 1.0):
            raise ValueError("radius fraction must be in [0, 1]")
        val = self._spline(x)
        out = np.maximum(val, 0.0)
        return float(out) if np.isscalar(radius_fraction) else out


def rwp_density(radius_fraction, density: SpatialDensity = None):
    """Normalized stationary density at a radius fraction in [0, 1]."""
    if density is None:
        density = SpatialDensity()
    return density(radius_fraction)


def cell_probability(geom: ClusterGeometry, i, density: SpatialDensity):
    """Probability of finding a user inside sub-cell i (integral of the
    normalized density over the cell, in unit-disk coordinates)."""
    sc = geom.subcell(i)
    rt = sc.radius / geom.service_radius
    dt = sc.center_distance / geom.service_radius
    if rt == 0.0:
        return 0.0

    def ring(rho):
        # polar coordinates around the sub-cell center
        def f(theta):
            x = math.sqrt(dt * dt + 2.0 * dt * rho * math.cos(theta) + rho * rho)
            return density(min(x, 1.0))

        return rho * _quad(f, 0.0, 2.0 * math.pi)

    return min(_quad(ring, 0.0, rt), 1.0)


def zone_probabilities(geom: ClusterGeometry, density: SpatialDensity):
    """P per zone id; zone 0 gets the complement so the total is exactly 1."""
    probs = {i: cell_probability(geom, i, density) for i in geom.zone_ids()}
    probs[0] = 1.0 - sum(probs.values())
    return probs


def boundary_flux_integral(geom: ClusterGeometry, i, density: SpatialDensity):
    """Double integral of r * h(x(alpha)) * sin(phi) over [0, pi]^2, with x
    the scaled distance from the cluster center to the sub-cell boundary
    point at angle alpha."""
    sc = geom.subcell(i)
    rt = sc.radius / geom.service_radius
    dt = sc.center_distance / geom.service_radius
    if rt == 0.0:
        return 0.0

    def outer(alpha):
        x = math.sqrt(dt * dt + 2.0 * dt * rt * math.cos(alpha) + rt * rt)
        h = density(min(x, 1.0))
        return _quad(lambda phi: rt * h * math.sin(phi), 0.0, math.pi)

    return _quad(outer, 0.0, math.pi)


def arrival_rate(geom: ClusterGeometry, i, density: SpatialDensity, params: RwpParams):
    """Mean rate at which a user enters sub-cell i (crossings per second)."""
    integral = boundary_flux_integral(geom, i, density)
    return (2.0 / params.c_v) * (params.v_eff / geom.service_radius) * integral


def mean_residence_time(geom: ClusterGeometry, i, density: SpatialDensity, params: RwpParams):
    """Mean sojourn per visit to sub-cell i: occupancy probability over entry
    rate (Little's law for the visit process)."""
    rate = arrival_rate(geom, i, density, params)
    if rate <= 0.0:
        raise DivisionByZero(f"arrival rate for sub-cell {i} is zero")
    return cell_probability(geom, i, density) / rate

"""Service-area geometry: the circular cluster, its Wi-Fi sub-cells and
point-to-zone lookup.

Zone ids: 0 is the LTE-only residual zone, sub-cells are numbered from 2
upward (index 1 is reserved for the cluster/LTE network itself).
"""

import math
from dataclasses import dataclass, field

from .errors import OutsideCluster

ZONE_RESIDUAL = 0


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def norm(self):
        return math.hypot(self.x, self.y)


@dataclass(frozen=True)
class SubCell:
    """Circular Wi-Fi cell of radius ``radius`` whose center sits
    ``center_distance`` meters from the cluster center at ``center_angle``."""

    radius: float
    center_distance: float
    center_angle: float = 0.0

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("subcell radius must be > 0")
        if self.center_distance < 0:
            raise ValueError("subcell center distance must be >= 0")

    @property
    def center(self):
        return Point(
            self.center_distance * math.cos(self.center_angle),
            self.center_distance * math.sin(self.center_angle),
        )


@dataclass(frozen=True)
class ClusterGeometry:
    """The service disk of radius ``service_radius`` plus its sub-cells.

    Sub-cell i (i = 2..m) is ``subcells[i - 2]``.  Immutable after
    construction; safe for concurrent reads.
    """

    service_radius: float
    subcells: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.service_radius <= 0:
            raise ValueError("service radius must be > 0")
        object.__setattr__(self, "subcells", tuple(self.subcells))

    @property
    def m(self):
        """Zone count in paper-style indexing (cluster is 1, cells 2..m)."""
        return len(self.subcells) + 1

    def subcell(self, i):
        """Sub-cell by zone id i in 2..m."""
        return self.subcells[i - 2]

    def zone_ids(self):
        return range(2, self.m + 1)


def zone_of(geom: ClusterGeometry, p: Point) -> int:
    """Zone id of point ``p``: a sub-cell id (2..m) if p lies strictly inside
    that sub-cell, else 0.  Sub-cell boundaries belong to zone 0 so the
    sub-cells stay open sets.

    Raises OutsideCluster for points beyond the service radius.
    """
    if p.norm() > geom.service_radius:
        raise OutsideCluster(f"|p| = {p.norm():.6g} > R = {geom.service_radius:.6g}")
    for i in geom.zone_ids():
        c = geom.subcell(i).center
        if math.hypot(p.x - c.x, p.y - c.y) < geom.subcell(i).radius:
            return i
    return ZONE_RESIDUAL


def validate(geom: ClusterGeometry):
    """Check containment and pairwise disjointness.

    Returns a list of human-readable violations; empty list means the
    geometry satisfies every invariant.
    """
    problems = []
    for i in geom.zone_ids():
        sc = geom.subcell(i)
        if sc.center_distance + sc.radius > geom.service_radius:
            problems.append(
                f"subcell {i} extends outside the service disk "
                f"(d + r = {sc.center_distance + sc.radius:.6g} > R = "
                f"{geom.service_radius:.6g})"
            )
    for i in geom.zone_ids():
        for j in geom.zone_ids():
            if j <= i:
                continue
            a, b = geom.subcell(i), geom.subcell(j)
            gap = math.hypot(a.center.x - b.center.x, a.center.y - b.center.y)
            if gap <= a.radius + b.radius:
                problems.append(
                    f"subcells {i} and {j} overlap (center gap {gap:.6g} <= "
                    f"r{i} + r{j} = {a.radius + b.radius:.6g})"
                )
    return problems

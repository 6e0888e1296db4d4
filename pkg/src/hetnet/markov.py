"""Occupancy-state Markov chain: state enumeration, transition rates per
dynamic stage, generator assembly and the stationary distribution.

LTE occupancy is tracked per service and per zone (slot 0 is the LTE-only
zone, slot i-1 is sub-cell i); Wi-Fi occupancy per service and per sub-cell.
LTE units move in multiples of the service's per-session demand, Wi-Fi units
one at a time.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .demand import DemandRates, ServiceProfile
from .errors import ReducibleChain, SolverFailure, StateSpaceTooLarge
from .metrics import LinkProfile, SensitivityFactors, instantaneous_bitrate, state_bitrate

DEFAULT_STATE_CAP = 10**6
DENSE_SOLVER_LIMIT = 5000
RESIDUAL_TARGET = 1e-10


@dataclass(frozen=True)
class OccupancyState:
    """Busy bandwidth units: ``lte[k][slot]`` for service k (slot 0 = the
    LTE-only zone, slot i-1 = sub-cell i), ``wifi[k][i-2]`` for sub-cell i."""

    lte: tuple
    wifi: tuple

    def lte_total(self):
        return sum(sum(row) for row in self.lte)

    def wifi_total(self, zone):
        return sum(row[zone - 2] for row in self.wifi)

    def pool_occupancy(self, zone):
        """Total busy units in the LTE pool plus sub-cell ``zone``'s Wi-Fi."""
        return self.lte_total() + self.wifi_total(zone)

    def replace(self, k, lte_slot=None, lte_delta=0, wifi_zone=None, wifi_delta=0):
        lte = [list(row) for row in self.lte]
        wifi = [list(row) for row in self.wifi]
        if lte_slot is not None:
            lte[k][lte_slot] += lte_delta
        if wifi_zone is not None:
            wifi[k][wifi_zone - 2] += wifi_delta
        return OccupancyState(
            tuple(tuple(row) for row in lte), tuple(tuple(row) for row in wifi)
        )

    def as_tuple(self):
        return (self.lte, self.wifi)


@dataclass(frozen=True)
class ChainContext:
    """Everything the stage rates need besides the state itself."""

    services: tuple  # ServiceProfile per service
    lte_units: int
    wifi_units: dict  # sub-cell id -> Wi-Fi capacity
    zone_rates: dict  # sub-cell id -> tuple of DemandRates, one per service
    link: LinkProfile
    sensitivity: SensitivityFactors
    wifi_rate_bps: float
    p_switch: float = 0.5
    zone: int = 2  # sub-cell the performance metrics report on

    @property
    def rates(self):
        """Demand rates for the reported sub-cell, one entry per service."""
        return self.zone_rates[self.zone]

    def subcell_ids(self):
        return sorted(self.wifi_units)


def enumerate_states(lte_units, wifi_units, services, cap=DEFAULT_STATE_CAP):
    """All occupancy states satisfying both capacity constraints, in
    lexicographic order of their flattened unit vectors.

    ``wifi_units`` maps sub-cell id -> capacity.  Raises StateSpaceTooLarge
    as soon as the count passes ``cap``.
    """
    subcells = sorted(wifi_units)
    n_slots = 1 + len(subcells)
    per_service_lte = []
    for svc in services:
        step = svc.prb_demand
        per_service_lte.append(list(range(0, lte_units + 1, step)))

    def lte_rows():
        # per-service occupancy rows, joint total capped by lte_units
        def rec(k, used):
            if k == len(services):
                yield ()
                return
            for combo in itertools.product(per_service_lte[k], repeat=n_slots):
                total = sum(combo)
                if used + total > lte_units:
                    continue
                for rest in rec(k + 1, used + total):
                    yield (combo,) + rest

        return rec(0, 0)

    def wifi_rows():
        def rec(k, used):
            # used: per-subcell totals so far
            if k == len(services):
                yield ()
                return
            ranges = [range(0, wifi_units[sc] - used[j] + 1) for j, sc in enumerate(subcells)]
            for combo in itertools.product(*ranges):
                nxt = tuple(u + c for u, c in zip(used, combo))
                for rest in rec(k + 1, nxt):
                    yield (combo,) + rest

        return rec(0, (0,) * len(subcells))

    wifi_list = list(wifi_rows())
    states = []
    for lte in lte_rows():
        for wifi in wifi_list:
            states.append(OccupancyState(lte, wifi))
            if len(states) > cap:
                raise StateSpaceTooLarge(len(states), cap)
    states.sort(key=lambda s: s.as_tuple())
    return states


def _prefers_lte(state, ctx, zone):
    """Bit-rate selection rule for a fresh connect in a sub-cell where both
    networks still have room: LTE wins on its occupancy-degraded bit rate,
    ties included."""
    d_avg = instantaneous_bitrate(ctx.link)
    pool_cap = ctx.lte_units + ctx.wifi_units[zone]
    lte_rate = state_bitrate(
        d_avg, state.pool_occupancy(zone), pool_cap, ctx.sensitivity.bitrate
    )
    return lte_rate >= ctx.wifi_rate_bps


def stage_rates(state: OccupancyState, ctx: ChainContext):
    """Every enabled transition out of ``state`` as (target, rate, stage).

    Stage labels follow the dynamic-change taxonomy: 1 connect/disconnect in
    the LTE-only zone, 2 LTE connect/disconnect in a sub-cell, 3 Wi-Fi
    connect/disconnect, 4 horizontal handover, 5 vertical handover, 6
    intra-cell network switch.  Disconnect-side guards are occupancy-only so
    every allocated unit has a release path.
    """
    out = []
    b1 = ctx.lte_units
    total = state.lte_total()

    for k, svc in enumerate(ctx.services):
        n = svc.prb_demand
        r0 = ctx.rates[k]
        a0 = r0.fresh_residual + r0.horizontal
        pace0 = 1.0 / r0.residence_time + r0.exit_residual
        b11 = state.lte[k][0]

        # stage 1: the LTE-only zone
        if total + n <= b1:
            out.append((state.replace(k, lte_slot=0, lte_delta=n),
                        a0 * (b11 / n + 1.0) * pace0, "1+"))
        if b11 >= n:
            out.append((state.replace(k, lte_slot=0, lte_delta=-n),
                        a0 * (b11 / n) * pace0, "1-"))

        for zone in ctx.subcell_ids():
            slot = zone - 1
            rz = ctx.zone_rates[zone][k]
            ai = rz.fresh_zone * (1.0 + ctx.p_switch)
            pace = 1.0 / rz.residence_time
            b1i = state.lte[k][slot]
            bik = state.wifi[k][zone - 2]
            wifi_cap = ctx.wifi_units[zone]
            wifi_room = state.wifi_total(zone) + 1 <= wifi_cap
            lte_room = total + n <= b1

            # fresh connect in the sub-cell: target network per the
            # selection rule when both have room
            if lte_room and (not wifi_room or _prefers_lte(state, ctx, zone)):
                out.append((state.replace(k, lte_slot=slot, lte_delta=n),
                            ai * (b1i / n + 1.0) * pace, "2+"))
            elif wifi_room:
                out.append((state.replace(k, wifi_zone=zone, wifi_delta=1),
                            ai * (bik + 1.0) * pace, "3+"))

            if b1i >= n:
                out.append((state.replace(k, lte_slot=slot, lte_delta=-n),
                            ai * (b1i / n) * pace, "2-"))
            if bik >= 1:
                out.append((state.replace(k, wifi_zone=zone, wifi_delta=-1),
                            ai * bik * pace, "3-"))

            # stage 4: horizontal handover on LTE between the sub-cell and
            # the LTE-only zone (pool total unchanged)
            if b1i >= n:
                tgt = state.replace(k, lte_slot=0, lte_delta=n).replace(
                    k, lte_slot=slot, lte_delta=-n)
                out.append((tgt, (b11 / n + 1.0) * (b1i / n) * rz.horizontal, "4+"))
            if b11 >= n:
                tgt = state.replace(k, lte_slot=0, lte_delta=-n).replace(
                    k, lte_slot=slot, lte_delta=n)
                out.append((tgt, (b11 / n) * (b1i / n + 1.0) * rz.horizontal, "4-"))

            # stage 5: vertical handover Wi-Fi <-> LTE-only zone
            if bik >= 1 and lte_room:
                tgt = state.replace(k, lte_slot=0, lte_delta=n).replace(
                    k, wifi_zone=zone, wifi_delta=-1)
                out.append((tgt, bik * (b11 / n + 1.0) * rz.vertical, "5+"))
            if b11 >= n and wifi_room:
                tgt = state.replace(k, lte_slot=0, lte_delta=-n).replace(
                    k, wifi_zone=zone, wifi_delta=1)
                out.append((tgt, (bik + 1.0) * (b11 / n) * rz.vertical, "5-"))

            # stage 6: in-cell switch between the two networks; the bare
            # occupancy product is paced by 1/residence so it stays a rate
            if bik >= 1 and lte_room:
                tgt = state.replace(k, lte_slot=slot, lte_delta=n).replace(
                    k, wifi_zone=zone, wifi_delta=-1)
                out.append((tgt, (b1i / n + 1.0) * bik * pace, "6+"))
            if b1i >= n and wifi_room:
                tgt = state.replace(k, lte_slot=slot, lte_delta=-n).replace(
                    k, wifi_zone=zone, wifi_delta=1)
                out.append((tgt, (b1i / n) * (bik + 1.0) * pace, "6-"))

    return [(tgt, rate, stage) for tgt, rate, stage in out if rate > 0.0]


@dataclass
class TransitionModel:
    """Indexed state list plus the sparse generator (row sums zero)."""

    states: list
    generator: sparse.csr_matrix
    index: dict = field(repr=False, default=None)

    def __post_init__(self):
        if self.index is None:
            self.index = {s: i for i, s in enumerate(self.states)}

    @property
    def size(self):
        return len(self.states)


def build_generator(states, ctx: ChainContext) -> TransitionModel:
    """Assemble the generator from the stage rates and check irreducibility."""
    if not states:
        raise ValueError("state list is empty")
    index = {s: i for i, s in enumerate(states)}
    rows, cols, vals = [], [], []
    for u, state in enumerate(states):
        row_sum = 0.0
        for tgt, rate, _stage in stage_rates(state, ctx):
            v = index[tgt]  # KeyError here would mean a capacity bug
            rows.append(u)
            cols.append(v)
            vals.append(rate)
            row_sum += rate
        rows.append(u)
        cols.append(u)
        vals.append(-row_sum)
    q = sparse.csr_matrix(
        (vals, (rows, cols)), shape=(len(states), len(states))
    )
    if len(states) > 1:
        n_comp, labels = connected_components(q, directed=True, connection="strong")
        if n_comp > 1:
            comps = [np.flatnonzero(labels == c).tolist() for c in range(n_comp)]
            raise ReducibleChain(comps)
    return TransitionModel(states=list(states), generator=q, index=index)


def stationary(model: TransitionModel, residual_target=RESIDUAL_TARGET):
    """Stationary distribution: solve pi Q = 0 with sum(pi) = 1.

    Direct solve with one balance equation replaced by the normalization;
    dense below DENSE_SOLVER_LIMIT states, sparse LU above.
    """
    n = model.size
    if n == 1:
        return np.array([1.0])
    qt = model.generator.transpose().tocsr()
    b = np.zeros(n)
    b[-1] = 1.0
    if n <= DENSE_SOLVER_LIMIT:
        a = qt.toarray()
        a[-1, :] = 1.0
        solve = lambda rhs: np.linalg.solve(a, rhs)
    else:
        a = qt.tolil()
        a[-1, :] = 1.0
        a = a.tocsc()
        lu = sparse.linalg.splu(a)
        solve = lu.solve
    pi = solve(b)
    # a few rounds of iterative refinement to push pi Q = 0 to the target
    for _ in range(4):
        pi = np.maximum(pi, 0.0)
        pi /= pi.sum()
        residual = np.abs(qt @ pi).max()
        if residual <= residual_target:
            return pi
        defect = b - (a @ pi if n > DENSE_SOLVER_LIMIT else a.dot(pi))
        pi = pi + solve(defect)
    raise SolverFailure(residual, residual_target)


def dump_model(model: TransitionModel, path):
    """Write the off-diagonal rates as ``source target rate`` text lines."""
    coo = model.generator.tocoo()
    with open(path, "w") as fh:
        fh.write(f"# states {model.size}\n")
        for i, j, v in zip(coo.row, coo.col, coo.data):
            if i != j:
                fh.write(f"{i} {j} {float(v)!r}\n")

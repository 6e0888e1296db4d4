"""Discrete-event simulation of users, sessions and handovers.

A fixed population of agents moves by random waypoint inside the cluster.
Session arrivals are Poisson per service, holding times exponential, and the
bit-rate selection rule decides which network admits a session.  Zone
crossings trigger handovers; a handover that finds no capacity is a
connection loss.  Everything is driven by one event queue, so a seed fixes
the full trajectory.
"""

import heapq
import math
import random
from dataclasses import dataclass, field

from ..errors import ConfigInvalid
from ..geometry import ClusterGeometry, Point, validate, zone_of
from ..metrics import LinkProfile, SensitivityFactors, instantaneous_bitrate, state_bitrate
from ..mobility import RwpParams

ZONE_RESIDUAL = 0


@dataclass
class UserAgent:
    uid: int
    pos: tuple  # position at leg start
    waypoint: tuple
    speed: float
    leg_start: float  # absolute time the current leg began
    leg_end: float
    zone: int = ZONE_RESIDUAL
    sessions: list = field(default_factory=list)

    def position(self, t):
        if t >= self.leg_end:
            return self.waypoint
        f = (t - self.leg_start) / (self.leg_end - self.leg_start)
        return (
            self.pos[0] + f * (self.waypoint[0] - self.pos[0]),
            self.pos[1] + f * (self.waypoint[1] - self.pos[1]),
        )


@dataclass
class Session:
    sid: int
    user: UserAgent
    service: int  # index into config.services
    network: str  # "lte" or "wifi"
    zone: int
    units: int
    alive: bool = True


@dataclass
class SimConfig:
    geometry: ClusterGeometry
    mobility: RwpParams
    services: tuple  # ServiceProfile per service
    lte_units: int
    wifi_units: dict  # sub-cell id -> capacity
    link: LinkProfile
    sensitivity: SensitivityFactors
    wifi_rate_bps: float
    n_users: int = 20
    horizon: float = 10_000.0
    seed: int = 1
    warmup_fraction: float = 0.1
    static_users: bool = False
    max_events: int = None  # optional stop after this many events

    def check(self):
        problems = []
        if self.horizon <= 0:
            problems.append("horizon must be > 0")
        if self.n_users < 1:
            problems.append("need at least one user")
        if not 0.0 <= self.warmup_fraction < 1.0:
            problems.append("warmup fraction must be in [0, 1)")
        problems.extend(validate(self.geometry))
        if problems:
            raise ConfigInvalid(problems)


@dataclass
class SimReport:
    horizon: float
    events: int
    state_freq: dict  # occupancy tuple -> time fraction
    attempts: dict  # (zone, service) -> int
    blocked: dict  # (zone, service) -> int
    handovers_h: int
    handovers_v: int
    losses: int
    zone_time: dict  # zone -> user-time fraction
    subcell_entries: dict  # zone -> count
    subcell_entry_rate: dict  # zone -> entries per user-second
    mean_sojourn: dict  # zone -> s

    def blocking_ratio(self, zone, service):
        a = self.attempts.get((zone, service), 0)
        if a == 0:
            return float("nan")  # no observations
        return self.blocked.get((zone, service), 0) / a


def select_network(zone, lte_total, wifi_total, config: SimConfig, service_idx):
    """Admission decision for one session in ``zone``.

    LTE-only zone: LTE or blocked.  In a sub-cell the network with the
    higher bit rate among those with room wins (occupancy-degraded LTE rate
    vs the nominal Wi-Fi rate), ties to LTE.
    """
    svc = config.services[service_idx]
    lte_room = lte_total + svc.prb_demand <= config.lte_units
    if zone == ZONE_RESIDUAL:
        return "lte" if lte_room else "blocked"
    wifi_room = wifi_total + 1 <= config.wifi_units[zone]
    if lte_room and wifi_room:
        d_avg = instantaneous_bitrate(config.link)
        cap = config.lte_units + config.wifi_units[zone]
        lte_rate = state_bitrate(
            d_avg, lte_total + wifi_total, cap, config.sensitivity.bitrate
        )
        return "lte" if lte_rate >= config.wifi_rate_bps else "wifi"
    if lte_room:
        return "lte"
    if wifi_room:
        return "wifi"
    return "blocked"


class _Engine:
    """One simulation run; collects the report."""

    def __init__(self, config: SimConfig):
        config.check()
        self.cfg = config
        self.rng = random.Random(config.seed)
        self.heap = []
        self.seq = 0
        self.now = 0.0
        self.users = []
        self.n_services = len(config.services)
        subcells = sorted(config.wifi_units)
        self.slot = {z: i + 1 for i, z in enumerate(subcells)}  # lte slot per zone
        self.lte = [[0] * (1 + len(subcells)) for _ in range(self.n_services)]
        self.wifi = [{z: 0 for z in subcells} for _ in range(self.n_services)]
        self.sessions = {}
        self.next_sid = 0
        self.events = 0
        # statistics
        self.warmup = config.warmup_fraction * config.horizon
        self.state_time = {}
        self.last_change = self.warmup
        self.attempts = {}
        self.blocked = {}
        self.handovers_h = 0
        self.handovers_v = 0
        self.losses = 0
        self.zone_user_time = {}
        self.entries = {z: 0 for z in subcells}
        self.inside_since = {}
        self.sojourn_total = {z: 0.0 for z in subcells}
        self.sojourn_visits = {z: 0 for z in subcells}

    # -- event plumbing ----------------------------------------------------

    def push(self, t, kind, payload):
        self.seq += 1
        heapq.heappush(self.heap, (t, self.seq, kind, payload))

    def occupancy_key(self):
        return (
            tuple(tuple(row) for row in self.lte),
            tuple(tuple(w[z] for z in sorted(w)) for w in self.wifi),
        )

    def note_state(self, t):
        if t <= self.warmup:
            return
        start = max(self.last_change, self.warmup)
        if t > start:
            key = self.occupancy_key()
            self.state_time[key] = self.state_time.get(key, 0.0) + (t - start)
        self.last_change = t

    # -- mobility ----------------------------------------------------------

    def _uniform_point(self):
        r = self.cfg.geometry.service_radius * math.sqrt(self.rng.random())
        a = 2.0 * math.pi * self.rng.random()
        return (r * math.cos(a), r * math.sin(a))

    def start_leg(self, user, t):
        user.pos = user.position(t)
        user.waypoint = self._uniform_point()
        user.speed = self.rng.uniform(self.cfg.mobility.v_min, self.cfg.mobility.v_max)
        dist = math.dist(user.pos, user.waypoint)
        user.leg_start = t
        user.leg_end = t + dist / user.speed
        pause = (
            self.rng.expovariate(1.0 / self.cfg.mobility.pause_mean)
            if self.cfg.mobility.pause_mean > 0
            else 0.0
        )
        self.push(user.leg_end + pause, "waypoint", user.uid)
        self.schedule_crossings(user, t)

    def schedule_crossings(self, user, t):
        """Exact segment-circle intersections of the current leg."""
        p0, p1 = user.pos, user.waypoint
        dx, dy = p1[0] - p0[0], p1[1] - p0[1]
        a = dx * dx + dy * dy
        if a == 0.0:
            return
        for zone in self.cfg.geometry.zone_ids():
            sc = self.cfg.geometry.subcell(zone)
            fx, fy = p0[0] - sc.center.x, p0[1] - sc.center.y
            b = 2.0 * (dx * fx + dy * fy)
            c = fx * fx + fy * fy - sc.radius**2
            disc = b * b - 4.0 * a * c
            if disc <= 0.0:
                continue
            root = math.sqrt(disc)
            for frac, entering in (((-b - root) / (2 * a), True), ((-b + root) / (2 * a), False)):
                if 0.0 < frac < 1.0:
                    ct = user.leg_start + frac * (user.leg_end - user.leg_start)
                    self.push(ct, "crossing", (user.uid, zone, entering))

    # -- sessions ----------------------------------------------------------

    def try_admit(self, user, service_idx, zone, fresh):
        svc = self.cfg.services[service_idx]
        lte_total = sum(sum(row) for row in self.lte)
        wifi_total = sum(w[zone] for w in self.wifi) if zone != ZONE_RESIDUAL else 0
        choice = select_network(zone, lte_total, wifi_total, self.cfg, service_idx)
        if fresh and self.now > self.warmup:
            key = (zone, service_idx)
            self.attempts[key] = self.attempts.get(key, 0) + 1
            if choice == "blocked":
                self.blocked[key] = self.blocked.get(key, 0) + 1
        if choice == "blocked":
            return None
        self.note_state(self.now)
        if choice == "lte":
            units = svc.prb_demand
            self.lte[service_idx][self.slot.get(zone, 0)] += units
        else:
            units = 1
            self.wifi[service_idx][zone] += 1
        self.next_sid += 1
        sess = Session(self.next_sid, user, service_idx, choice, zone, units)
        self.sessions[sess.sid] = sess
        user.sessions.append(sess)
        return sess

    def release(self, sess):
        self.note_state(self.now)
        if sess.network == "lte":
            self.lte[sess.service][self.slot.get(sess.zone, 0)] -= sess.units
        else:
            self.wifi[sess.service][sess.zone] -= 1
        sess.alive = False
        self.sessions.pop(sess.sid, None)
        if sess in sess.user.sessions:
            sess.user.sessions.remove(sess)

    def handover(self, sess, new_zone):
        old_network, old_zone = sess.network, sess.zone
        svc = self.cfg.services[sess.service]
        self.release(sess)
        lte_total = sum(sum(row) for row in self.lte)
        wifi_total = (
            sum(w[new_zone] for w in self.wifi) if new_zone != ZONE_RESIDUAL else 0
        )
        choice = select_network(new_zone, lte_total, wifi_total, self.cfg, sess.service)
        if choice == "blocked":
            if self.now > self.warmup:
                self.losses += 1
            return
        self.note_state(self.now)
        if choice == "lte":
            units = svc.prb_demand
            self.lte[sess.service][self.slot.get(new_zone, 0)] += units
        else:
            units = 1
            self.wifi[sess.service][new_zone] += 1
        sess.network, sess.zone, sess.units, sess.alive = choice, new_zone, units, True
        self.sessions[sess.sid] = sess
        sess.user.sessions.append(sess)
        if self.now > self.warmup:
            if choice == old_network == "lte":
                self.handovers_h += 1
            else:
                self.handovers_v += 1

    # -- main loop ---------------------------------------------------------

    def run(self):
        cfg = self.cfg
        for uid in range(cfg.n_users):
            p = self._uniform_point()
            user = UserAgent(uid, p, p, cfg.mobility.v_min, 0.0, 0.0)
            user.zone = zone_of(cfg.geometry, Point(*p))
            self.users.append(user)
            if not cfg.static_users:
                self.start_leg(user, 0.0)
        for k, svc in enumerate(cfg.services):
            self.push(self.rng.expovariate(svc.cluster_arrival_rate), "arrival", k)
        zone_count = {}
        for user in self.users:
            zone_count[user.zone] = zone_count.get(user.zone, 0) + 1

        zone_mark = 0.0
        while self.heap:
            t, _, kind, payload = heapq.heappop(self.heap)
            if t > cfg.horizon:
                break
            # accumulate user-time per zone between events
            if t > self.warmup:
                start = max(zone_mark, self.warmup)
                if t > start:
                    for z, c in zone_count.items():
                        self.zone_user_time[z] = (
                            self.zone_user_time.get(z, 0.0) + c * (t - start)
                        )
            zone_mark = t
            self.now = t
            self.events += 1

            if kind == "arrival":
                svc = cfg.services[payload]
                self.push(t + self.rng.expovariate(svc.cluster_arrival_rate), "arrival", payload)
                user = self.users[self.rng.randrange(cfg.n_users)]
                sess = self.try_admit(user, payload, user.zone, fresh=True)
                if sess is not None:
                    self.push(t + self.rng.expovariate(1.0 / svc.mean_holding_time),
                              "departure", sess.sid)
            elif kind == "departure":
                sess = self.sessions.get(payload)
                if sess is not None and sess.alive:
                    self.release(sess)
            elif kind == "waypoint":
                self.start_leg(self.users[payload], t)
            elif kind == "crossing":
                uid, zone, entering = payload
                user = self.users[uid]
                new_zone = zone if entering else ZONE_RESIDUAL
                if new_zone == user.zone:
                    continue
                if entering:
                    if t > self.warmup:
                        self.entries[zone] += 1
                    self.inside_since[uid] = t
                else:
                    since = self.inside_since.pop(uid, None)
                    if since is not None and t > self.warmup:
                        self.sojourn_total[zone] += t - max(since, self.warmup)
                        self.sojourn_visits[zone] += 1
                old_zone = user.zone
                user.zone = new_zone
                zone_count[old_zone] -= 1
                zone_count[new_zone] = zone_count.get(new_zone, 0) + 1
                for sess in list(user.sessions):
                    if sess.zone == old_zone:
                        self.handover(sess, new_zone)

            if cfg.max_events is not None and self.events >= cfg.max_events:
                break
        else:
            self.now = cfg.horizon  # queue drained before the horizon

        stopped_early = cfg.max_events is not None and self.events >= cfg.max_events
        end = self.now if stopped_early else cfg.horizon
        if end > self.warmup:
            start = max(zone_mark, self.warmup)
            if end > start:
                for z, c in zone_count.items():
                    self.zone_user_time[z] = (
                        self.zone_user_time.get(z, 0.0) + c * (end - start)
                    )
        self.note_state(end)
        return self.report(end)

    def report(self, end):
        span = max(end - self.warmup, 1e-12)
        total_state = sum(self.state_time.values())
        freq = (
            {k: v / total_state for k, v in self.state_time.items()}
            if total_state > 0
            else {}
        )
        user_time = span * self.cfg.n_users
        zone_frac = {z: v / user_time for z, v in self.zone_user_time.items()}
        entry_rate = {z: c / user_time for z, c in self.entries.items()}
        sojourn = {
            z: (self.sojourn_total[z] / self.sojourn_visits[z]
                if self.sojourn_visits[z] else float("nan"))
            for z in self.sojourn_total
        }
        return SimReport(
            horizon=end,
            events=self.events,
            state_freq=freq,
            attempts=dict(self.attempts),
            blocked=dict(self.blocked),
            handovers_h=self.handovers_h,
            handovers_v=self.handovers_v,
            losses=self.losses,
            zone_time=zone_frac,
            subcell_entries=dict(self.entries),
            subcell_entry_rate=entry_rate,
            mean_sojourn=sojourn,
        )


def run(config: SimConfig) -> SimReport:
    """Run one replication; deterministic for a given seed."""
    return _Engine(config).run()

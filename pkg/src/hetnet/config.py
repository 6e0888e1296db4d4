"""Experiment configuration: TOML parsing, validation and serialization.

The file is the experiment's provenance, so unknown keys are hard errors.
``parse(serialize(cfg))`` returns an equal config for every valid config.
"""

import math
from dataclasses import dataclass, field

from .demand import ServiceProfile
from .errors import ConfigInvalid
from .geometry import ClusterGeometry, SubCell, validate
from .metrics import LinkProfile
from .mobility import DEFAULT_CV, RwpParams

SWEEP_VARIABLES = ("bler", "occupancy", "offered_load", "lambda_factor")
MODES = ("analytic", "simulate", "both")


@dataclass(frozen=True)
class SweepSpec:
    variable: str = "occupancy"
    start: float = 0.0
    stop: float = 1.0
    steps: int = 21
    fixed_occupancy: float = 0.0

    def values(self):
        span = self.stop - self.start
        return [self.start + span * i / (self.steps - 1) for i in range(self.steps)]


@dataclass(frozen=True)
class SimSpec:
    users: int = 20
    horizon: float = 20000.0
    seed: int = 1
    warmup_fraction: float = 0.1


@dataclass(frozen=True)
class ExperimentConfig:
    geometry: ClusterGeometry
    mobility: RwpParams
    services: tuple
    lte_units: int
    wifi_units: dict
    p_switch: float
    wifi_rate_bps: float
    link: LinkProfile
    lambda_factors: tuple
    theta_factors: tuple
    sweep: SweepSpec = field(default_factory=SweepSpec)
    simulation: SimSpec = field(default_factory=SimSpec)
    mode: str = "analytic"

    def sensitivity_pairs(self):
        """(bitrate, blocking) factor pairs; the shorter list is padded with
        its last entry so every configured value appears in the output."""
        n = max(len(self.lambda_factors), len(self.theta_factors))
        lam = list(self.lambda_factors) + [self.lambda_factors[-1]] * n
        the = list(self.theta_factors) + [self.theta_factors[-1]] * n
        return list(zip(lam[:n], the[:n]))

    def __post_init__(self):
        # wifi_units must be keyed exactly by the sub-cell ids
        object.__setattr__(self, "services", tuple(self.services))
        object.__setattr__(self, "lambda_factors", tuple(self.lambda_factors))
        object.__setattr__(self, "theta_factors", tuple(self.theta_factors))


class TomlError(ValueError):
    pass


def _parse_scalar(token, lineno):
    token = token.strip()
    if not token:
        raise TomlError(f"line {lineno}: empty value")
    if token.startswith("[") and token.endswith("]"):
        inner = token[1:-1].strip()
        if not inner:
            return []
        return [_parse_scalar(part, lineno) for part in inner.split(",")]
    if token.startswith('"') and token.endswith('"') and len(token) >= 2:
        return token[1:-1]
    if token in ("true", "false"):
        return token == "true"
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        raise TomlError(f"line {lineno}: cannot parse value {token!r}") from None


def _loads(text):
    """Parse the TOML subset this config format uses: tables, arrays of
    tables, and ``key = scalar-or-list`` lines."""
    root = {}
    current = root
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[["):
            if not line.endswith("]]"):
                raise TomlError(f"line {lineno}: malformed table array header")
            path = line[2:-2].strip().split(".")
            node = root
            for part in path[:-1]:
                node = node.setdefault(part, {})
                if not isinstance(node, dict):
                    raise TomlError(f"line {lineno}: {part} is not a table")
            arr = node.setdefault(path[-1], [])
            if not isinstance(arr, list):
                raise TomlError(f"line {lineno}: {path[-1]} is not a table array")
            current = {}
            arr.append(current)
        elif line.startswith("["):
            if not line.endswith("]"):
                raise TomlError(f"line {lineno}: malformed table header")
            path = line[1:-1].strip().split(".")
            node = root
            for part in path:
                node = node.setdefault(part, {})
                if not isinstance(node, dict):
                    raise TomlError(f"line {lineno}: {part} is not a table")
            current = node
        elif "=" in line:
            key, _, value = line.partition("=")
            key = key.strip()
            if not key:
                raise TomlError(f"line {lineno}: missing key")
            current[key] = _parse_scalar(value, lineno)
        else:
            raise TomlError(f"line {lineno}: cannot parse {line!r}")
    return root


def _section(data, name, keys, problems):
    raw = data.pop(name, None)
    if raw is None:
        problems.append(f"missing section [{name}]")
        return {}
    unknown = set(raw) - set(keys)
    for k in sorted(unknown):
        problems.append(f"unknown key {name}.{k}")
    return raw


def parse_config(text) -> ExperimentConfig:
    """Parse a TOML experiment description; raise ConfigInvalid with every
    problem found, not just the first."""
    try:
        data = _loads(text)
    except TomlError as exc:
        raise ConfigInvalid(f"not valid TOML: {exc}") from exc

    problems = []
    geo = _section(data, "geometry", {"service_radius", "subcells"}, problems)
    mob = _section(data, "mobility", {"v_max", "v_min", "pause_mean", "c_v"}, problems)
    services_raw = data.pop("services", None)
    nets = _section(
        data, "networks", {"lte_units", "wifi_units", "p_switch", "wifi_rate_bps"}, problems
    )
    link_raw = _section(
        data,
        "link",
        {"subcarrier_bandwidth_hz", "frequencies", "symbol_rate", "efficiency", "bler"},
        problems,
    )
    sens = _section(data, "sensitivity", {"lambda", "theta"}, problems)
    sweep_raw = data.pop("sweep", {})
    sim_raw = data.pop("simulation", {})
    mode = data.pop("mode", "analytic")
    for k in sorted(data):
        problems.append(f"unknown section [{k}]")

    subcells = []
    for idx, sc in enumerate(geo.get("subcells", [])):
        unknown = set(sc) - {"radius", "center_distance", "center_angle"}
        for k in sorted(unknown):
            problems.append(f"unknown key geometry.subcells[{idx}].{k}")
        try:
            subcells.append(
                SubCell(sc.get("radius", 0.0), sc.get("center_distance", 0.0),
                        sc.get("center_angle", 0.0))
            )
        except ValueError as exc:
            problems.append(f"geometry.subcells[{idx}]: {exc}")
    geometry = None
    try:
        geometry = ClusterGeometry(geo.get("service_radius", 0.0), tuple(subcells))
        for v in validate(geometry):
            problems.append(f"geometry: {v}")
    except ValueError as exc:
        problems.append(f"geometry: {exc}")

    mobility = None
    try:
        mobility = RwpParams(
            v_max=mob.get("v_max", 0.0),
            v_min=mob.get("v_min", 0.1),
            pause_mean=mob.get("pause_mean", 0.0),
            c_v=mob.get("c_v", DEFAULT_CV),
        )
    except ValueError as exc:
        problems.append(f"mobility: {exc}")

    services = []
    if not services_raw:
        problems.append("need at least one [[services]] entry")
    for idx, svc in enumerate(services_raw or []):
        unknown = set(svc) - {"id", "arrival_rate", "holding_time", "prb_demand"}
        for k in sorted(unknown):
            problems.append(f"unknown key services[{idx}].{k}")
        try:
            services.append(
                ServiceProfile(
                    service_id=svc.get("id", idx + 1),
                    cluster_arrival_rate=svc.get("arrival_rate", 0.0),
                    mean_holding_time=svc.get("holding_time", 0.0),
                    prb_demand=svc.get("prb_demand", 0),
                )
            )
        except ValueError as exc:
            problems.append(f"services[{idx}]: {exc}")

    lte_units = nets.get("lte_units", 0)
    wifi_list = nets.get("wifi_units", [])
    if geometry is not None and len(wifi_list) != len(geometry.subcells):
        problems.append(
            f"networks.wifi_units has {len(wifi_list)} entries for "
            f"{len(geometry.subcells)} subcells"
        )
    if lte_units < 0 or any(w < 0 for w in wifi_list):
        problems.append("bandwidth unit counts must be >= 0")
    p_switch = nets.get("p_switch", 0.5)
    if not 0.0 <= p_switch <= 1.0:
        problems.append("networks.p_switch must be in [0, 1]")
    wifi_rate = nets.get("wifi_rate_bps", 0.0)
    if wifi_rate < 0:
        problems.append("networks.wifi_rate_bps must be >= 0")

    link = None
    try:
        link = LinkProfile(
            subcarrier_bandwidth=link_raw.get("subcarrier_bandwidth_hz", 0.0),
            frequencies=link_raw.get("frequencies", 0),
            symbol_rate=link_raw.get("symbol_rate", 0.0),
            modulation_efficiency=link_raw.get("efficiency", 0.0),
            bler=link_raw.get("bler", 0.0),
        )
    except ValueError as exc:
        problems.append(f"link: {exc}")

    lam = tuple(sens.get("lambda", (1.0,)))
    the = tuple(sens.get("theta", (1.0,)))
    for name, vals in (("lambda", lam), ("theta", the)):
        if not vals or any(not 0.0 <= v <= 1.0 for v in vals):
            problems.append(f"sensitivity.{name} values must be in [0, 1]")

    unknown = set(sweep_raw) - {"variable", "start", "stop", "steps", "fixed_occupancy"}
    for k in sorted(unknown):
        problems.append(f"unknown key sweep.{k}")
    sweep = SweepSpec(
        variable=sweep_raw.get("variable", "occupancy"),
        start=sweep_raw.get("start", 0.0),
        stop=sweep_raw.get("stop", 1.0),
        steps=sweep_raw.get("steps", 21),
        fixed_occupancy=sweep_raw.get("fixed_occupancy", 0.0),
    )
    if sweep.variable not in SWEEP_VARIABLES:
        problems.append(f"sweep.variable must be one of {SWEEP_VARIABLES}")
    if sweep.steps < 2:
        problems.append("sweep.steps must be >= 2")
    if not 0.0 <= sweep.fixed_occupancy <= 1.0:
        problems.append("sweep.fixed_occupancy must be in [0, 1]")
    domains = {
        "bler": (0.0, 1.0),
        "occupancy": (0.0, 1.0),
        "lambda_factor": (0.0, 1.0),
        "offered_load": (0.0, math.inf),
    }
    lo, hi = domains.get(sweep.variable, (0.0, math.inf))
    if sweep.variable in domains and not (lo <= sweep.start <= hi and lo <= sweep.stop <= hi):
        problems.append(f"sweep range outside the domain of {sweep.variable}")

    unknown = set(sim_raw) - {"users", "horizon", "seed", "warmup_fraction"}
    for k in sorted(unknown):
        problems.append(f"unknown key simulation.{k}")
    sim = SimSpec(
        users=sim_raw.get("users", 20),
        horizon=sim_raw.get("horizon", 20000.0),
        seed=sim_raw.get("seed", 1),
        warmup_fraction=sim_raw.get("warmup_fraction", 0.1),
    )
    if sim.users < 1:
        problems.append("simulation.users must be >= 1")
    if sim.horizon <= 0:
        problems.append("simulation.horizon must be > 0")
    if mode not in MODES:
        problems.append(f"mode must be one of {MODES}")

    if problems:
        raise ConfigInvalid(problems)

    wifi_units = {
        zone: int(w) for zone, w in zip(geometry.zone_ids(), wifi_list)
    }
    return ExperimentConfig(
        geometry=geometry,
        mobility=mobility,
        services=tuple(services),
        lte_units=int(lte_units),
        wifi_units=wifi_units,
        p_switch=float(p_switch),
        wifi_rate_bps=float(wifi_rate),
        link=link,
        lambda_factors=lam,
        theta_factors=the,
        sweep=sweep,
        simulation=sim,
        mode=mode,
    )


def load_config(path) -> ExperimentConfig:
    with open(path, "rb") as fh:
        text = fh.read().decode("utf-8")
    return parse_config(text)


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return f'"{value}"'
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {value!r}")


def serialize_config(cfg: ExperimentConfig) -> str:
    """Render a config back to TOML; exact round trip through parse_config."""
    lines = []
    lines.append(f"mode = {_fmt(cfg.mode)}")
    lines.append("")
    lines.append("[geometry]")
    lines.append(f"service_radius = {_fmt(float(cfg.geometry.service_radius))}")
    for sc in cfg.geometry.subcells:
        lines.append("")
        lines.append("[[geometry.subcells]]")
        lines.append(f"radius = {_fmt(float(sc.radius))}")
        lines.append(f"center_distance = {_fmt(float(sc.center_distance))}")
        lines.append(f"center_angle = {_fmt(float(sc.center_angle))}")
    lines.append("")
    lines.append("[mobility]")
    lines.append(f"v_max = {_fmt(float(cfg.mobility.v_max))}")
    lines.append(f"v_min = {_fmt(float(cfg.mobility.v_min))}")
    lines.append(f"pause_mean = {_fmt(float(cfg.mobility.pause_mean))}")
    lines.append(f"c_v = {_fmt(float(cfg.mobility.c_v))}")
    for svc in cfg.services:
        lines.append("")
        lines.append("[[services]]")
        lines.append(f"id = {svc.service_id}")
        lines.append(f"arrival_rate = {_fmt(float(svc.cluster_arrival_rate))}")
        lines.append(f"holding_time = {_fmt(float(svc.mean_holding_time))}")
        lines.append(f"prb_demand = {svc.prb_demand}")
    lines.append("")
    lines.append("[networks]")
    lines.append(f"lte_units = {cfg.lte_units}")
    wifi = [cfg.wifi_units[z] for z in sorted(cfg.wifi_units)]
    lines.append(f"wifi_units = {_fmt(wifi)}")
    lines.append(f"p_switch = {_fmt(float(cfg.p_switch))}")
    lines.append(f"wifi_rate_bps = {_fmt(float(cfg.wifi_rate_bps))}")
    lines.append("")
    lines.append("[link]")
    lines.append(f"subcarrier_bandwidth_hz = {_fmt(float(cfg.link.subcarrier_bandwidth))}")
    lines.append(f"frequencies = {cfg.link.frequencies}")
    lines.append(f"symbol_rate = {_fmt(float(cfg.link.symbol_rate))}")
    lines.append(f"efficiency = {_fmt(float(cfg.link.modulation_efficiency))}")
    lines.append(f"bler = {_fmt(float(cfg.link.bler))}")
    lines.append("")
    lines.append("[sensitivity]")
    lines.append(f"lambda = {_fmt([float(v) for v in cfg.lambda_factors])}")
    lines.append(f"theta = {_fmt([float(v) for v in cfg.theta_factors])}")
    lines.append("")
    lines.append("[sweep]")
    lines.append(f"variable = {_fmt(cfg.sweep.variable)}")
    lines.append(f"start = {_fmt(float(cfg.sweep.start))}")
    lines.append(f"stop = {_fmt(float(cfg.sweep.stop))}")
    lines.append(f"steps = {cfg.sweep.steps}")
    lines.append(f"fixed_occupancy = {_fmt(float(cfg.sweep.fixed_occupancy))}")
    lines.append("")
    lines.append("[simulation]")
    lines.append(f"users = {cfg.simulation.users}")
    lines.append(f"horizon = {_fmt(float(cfg.simulation.horizon))}")
    lines.append(f"seed = {cfg.simulation.seed}")
    lines.append(f"warmup_fraction = {_fmt(float(cfg.simulation.warmup_fraction))}")
    return "\n".join(lines) + "\n"

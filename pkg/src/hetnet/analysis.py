"""Experiment evaluation: analytic chain, sweeps and result emission."""

import dataclasses
import json
import os
import tempfile

from . import metrics
from .config import ExperimentConfig
from .demand import demand_rates
from .errors import IoFailure
from .markov import ChainContext, build_generator, enumerate_states, stationary
from .metrics import SensitivityFactors, erlang_block, instantaneous_bitrate, offered_load
from .mobility import SpatialDensity
from .simulate import SimConfig, run as run_simulation, sample_occupancy, total_variation

CSV_COLUMNS = (
    "sweep_var",
    "sweep_value",
    "lambda_factor",
    "theta_factor",
    "mean_bitrate_bps",
    "mean_block_prob",
    "sim_bitrate_bps",
    "sim_block_prob",
    "sim_tv_distance",
)


class Analysis:
    """Mobility statistics, demand rates and the occupancy chain for one
    configuration.  The chain depends on the bit-rate sensitivity through the
    selection rule, so models are cached per factor."""

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.density = SpatialDensity()
        self.zone = min(cfg.geometry.zone_ids()) if cfg.geometry.subcells else 0
        self.zone_rates = {
            z: tuple(
                demand_rates(cfg.geometry, self.density, cfg.mobility, svc, z)
                for svc in cfg.services
            )
            for z in cfg.geometry.zone_ids()
        }
        self._models = {}

    def context(self, lam=None, theta=None) -> ChainContext:
        pairs = self.cfg.sensitivity_pairs()
        return ChainContext(
            services=self.cfg.services,
            lte_units=self.cfg.lte_units,
            wifi_units=dict(self.cfg.wifi_units),
            zone_rates=self.zone_rates,
            link=self.cfg.link,
            sensitivity=SensitivityFactors(
                bitrate=pairs[0][0] if lam is None else lam,
                blocking=pairs[0][1] if theta is None else theta,
            ),
            wifi_rate_bps=self.cfg.wifi_rate_bps,
            p_switch=self.cfg.p_switch,
            zone=self.zone,
        )

    def solved_chain(self, lam, theta):
        """(ctx, model, pi) for one sensitivity pair; model cached per
        bit-rate factor."""
        ctx = self.context(lam, theta)
        if lam not in self._models:
            states = enumerate_states(
                self.cfg.lte_units, self.cfg.wifi_units, self.cfg.services
            )
            model = build_generator(states, ctx)
            self._models[lam] = (model, stationary(model))
        model, pi = self._models[lam]
        return ctx, model, pi

    def base_blocking(self):
        """Erlang-B blocking for the reported sub-cell's offered load."""
        load = sum(
            offered_load(self.zone_rates[self.zone][k].fresh_zone, svc.mean_holding_time)
            for k, svc in enumerate(self.cfg.services)
        )
        return erlang_block(load, len(self.cfg.services))

    def sim_config(self, seed=None, link=None, arrival_scale=1.0):
        cfg = self.cfg
        services = tuple(
            dataclasses.replace(s, cluster_arrival_rate=s.cluster_arrival_rate * arrival_scale)
            for s in cfg.services
        )
        return SimConfig(
            geometry=cfg.geometry,
            mobility=cfg.mobility,
            services=services,
            lte_units=cfg.lte_units,
            wifi_units=dict(cfg.wifi_units),
            link=link or cfg.link,
            sensitivity=SensitivityFactors(*self.cfg.sensitivity_pairs()[0]),
            wifi_rate_bps=cfg.wifi_rate_bps,
            n_users=cfg.simulation.users,
            horizon=cfg.simulation.horizon,
            seed=cfg.simulation.seed if seed is None else seed,
            warmup_fraction=cfg.simulation.warmup_fraction,
        )


def _sim_columns(analysis: Analysis, report, lam, theta):
    """Empirical counterparts: occupancy-weighted bit rate, fresh blocking
    ratio in the reported zone, TV distance to the analytic chain."""
    cfg = analysis.cfg
    zone = analysis.zone
    d_avg = instantaneous_bitrate(cfg.link)
    cap = cfg.lte_units + cfg.wifi_units[zone]
    bit = 0.0
    for key, frac in report.state_freq.items():
        lte_rows, wifi_rows = key
        occ = sum(sum(r) for r in lte_rows) + sum(r[0] for r in wifi_rows)
        bit += frac * metrics.state_bitrate(d_avg, min(occ, cap), cap, lam)
    blocks = [
        report.blocking_ratio(zone, k)
        for k in range(len(cfg.services))
        if report.attempts.get((zone, k), 0) > 0
    ]
    block = sum(blocks) / len(blocks) if blocks else float("nan")
    ctx, model, pi = analysis.solved_chain(lam, theta)
    sim_pi = [report.state_freq.get(s.as_tuple(), 0.0) for s in model.states]
    extra = 1.0 - sum(sim_pi)  # empirical mass on states outside the chain
    tv = total_variation(sim_pi, pi) + 0.5 * max(extra, 0.0)
    return bit, block, tv


def run_experiment(cfg: ExperimentConfig):
    """One row per sweep point per sensitivity pair; see CSV_COLUMNS."""
    analysis = Analysis(cfg)
    sweep = cfg.sweep
    pairs = cfg.sensitivity_pairs()
    base_block = analysis.base_blocking()
    d_nominal = instantaneous_bitrate(cfg.link)
    rows = []
    sim_reports = {}
    for value in sweep.values():
        for lam, theta in pairs:
            if sweep.variable == "lambda_factor":
                lam = theta = value
            f_occ = value if sweep.variable == "occupancy" else sweep.fixed_occupancy
            bit_factor = metrics.congestion_factor(f_occ, 1.0, lam)
            blk_factor = metrics.congestion_factor(f_occ, 1.0, theta)
            if sweep.variable == "bler":
                link = dataclasses.replace(cfg.link, bler=value)
                bitrate = instantaneous_bitrate(link) * bit_factor
                block = base_block * blk_factor
            elif sweep.variable == "offered_load":
                bitrate = d_nominal * bit_factor
                block = erlang_block(value, len(cfg.services)) * blk_factor
            else:  # occupancy, lambda_factor
                bitrate = d_nominal * bit_factor
                block = base_block * blk_factor

            sim_bit = sim_block = sim_tv = ""
            if cfg.mode in ("simulate", "both"):
                key = value if sweep.variable in ("bler", "offered_load") else None
                if key not in sim_reports:
                    link = (
                        dataclasses.replace(cfg.link, bler=value)
                        if sweep.variable == "bler"
                        else None
                    )
                    scale = 1.0
                    if sweep.variable == "offered_load":
                        ref = analysis.base_blocking()  # keep zone load definition
                        base_load = sum(
                            offered_load(
                                analysis.zone_rates[analysis.zone][k].fresh_zone,
                                svc.mean_holding_time,
                            )
                            for k, svc in enumerate(cfg.services)
                        )
                        scale = value / base_load if base_load > 0 else 1.0
                    sim_reports[key] = run_simulation(
                        analysis.sim_config(link=link, arrival_scale=scale)
                    )
                sim_bit, sim_block, sim_tv = _sim_columns(
                    analysis, sim_reports[key], lam, theta
                )
            rows.append(
                {
                    "sweep_var": sweep.variable,
                    "sweep_value": value,
                    "lambda_factor": lam,
                    "theta_factor": theta,
                    "mean_bitrate_bps": bitrate,
                    "mean_block_prob": block,
                    "sim_bitrate_bps": sim_bit,
                    "sim_block_prob": sim_block,
                    "sim_tv_distance": sim_tv,
                }
            )
    return rows


def analyze_steady_state(cfg: ExperimentConfig):
    """Chain-weighted mean bit rate and blocking per sensitivity pair."""
    analysis = Analysis(cfg)
    rows = []
    for lam, theta in cfg.sensitivity_pairs():
        ctx, model, pi = analysis.solved_chain(lam, theta)
        rows.append(
            {
                "sweep_var": "steady_state",
                "sweep_value": 0.0,
                "lambda_factor": lam,
                "theta_factor": theta,
                "mean_bitrate_bps": metrics.mean_bitrate(pi, model, ctx),
                "mean_block_prob": metrics.mean_block(pi, model, ctx),
                "sim_bitrate_bps": "",
                "sim_block_prob": "",
                "sim_tv_distance": "",
            }
        )
    return rows


def simulate_replications(cfg: ExperimentConfig, seed, reps):
    """Agent-simulation rows, one per replication."""
    analysis = Analysis(cfg)
    lam, theta = cfg.sensitivity_pairs()[0]
    rows = []
    for rep in range(reps):
        report = run_simulation(analysis.sim_config(seed=seed + rep))
        sim_bit, sim_block, sim_tv = _sim_columns(analysis, report, lam, theta)
        rows.append(
            {
                "sweep_var": "replication",
                "sweep_value": float(rep),
                "lambda_factor": lam,
                "theta_factor": theta,
                "mean_bitrate_bps": "",
                "mean_block_prob": "",
                "sim_bitrate_bps": sim_bit,
                "sim_block_prob": sim_block,
                "sim_tv_distance": sim_tv,
            }
        )
    return rows


def _render(value):
    if value == "":
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit(rows, fmt, path):
    """Write rows atomically; deterministic byte output for equal rows."""
    if not rows:
        raise IoFailure("no result rows to emit")
    if fmt not in ("csv", "json"):
        raise IoFailure(f"unknown format {fmt!r}")
    if fmt == "csv":
        lines = [",".join(CSV_COLUMNS)]
        for row in rows:
            lines.append(",".join(_render(row[c]) for c in CSV_COLUMNS))
        payload = "\n".join(lines) + "\n"
    else:
        payload = json.dumps(rows, indent=2, sort_keys=True) + "\n"
    try:
        directory = os.path.dirname(os.path.abspath(path))
        fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc

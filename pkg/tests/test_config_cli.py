import json
from importlib.resources import files

import pytest

from hetnet.analysis import CSV_COLUMNS, emit, run_experiment
from hetnet.cli import EXIT_CONFIG, main
from hetnet.config import load_config, parse_config, serialize_config
from hetnet.errors import ConfigInvalid, IoFailure

REFERENCE_TEXT = files("hetnet").joinpath("data/reference.toml").read_text()


# -- parsing ------------------------------------------------------------------


def test_reference_config_parses(ref_cfg):
    assert ref_cfg.mode == "analytic"
    assert ref_cfg.lte_units == 60
    assert ref_cfg.wifi_units == {2: 4}
    assert ref_cfg.geometry.service_radius == 600.0
    assert ref_cfg.geometry.subcell(2).radius == 200.0
    assert ref_cfg.geometry.subcell(2).center_distance == 300.0
    assert [s.cluster_arrival_rate for s in ref_cfg.services] == [0.7, 0.5]
    assert [s.mean_holding_time for s in ref_cfg.services] == [6.0, 8.0]
    assert [s.prb_demand for s in ref_cfg.services] == [10, 15]
    assert ref_cfg.link.frequencies == 72
    assert ref_cfg.link.modulation_efficiency == 1.4766
    assert ref_cfg.mobility.v_max == 20.0


def test_round_trip_is_identity(ref_cfg):
    assert parse_config(serialize_config(ref_cfg)) == ref_cfg
    # and serialization itself is stable
    assert serialize_config(parse_config(serialize_config(ref_cfg))) == serialize_config(
        ref_cfg
    )


def test_sensitivity_pairs_pad_shorter_list(ref_cfg):
    assert ref_cfg.sensitivity_pairs() == [(1.0, 1.0), (0.99, 0.8), (0.99, 0.5)]


def test_sweep_values_include_endpoints(ref_cfg):
    values = ref_cfg.sweep.values()
    assert len(values) == 21
    assert values[0] == 0.0 and values[-1] == 1.0


def test_unknown_key_rejected():
    with pytest.raises(ConfigInvalid) as err:
        parse_config(REFERENCE_TEXT + "\n[link]\nfoo = 1\n")
    assert any("foo" in p for p in err.value.problems)


def test_unknown_section_rejected():
    with pytest.raises(ConfigInvalid):
        parse_config(REFERENCE_TEXT + "\n[extras]\nx = 1\n")


def test_missing_section_rejected():
    lines = REFERENCE_TEXT.splitlines()
    start = lines.index("[networks]")
    del lines[start : start + 5]
    with pytest.raises(ConfigInvalid) as err:
        parse_config("\n".join(lines))
    assert any("networks" in p for p in err.value.problems)


def test_all_problems_reported_at_once():
    text = REFERENCE_TEXT.replace("v_max = 20.0", "v_max = -1.0").replace(
        'variable = "occupancy"', 'variable = "nonsense"'
    )
    with pytest.raises(ConfigInvalid) as err:
        parse_config(text)
    assert len(err.value.problems) >= 2


def test_bad_wifi_units_count():
    with pytest.raises(ConfigInvalid):
        parse_config(REFERENCE_TEXT.replace("wifi_units = [4]", "wifi_units = [4, 2]"))


# -- emission -----------------------------------------------------------------


def test_emit_csv(tmp_path, ref_cfg):
    rows = run_experiment(ref_cfg)
    out = tmp_path / "rows.csv"
    emit(rows, "csv", out)
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 1 + 21 * 3  # sweep points x sensitivity pairs


def test_emit_json(tmp_path, ref_cfg):
    rows = run_experiment(ref_cfg)
    out = tmp_path / "rows.json"
    emit(rows, "json", out)
    data = json.loads(out.read_text())
    assert len(data) == len(rows)
    assert set(data[0]) == set(CSV_COLUMNS)


def test_emit_rejects_empty_and_bad_format(tmp_path):
    with pytest.raises(IoFailure):
        emit([], "csv", tmp_path / "x.csv")
    with pytest.raises(IoFailure):
        emit([{"a": 1}], "xml", tmp_path / "x.xml")


# -- sweep semantics ----------------------------------------------------------


def test_occupancy_sweep_blocking_ordered_by_sensitivity(ref_cfg):
    rows = run_experiment(ref_cfg)
    by_theta = {}
    for row in rows:
        by_theta.setdefault(row["theta_factor"], []).append(
            (row["sweep_value"], row["mean_block_prob"])
        )
    # a harder-discounting factor never reports more blocking
    for v1, v5 in zip(sorted(by_theta[1.0]), sorted(by_theta[0.5])):
        assert v1[1] <= v5[1]
    # blocking falls as the congestion discount grows with occupancy
    curve = [b for _, b in sorted(by_theta[1.0])]
    assert curve == sorted(curve, reverse=True)


def test_bler_sweep_bitrate_affine(ref_cfg):
    import dataclasses

    from hetnet.config import SweepSpec

    cfg = dataclasses.replace(
        ref_cfg, sweep=SweepSpec("bler", 0.0, 1.0, 11, 0.0)
    )
    rows = [r for r in run_experiment(cfg) if r["lambda_factor"] == 1.0]
    d0 = rows[0]["mean_bitrate_bps"]
    for row in rows:
        assert row["mean_bitrate_bps"] == pytest.approx(
            d0 * (1.0 - row["sweep_value"]), abs=1e-6
        )
    assert rows[-1]["mean_bitrate_bps"] == 0.0


# -- command line -------------------------------------------------------------


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "experiment.toml"
    path.write_text(REFERENCE_TEXT)
    return str(path)


def test_cli_validate_ok(config_file, capsys):
    assert main(["validate", config_file]) == 0
    assert "ok" in capsys.readouterr().out


def test_cli_validate_bad_config(tmp_path, capsys):
    path = tmp_path / "broken.toml"
    path.write_text(REFERENCE_TEXT.replace("lte_units = 60", "lte_units = -3"))
    assert main(["validate", str(path)]) == EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def test_cli_missing_file(tmp_path, capsys):
    assert main(["validate", str(tmp_path / "nope.toml")]) == EXIT_CONFIG


def test_cli_sweep_writes_csv(config_file, tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", config_file, "-o", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) > 1


def test_cli_analyze_writes_rows(config_file, tmp_path):
    out = tmp_path / "steady.csv"
    assert main(["analyze", config_file, "-o", str(out), "--format", "json"]) == 0
    data = json.loads(out.read_text())
    assert len(data) == 3  # one row per sensitivity pair
    for row in data:
        assert 0.0 <= row["mean_block_prob"] <= 1.0
        assert row["mean_bitrate_bps"] > 0.0


def test_cli_seeded_outputs_identical(config_file, tmp_path):
    # identical seeds give byte-identical files; a different seed does not
    a, b, c = (tmp_path / n for n in ("a.csv", "b.csv", "c.csv"))
    fast = REFERENCE_TEXT.replace("horizon = 20000.0", "horizon = 2000.0")
    path = tmp_path / "fast.toml"
    path.write_text(fast)
    assert main(["simulate", str(path), "-o", str(a), "--seed", "7"]) == 0
    assert main(["simulate", str(path), "-o", str(b), "--seed", "7"]) == 0
    assert main(["simulate", str(path), "-o", str(c), "--seed", "8"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes() != c.read_bytes()


def test_load_config_reads_files(config_file, ref_cfg):
    assert load_config(config_file) == ref_cfg

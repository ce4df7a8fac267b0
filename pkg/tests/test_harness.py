import json
import statistics
import subprocess
import sys

import pytest

from crowdsim.cli import main
from crowdsim.config import ConfigError, config_from_dict, parse_config, serialize_config
from crowdsim.experiment import aggregate, run_experiment
from crowdsim.report import EVAC_HEADER, STAGE_HEADER, format_value, read_report, render_report, write_report
from crowdsim.rng import derive_seed

SMALL_EVAC = {"n_vulnerable": 15, "n_normal": 45}


def stage_cfg(**kw):
    d = {"schema_version": 1, "mode": "stage", "seeds": [1], "params": {"run_length": 150}}
    if "maps" not in kw:
        d["map"] = "C"
    d.update(kw)
    return d


def write_json(path, d):
    path.write_text(json.dumps(d))
    return path


# ------------------------------------------------------------- config

def test_minimal_stage_config_gets_defaults(tmp_path):
    cfg = parse_config(write_json(tmp_path / "c.json",
                                  {"schema_version": 1, "mode": "stage", "map": "C", "seeds": [1]}))
    assert cfg.base == {"PN": 500, "BRF": 50, "PT": 10, "ST": 30, "SI": 10}
    assert cfg.points() == [{"map": "C", "PN": 500, "BRF": 50, "PT": 10, "ST": 30, "SI": 10}]
    assert cfg.seed_mode == "mixed" and cfg.workers == 1


def test_zero_pt_names_pt():
    with pytest.raises(ConfigError) as e:
        config_from_dict(stage_cfg(PT=0))
    assert e.value.key == "PT" and "PT" in str(e.value)
    with pytest.raises(ConfigError) as e:
        config_from_dict(stage_cfg(grid={"PT": [10, 0]}))
    assert "PT" in e.value.key


@pytest.mark.parametrize("d,key", [
    (stage_cfg(colour="red"), "colour"),
    (stage_cfg(params={"speed": 3}), "params.speed"),
    (stage_cfg(params={"PN": 3}), "params.PN"),
    (stage_cfg(grid={"XX": [1]}), "grid.XX"),
    (stage_cfg(grid={"SI": []}), "grid.SI"),
    (stage_cfg(seeds=[]), "seeds"),
    (stage_cfg(seeds=[1, 1]), "seeds"),
    (stage_cfg(seeds=[-1]), "seeds"),
    (stage_cfg(map="D"), "map"),
    (stage_cfg(seed_mode="other"), "seed_mode"),
    (stage_cfg(BRF=1.5), "BRF"),
    (stage_cfg(schema_version=2), "schema_version"),
    ({"mode": "stage", "seeds": [1]}, "schema_version"),
    (stage_cfg(mode="crowd"), "mode"),
    (stage_cfg(strategy="RGA"), "strategy"),
    ({"schema_version": 1, "mode": "evac", "seeds": [1], "map": "C"}, "map"),
    ({"schema_version": 1, "mode": "evac", "seeds": [1], "strategy": "XGA"}, "strategy"),
    ({"schema_version": 1, "mode": "evac", "seeds": [1], "params": {"max_ticks": 0}}, "params.max_ticks"),
])
def test_bad_configs_name_the_key(d, key):
    with pytest.raises(ConfigError) as e:
        config_from_dict(d)
    assert e.value.key == key


def test_file_errors(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        parse_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{\"mode\": ")
    with pytest.raises(ConfigError, match="malformed"):
        parse_config(bad)


@pytest.mark.parametrize("d", [
    stage_cfg(),
    stage_cfg(maps=["A", "C"], grid={"SI": [10, 20], "PN": [400]}, seed_mode="shared",
              output="x.csv", trace="t", workers=2),
    {"schema_version": 1, "mode": "evac", "seeds": [3, 1], "scenario": "S2",
     "params": {"swept_contact": True, "normal_speed": [1.0, 1.1]}},
])
def test_serialize_round_trip(tmp_path, d):
    cfg = config_from_dict(d)
    text = serialize_config(cfg)
    again = parse_config(write_json(tmp_path / "r.json", json.loads(text)))
    assert again == cfg
    assert serialize_config(again) == text


def test_grid_points_order():
    cfg = config_from_dict(stage_cfg(maps=["A", "C"], grid={"SI": [10, 20], "PN": [400, 600]}))
    pts = cfg.points()
    assert len(pts) == 8
    assert [(p["map"], p["PN"], p["SI"]) for p in pts[:4]] == [
        ("A", 400, 10), ("A", 400, 20), ("A", 600, 10), ("A", 600, 20)]


# ------------------------------------------------------------- experiment

@pytest.fixture(scope="module")
def si_rows():
    cfg = config_from_dict(stage_cfg(seeds=list(range(1, 11)), grid={"SI": [10, 20, 30, 40]}))
    return cfg, run_experiment(cfg)


def test_si_grid_row_counts(si_rows):
    _cfg, rows = si_rows
    assert sum(not r["aggregate"] for r in rows) == 40
    assert sum(r["aggregate"] for r in rows) == 4
    assert all(not r["error"] for r in rows)


def test_rows_sorted_by_point_then_seed(si_rows):
    _cfg, rows = si_rows
    keys = [(r["point"], r["aggregate"], r["seed"] or 0) for r in rows]
    assert keys == sorted(keys)
    assert [r["SI"] for r in rows if r["aggregate"]] == [10, 20, 30, 40]


def test_run_seeds_are_documented_mix(si_rows):
    cfg, rows = si_rows
    for r in rows:
        if not r["aggregate"]:
            assert r["run_seed"] == derive_seed(r["seed"], r["point"])
    shared = config_from_dict(stage_cfg(seeds=[5, 6], grid={"SI": [10, 20]}, seed_mode="shared"))
    assert {r["run_seed"] for r in run_experiment(shared) if not r["aggregate"]} == {5, 6}


def test_aggregates_match_members(si_rows):
    _cfg, rows = si_rows
    for agg in (r for r in rows if r["aggregate"]):
        members = [r for r in rows if not r["aggregate"] and r["point"] == agg["point"]]
        assert agg["n"] == len(members) == 10
        for m in ("F", "APS", "switch_count"):
            vals = [r[m] for r in members]
            assert agg[m] == pytest.approx(statistics.fmean(vals), abs=0, rel=1e-12)
            assert agg[f"{m}_std"] == pytest.approx(statistics.stdev(vals), rel=1e-12)


def test_aggregates_recomputable_from_csv(si_rows, tmp_path):
    _cfg, rows = si_rows
    back = read_report(write_report(rows, tmp_path / "si.csv"))
    for agg in (r for r in back if r["aggregate"]):
        members = [r for r in back if not r["aggregate"] and r["point"] == agg["point"]]
        for m in ("F", "APS", "switch_count"):
            vals = [r[m] for r in members]
            assert abs(agg[m] - statistics.fmean(vals)) <= 1e-4
            assert abs(agg[f"{m}_std"] - statistics.stdev(vals)) <= 1e-4


def test_seed_isolation(si_rows):
    """A point run alone gives the same numbers as inside the sweep."""
    _cfg, rows = si_rows
    alone = run_experiment(config_from_dict(stage_cfg(seeds=[4], SI=30, seed_mode="shared")))[0]
    inside = next(r for r in rows if r["SI"] == 30 and r["seed"] == 4)
    from crowdsim.stage import StageParams, run_stage_sim
    direct = run_stage_sim(StageParams(map="C", SI=30, run_length=150), inside["run_seed"])
    assert (inside["F"], inside["APS"]) == (direct.F, direct.APS)
    assert alone["run_seed"] == 4


def test_failed_runs_become_rows():
    cfg = config_from_dict(stage_cfg(seeds=[1, 2], grid={"PN": [100, 2601]}))
    rows = run_experiment(cfg)
    ok = [r for r in rows if r["PN"] == 100]
    bad = [r for r in rows if r["PN"] == 2601]
    assert all(not r["error"] for r in ok) and ok[-1]["n"] == 2
    assert [r["error"].split(":")[0] for r in bad[:2]] == ["StagePlacementError"] * 2
    assert bad[2]["aggregate"] and bad[2]["n"] == 0 and bad[2]["F"] is None
    assert bad[2]["error"] == "2 of 2 runs failed"


def test_evac_table_structure():
    cfg = config_from_dict({"schema_version": 1, "mode": "evac", "seeds": list(range(10)),
                            "params": SMALL_EVAC})
    rows = run_experiment(cfg)
    runs = [r for r in rows if not r["aggregate"]]
    aggs = [r for r in rows if r["aggregate"]]
    assert len(runs) == 120 and len(aggs) == 12
    assert [(a["scenario"], a["strategy"]) for a in aggs[:3]] == [
        ("S1", "RGA"), ("S1", "VEGA"), ("S1", "CGA")]
    assert all(not r["error"] for r in rows)
    for r in runs:
        assert r["ratio"] == pytest.approx(r["avg_N"] / r["avg_V"])


def test_workers_do_not_change_results():
    cfg = config_from_dict(stage_cfg(seeds=[1, 2, 3], grid={"SI": [10, 20]}))
    assert run_experiment(cfg, workers=2) == run_experiment(cfg, workers=1)


def test_aggregate_of_single_run_has_no_std():
    agg = aggregate([{"F": 0.1, "APS": 2.0, "switch_count": 3, "error": ""}], "stage")
    assert agg["n"] == 1 and agg["F"] == 0.1 and agg["F_std"] is None


# ------------------------------------------------------------- report

def test_format_contract():
    assert format_value(0.8567) == "0.8567"
    assert format_value(0.85674) == "0.8567"
    assert format_value(2.0) == "2.0000"
    assert format_value(7) == "7"
    assert format_value(True) == "true" and format_value(False) == "false"
    assert format_value(None) == ""


def test_empty_rows_create_no_file(tmp_path):
    out = tmp_path / "r.csv"
    with pytest.raises(ValueError):
        write_report([], out)
    assert not out.exists()
    assert list(tmp_path.iterdir()) == []


def test_unwritable_path(tmp_path, si_rows):
    with pytest.raises(OSError):
        write_report(si_rows[1], tmp_path / "no" / "such" / "dir.csv")


def test_report_layout(si_rows, tmp_path):
    _cfg, rows = si_rows
    path = write_report(rows, tmp_path / "r.csv")
    raw = path.read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    lines = raw.decode().splitlines()
    assert tuple(lines[0].split(",")) == STAGE_HEADER
    assert len(lines) == 45
    agg_col = STAGE_HEADER.index("aggregate")
    assert {ln.split(",")[agg_col] for ln in lines[1:]} == {"true", "false"}
    f_col = STAGE_HEADER.index("F")
    assert all(len(ln.split(",")[f_col].split(".")[1]) == 4 for ln in lines[1:])


def test_round_trip_at_declared_precision(si_rows, tmp_path):
    _cfg, rows = si_rows
    back = read_report(write_report(rows, tmp_path / "r.csv"))
    assert len(back) == len(rows)
    for a, b in zip(rows, back):
        for k in STAGE_HEADER:
            v = a.get(k)
            if isinstance(v, float):
                assert abs(v - b[k]) <= 5e-5
            elif v is None:
                assert b[k] is None
            else:
                assert v == b[k]


def test_evac_header_fixed():
    assert EVAC_HEADER[:4] == ("mode", "point", "scenario", "strategy")
    assert EVAC_HEADER[-1] == "error"
    assert {"avg_V", "avg_N", "ratio", "avg_all", "G1", "G2", "G3", "G4", "censored"} <= set(EVAC_HEADER)


def test_mixed_modes_rejected(si_rows):
    rows = [dict(si_rows[1][0]), dict(si_rows[1][0], mode="evac")]
    with pytest.raises(ValueError):
        render_report(rows)


def test_same_config_twice_is_byte_identical(tmp_path):
    d = stage_cfg(seeds=[1, 2, 3], grid={"SI": [10, 40]})
    a = write_report(run_experiment(config_from_dict(d)), tmp_path / "a.csv")
    b = write_report(run_experiment(config_from_dict(d)), tmp_path / "b.csv")
    assert a.read_bytes() == b.read_bytes()


# ------------------------------------------------------------- CLI

def test_cli_stage_run_with_trace(tmp_path):
    cfg = write_json(tmp_path / "c.json", stage_cfg(seeds=[1, 2], grid={"SI": [10, 20]}))
    out, tr = tmp_path / "out.csv", tmp_path / "tr"
    assert main(["stage", "run", "--config", str(cfg), "--trace", str(tr), "--output", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 1 + 4 + 2
    files = sorted(p.name for p in tr.iterdir())
    assert files == ["p000_s1.jsonl", "p000_s2.jsonl", "p001_s1.jsonl", "p001_s2.jsonl"]
    recs = [json.loads(x) for x in (tr / "p000_s1.jsonl").read_text().splitlines()]
    assert len(recs) == 150 and recs[0]["tick"] == 1


def test_cli_evac_run_to_stdout(tmp_path, capsys):
    cfg = write_json(tmp_path / "e.json", {"schema_version": 1, "mode": "evac", "seeds": [1],
                                           "scenario": "S3", "strategy": "CGA", "params": SMALL_EVAC})
    assert main(["evac", "run", "--config", str(cfg), "--trace", str(tmp_path / "t")]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert tuple(lines[0].split(",")) == EVAC_HEADER and len(lines) == 3
    rec = json.loads((tmp_path / "t" / "p000_s1.jsonl").read_text().splitlines()[0])
    assert set(rec) == {"tick", "id", "x", "y", "evacuated"}


def test_cli_sweep_and_validate(tmp_path, capsys):
    cfg = write_json(tmp_path / "c.json", stage_cfg(output=str(tmp_path / "o.csv")))
    assert main(["sweep", "--config", str(cfg)]) == 0
    assert (tmp_path / "o.csv").exists()
    capsys.readouterr()
    assert main(["validate", "--config", str(cfg)]) == 0
    assert json.loads(capsys.readouterr().out)["PN"] == 500


def test_cli_exit_codes(tmp_path, capsys):
    bad = write_json(tmp_path / "b.json", stage_cfg(PT=0))
    assert main(["sweep", "--config", str(bad)]) == 1
    assert "PT" in capsys.readouterr().err
    assert main(["validate", "--config", str(tmp_path / "nope.json")]) == 1
    cfg = write_json(tmp_path / "c.json", stage_cfg())
    assert main(["evac", "run", "--config", str(cfg)]) == 1
    failing = write_json(tmp_path / "f.json", stage_cfg(PN=2601, output=str(tmp_path / "f.csv")))
    assert main(["sweep", "--config", str(failing)]) == 2
    assert "StagePlacementError" in capsys.readouterr().err
    assert (tmp_path / "f.csv").exists()


def test_console_script(tmp_path):
    cfg = write_json(tmp_path / "c.json", stage_cfg())
    r = subprocess.run([sys.executable, "-m", "crowdsim.cli", "validate", "--config", str(cfg)],
                       capture_output=True, text=True)
    assert r.returncode == 0 and '"schema_version": 1' in r.stdout
    r = subprocess.run([sys.executable, "-m", "crowdsim.cli", "sweep"], capture_output=True, text=True)
    assert r.returncode == 2  # argparse usage error

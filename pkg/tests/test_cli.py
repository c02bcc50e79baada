"""Command-line harness: configs, exit codes, outputs and reproducibility."""

import csv
import json

import pytest

from smalldiv.cli import ExitCode, config_hash, main, normalize_config, run_experiment


def write_config(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def sweep_config(out):
    return {
        "command": "family-sweep",
        "trunc": 256,
        "out": str(out),
        "payload": {
            "eigenvalues": [{"value": "2"}],
            "terms": [{"param": "1", "series": {"2": 1}}],
            "geometry": {"kind": "points", "points": [[1], [2]]},
        },
    }


def test_bruno_golden_from_flags(tmp_path, capsys):
    out = tmp_path / "o"
    code = main(["bruno", "--rotation", "golden", "--depth", "60", "--out", str(out)])
    assert code == ExitCode.OK
    rows = read_csv(out / "bruno.bruno.csv")
    assert rows[0]["verdict"] == "bruno-like"
    assert abs(float(rows[0]["partial_sum"]) - 3.28612970123114) < 1e-12
    meta = json.loads((out / "bruno.meta.json").read_text())
    assert meta["command"] == "bruno" and meta["precision_bits"] == 256
    assert (out / "bruno.log").exists()


def test_family_sweep_radius_ratio(tmp_path):
    cfg = sweep_config(tmp_path / "o")
    assert main(["family-sweep", "--config", write_config(tmp_path, cfg)]) == ExitCode.OK
    rows = read_csv(tmp_path / "o" / "family_sweep.sweep.csv")
    r1, r2 = (float(r["radius_estimate"]) for r in rows)
    assert abs(r2 / r1 - 0.5) < 0.025


def test_negative_precision_is_a_config_error(tmp_path, capsys):
    out = tmp_path / "o"
    code = main(["bruno", "--rotation", "golden", "--prec-bits", "-5", "--out", str(out)])
    assert code == ExitCode.CONFIG
    assert not out.exists()
    assert "config error" in capsys.readouterr().err


def test_unknown_key_is_a_config_error(tmp_path):
    cfg = {"command": "bruno", "precision": 256, "out": str(tmp_path / "o")}
    assert main(["bruno", "--config", write_config(tmp_path, cfg)]) == ExitCode.CONFIG
    assert run_experiment({"command": "nonsense"}) == ExitCode.CONFIG


def test_resonance_exit_code(tmp_path, capsys):
    cfg = {
        "command": "linearize",
        "trunc": 8,
        "out": str(tmp_path / "o"),
        "payload": {"eigenvalues": [{"angle": "1/3"}], "germ": {"2": 1}},
    }
    assert main(["linearize", "--config", write_config(tmp_path, cfg)]) == ExitCode.RESONANCE
    assert "resonance" in capsys.readouterr().err
    assert not (tmp_path / "o").exists()


def test_reruns_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        cfg = sweep_config(out)
        cfg["trunc"] = 32
        assert run_experiment(cfg) == ExitCode.OK
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    for name in names:
        if name.endswith(".log"):
            continue
        assert (a / name).read_bytes() == (b / name).read_bytes()
    meta = json.loads((a / "family_sweep.meta.json").read_text())
    cfg = sweep_config(a)
    cfg["trunc"] = 32
    assert meta["config_sha256"] == config_hash(normalize_config(cfg))
    # the output directory is not part of the hash
    assert meta["config_sha256"] == config_hash(normalize_config(dict(cfg, out="elsewhere")))


def test_json_stdout(tmp_path, capsys):
    code = main(["resonances", "--angles", "1/5", "--max-order", "12", "--json", "--out", str(tmp_path)])
    assert code == ExitCode.OK
    payload = json.loads(capsys.readouterr().out)
    assert [r["index"] for r in payload["rows"]["resonances"]] == ["6", "11"]
    assert payload["summary"]["count"] == 2


def test_resonance_listing_from_values(tmp_path):
    code = main(["resonances", "--values", "1/2", "1/4", "--max-order", "3", "--out", str(tmp_path)])
    assert code == ExitCode.OK
    rows = read_csv(tmp_path / "resonances.resonances.csv")
    assert rows == [{"index": "2,0", "component": "1", "numeric_only": "false"}]


def test_verify_precision_passes_on_stable_run(tmp_path):
    cfg = {
        "command": "linearize",
        "trunc": 24,
        "out": str(tmp_path / "o"),
        "verify_precision": True,
        "payload": {"eigenvalues": [{"angle": "golden"}], "germ": {"2": 1}},
    }
    assert run_experiment(cfg) == ExitCode.OK
    log = (tmp_path / "o" / "linearize.log").read_text()
    assert "0 disagreement(s)" in log


@pytest.mark.parametrize(
    "cfg",
    [
        {"command": "capacity", "payload": {"points": [-1, 0, 1], "orders": [2], "strategy": "exact"}},
        {"command": "vf", "trunc": 4, "payload": {"eigenvalues": [{"value": "1"}], "field": {"2": 1}}},
        {"command": "centralizer", "trunc": 16,
         "payload": {"alpha": "golden", "germ": {"2": 1}, "betas": ["0", "1/2"]}},
    ],
)
def test_other_commands_run(tmp_path, cfg):
    cfg = dict(cfg, out=str(tmp_path))
    assert run_experiment(cfg) == ExitCode.OK
    meta = json.loads((tmp_path / (cfg["command"] + ".meta.json")).read_text())
    assert meta["tables"]


def test_capacity_three_points_via_cli(tmp_path):
    cfg = {"command": "capacity", "out": str(tmp_path),
           "payload": {"points": [-1, 0, 1], "orders": [2], "strategy": "exact"}}
    assert run_experiment(cfg) == ExitCode.OK
    rows = read_csv(tmp_path / "capacity.capacity.csv")
    assert float(rows[0]["d_n"]) == 2.0

"""Config layering, artifact determinism, exit codes of the batch runner."""

import json
import os

import pytest

from csoc import cli
from csoc.cli import (
    ConfigError,
    ScenarioConfig,
    config_from_layers,
    main,
    read_config_file,
)
from csoc.wiener import RNG_ALGORITHM


def read_bytes(path):
    with open(path, "rb") as fh:
        return fh.read()


def test_single_scenario_writes_report_and_manifest(tmp_path):
    out = tmp_path / "run"
    assert main(["run", "clifford", "--out-dir", str(out)]) == 0
    report = json.loads(read_bytes(out / "clifford.json"))
    assert report["passed"] is True
    assert report["scenario"] == "clifford"
    assert report["verifies"]
    manifest = json.loads(read_bytes(out / "manifest.json"))
    assert manifest["rng_algorithm"] == RNG_ALGORITHM
    assert manifest["seed"] == 0
    assert "timestamp" in manifest
    assert manifest["scenarios"] == ["clifford"]
    # timestamps live only in the manifest
    assert "timestamp" not in report


def test_reports_are_stable_json(tmp_path):
    out = tmp_path / "run"
    main(["run", "clifford", "--out-dir", str(out)])
    raw = read_bytes(out / "clifford.json")
    assert raw.endswith(b"\n")
    parsed = json.loads(raw)
    redumped = json.dumps(parsed, sort_keys=True, indent=2,
                          ensure_ascii=False) + "\n"
    assert raw == redumped.encode()


def test_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", "hjb-residual", "--out-dir", str(a), "--seed", "7"]) == 0
    assert main(["run", "hjb-residual", "--out-dir", str(b), "--seed", "7"]) == 0
    assert read_bytes(a / "hjb-residual.json") == read_bytes(b / "hjb-residual.json")
    assert read_bytes(a / "hjb-probes.json") == read_bytes(b / "hjb-probes.json")


def test_jobs_do_not_change_results(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", "hjb-residual", "--out-dir", str(a), "--jobs", "1"]) == 0
    assert main(["run", "hjb-residual", "--out-dir", str(b), "--jobs", "3"]) == 0
    assert read_bytes(a / "hjb-probes.json") == read_bytes(b / "hjb-probes.json")
    assert read_bytes(a / "hjb-residual.json") == read_bytes(b / "hjb-residual.json")


def test_probe_records_have_the_documented_shape(tmp_path):
    out = tmp_path / "run"
    main(["run", "hjb-residual", "--out-dir", str(out), "--probes", "8"])
    probes = json.loads(read_bytes(out / "hjb-probes.json"))["probes"]
    assert len(probes) == 8
    rec = probes[0]
    assert sorted(rec) == ["residual_im", "residual_re", "tau",
                           "w_star_im", "w_star_re", "z_im", "z_re"]
    assert len(rec["z_re"]) == 4


def test_failing_check_exits_one(tmp_path, monkeypatch, capsys):
    monkeypatch.setitem(cli.RUNNERS, "clifford",
                        lambda cfg: {"scenario": "clifford", "verifies": [],
                                     "passed": False})
    out = tmp_path / "run"
    assert main(["run", "clifford", "--out-dir", str(out)]) == 1
    assert "clifford: FAIL" in capsys.readouterr().out


def test_bad_flag_value_exits_two(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["run", "clifford", "--metric", "bogus"])
    assert exc.value.code == 2


def test_invalid_config_value_exits_two(tmp_path, capsys):
    out = tmp_path / "run"
    code = main(["run", "clifford", "--out-dir", str(out),
                 "--box-half-width", "-1.0"])
    assert code == 2
    assert "config error" in capsys.readouterr().err


def test_unknown_config_key_exits_two(tmp_path, capsys):
    ini = tmp_path / "bad.ini"
    ini.write_text("[common]\nwavelength = 3\n")
    code = main(["run", "clifford", "--config", str(ini),
                 "--out-dir", str(tmp_path / "run")])
    assert code == 2


def test_unknown_config_section_rejected(tmp_path):
    ini = tmp_path / "bad.ini"
    ini.write_text("[warp-drive]\nseed = 1\n")
    with pytest.raises(ConfigError):
        read_config_file(str(ini))


def test_domain_error_exits_three(tmp_path, capsys):
    out = tmp_path / "run"
    code = main(["run", "hjb-residual", "--out-dir", str(out),
                 "--tau-f", "inf"])
    assert code == 3
    assert "domain error" in capsys.readouterr().err


def test_config_file_sections_layer_under_flags(tmp_path):
    ini = tmp_path / "cfg.ini"
    ini.write_text("[common]\nseed = 5\nprobes = 16\n"
                   "[hjb-residual]\nprobes = 8\n")
    out_a = tmp_path / "a"
    main(["run", "hjb-residual", "--config", str(ini), "--out-dir", str(out_a)])
    manifest = json.loads(read_bytes(out_a / "manifest.json"))
    assert manifest["config"]["probes"] == "8"   # scenario section beats common
    assert manifest["config"]["seed"] == "5"
    out_b = tmp_path / "b"
    main(["run", "cr-scan", "--config", str(ini), "--out-dir", str(out_b)])
    manifest = json.loads(read_bytes(out_b / "manifest.json"))
    assert manifest["config"]["probes"] == "16"  # no cr-scan section
    out_c = tmp_path / "c"
    main(["run", "hjb-residual", "--config", str(ini), "--out-dir", str(out_c),
          "--probes", "4"])
    manifest = json.loads(read_bytes(out_c / "manifest.json"))
    assert manifest["config"]["probes"] == "4"   # flags beat the file


def test_env_var_provides_default_out_dir(tmp_path, monkeypatch):
    env_dir = tmp_path / "from-env"
    monkeypatch.setenv(cli.ENV_OUT_DIR, str(env_dir))
    assert main(["run", "clifford"]) == 0
    assert (env_dir / "clifford.json").exists()
    flag_dir = tmp_path / "from-flag"
    assert main(["run", "clifford", "--out-dir", str(flag_dir)]) == 0
    assert (flag_dir / "clifford.json").exists()


def test_config_round_trips_through_ini(tmp_path):
    cfg = ScenarioConfig(hbar=1 / 3, q=-1e-17, d_tau=0.1 + 2 ** -52,
                         sigma_y=0.7071067811865476,
                         potential="constant(0.2,0,-0.1,0)",
                         seed=123456789, out_dir="some/dir")
    ini = tmp_path / "cfg.ini"
    ini.write_text(cfg.to_ini())
    sections = read_config_file(str(ini))
    assert set(sections) == {"common"}
    cfg2 = config_from_layers(sections["common"])
    assert cfg2 == cfg


def test_config_validation_messages():
    with pytest.raises(ConfigError):
        ScenarioConfig(metric="euclidean")
    with pytest.raises(ConfigError):
        ScenarioConfig(epsilon=0)
    with pytest.raises(ConfigError):
        ScenarioConfig(tau_lo=1.0, tau_hi=0.5)
    with pytest.raises(ConfigError):
        config_from_layers({"n_paths": "many"})


def test_parser_rejects_unknown_scenario():
    with pytest.raises(SystemExit) as exc:
        main(["run", "everything"])
    assert exc.value.code == 2


def test_help_documents_defaults(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["run", "--help"])
    assert exc.value.code == 0
    text = capsys.readouterr().out
    assert "default: natural" in text
    assert "default: mostly-plus" in text

"""Command line: config validation, scenario runs, manifests, and plots."""

import json

import pytest

from hmhf_lab import cli, errors

MINIMAL_KATO = """
scenario = "kato"
[numerics]
seed = 11
samples = 2000
[output]
directory = "%s"
"""

MINIMAL_REDUCED = """
scenario = "reduced"
[flow]
dimension = 3
base_curvature = 0
tau_max = 2.0
[flow.scale]
kind = "static"
[output]
directory = "%s"
"""

MINIMAL_RADIAL = """
scenario = "radial"
[flow]
dimension = 7
base_curvature = 1
[map]
preset = "su_import"
epsilon = 1e-6
[output]
directory = "%s"
"""


def _write(tmp_path, body, name="config.toml"):
    path = tmp_path / name
    path.write_text(body)
    return path


def _run(tmp_path, template, name="out"):
    out = tmp_path / name
    cfg = _write(tmp_path, template % out, name="%s.toml" % name)
    code = cli.main(["run", str(cfg)])
    return code, out


def test_missing_scenario_is_rejected():
    with pytest.raises(errors.ConfigInvalid, match="scenario"):
        cli.validate_config({})


def test_unknown_scenario_is_rejected():
    with pytest.raises(errors.ConfigInvalid, match="bogus"):
        cli.validate_config({"scenario": "bogus"})


def test_wrong_value_type_names_key_and_type():
    with pytest.raises(errors.ConfigInvalid, match="numerics.samples expects int"):
        cli.validate_config({"scenario": "kato", "numerics": {"samples": "many"}})


def test_unknown_section_is_rejected():
    with pytest.raises(errors.ConfigInvalid, match="unknown section"):
        cli.validate_config({"scenario": "kato", "numerix": {}})


def test_unknown_nested_key_lists_alternatives():
    with pytest.raises(errors.ConfigInvalid, match="flow.scale.kinds"):
        cli.validate_config({"scenario": "reduced", "flow": {"scale": {"kinds": "x"}}})


def test_invalid_toml_exits_nonzero(tmp_path, capsys):
    cfg = _write(tmp_path, "scenario = [unclosed")
    assert cli.main(["run", str(cfg)]) == 1
    assert "config error" in capsys.readouterr().err


def test_kato_scenario_writes_report_and_manifest(tmp_path):
    code, out = _run(tmp_path, MINIMAL_KATO)
    assert code == 0
    report = json.loads((out / "kato" / "kato.json").read_text())
    assert report["violations"] == 0
    assert report["samples"] == 2000
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["scenario"] == "kato"
    assert manifest["expect_failures"] == []
    paths = [f["path"] for f in manifest["files"]]
    assert "kato/kato.json" in paths


def test_manifest_hashes_match_files(tmp_path):
    import hashlib

    code, out = _run(tmp_path, MINIMAL_KATO)
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    for entry in manifest["files"]:
        blob = (out / entry["path"]).read_bytes()
        assert hashlib.sha256(blob).hexdigest() == entry["sha256"]
        assert len(blob) == entry["bytes"]


def test_reruns_are_reproducible_except_timestamp(tmp_path):
    _, out1 = _run(tmp_path, MINIMAL_KATO, name="out1")
    _, out2 = _run(tmp_path, MINIMAL_KATO, name="out2")
    m1 = json.loads((out1 / "manifest.json").read_text())
    m2 = json.loads((out2 / "manifest.json").read_text())
    m1.pop("timestamp")
    m2.pop("timestamp")
    assert m1 == m2
    assert (out1 / "kato" / "kato.json").read_bytes() == (out2 / "kato" / "kato.json").read_bytes()


def test_reduced_scenario_reports_exact_oracle_row(tmp_path):
    code, out = _run(tmp_path, MINIMAL_REDUCED)
    assert code == 0
    rows = (out / "reduced" / "reduced.csv").read_text().strip().splitlines()
    header = rows[0].split(",")
    ri = header.index("r")
    ti = header.index("tau")
    ei = header.index("ell")
    hits = [
        row.split(",") for row in rows[1:]
        if row.split(",")[ri] == "2" and row.split(",")[ti] == "1"
    ]
    assert hits and float(hits[0][ei]) == 1.0
    report = json.loads((out / "reduced" / "reduced_report.json").read_text())
    assert report["agreement_rel"] <= 1e-6
    assert report["backend_pairs_checked"] > 0


def test_radial_scenario_matches_root(tmp_path):
    code, out = _run(tmp_path, MINIMAL_RADIAL)
    assert code == 0
    report = json.loads((out / "radial" / "exponent.json").read_text())
    assert report["N1"] == 2.0
    assert report["classification"] == "NodeConvergent"
    assert abs(report["fitted_exponent"] - 2.0) < 0.05
    assert report["exponent_matches_root"] is True


def test_expectation_failures_exit_two(tmp_path, capsys):
    body = MINIMAL_KATO + "[expect]\nviolations = 3\n"
    out = tmp_path / "out"
    cfg = _write(tmp_path, body % out)
    assert cli.main(["run", str(cfg)]) == 2
    captured = capsys.readouterr().out
    assert "EXPECT FAIL" in captured
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["expect_failures"]


def test_plot_requires_reports(tmp_path, capsys):
    assert cli.main(["plot", str(tmp_path)]) == 1
    assert "no scenario reports" in capsys.readouterr().err


def test_plot_emits_deterministic_svg_and_dat(tmp_path):
    code, out = _run(tmp_path, MINIMAL_KATO)
    assert code == 0
    assert cli.main(["plot", str(out)]) == 0
    svg = out / "kato" / "slack_hist.svg"
    dat = out / "kato" / "slack_hist.dat"
    assert svg.exists() and dat.exists()
    assert dat.read_text().startswith("# ")
    first = svg.read_bytes()
    assert cli.main(["plot", str(out)]) == 0
    assert svg.read_bytes() == first


def test_constants_subcommand_prints_frozen_values(capsys):
    assert cli.main(["constants", "--m", "2"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["Cbar_m"] == pytest.approx(44996969234064.42, rel=1e-12)
    assert payload["cbar_m"] == pytest.approx(7240117266494626.0, rel=1e-12)


def test_shipped_example_configs_run_clean(tmp_path, monkeypatch):
    from pathlib import Path

    configs = sorted((Path(__file__).resolve().parents[1] / "configs").glob("*.toml"))
    assert configs
    monkeypatch.chdir(tmp_path)
    for cfg in configs:
        assert cli.main(["run", str(cfg)]) == 0, cfg.name


def test_help_lists_schema_defaults(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["--help"])
    assert exc.value.code == 0
    text = capsys.readouterr().out
    assert "[flow.scale]" in text
    assert "shrinking_sphere" in text
    assert "unknown keys are rejected" in text

import json

import pytest

from stochalg.cli import main

BASE_CONFIG = {
    "schema": 1,
    "seed": 777,
    "suites": ["orthogonality", "twirled-core"],
    "contexts": [{"rep": {"kind": "weyl", "dim": 2},
                  "fiducial": {"kind": "random_mixed"}, "nu": {"kind": "dirac"}}],
    "samples": {"pairs": 15},
}


def _write(tmp_path, payload, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def test_run_writes_reports_and_exits_zero(tmp_path, capsys):
    cfg = _write(tmp_path, BASE_CONFIG)
    out = tmp_path / "reports"
    assert main(["run", "--config", cfg, "--out", str(out)]) == 0
    assert (out / "summary.json").exists()
    assert (out / "orthogonality.json").exists()
    assert (out / "timings.json").exists()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["passed"] is True
    assert "PASS" in capsys.readouterr().out


def test_run_is_deterministic(tmp_path):
    cfg = _write(tmp_path, BASE_CONFIG)
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    assert main(["run", "--config", cfg, "--out", str(out1)]) == 0
    assert main(["run", "--config", cfg, "--out", str(out2)]) == 0
    for name in ("summary.json", "orthogonality.json", "twirled-core.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_seed_override_changes_reports(tmp_path):
    cfg = _write(tmp_path, BASE_CONFIG)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--config", cfg, "--out", str(out1)]) == 0
    assert main(["run", "--config", cfg, "--out", str(out2), "--seed", "124"]) == 0
    s2 = json.loads((out2 / "summary.json").read_text())
    assert s2["seed"] == 124
    assert (out1 / "twirled-core.json").read_bytes() \
        != (out2 / "twirled-core.json").read_bytes()


def test_unknown_suite_exits_two(tmp_path):
    cfg = _write(tmp_path, {**BASE_CONFIG, "suites": ["nonsense"]})
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "x")]) == 2


def test_unreadable_config_exits_two(tmp_path):
    bad = tmp_path / "broken.json"
    bad.write_text("{not json")
    with pytest.raises(SystemExit) as exc:
        main(["run", "--config", str(bad), "--out", str(tmp_path / "x")])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        main(["run", "--config", str(tmp_path / "missing.json"),
              "--out", str(tmp_path / "x")])


def test_failing_suite_exits_one(tmp_path):
    cfg = _write(tmp_path, {**BASE_CONFIG,
                            "tolerances": {"orthogonality_finite": 0.0}})
    out = tmp_path / "fail"
    assert main(["run", "--config", cfg, "--out", str(out)]) == 1
    summary = json.loads((out / "summary.json").read_text())
    assert summary["passed"] is False


def test_demo_writes_tables(tmp_path):
    cfg = _write(tmp_path, {"seed": 5})
    out = tmp_path / "tables"
    assert main(["demo", "--config", cfg, "--out", str(out)]) == 0
    assert (out / "associativity_vs_dim.csv").exists()
    body = (out / "collapse_fiducial_mms.csv").read_text()
    assert body.splitlines()[0] == "dim,fiducial_mms_residual,passed"
    assert all(line.endswith("true") for line in body.splitlines()[1:])


def test_demo_without_seed_exits_two(tmp_path):
    cfg = _write(tmp_path, {"note": "no seed"})
    assert main(["demo", "--config", cfg, "--out", str(tmp_path / "t")]) == 2

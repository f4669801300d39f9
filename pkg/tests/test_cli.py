import csv
import json
import os

import pytest

from skewwalk.cli import COLUMNS, config_from_manifest, main, parse_config, run


def test_parse_lists():
    cfg = parse_config(["tightness-scan", "--alpha", "0.1,0.5", "--n", "64,256,1024", "--output", "x"])
    assert cfg.n == [64, 256, 1024]
    assert cfg.alpha == [0.1, 0.5]
    assert parse_config(cfg.to_argv()) == cfg


def test_bad_alpha_exit_code(capsys, tmp_path):
    assert main(["pmf", "--alpha", "1.5", "--output", str(tmp_path)]) == 2
    assert "alpha must lie in (0,1)" in capsys.readouterr().err


def test_usage_errors(tmp_path):
    assert main([]) == 1
    assert main(["bogus"]) == 2
    assert main(["pmf", "--alpha", "0.3,0.4", "--output", str(tmp_path)]) == 2
    assert main(["moments", "--j", "5", "--k", "3", "--output", str(tmp_path)]) == 2
    assert main(["moments", "--n", "4", "--horizon", "0.1", "--output", str(tmp_path)]) == 2


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_pmf_rows(tmp_path):
    assert main(["pmf", "--alpha", "0.7", "--n", "2", "--output", str(tmp_path)]) == 0
    rows = _read_csv(tmp_path / "pmf.csv")
    assert tuple(rows[0]) == COLUMNS["pmf"]
    probs = {int(r[1]): float(r[2]) for r in rows[1:]}
    assert probs == pytest.approx({-2: 0.15, 0: 0.5, 2: 0.35})


def test_scan_symmetric_below_three(tmp_path):
    assert main(["tightness-scan", "--alpha", "0.5", "--n", "16,64,256", "--output", str(tmp_path)]) == 0
    rows = _read_csv(tmp_path / "tightness-scan.csv")[1:]
    assert len(rows) == 3
    assert all(float(r[5]) < 3 for r in rows)


@pytest.mark.parametrize("command", ["convolution", "tauberian", "moments", "simulate", "converge"])
def test_every_command_runs(tmp_path, command):
    argv = [command, "--alpha", "0.3,0.7", "--n", "16", "--replicates", "2000", "--output", str(tmp_path)]
    assert main(argv) == 0
    rows = _read_csv(tmp_path / f"{command}.csv")
    assert tuple(rows[0]) == COLUMNS[command]
    assert len(rows) > 1


def test_json_and_manifest_round_trip(tmp_path):
    cfg = parse_config(["simulate", "--alpha", "0.6", "--n", "10", "--replicates", "3000",
                        "--seed", "4", "--format", "json", "--output", str(tmp_path / "a")])
    m1 = run(cfg)
    doc = json.loads((tmp_path / "a" / "simulate.json").read_text())
    assert doc["manifest"]["seed"] == 4
    assert set(doc["rows"][0]) == set(COLUMNS["simulate"])
    on_disk = json.loads((tmp_path / "a" / "manifest.json").read_text())
    again = config_from_manifest(on_disk)
    assert again == cfg
    m2 = run(again)
    assert m1["digests"] == m2["digests"]


def test_digests_independent_of_workers(tmp_path):
    base = ["simulate", "--alpha", "0.7", "--n", "20", "--replicates", "150000", "--seed", "3"]
    d = []
    for w, sub in [(1, "a"), (1, "b"), (2, "c")]:
        assert main(base + ["--workers", str(w), "--output", str(tmp_path / sub)]) == 0
        d.append((tmp_path / sub / "simulate.csv").read_bytes())
    assert d[0] == d[1] == d[2]


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("SKEWWALK_OUTPUT_DIR", str(tmp_path / "env"))
    assert main(["pmf", "--alpha", "0.4", "--n", "3"]) == 0
    assert (tmp_path / "env" / "pmf.csv").exists()


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["pmf", "--alpha", "0.4", "--output", str(blocker / "sub")]) == 3
    if os.geteuid() != 0:
        ro = tmp_path / "ro"
        ro.mkdir(mode=0o500)
        assert main(["pmf", "--alpha", "0.4", "--output", str(ro / "x")]) == 3

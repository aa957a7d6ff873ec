import csv
import json

import pytest

from loggamma_polymer import acceptance, cli
from loggamma_polymer.acceptance import CriterionResult
from loggamma_polymer.sampling import SEED_ENV_VAR


def run(argv, tmp_path, name="out"):
    out = tmp_path / name
    code = cli.main(argv + ["--output", str(out)])
    return code, out.read_text(encoding="utf-8")


def data_rows(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def test_endpoint_csv_shape(tmp_path):
    code, text = run(["endpoint", "--mu", "2", "--theta", "1", "--n", "512", "--replicas", "100", "--seed", "7"], tmp_path)
    assert code == 0
    assert text.startswith("# config: ")
    rows = data_rows(text)
    assert len(rows) == 100 * (2 * 15 + 1)
    assert {int(r["k"]) for r in rows} == set(range(-15, 16))


def test_same_command_same_bytes(tmp_path):
    argv = ["endpoint", "--n", "64", "--replicas", "20", "--seed", "3"]
    _, a = run(argv, tmp_path, "a")
    _, b = run(argv, tmp_path, "b")
    assert a == b


def test_workers_do_not_change_output(tmp_path):
    argv = ["arcsine", "--n", "256", "--replicas", "300", "--seed", "5"]
    _, a = run(argv, tmp_path, "a")
    _, b = run(argv + ["--workers", "2"], tmp_path, "b")
    assert a == b


def test_bad_parameters_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["endpoint", "--theta", "2.5", "--mu", "2"])
    assert exc.value.code == 2
    assert "0 < theta < mu" in capsys.readouterr().err


def test_unknown_flag_exit_2():
    with pytest.raises(SystemExit) as exc:
        cli.main(["endpoint", "--bogus"])
    assert exc.value.code == 2


def test_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(SEED_ENV_VAR, "19")
    _, text = run(["limit", "--K", "2", "--replicas", "3", "--format", "json"], tmp_path)
    assert json.loads(text)["config"]["seed"] == 19


def test_arcsine_summary(tmp_path):
    code, text = run(["arcsine", "--n", "4096", "--replicas", "10000"], tmp_path)
    summary = json.loads(text)
    assert code == 0 and summary["version"]
    assert summary["summary"]["ks_D"] < 0.03


def test_ldp_rate(tmp_path):
    _, text = run(["ldp", "--mu", "2", "--theta", "1.5", "--n", "8192", "--s", "0.5"], tmp_path)
    summary = json.loads(text)["summary"]
    assert summary["expected_rate"] == pytest.approx(1.0)
    assert summary["rate"] == pytest.approx(1.0, abs=0.05)


def test_p2p_csv_schema(tmp_path):
    _, text = run(["p2p", "--N", "16", "--replicas", "5", "--K", "2"], tmp_path)
    rows = data_rows(text)
    assert len(rows) == 5
    assert list(rows[0])[:8] == ["replica", "N", "p", "q", "thetaN", "thetaS", "m_N", "mode_mass"]
    assert len(rows[0]) == 8 + 5 * 3


def test_stationarity_summary(tmp_path):
    _, text = run(["stationarity", "--n", "32", "--replicas", "200"], tmp_path)
    summary = json.loads(text)["summary"]
    assert summary["pooled"] == 200 * 32
    assert summary["ks_pvalue_U"] > 0.001 and summary["ks_pvalue_V"] > 0.001


def _fake(passed):
    def check(master, workers=1):
        return CriterionResult(0, "fake", 0.0, "-", passed)

    return check


@pytest.mark.parametrize("outcomes,code", [((True, True), 0), ((True, False), 1)])
def test_verify_all_exit_code(monkeypatch, tmp_path, outcomes, code):
    monkeypatch.setattr(acceptance, "CRITERIA", tuple(_fake(o) for o in outcomes))
    assert cli.main(["verify-all", "--seed", "7", "--output", str(tmp_path / "v.json")]) == code
    report = json.loads((tmp_path / "v.json").read_text())
    assert report["summary"]["all_passed"] is (code == 0)

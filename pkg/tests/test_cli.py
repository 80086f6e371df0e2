"""CLI surface: subcommands, exit codes, machine-parsable failure reasons."""

import json

import numpy as np
import pytest

from lpdens.cli import main


@pytest.fixture(scope="module")
def data_csv(tmp_path_factory):
    rng = np.random.default_rng(41)
    path = tmp_path_factory.mktemp("cli") / "x.csv"
    np.savetxt(path, rng.exponential(size=1200), fmt="%.10f")
    return str(path)


@pytest.fixture(scope="module")
def design_json(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "design.json"
    path.write_text(json.dumps({
        "dgp": "exponential", "eval_points": [1.0], "n": 300, "reps": 12, "seed": 6,
    }))
    return str(path)


def test_density_happy_path(data_csv, capsys):
    code = main(["density", "--input", data_csv, "--grid", "10", "--format", "json"])
    records = json.loads(capsys.readouterr().out)
    assert code in (0, 2)
    assert len(records) == 10
    ok = [r for r in records if r["error"] is None]
    assert len(ok) >= 8
    for r in ok:
        assert set(r) == {"x", "v", "h", "p", "f_hat", "se", "ci_low", "ci_high",
                          "m_eff", "region", "error"}


def test_density_missing_input(capsys):
    code = main(["density", "--input", "/nonexistent.csv"])
    err = capsys.readouterr().err
    assert code == 1
    assert "error: input-not-found" in err


def test_density_partial_failure_exit_2(data_csv, capsys):
    code = main(["density", "--input", data_csv, "--grid-points=-5.0,1.0",
                 "--bandwidth", "0.4"])
    out = capsys.readouterr()
    records = json.loads(out.out)
    assert code == 2
    assert records[0]["error"] == "outside-support"
    assert records[1]["error"] is None
    assert "outside-support" in out.err


def test_density_csv_output_file(data_csv, tmp_path, capsys):
    out = tmp_path / "dens.csv"
    code = main(["density", "--input", data_csv, "--grid", "5",
                 "--format", "csv", "--output", str(out), "--bandwidth", "0.4"])
    assert code in (0, 2)
    header = out.read_text().splitlines()[0]
    assert header == "x,v,h,p,f_hat,se,ci_low,ci_high,m_eff,region,error"


def test_test_subcommand(data_csv, capsys):
    code = main(["test", "--input", data_csv, "--cutoff", "1.0"])
    res = json.loads(capsys.readouterr().out)
    assert code == 0
    assert res["p_point"] == 2 and res["p_infer"] == 3
    assert res["n_minus"] + res["n_plus"] == 1200
    assert 0.0 <= res["p_value"] <= 1.0


def test_test_restricted_dispatch(data_csv, capsys):
    code = main(["test", "--input", data_csv, "--cutoff", "1.0",
                 "--model", "restricted"])
    res = json.loads(capsys.readouterr().out)
    assert code == 0
    assert res["model"] == "restricted"


def test_test_empty_side(data_csv, capsys):
    code = main(["test", "--input", data_csv, "--cutoff", "-3.0"])
    err = capsys.readouterr().err
    assert code == 1
    assert "error: empty-side" in err


def test_simulate_runs_and_is_deterministic(design_json, capsys):
    code1 = main(["simulate", "--design", design_json, "--format", "csv"])
    out1 = capsys.readouterr().out
    code2 = main(["simulate", "--design", design_json, "--format", "csv",
                  "--threads", "3"])
    out2 = capsys.readouterr().out
    assert code1 == code2 == 0
    assert out1 == out2


def test_simulate_malformed_design(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"dgp": "exponential"}))
    code = main(["simulate", "--design", str(bad)])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_simulate_zero_reps(tmp_path, capsys):
    bad = tmp_path / "reps0.json"
    bad.write_text(json.dumps({
        "dgp": "exponential", "eval_points": [1.0], "n": 300, "reps": 0,
    }))
    code = main(["simulate", "--design", str(bad)])
    assert code == 1


def test_help_lists_defaults(capsys):
    with pytest.raises(SystemExit):
        main(["density", "--help"])
    text = capsys.readouterr().out
    for token in ("--p", "--kernel", "--bandwidth", "--alpha", "--threads",
                  "default: json", "triangular"):
        assert token in text


def test_threads_env_fallback(data_csv, monkeypatch, capsys):
    monkeypatch.setenv("LPDENS_THREADS", "2")
    from lpdens.cli import build_parser
    args = build_parser().parse_args(["density", "--input", data_csv])
    assert args.threads == 2

import csv
import io
import json
import math
import subprocess
import sys

import pytest

from npt_split.cli import CSV_COLUMNS, analyze_pnd, check_chains, ChainViolation, load_pnd_file, main, parse_grid
from npt_split.errors import EmptyGrid, NormalizationError, ParseError
from npt_split.states import make_fock, make_vacuum_two_mixture

from conftest import random_pnd

TOP_KEYS = ["schema_version", "input_spec", "pnd_summary", "classicality", "npt", "theorem_consistency", "timings"]


def run_json(capsys, *argv):
    assert main(["analyze", *argv]) == 0
    return json.loads(capsys.readouterr().out)


def run_csv(capsys, *argv):
    assert main(list(argv)) == 0
    return list(csv.DictReader(io.StringIO(capsys.readouterr().out)))


def test_analyze_fock(capsys):
    report = run_json(capsys, "--family", "fock", "--param", "m=1")
    assert list(report) == TOP_KEYS
    assert report["schema_version"] == 1
    assert report["npt"]["verdict"] == "npt"
    assert report["npt"]["method"] == "witness_2x2"
    assert report["npt"]["log_negativity"] == pytest.approx(1.0, abs=1e-10)
    assert report["classicality"] == {
        "verdict": "nonclassical",
        "detecting_kind": "L",
        "detecting_order": 1,
        "min_eigenvalue": pytest.approx(-0.5, abs=1e-12),
        "max_order_tested": 1,
    }
    assert all(report["theorem_consistency"].values())


def test_analyze_vacuum_two_mixture(capsys):
    report = run_json(capsys, "--family", "vacuum-two-mixture", "--param", "lambda=0.25")
    assert report["npt"]["method"] == "submatrix_H_tilde"
    assert report["npt"]["detecting_order"] == 1
    assert report["theorem_consistency"]["thm2_chain_ok"] is True


def test_analyze_poisson(capsys):
    report = run_json(capsys, "--family", "poisson", "--param", "mu=1")
    assert report["classicality"]["verdict"] == "classical_up_to_order"
    assert report["classicality"]["detecting_kind"] == "none"
    assert report["npt"]["verdict"] == "no_detection"
    assert report["npt"]["method"] is None
    assert report["theorem_consistency"] == {"thm1_chain_ok": True, "thm2_chain_ok": True}
    assert report["pnd_summary"]["n_max"] == 14


@pytest.mark.parametrize("mu", ["5", "20", "200"])
def test_large_classical_means_keep_chains(capsys, mu):
    # truncation bias and pmf rounding once tripped the antibunching chain here
    report = run_json(capsys, "--family", "poisson", "--param", f"mu={mu}")
    assert report["theorem_consistency"] == {"thm1_chain_ok": True, "thm2_chain_ok": True}
    assert report["npt"]["verdict"] == "no_detection"


def test_analyze_mixture_family(capsys):
    report = run_json(capsys, "--family", "mixture", "--param", "mu_1=0.5", "--param", "w_1=0.3",
                      "--param", "nbar_2=1", "--param", "w_2=0.7")
    assert report["npt"]["verdict"] == "no_detection"


def test_csv_summary(capsys):
    rows = run_csv(capsys, "analyze", "--family", "fock", "--param", "m=2", "--format", "csv-summary")
    assert len(rows) == 1 and list(rows[0]) == CSV_COLUMNS
    assert rows[0]["npt_verdict"] == "npt" and rows[0]["classical"] == "False"


def test_report_is_byte_stable_apart_from_timings(capsys):
    outs = []
    for _ in range(2):
        report = run_json(capsys, "--family", "binomial", "--param", "M=3", "--param", "eta=0.4")
        report.pop("timings")
        outs.append(json.dumps(report, sort_keys=False))
    assert outs[0] == outs[1]


def test_json_floats_round_trip(capsys):
    report = run_json(capsys, "--family", "thermal", "--param", "nbar=0.7")
    pnd = make_vacuum_two_mixture(0.25)
    direct = analyze_pnd(pnd, {})["npt"]["min_pt_eigenvalue"]
    assert json.loads(json.dumps(direct)) == direct
    assert isinstance(report["pnd_summary"]["mean"], float)


def test_out_flag(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(["analyze", "--family", "fock", "--param", "m=1", "--out", str(out)]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(out.read_text())["npt"]["verdict"] == "npt"


# ---------------------------------------------------------------- files


def write(tmp_path, text):
    path = tmp_path / "pnd.json"
    path.write_text(text)
    return path


def test_load_pnd_file_examples(tmp_path):
    assert load_pnd_file(write(tmp_path, '{"probs":[0,1]}')) == make_fock(1)
    assert load_pnd_file(write(tmp_path, '{"probs":[0.75,0,0.25],"tail_bound":0}')) == make_vacuum_two_mixture(0.25)
    with pytest.raises(NormalizationError, match="1.1"):
        load_pnd_file(write(tmp_path, '{"probs":[0.5,0.6]}'))


@pytest.mark.parametrize("text", ["not json", "[0, 1]", '{"p": [1]}', '{"probs": [1, "x"]}', '{"probs": [1], "extra": 1}'])
def test_load_pnd_file_parse_errors(tmp_path, text):
    with pytest.raises(ParseError):
        load_pnd_file(write(tmp_path, text))
    with pytest.raises(ParseError):
        load_pnd_file(tmp_path / "missing.json")


def test_analyze_file(tmp_path, capsys):
    path = write(tmp_path, '{"probs":[0.75,0,0.25]}')
    report = run_json(capsys, "--pnd-file", str(path))
    assert report["input_spec"] == {"family": "file", "path": str(path)}
    assert report["npt"]["method"] == "submatrix_H_tilde"


# ---------------------------------------------------------------- exit codes


def test_exit_code_input_error(tmp_path, capsys):
    path = write(tmp_path, '{"probs":[0.5,0.6]}')
    assert main(["analyze", "--pnd-file", str(path)]) == 3
    assert "NormalizationError" in capsys.readouterr().err
    assert main(["analyze", "--family", "poisson", "--param", "mu=-1"]) == 3


@pytest.mark.parametrize(
    "argv",
    [
        ["analyze"],
        ["analyze", "--family", "fock", "--param", "m"],
        ["analyze", "--family", "fock", "--param", "m=1", "--pnd-file", "x.json"],
        ["sweep", "--family", "fock", "--sweep", "m=1:5"],
    ],
)
def test_exit_code_usage(argv, capsys):
    assert main(argv) == 2


def test_argparse_usage_errors_exit_2(capsys):
    for argv in (["bogus"], ["analyze", "--family", "fock", "--param", "m=1", "--orders", "0"],
                 ["analyze", "--family", "fock", "--param", "m=1", "--format", "xml"]):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2


def test_chain_violation_exit_code(monkeypatch, capsys):
    import npt_split.cli as cli

    real = cli.analyze_pnd

    def broken(*args, **kwargs):
        report = real(*args, **kwargs)
        report["theorem_consistency"]["thm1_chain_ok"] = False
        return report

    monkeypatch.setattr(cli, "analyze_pnd", broken)
    assert main(["analyze", "--family", "fock", "--param", "m=1"]) == 4
    with pytest.raises(ChainViolation):
        check_chains({"theorem_consistency": {"thm1_chain_ok": True, "thm2_chain_ok": False}})


# ---------------------------------------------------------------- sweeps


def test_parse_grid():
    key, grid = parse_grid("lambda=0.05:0.5:0.05")
    assert key == "lambda" and len(grid) == 10 and grid[-1] == 0.5
    assert parse_grid("m=1:5:1")[1] == [1, 2, 3, 4, 5]
    with pytest.raises(EmptyGrid):
        parse_grid("m=5:1:1")
    with pytest.raises(EmptyGrid):
        parse_grid("m=1:5:0")


def test_sweep_vacuum_two_mixture(capsys):
    rows = run_csv(capsys, "sweep", "--family", "vacuum-two-mixture", "--sweep", "lambda=0.05:0.5:0.05", "--jobs", "1")
    assert len(rows) == 10
    assert list(rows[0]) == ["lambda"] + CSV_COLUMNS
    assert all(r["npt_verdict"] == "npt" for r in rows)
    assert not any(r["npt_method"] == "witness_2x2" for r in rows)


def test_sweep_binomial(capsys):
    rows = run_csv(capsys, "sweep", "--family", "binomial", "--param", "M=2", "--sweep", "eta=0.1:0.9:0.1", "--jobs", "1")
    assert len(rows) == 9
    assert all(r["npt_method"] == "witness_2x2" for r in rows)


def test_sweep_fock_log_negativity_increasing(capsys):
    rows = run_csv(capsys, "sweep", "--family", "fock", "--sweep", "m=1:5:1", "--jobs", "1")
    values = [float(r["log_negativity"]) for r in rows]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_sweep_parallel_keeps_grid_order(capsys):
    serial = run_csv(capsys, "sweep", "--family", "thermal", "--sweep", "nbar=0.2:1.6:0.2", "--jobs", "1")
    parallel = run_csv(capsys, "sweep", "--family", "thermal", "--sweep", "nbar=0.2:1.6:0.2", "--jobs", "2")
    assert [r["nbar"] for r in parallel] == [r["nbar"] for r in serial]
    assert [r["min_pt_eigenvalue"] for r in parallel] == [r["min_pt_eigenvalue"] for r in serial]


def test_sweep_error_names_offending_value(capsys):
    assert main(["sweep", "--family", "binomial", "--param", "M=2", "--sweep", "eta=0.5:1.5:0.5", "--jobs", "1"]) == 3
    assert "eta=1.5" in capsys.readouterr().err


# ---------------------------------------------------------------- reports from random input


def test_every_report_satisfies_both_chains(rng):
    for _ in range(40):
        report = analyze_pnd(random_pnd(rng), {"family": "file"})
        assert all(report["theorem_consistency"].values())
        assert math.isfinite(report["npt"]["log_negativity"])


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "npt_split", "analyze", "--family", "fock", "--param", "m=1", "--format", "csv-summary"],
        capture_output=True, text=True, check=True,
    )
    assert proc.stdout.startswith(",".join(CSV_COLUMNS))

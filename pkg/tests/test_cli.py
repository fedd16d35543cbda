from __future__ import annotations

import json

import pytest

from caeigen.cli import main


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_rule_parse(capsys):
    code, report = run_json(capsys, ["rule", "parse", "--rule", "eca:110"])
    assert code == 0
    assert report["results"]["rule"]["table"] == [0, 1, 1, 1, 0, 1, 1, 0]
    assert report["spec"]["command"] == "rule parse"
    assert report["version"]


def test_rule_info_balance(capsys):
    code, report = run_json(capsys, ["rule", "info", "--rule", "life:B3/S23"])
    assert code == 0
    assert report["results"]["balance"]["symbol_counts"] == [372, 140]
    assert report["results"]["radius"] == 1


def test_rule_surjective_witness(capsys):
    code, report = run_json(capsys, ["rule", "surjective", "--rule", "eca:110"])
    assert code == 0
    v = report["results"]["surjectivity"]
    assert v["status"] == "NotSurjective" and v["method"] == "deBruijn1D"
    assert v["witness"]["cells"]


def test_step_command(capsys):
    code, report = run_json(
        capsys, ["step", "--rule", "eca:90", "--config", "0001", "--steps", "2"]
    )
    assert code == 0
    assert report["results"]["result"]["cells"] == [0, 0, 0, 0]


def test_blocking_search_majority(capsys):
    code, report = run_json(
        capsys, ["blocking", "search", "--rule", "eca:232", "--max-len", "2"]
    )
    assert code == 0
    words = {
        "".join(map(str, v["word"]["cells"])) for v in report["results"]["search"]["certified"]
    }
    assert {"00", "11"} <= words


def test_blocking_certify_unknown_exit_code(capsys):
    code, report = run_json(
        capsys, ["blocking", "certify", "--rule", "eca:90", "--word", "00"]
    )
    assert code == 2
    assert report["results"]["verdict"]["status"] == "Unknown"
    assert report["warnings"]


def test_blocking_refute_witness_roundtrip(capsys):
    code, report = run_json(
        capsys,
        ["blocking", "refute", "--rule", "eca:170", "--word", "0110", "--horizon", "5"],
    )
    assert code == 0
    v = report["results"]["verdict"]
    assert v["status"] == "Refuted"
    assert v["witness"]["time"] <= 5


def test_trace_command(capsys):
    code, report = run_json(
        capsys,
        ["trace", "--rule", "eca:51", "--config", "00000", "--n", "0", "--horizon", "3"],
    )
    assert code == 0
    cells = [w["cells"][0] for w in report["results"]["windows"]]
    assert cells == [0, 1, 0, 1]


def test_qn_estimate_json_and_warning(capsys):
    code, report = run_json(
        capsys,
        ["qn", "estimate", "--rule", "eca:204", "--n", "2", "--k", "2", "--samples", "100"],
    )
    assert code == 0
    assert report["results"]["estimate"]["point"] == 1.0
    code, report = run_json(
        capsys,
        ["qn", "estimate", "--rule", "eca:170", "--n", "1", "--k", "4",
         "--horizon", "48", "--samples", "40"],
    )
    assert code == 2  # fully censored
    assert any("censored" in w for w in report["warnings"])


def test_qn_estimate_csv(capsys):
    code = main(
        ["qn", "estimate", "--rule", "eca:204", "--n", "1", "--k", "1",
         "--samples", "20", "--format", "csv"]
    )
    out = capsys.readouterr().out
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("# spec:")
    assert lines[1].split(",")[:3] == ["rule", "n", "k"]
    assert lines[2].split(",")[5] == "1.0"


def test_spectrum_csv(capsys):
    code = main(
        ["spectrum", "--rule", "eca:51", "--pmax", "4", "--N", "512",
         "--samples", "5", "--format", "csv"]
    )
    out = capsys.readouterr().out
    assert code == 0
    rows = [line.split(",") for line in out.strip().splitlines()[2:]]
    mags = {r[0]: float(r[1]) for r in rows}
    assert mags["1/2"] > 0.4 and mags["1/3"] < 0.05


def test_spectrum_custom_observable(capsys):
    code, report = run_json(
        capsys,
        ["spectrum", "--rule", "eca:51", "--observable", "[11]@-1", "--pmax", "3",
         "--N", "256", "--samples", "4"],
    )
    assert code == 0
    assert report["results"]["spectrum"]["points"]


def test_factor_build_verify_roundtrip(capsys, tmp_path):
    path = tmp_path / "factor.json"
    code = main(
        ["factor", "build", "--rule", "eca:51", "--word", "00", "--n", "1",
         "--out", str(path)]
    )
    capsys.readouterr()
    assert code == 0
    saved = json.loads(path.read_text())
    fm = saved["results"]["factor"]
    assert fm["period"] == 2

    factor_file = tmp_path / "fm.json"
    factor_file.write_text(json.dumps(fm))
    code2, report2 = run_json(
        capsys,
        ["factor", "verify", "--factor", str(factor_file), "--samples", "50",
         "--horizon", "20"],
    )
    assert code2 == 0
    assert report2["results"]["verify"]["verified"] is True


def test_factor_build_trivial_period_is_an_error(capsys):
    code = main(["factor", "build", "--rule", "eca:232", "--word", "00"])
    err = capsys.readouterr().err
    assert code == 1
    assert "TrivialPeriod" in err


def test_replay_byte_identical(capsys):
    argv = ["qn", "estimate", "--rule", "eca:232", "--n", "1", "--k", "4",
            "--samples", "50", "--seed", "11"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    second = capsys.readouterr().out
    assert first == second


def test_gilman_cli(capsys):
    code, report = run_json(
        capsys, ["gilman", "--rule", "eca:170", "--samples", "50", "--horizon", "32"]
    )
    assert code == 0
    assert report["results"]["gilman"]["class"] == "C"
    assert report["warnings"]  # heuristic classification warning

import csv
import io
import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from coherence_lab import cli, verify
from coherence_lab.cli import build_parser, run

GOLDEN = Path(__file__).parent / "golden"


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


# -- measure -----------------------------------------------------------------


def test_measure_werner_half(capsys):
    code, out, _ = call(capsys, "measure", "--family", "werner", "--z", "0.5")
    assert code == 0
    assert json.loads(out)["E"] == 0.25


def test_measure_bell_csv(capsys):
    code, out, _ = call(capsys, "measure", "--family", "bell", "--format", "csv")
    assert code == 0
    (row,) = rows(out)
    assert float(row["E"]) == 0.5 and float(row["concurrence"]) == pytest.approx(1)


def test_measure_xstate(capsys):
    code, out, _ = call(
        capsys, "measure", "--family", "xstate", "--rho11", "0.4", "--rho22", "0.1",
        "--rho33", "0.1", "--rho44", "0.4", "--w-re", "0.3", "--z-im", "0.05",
    )
    assert code == 0
    assert json.loads(out)["E"] == pytest.approx(0.35, abs=1e-12)


def test_measure_file(capsys, tmp_path):
    path = tmp_path / "bell.json"
    path.write_text(json.dumps({"dims": [2, 2], "amps": [0.6, 0, 0, 0.8]}))
    code, out, _ = call(capsys, "measure", "--family", "file", "--state", str(path))
    assert code == 0 and json.loads(out)["E"] == pytest.approx(0.48)


def test_measure_file_bad_trace_exit_2(capsys, tmp_path):
    path = tmp_path / "rho.json"
    path.write_text(json.dumps({"dims": [2], "matrix": [[0.49, 0], [0, 0.49]]}))
    code, _, err = call(capsys, "measure", "--family", "file", "--state", str(path))
    assert code == 2 and "0.98" in err


def test_measure_file_no_normalize_check(capsys, tmp_path):
    path = tmp_path / "psi.json"
    path.write_text(json.dumps({"dims": [2, 2], "amps": [1, 0, 0, 1]}))
    assert call(capsys, "measure", "--family", "file", "--state", str(path))[0] == 2
    code, out, _ = call(capsys, "measure", "--family", "file", "--state", str(path), "--no-normalize-check")
    assert code == 0 and json.loads(out)["E"] == 0.5


def test_missing_file_exit_2(capsys, tmp_path):
    code, _, err = call(capsys, "measure", "--family", "file", "--state", str(tmp_path / "gone.json"))
    assert code == 2 and "gone.json" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["measure", "--family", "werner"],
        ["measure", "--family", "werner", "--z", "2"],
        ["measure", "--family", "xstate", "--rho11", "1"],
        ["measure", "--family", "xstate", "--rho11", "0.1", "--rho22", "0.4", "--rho33", "0.4",
         "--rho44", "0.1", "--w-re", "0.5"],
        ["dissipate", "--alpha", "1", "--beta", "0", "--steps", "1"],
        ["dissipate", "--alpha", "0", "--beta", "0"],
        ["einselect", "--angle", "0.1", "--sweep", "3"],
        ["einselect", "--sweep", "0"],
        ["doubleslit", "--scenario", "trivial", "--a1", "0", "--a2", "0"],
    ],
)
def test_validation_errors_exit_2(capsys, argv):
    code, _, err = call(capsys, *argv)
    assert code == 2 and err.startswith("error:")


@pytest.mark.parametrize(
    "argv",
    [
        ["measure", "--family", "werner", "--bogus"],
        ["swap", "--a1", "x", "--a2", "1", "--b1", "1", "--b2", "0"],
        ["dissipate", "--alpha", "0.6"],
        ["nosuchcommand"],
    ],
)
def test_parse_errors_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as info:
        run(argv)
    assert info.value.code == 2


# -- swap --------------------------------------------------------------------


def test_swap_symmetric(capsys):
    code, out, _ = call(capsys, "swap", "--a1", "0.6", "--a2", "0.8", "--b1", "0.6", "--b2", "0.8")
    rep = json.loads(out)
    assert code == 0
    assert rep["lhs"] == pytest.approx(0.2304) and rep["rhs"] == pytest.approx(0.2304)
    assert [b["name"] for b in rep["branches"]] == ["psi+", "psi-", "phi+", "phi-"]


def test_swap_warns_and_normalizes(capsys):
    code, out, err = call(capsys, "swap", "--a1", "1", "--a2", "1", "--b1", "1", "--b2", "0,1")
    assert code == 0 and "normalizing" in err
    assert json.loads(out)["lhs"] == pytest.approx(0.25)


def test_swap_csv(capsys):
    code, out, _ = call(capsys, "swap", "--a1", "1", "--a2", "0", "--b1", "0.6", "--b2", "0.8", "--format", "csv")
    (row,) = rows(out)
    assert code == 0 and float(row["lhs"]) == 0 and "phi-_E_ab" in row


# -- dissipate ---------------------------------------------------------------


def test_dissipate_rounded_inputs(capsys):
    code, out, err = call(
        capsys, "dissipate", "--alpha", "0.7071", "--beta", "0.7071", "--kappa", "1", "--t-max", "5", "--steps", "201",
    )
    assert code == 0
    table = rows(out)
    assert list(table[0]) == cli.DISSIPATE_HEADER
    assert len(table) == 201
    for r in table:
        assert abs(float(r["E_sum"]) - 0.5) <= 1e-6


def test_dissipate_json_full(capsys):
    code, out, _ = call(capsys, "dissipate", "--alpha", "0.6", "--beta", "0.8", "--steps", "3", "--format", "json", "--full")
    data = json.loads(out)
    assert code == 0 and len(data) == 3
    assert data[0]["state"]["dims"] == [2, 2, 2, 2]
    assert "state" not in json.loads(call(capsys, "dissipate", "--alpha", "0.6", "--beta", "0.8", "--steps", "3",
                                          "--format", "json")[1])[0]


def test_dissipate_esdb(capsys):
    code, out, _ = call(capsys, "dissipate", "--alpha", str(math.sqrt(0.2)), "--beta", str(math.sqrt(0.8)), "--esdb")
    rep = json.loads(out)
    assert code == 0
    assert rep["concurrence_death_time"] == pytest.approx(math.log(2), abs=1e-8)
    assert rep["E_cav_positive"] is True


# -- einselect / doubleslit --------------------------------------------------


def test_einselect_single_angle(capsys):
    code, out, _ = call(capsys, "einselect", "--angle", str(math.pi / 4))
    table = rows(out)
    assert code == 0 and [r["basis"] for r in table] == ["ud", "apm"]
    assert table[0]["is_pointer"] == "true" and table[1]["is_pointer"] == "false"
    assert float(table[1]["branch1_purity"]) == pytest.approx(0.5)


def test_einselect_json(capsys):
    code, out, _ = call(capsys, "einselect", "--sweep", "3", "--basis", "apm", "--format", "json")
    assert code == 0
    assert [r["is_pointer"] for r in json.loads(out)] == [True, False, True]


def test_doubleslit(capsys):
    code, out, _ = call(capsys, "doubleslit", "--scenario", "trivial", "--a1", "0.7071067811865476", "--a2", "0.7071067811865476")
    assert code == 0 and json.loads(out)["visibility"] == pytest.approx(1)
    code, out, _ = call(capsys, "doubleslit", "--scenario", "classical", "--a1", "1", "--a2", "1", "--format", "csv")
    assert code == 0 and float(rows(out)[0]["visibility"]) == 0


# -- verify ------------------------------------------------------------------


def test_verify_all_passes(capsys):
    code, out, _ = call(capsys, "verify", "--suite", "all", "--seed", "42")
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[-1] == f"{len(lines) - 1}/{len(lines) - 1} invariants passed"
    assert all(line.startswith("PASS ") for line in lines[:-1])


def test_verify_zero_tolerance_exit_3(capsys):
    code, out, _ = call(capsys, "verify", "--tolerance", "0")
    assert code == 3 and "FAIL " in out


def test_verify_failing_check_exit_3(capsys, monkeypatch):
    broken = list(verify._REGISTRY) + [("hilbert", "always_fails", lambda rng, scale: (False, "forced"))]
    monkeypatch.setattr(verify, "_REGISTRY", broken)
    code, out, _ = call(capsys, "verify", "--suite", "hilbert")
    assert code == 3 and "FAIL hilbert.always_fails: forced" in out


def test_verify_json(capsys):
    code, out, _ = call(capsys, "verify", "--suite", "dissipation", "--format", "json")
    data = json.loads(out)
    assert code == 0 and all(r["passed"] and r["suite"] == "dissipation" for r in data)


# -- output plumbing ---------------------------------------------------------


def test_output_file(capsys, tmp_path):
    target = tmp_path / "out.csv"
    code, out, _ = call(capsys, "einselect", "--sweep", "2", "-o", str(target))
    assert code == 0 and out == ""
    assert target.read_text().startswith("angle,basis,")


def test_output_unwritable_exit_2(capsys, tmp_path):
    code, _, err = call(capsys, "einselect", "--output", str(tmp_path / "missing" / "x.csv"))
    assert code == 2 and "missing" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["dissipate", "--alpha", "0.6", "--beta", "0.8", "--steps", "51"],
        ["verify", "--suite", "entanglement", "--seed", "7"],
        ["swap", "--a1", "0.3,0.1", "--a2", "0.9", "--b1", "0.5", "--b2", "0.5,-0.5"],
    ],
)
def test_byte_identical_reruns(capsys, argv):
    assert call(capsys, *argv)[1] == call(capsys, *argv)[1]


def test_threads_do_not_change_output(capsys, monkeypatch):
    argv = ["dissipate", "--alpha", "0.6", "--beta", "0.8", "--steps", "201"]
    monkeypatch.setenv("COHERENCE_LAB_THREADS", "1")
    serial = call(capsys, *argv)[1]
    monkeypatch.setenv("COHERENCE_LAB_THREADS", "0")
    assert call(capsys, *argv)[1] == serial


@pytest.mark.parametrize(
    "golden, argv",
    [
        ("dissipate_sym.csv", ["dissipate", "--alpha", "0.7071", "--beta", "0.7071", "--kappa", "1", "--t-max", "5", "--steps", "11"]),
        ("swap.json", ["swap", "--a1", "0.6", "--a2", "0,0.8", "--b1", "0.7071067811865476", "--b2", "0.7071067811865476"]),
        ("einselect_sweep5.csv", ["einselect", "--sweep", "5"]),
    ],
)
def test_golden_files(capsys, golden, argv):
    assert call(capsys, *argv)[1] == (GOLDEN / golden).read_text()


# -- help --------------------------------------------------------------------


def _flags(parser):
    return {s for a in parser._actions for s in a.option_strings}


def test_every_subcommand_help_lists_its_flags():
    parser = build_parser()
    sub = next(a for a in parser._actions if a.dest == "command")
    assert set(sub.choices) == {"measure", "swap", "dissipate", "einselect", "doubleslit", "verify"}
    for name, p in sub.choices.items():
        text = p.format_help()
        for flag in _flags(p):
            assert flag in text, f"{name} --help misses {flag}"
        for flag in ("--format", "--output", "--seed", "--tolerance"):
            assert flag in text


def test_console_entry_point_help():
    out = subprocess.run(
        [sys.executable, "-m", "coherence_lab", "dissipate", "--help"], capture_output=True, text=True, check=True
    ).stdout
    for flag in ("--alpha", "--beta", "--kappa", "--t-max", "--steps", "--format"):
        assert flag in out


def test_module_exit_code_propagates():
    proc = subprocess.run(
        [sys.executable, "-m", "coherence_lab", "measure", "--family", "werner", "--z", "3"], capture_output=True
    )
    assert proc.returncode == 2

import json
import math

import numpy as np
import pytest

from hetbec import ConvergenceError
from hetbec.cli import build_parser, main


def read_csv(path):
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    rows = [ln.split(",") for ln in lines[1:]]
    return header, rows


def test_ground_state_both_modes(tmp_path):
    out = tmp_path / "gs.csv"
    rc = main(["ground-state", "--lambda", "0", "--d", "0",
               "--delta-min", "-4", "--delta-max", "4", "--steps", "9",
               "--mode", "both", "--n", "20", "--out", str(out)])
    assert rc == 0
    header, rows = read_csv(out)
    assert header == ["delta", "y0_mf", "gap_mf", "y0_q", "gap_q"]
    assert len(rows) == 9
    # spot check at delta = -2: pure molecule, gap sqrt(3)
    row = {float(r[0]): r for r in rows}[-2.0]
    assert float(row[1]) == pytest.approx(1.0, abs=1e-10)
    assert float(row[2]) == pytest.approx(math.sqrt(3.0), abs=1e-10)


def test_ground_state_byte_deterministic(tmp_path):
    args = ["ground-state", "--lambda", "-1", "--d", "0.2", "--delta-min",
            "-3", "--delta-max", "1", "--steps", "25", "--mode",
            "semiclassical", "--out", None]
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    args[-1] = str(out1)
    assert main(list(args)) == 0
    args[-1] = str(out2)
    assert main(list(args)) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_spectrum_levels(tmp_path):
    out = tmp_path / "spec.csv"
    rc = main(["spectrum", "--lambda", "-5", "--n", "20", "--d", "0",
               "--delta-min", "-6", "--delta-max", "0", "--steps", "30",
               "--levels", "5", "--out", str(out)])
    assert rc == 0
    header, rows = read_csv(out)
    assert header == ["delta", "e0", "e1", "e2", "e3", "e4"]
    assert len(rows) == 30
    for row in rows:
        vals = [float(v) for v in row[1:]]
        assert vals == sorted(vals)


def test_steady_states_stdout(capsys):
    rc = main(["steady-states", "--lambda", "-5", "--delta", "-2",
               "--d", "0"])
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("branch,phi0,x0,y0,energy")
    assert len(lines) == 6  # three interior + two boundary + header


def test_swallowtail_interval(tmp_path, capsys):
    out = tmp_path / "tail.csv"
    rc = main(["swallowtail", "--lambda", "-5", "--d", "0",
               "--out", str(out)])
    assert rc == 0
    assert "three-steady-state interval" in capsys.readouterr().out
    header, rows = read_csv(out)
    assert header == ["lambda", "d", "found", "delta_lo", "delta_hi"]
    assert rows[0][2] == "1"
    assert float(rows[0][3]) == pytest.approx(-3.56, abs=0.05)


def test_swallowtail_absent(capsys):
    rc = main(["swallowtail", "--lambda", "3", "--d", "0"])
    assert rc == 0
    assert "no swallowtail" in capsys.readouterr().out


def test_stability_map_grid(tmp_path):
    out = tmp_path / "map.csv"
    rc = main(["stability-map", "--lambda-min", "-8", "--lambda-max", "0",
               "--delta-min", "-6", "--delta-max", "0", "--res", "12",
               "--d", "0", "--out", str(out)])
    assert rc == 0
    header, rows = read_csv(out)
    assert header == ["lambda", "delta", "unstable"]
    assert len(rows) == 144
    for row in rows:
        lam, dl, u = float(row[0]), float(row[1]), row[2]
        assert u in ("0", "1")
        if lam >= -1.0 or dl >= -1.0:
            assert u == "0"


def test_sweep_command(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    rc = main(["sweep", "--lambda", "0", "--d", "0.5", "--delta-start", "3",
               "--delta-end", "-3", "--rate", "-0.05", "--out", str(out)])
    assert rc == 0
    assert "y_final" in capsys.readouterr().out
    header, rows = read_csv(out)
    assert header == ["tau", "delta", "y"]
    assert float(rows[0][1]) == 3.0
    assert float(rows[-1][1]) == -3.0
    assert float(rows[-1][2]) <= 0.5 + 1e-9


def test_evolve_compare(tmp_path):
    out = tmp_path / "evolve.csv"
    rc = main(["evolve", "--lambda", "0", "--delta", "0", "--d", "0",
               "--n", "20", "--tau-max", "10", "--out", str(out)])
    assert rc == 0
    header, rows = read_csv(out)
    assert header == ["tau", "y_semiclassical", "y_quantum"]
    ys_q = np.array([float(r[2]) for r in rows])
    assert ys_q.max() < 1.0


def test_oscillation_divergent_marker(capsys):
    rc = main(["oscillation", "--d", "0", "--delta", "0"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "divergent" in out
    assert "tanh" in out


def test_oscillation_scan(tmp_path):
    out = tmp_path / "osc.csv"
    rc = main(["oscillation", "--d", "0.2", "--delta-min", "0",
               "--delta-max", "3", "--steps", "40", "--out", str(out)])
    assert rc == 0
    header, rows = read_csv(out)
    assert header == ["delta", "y_minus", "y_plus", "modulus", "period"]
    assert float(rows[0][1]) == pytest.approx(0.8, abs=1e-12)


def test_json_meta(tmp_path):
    out = tmp_path / "osc.csv"
    rc = main(["oscillation", "--d", "0.2", "--delta", "1.0",
               "--out", str(out), "--json-meta"])
    assert rc == 0
    meta = json.loads((tmp_path / "osc.csv.meta.json").read_text())
    assert meta["d"] == 0.2
    assert meta["delta"] == 1.0
    assert meta["command"] == "oscillation"


def test_selftest(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    assert out.count("PASS") >= 8


def test_invalid_flag_exits_2(capsys):
    assert main(["ground-state", "--nonsense", "1"]) == 2
    assert main(["no-such-command"]) == 2


def test_invalid_parameter_exits_2(tmp_path, capsys):
    # imbalance not representable with the requested particle number
    rc = main(["ground-state", "--lambda", "0", "--d", "0.123", "--mode",
               "quantum", "--n", "10", "--out", str(tmp_path / "x.csv")])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_numerical_failure_exits_3(monkeypatch, capsys):
    parser = build_parser()

    def boom(args):
        raise ConvergenceError("deliberate failure")

    monkeypatch.setattr("hetbec.cli.build_parser", lambda: parser)
    args = parser.parse_args(["selftest"])
    monkeypatch.setattr(args, "func", boom, raising=False)
    monkeypatch.setattr(parser, "parse_args", lambda argv=None: args)
    assert main(["selftest"]) == 3
    assert "numerical failure" in capsys.readouterr().err

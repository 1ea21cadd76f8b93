import csv
import io
import json
import math

import numpy as np
import pytest

from qscissors import cli
from qscissors.sweep import Axis, SweepSpec, format_cell, preset, run_sweep

DEVICE = ["--s", "0.5", "--phi-minus-beta", "1.5707963", "--theta", "0.7853982"]


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def read_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


def test_truncate_matches_hand_evaluation(capsys):
    code, out, _ = run(["truncate", "--config", "max", "--N", "1", "--alpha", "1", *DEVICE], capsys)
    assert code == 0
    data = json.loads(out)
    amps = np.array(data["state"]["re"]) + 1j * np.array(data["state"]["im"])
    # psi_1 / psi_0 = 1, R* = -i sin(theta), T* = cos(theta), e^{i phi} = i
    s, theta, phi = 0.5, 0.7853982, 1.5707963
    raw = np.array([math.sin(theta) * 1j, -np.exp(1j * phi) * math.tanh(s) * math.cos(theta)])
    expected = raw / np.linalg.norm(raw)
    assert np.max(np.abs(amps - expected)) < 1e-12
    p = math.exp(-1) / math.cosh(s) ** 2 * (math.sin(theta) ** 2 + math.tanh(s) ** 2 * math.cos(theta) ** 2)
    assert data["probability"] == pytest.approx(p, rel=1e-12)
    assert data["metrics"]["mandel_q"] < 0


def test_truncate_zero_probability_exit_code(capsys):
    code, out, err = run(["truncate", "--config", "max", "--N", "1", "--alpha", "0", "--s", "0"], capsys)
    assert code == 2
    assert out == ""
    assert "zero-probability" in err


def test_truncate_min_vacuum_input(capsys):
    code, out, _ = run(["truncate", "--config", "min", "--N", "1", "--vacuum-input",
                        "--s", "0.5", "--theta", "0.7853982"], capsys)
    assert code == 0
    data = json.loads(out)
    amps = np.array(data["state"]["re"]) + 1j * np.array(data["state"]["im"])
    assert abs(amps[1]) == pytest.approx(1.0, abs=1e-14)
    assert data["metrics"]["mandel_q"] == pytest.approx(-1.0, abs=1e-12)


@pytest.mark.parametrize("argv", [
    ["truncate", "--N", "x"],
    ["truncate", "--config", "middle"],
    ["nonsense"],
    ["truncate", "--dim", "0"],
    ["sweep", "--axis", "s:1:0:5"],
    ["sweep", "--axis", "s:0:1:1"],
    ["sweep", "--axis", "bogus:0:1:5"],
    ["sweep"],
])
def test_malformed_arguments_exit_one(argv, capsys):
    try:
        code = cli.main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 1


def test_sweep_fig2_columns_and_gap(capsys):
    code, out, _ = run(["sweep", "--preset", "fig2", "--N", "1"], capsys)
    assert code == 0
    header, rows = read_csv(out)
    assert header[:2] == ["s", "N"]
    assert "mandel_q" in header
    q = header.index("mandel_q")
    assert len(rows) == 101
    # at s = 0 with theta = pi/4 the state is the vacuum, where Q is undefined
    assert rows[0][q] == ""
    values = [float(r[q]) for r in rows if float(r[0]) >= 0.1]
    assert max(values) < 0


def test_sweep_custom_axis_row_order(capsys):
    code, out, _ = run(["sweep", "--axis", "theta:0:1:3", "--axis", "s:0.2:0.4:2", "--mode", "probability",
                        "--N", "1", "2"], capsys)
    assert code == 0
    header, rows = read_csv(out)
    assert header == ["theta", "s", "N", "probability"]
    keys = [(int(r[2]), float(r[0]), float(r[1])) for r in rows]
    assert keys == sorted(keys)
    assert len(rows) == 12


def test_sweep_workers_do_not_change_output(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    base = ["sweep", "--axis", "alpha_mod:0:2:7", "--axis", "s:0:1:4", "--mode", "metrics", "--N", "1", "2"]
    assert cli.main(base + ["--out", str(a)]) == 0
    assert cli.main(base + ["--workers", "3", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_state_mode_columns(capsys):
    code, out, _ = run(["sweep", "--axis", "s:0.1:0.5:3", "--mode", "state", "--N", "2"], capsys)
    assert code == 0
    header, rows = read_csv(out)
    assert header[-6:] == ["re_0", "im_0", "re_1", "im_1", "re_2", "im_2"]
    amps = np.array([[float(r[header.index(f"re_{k}")]) + 1j * float(r[header.index(f"im_{k}")])
                      for k in range(3)] for r in rows])
    np.testing.assert_allclose(np.linalg.norm(amps, axis=1), 1.0, atol=1e-12)


def test_fidelity_command(capsys):
    code, out, _ = run(["fidelity", "--N", "1", "--alpha", "1", *DEVICE, "--eta", "0.7", "--nu", "1e-4"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["fidelity"] >= 0.9
    assert 0 < data["probability_detected"] <= 1


def test_fidelity_perfect_detector(capsys):
    code, out, _ = run(["fidelity", "--N", "2", "--alpha", "1", *DEVICE, "--eta", "1", "--nu", "0"], capsys)
    assert code == 0
    assert json.loads(out)["fidelity"] == pytest.approx(1.0, abs=1e-10)


def test_povm_command(capsys):
    code, out, _ = run(["povm", "--eta", "0.7", "--nu", "1e-4", "--N", "1", "--dim", "3"], capsys)
    assert code == 0
    diag = json.loads(out)["diagonal"]
    assert diag[1] == pytest.approx(math.exp(-1e-4) * (1e-4 * 0.3 + 0.7), rel=1e-14)


def test_povm_rejects_bad_efficiency(capsys):
    code, _, _ = run(["povm", "--eta", "1.5", "--N", "1", "--dim", "3"], capsys)
    assert code in (1, 2)


def test_oracle_check_command(capsys, monkeypatch):
    monkeypatch.setattr(cli, "ORACLE_GRID", {"s": (0.5,), "theta": (0.3,), "phi": (1.0,), "alpha": (1.0,)})
    code, out, _ = run(["oracle-check"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["points"] == 1
    assert data["passed"] is True
    assert data["max_deviation"] < 1e-8


def test_format_cell():
    assert format_cell(None) == ""
    assert format_cell(float("nan")) == ""
    assert float(format_cell(0.1)) == 0.1
    assert format_cell(1 / 3) == "0.33333333333333331"


def test_preset_overrides():
    spec = preset("fig13", counts=(2,))
    assert spec.mode == "fidelity"
    assert spec.counts == (2,)
    assert spec.fixed["eta"] == 0.7


def test_axis_parse():
    ax = Axis.parse("s:0:1:5")
    np.testing.assert_array_equal(ax.values(), np.linspace(0, 1, 5))
    with pytest.raises(ValueError):
        Axis.parse("s:0:1")


def test_run_sweep_in_process_matches_parallel():
    spec = SweepSpec(axes=(Axis("theta", 0.0, 1.5, 5),), counts=(1, 3), mode="metrics")
    assert run_sweep(spec, workers=1) == run_sweep(spec, workers=2)

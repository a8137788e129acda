import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from ncebkit import __version__
from ncebkit.cli import fmt, main
from ncebkit.classify import nceb_threshold_depolarizing


@pytest.fixture
def files(tmp_path):
    docs = {
        "dep": {"family": "depolarizing", "d": 2, "p": 0.5},
        "ident": {"family": "identity", "d": 2},
        "rep_mixed": {"family": "replacer", "dim_in": 2, "sigma": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]},
        "rep0": {"family": "replacer", "dim_in": 2, "sigma": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]},
        "nontp": {"dim_in": 2, "dim_out": 2, "kraus": [[[[1, 0], [0, 0]], [[0, 0], [0.5, 0]]]]},
        "badp": {"family": "depolarizing", "d": 2, "p": 1.5},
        "bell": {"family": "bell"},
        "mixed": {"dims": [2, 2], "matrix": (np.eye(4) / 4).tolist()},
    }
    out = {}
    for name, doc in docs.items():
        if name == "mixed":
            doc = {"dims": [2, 2], "matrix": [[[x, 0] for x in row] for row in doc["matrix"]]}
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(doc))
        out[name] = str(path)
    broken = tmp_path / "broken.json"
    broken.write_text('{"dim_in": 2,\n "dim_out": 2,\n "kraus": [[[1, 0], [0, 0]]\n')
    out["broken"] = str(broken)
    field = tmp_path / "field.json"
    field.write_text('{"dim_in": 2, "dim_out": 2, "kraus": [[[1, 0], [0, 0]]]}')
    out["field"] = str(field)
    return out


def run_json(capsys, argv):
    assert main(argv) == 0
    return json.loads(capsys.readouterr().out)


def test_fmt():
    assert fmt(-0.0) == "0"
    assert fmt(1 / 3) == "0.333333333333"
    assert fmt(-1.0) == "-1"


def test_classify_depolarizing(files, capsys):
    doc = run_json(capsys, ["classify", "--channel", files["dep"], "--budget", "4", "--covariant"])
    v = doc["verdicts"]
    assert (v["eb"]["status"], v["nceb"]["status"], v["mib"]["status"]) == ("no", "yes", "no")
    assert v["ncea"]["status"] == "not applicable"
    assert doc["version"] == __version__ and doc["tool"] == "ncebkit"
    assert doc["coherent_info"]["value"] == 0.0
    assert doc["tolerances"] == {"closed_form": 1e-9, "optimizer": 1e-6}


def test_classify_replacer(files, capsys):
    v = run_json(capsys, ["classify", "--channel", files["rep_mixed"], "--budget", "2"])["verdicts"]
    assert v["mib"]["status"] == "yes" and v["nceb"]["status"] == "yes"


def test_classify_human(files, capsys):
    assert main(["classify", "--channel", files["ident"], "--budget", "2", "--human"]) == 0
    out = capsys.readouterr().out
    assert "nceb" in out and "Q estimate      1.0000" in out


def test_classify_exit_codes(files, capsys):
    assert main(["classify", "--channel", files["broken"]]) == 2
    assert ":4:1" in capsys.readouterr().err
    assert main(["classify", "--channel", files["field"]]) == 2
    assert "kraus[0][0][0]" in capsys.readouterr().err
    assert main(["classify", "--channel", files["nontp"]]) == 3
    assert main(["classify", "--channel", files["badp"]]) == 3
    assert main(["classify", "--channel", "/nonexistent.json"]) == 2


def test_classify_is_byte_identical(files, tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"r{k}.json"
        assert main(["classify", "--channel", files["dep"], "--budget", "3", "--seed", "5", "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_sweep(tmp_path):
    path = tmp_path / "sweep.csv"
    assert main(["sweep", "--family", "depolarizing", "--d", "2", "--alpha-steps", "181", "--p-steps", "101",
                 "--out", str(path)]) == 0
    text = path.read_text()
    assert text.endswith("\n")
    rows = list(csv.reader(text.splitlines()))
    assert rows[0] == ["alpha", "p", "cond_entropy"]
    data = np.array(rows[1:], dtype=float)
    assert data.shape == (181 * 101, 3)
    # α varies slowest
    assert np.all(data[:101, 0] == 0) and data[101, 0] > 0
    grid = data[:, 2].reshape(181, 101)
    assert grid[45, 0] == pytest.approx(-1.0, abs=1e-11)
    assert np.all(grid[0] >= -1e-12)
    # zero crossing at α=π/4 lies between p=0.25 and 0.26
    assert grid[45, 25] < 0 < grid[45, 26]


def test_sweep_matches_threshold():
    from ncebkit.cli import sweep_rows

    p_star = nceb_threshold_depolarizing(2)
    rows = sweep_rows("depolarizing", np.array([np.pi / 4]), np.array([p_star]))
    assert abs(rows[0][2]) < 1e-9


def test_sweep_rejects_bad_ranges(capsys):
    assert main(["sweep", "--p-to", "1.5"]) == 2
    assert main(["sweep", "--d", "3"]) == 2


def test_sweep_unwritable(tmp_path):
    assert main(["sweep", "--alpha-steps", "2", "--p-steps", "2", "--out", str(tmp_path / "no" / "x.csv")]) == 1


def test_belltetra(tmp_path):
    path = tmp_path / "t.csv"
    assert main(["belltetra", "--p", "0.5", "--samples", "2000", "--seed", "1", "--out", str(path)]) == 0
    text = path.read_text()
    rows = list(csv.reader(text.splitlines()))
    assert rows[0] == ["c1", "c2", "c3", "S_before", "S_after"]
    data = np.array(rows[1:], dtype=float)
    assert data.shape == (2000, 5)
    assert data[:, 4].min() >= -1e-9
    again = tmp_path / "u.csv"
    main(["belltetra", "--p", "0.5", "--samples", "2000", "--seed", "1", "--out", str(again)])
    assert again.read_bytes() == path.read_bytes()


def test_belltetra_special_points():
    from ncebkit.cli import bell_diagonal_batch
    from ncebkit.channels import apply_to_B_batch, depolarizing
    from ncebkit.entropy import conditional_entropy_batch

    pts = np.array([[1.0, -1.0, 1.0], [0.0, 0.0, 0.0]])
    rho = bell_diagonal_batch(pts)
    before = conditional_entropy_batch(rho, (2, 2))
    after = conditional_entropy_batch(apply_to_B_batch(depolarizing(2, 0.5), rho, 2), (2, 2))
    np.testing.assert_allclose(before, [-1, 1], atol=1e-12)
    assert after[1] == pytest.approx(1.0, abs=1e-12)


def test_threshold_human(capsys):
    assert main(["threshold", "depolarizing", "is_eb", "--human"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("0.666667 ") and "noise convention" in out
    assert main(["threshold", "depolarizing", "is_nceb", "--covariant", "--human"]) == 0
    p = float(capsys.readouterr().out.split()[0])
    assert 0.810 <= 1 - 3 * p / 4 <= 0.812
    assert main(["threshold", "global_depolarizing", "is_ncea", "--human"]) == 0
    assert capsys.readouterr().out.startswith("0.747614")


def test_threshold_json(capsys):
    doc = run_json(capsys, ["threshold", "global_depolarizing", "bell_output_ppt"])
    assert doc["threshold"] == pytest.approx(1 / 3, abs=1e-3)
    assert doc["holds_above"] is False
    assert len(doc["probes"]) == 21


def test_threshold_non_monotone(capsys):
    # no flip inside a range where the predicate is constant
    assert main(["threshold", "depolarizing", "is_eb", "--lo", "0.0", "--hi", "0.5"]) == 4
    assert "non-monotone" in capsys.readouterr().err


def test_threshold_predicate_needs_partition(capsys):
    assert main(["threshold", "depolarizing", "is_ncea"]) == 2


def test_leak(files, capsys):
    doc = run_json(capsys, ["leak", "--channel", files["dep"], "--state", files["bell"], "--covariant"])
    assert doc["I_A_Bout"] < doc["I_A_E"]
    assert doc["leak_inequality"] == {"statement": "I(A;Bout) <= I(A;E)", "applicable": True, "holds": True}
    doc = run_json(capsys, ["leak", "--channel", files["ident"], "--state", files["bell"], "--budget", "2"])
    assert (doc["I_A_Bout"], doc["I_A_E"]) == pytest.approx((2, 0), abs=1e-12)
    assert doc["leak_inequality"]["applicable"] is False
    doc = run_json(capsys, ["leak", "--channel", files["rep0"], "--state", files["bell"]])
    assert (doc["I_A_Bout"], doc["I_A_E"]) == pytest.approx((0, 2), abs=1e-12)


def test_leak_human(files, capsys):
    assert main(["leak", "--channel", files["ident"], "--state", files["bell"], "--budget", "2", "--human"]) == 0
    assert "not applicable (channel not NCEB)" in capsys.readouterr().out


def test_leak_mixed_needs_purify(files, capsys):
    assert main(["leak", "--channel", files["dep"], "--state", files["mixed"], "--covariant"]) == 2
    assert "--purify" in capsys.readouterr().err
    doc = run_json(capsys, ["leak", "--channel", files["dep"], "--state", files["mixed"], "--covariant", "--purify"])
    assert doc["purification_dim"] == 4
    assert abs(doc["duality_gap"]) < 1e-9


def test_entry_point_runs():
    res = subprocess.run([sys.executable, "-m", "ncebkit.cli", "threshold", "depolarizing", "is_eb", "--human"],
                         capture_output=True, text=True, check=True)
    assert res.stdout.startswith("0.666667")

import json

import pytest

from dudleylab.approx_lab import read_csv
from dudleylab.cli import main, run_demo


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


LINE01 = {"points": [0.0, 1.0], "metric": {"type": "real_line"}}


@pytest.fixture
def files(tmp_path):
    space = write(tmp_path / "space.json", LINE01)
    return {
        "space": space,
        "delta0": write(tmp_path / "d0.json", {"kind": "prob", "space": "space.json", "mass": [1, 0]}),
        "delta1": write(tmp_path / "d1.json", {"kind": "prob", "space": "space.json", "mass": [0, 1]}),
        "half": write(tmp_path / "half.json", {"kind": "prob", "space": LINE01, "mass": [0.5, 0.5]}),
        "f01": write(tmp_path / "f.json", {"space": LINE01, "values": [0, 1]}),
        "f3": write(tmp_path / "f3.json", {"space": LINE01, "values": [3, 3]}),
    }


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestValidate:
    def test_valid_space(self, files, capsys):
        code, out, _ = run(capsys, "validate", files["space"])
        assert code == 0 and json.loads(out)["ok"]

    def test_asymmetric(self, tmp_path, capsys):
        path = write(tmp_path / "bad.json", {"points": ["a", "b"], "metric": {"type": "matrix", "d": [[0, 1], [2, 0]]}})
        code, out, _ = run(capsys, "validate", path)
        report = json.loads(out)
        assert code == 1
        assert any(v["axiom"] == "symmetry" and v["indices"] == [0, 1] for v in report["violations"])

    def test_malformed(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text('{"points": [0, 1],')
        code, _, err = run(capsys, "validate", str(path))
        assert code == 2 and "line 1" in err

    def test_missing_key(self, tmp_path, capsys):
        path = write(tmp_path / "nometric.json", {"points": [0, 1]})
        assert run(capsys, "validate", path)[0] == 2

    def test_unnormalized_measure(self, tmp_path, capsys):
        path = write(tmp_path / "m.json", {"kind": "prob", "space": LINE01, "mass": [0.5, 0.6]})
        code, out, _ = run(capsys, "validate", path)
        assert code == 1 and json.loads(out)["violations"][0]["axiom"] == "normalized"


class TestDist:
    def test_bl_point_masses(self, files, capsys):
        code, out, _ = run(capsys, "dist", "bl", files["delta0"], files["delta1"])
        res = json.loads(out)
        assert code == 0 and res["metric"] == "bl" and res["value"] == pytest.approx(1.0, abs=1e-12)

    def test_prokhorov_identical(self, files, capsys):
        code, out, _ = run(capsys, "dist", "prokhorov", files["half"], files["half"])
        assert code == 0 and json.loads(out)["value"] == 0.0

    def test_tv(self, files, capsys):
        code, out, _ = run(capsys, "dist", "tv", files["half"], files["delta0"])
        assert code == 0 and json.loads(out)["value"] == 1.0

    @pytest.mark.parametrize("metric", ["bl", "prokhorov", "tv"])
    def test_crosscheck_keeps_value(self, files, capsys, metric):
        _, plain, _ = run(capsys, "dist", metric, files["half"], files["delta1"])
        code, checked, _ = run(capsys, "dist", metric, files["half"], files["delta1"], "--crosscheck")
        checked = json.loads(checked)
        assert code == 0 and checked["crosscheck"]["agree"]
        assert checked["value"] == json.loads(plain)["value"]

    def test_coupling_and_witness(self, files, capsys):
        code, out, _ = run(capsys, "dist", "bl", files["half"], files["delta0"], "--coupling", "--witness")
        res = json.loads(out)
        assert code == 0
        assert sum(res["coupling"], []) == pytest.approx([0.5, 0.0, 0.5, 0.0])
        assert len(res["witness"]) == 2

    def test_space_mismatch(self, tmp_path, files, capsys):
        other = write(tmp_path / "o.json", {"kind": "prob", "space": {"points": [0, 2], "metric": {"type": "real_line"}}, "mass": [1, 0]})
        assert run(capsys, "dist", "bl", files["delta0"], other)[0] == 1

    def test_unknown_metric(self, files, capsys):
        assert run(capsys, "dist", "kolmogorov", files["delta0"], files["delta1"])[0] == 2


class TestCoupling:
    def test_strassen(self, files, capsys):
        code, out, _ = run(capsys, "coupling", files["half"], files["delta0"], "--metric", "strassen", "--epsilon", "0")
        res = json.loads(out)
        assert code == 0 and res["overflow"] == pytest.approx(0.5)

    def test_strassen_needs_epsilon(self, files, capsys):
        assert run(capsys, "coupling", files["half"], files["delta0"], "--metric", "strassen")[0] == 1

    def test_bl(self, files, capsys):
        code, out, _ = run(capsys, "coupling", files["delta0"], files["delta1"])
        assert code == 0 and json.loads(out)["coupling"] == [[0.0, 1.0], [0.0, 0.0]]


class TestRegularize:
    def test_constant(self, files, capsys):
        code, out, _ = run(capsys, "regularize", files["f3"], "--epsilon", "0.5")
        assert code == 0 and json.loads(out)["g"] == [2.5, 2.5]

    def test_two_point(self, files, capsys):
        res = json.loads(run(capsys, "regularize", files["f01"], "--epsilon", "0.1")[1])
        assert res["n"] == 2 and res["g"] == pytest.approx([-0.1, 0.9], abs=1e-15)
        assert all(res["checks"].values())

    def test_lipschitz_input(self, tmp_path, capsys):
        path = write(tmp_path / "lip.json", {"space": {"points": [0, 0.5, 1.2], "metric": {"type": "real_line"}}, "values": [0.1, 0.4, -0.2]})
        res = json.loads(run(capsys, "regularize", path, "--epsilon", "0.01")[1])
        assert res["g"] == pytest.approx([0.09, 0.39, -0.21], abs=1e-15)

    @pytest.mark.parametrize("eps", ["0", "-1"])
    def test_nonpositive_eps(self, files, capsys, eps):
        assert run(capsys, "regularize", files["f01"], "--epsilon", eps)[0] == 1


class TestDemo:
    def test_escape_horizon_five(self, capsys):
        code, out, err = run(capsys, "demo", "escape", "--horizon", "5")
        rows = read_csv(out)
        assert code == 0 and len(rows) == 5
        assert [float(r["bl"]) for r in rows] == pytest.approx([1, 0.5, 1 / 3, 0.25, 0.2], abs=1e-12)
        assert err.strip()

    def test_equivalence_summary(self, capsys):
        _, _, err = run(capsys, "demo", "equivalence")
        assert err.strip() == "all surrogates agree: approximates"

    def test_a2_ratios(self, capsys):
        _, summary = run_demo("a2", 3, 0)
        assert "all ratios within bound" in summary

    def test_out_file(self, tmp_path, capsys):
        out_path = tmp_path / "escape.csv"
        code, out, _ = run(capsys, "demo", "escape", "--horizon", "4", "--out", str(out_path))
        assert code == 0 and "escape" in out
        assert len(read_csv(out_path.read_text())) == 4

    def test_unwritable_out(self, tmp_path, capsys):
        assert run(capsys, "demo", "escape", "--horizon", "2", "--out", str(tmp_path / "no" / "x.csv"))[0] == 1

    def test_header_records_parameters(self, capsys):
        out = run(capsys, "demo", "a1", "--horizon", "4", "--seed", "3")[1]
        assert out.startswith("# demo=a1 horizon=4 seed=3")

    def test_env_seed(self, capsys, monkeypatch):
        monkeypatch.setenv("DUDLEYLAB_SEED", "11")
        assert "seed=11" in run(capsys, "demo", "a1", "--horizon", "2")[1].splitlines()[0]

    @pytest.mark.parametrize("name", ["escape", "equivalence", "a1", "a2"])
    def test_deterministic(self, capsys, name):
        first = run(capsys, "demo", name, "--horizon", "6", "--seed", "5")
        second = run(capsys, "demo", name, "--horizon", "6", "--seed", "5")
        assert first == second

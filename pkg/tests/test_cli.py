import json

import pytest

from ctn_mbqc import cli

BELL = {"qubits": 2, "gates": [{"g": "H", "q": 0}, {"g": "H", "q": 1}, {"g": "CZ", "a": 0, "b": 1},
                               {"g": "H", "q": 1}]}
ONE = {"qubits": 1, "gates": [{"g": "rot", "q": 0, "angle": 0.9, "axis": "x"}]}


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def lines(out):
    return [json.loads(s) for s in out.splitlines() if s.strip()]


@pytest.fixture
def circuit(tmp_path):
    def write(obj, name="c.json"):
        path = tmp_path / name
        path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return str(path)
    return write


class TestBasics:
    def test_list_resources(self, capsys):
        code, out, _ = run(capsys, "list-resources")
        assert code == 0
        names = {r["name"] for r in lines(out)}
        assert {"cluster1d", "aklt", "toric_scheme2", "dihedral:m"} <= names

    def test_provenance_keys(self, capsys):
        _, out, _ = run(capsys, "hamiltonian", "--N", "4")
        for rec in lines(out):
            assert {"resource", "seed", "tolerance", "version"} <= set(rec)

    def test_human(self, capsys):
        code, out, _ = run(capsys, "--human", "hamiltonian", "--N", "4")
        assert code == 0
        assert not out.lstrip().startswith("{")

    def test_version_fallback_format(self):
        assert cli.version_string().startswith("v")


class TestExitCodes:
    @pytest.mark.parametrize("argv", [["verify", "--suite", "nope"], ["bogus"],
                                      ["percolation", "--p", "0.4:x:0.1"],
                                      ["hamiltonian", "--N", "3"]])
    def test_usage_errors(self, capsys, argv):
        code, _, err = run(capsys, *argv)
        assert code == 2
        assert json.loads(err.strip().splitlines()[-1])["exit"] == 2

    def test_malformed_circuit_reports_position(self, capsys, circuit):
        path = circuit('{"qubits": 1,\n "gates": [}')
        code, _, err = run(capsys, "simulate", "--resource", "cluster1d", "--circuit", path)
        assert code == 2
        assert "line 2" in json.loads(err)["error"]

    def test_unknown_resource(self, capsys, circuit):
        code, _, _ = run(capsys, "simulate", "--resource", "graphene", "--circuit", circuit(ONE))
        assert code == 2

    def test_unsupported_gate_on_resource(self, capsys, circuit):
        code, _, err = run(capsys, "simulate", "--resource", "aklt", "--circuit", circuit(BELL))
        assert code == 2
        assert "CZ" in json.loads(err)["error"]

    def test_failing_verdict(self, capsys):
        code, out, _ = run(capsys, "correlations", "--m", "3", "--kmax", "3")
        assert code == 1
        assert any(r.get("verdict") == "fail" for r in lines(out))

    def test_passing_verify(self, capsys):
        code, out, _ = run(capsys, "verify", "--suite", "identities", "--resource", "aklt")
        assert code == 0
        recs = [r for r in lines(out) if "identity" in r]
        assert recs and all(r["identity"].startswith("aklt") for r in recs)


class TestSimulate:
    def test_both_backends_agree(self, capsys, circuit):
        code, out, _ = run(capsys, "simulate", "--resource", "cluster1d", "--circuit", circuit(ONE),
                           "--shots", "500", "--backend", "both", "--seed", "2")
        assert code == 0
        cmp = [r for r in lines(out) if "tv" in r]
        assert cmp and cmp[0]["tv"] < cli.SIM_TV_TOL

    def test_byte_identical_reruns(self, capsys, circuit):
        argv = ["simulate", "--resource", "cluster1d", "--circuit", circuit(ONE), "--shots", "200",
                "--seed", "5"]
        assert run(capsys, *argv)[1] == run(capsys, *argv)[1]

    def test_env_seed(self, capsys, circuit, monkeypatch):
        argv = ["simulate", "--resource", "cluster1d", "--circuit", circuit(ONE), "--shots", "200"]
        monkeypatch.setenv("CTN_MBQC_SEED", "9")
        a = run(capsys, *argv)[1]
        assert all(r["seed"] == 9 for r in lines(a))
        assert a == run(capsys, *argv, "--seed", "9")[1]

    def test_trace(self, capsys, circuit, tmp_path):
        trace = tmp_path / "t.jsonl"
        code, _, _ = run(capsys, "simulate", "--resource", "cluster1d", "--circuit", circuit(ONE),
                         "--shots", "10", "--trace", str(trace))
        assert code == 0
        events = [json.loads(s) for s in trace.read_text().splitlines()]
        assert events


class TestStudies:
    def test_correlations_m4(self, capsys):
        code, _, _ = run(capsys, "correlations", "--m", "4", "--kmax", "3")
        assert code == 0

    def test_diluted(self, capsys):
        code, out, _ = run(capsys, "diluted", "--k", "3")
        assert code == 0
        assert lines(out)

    def test_percolation_csv(self, capsys, tmp_path):
        csv = tmp_path / "curve.csv"
        argv = ["percolation", "--dim", "2", "--n", "20", "--p", "0.3,0.9", "--trials", "10",
                "--seed", "1", "--csv", str(csv)]
        code, out, _ = run(capsys, *argv)
        assert code in (0, 1)
        assert csv.read_text().splitlines()[0] == "p,trials,successes,ci_low,ci_high"
        assert len(csv.read_text().splitlines()) == 3
        assert out == run(capsys, *argv)[1]

    @pytest.mark.parametrize("fmt", ["csv", "markdown"])
    def test_report_formats(self, capsys, fmt):
        code, out, _ = run(capsys, "report", "--format", fmt)
        assert code in (0, 1)
        assert out.strip()

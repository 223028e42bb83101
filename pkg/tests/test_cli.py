import io
import json
import subprocess
import sys

from vitalcut import generators
from vitalcut.cli import run
from vitalcut.graph import GraphDelta, parse_network, serialize_network
from vitalcut.maxflow import max_flow


def call(argv, stdin_text=None, monkeypatch=None):
    out, err = io.StringIO(), io.StringIO()
    if stdin_text is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin_text))
    code = run(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def write_net(tmp_path, net, name="g.max"):
    path = tmp_path / name
    path.write_text(serialize_network(net))
    return str(path)


def test_gm_pipeline_through_stdin(monkeypatch):
    code, text, _ = call(["gen", "gm", "--matrix", "1,2,3,4"])
    assert code == 0
    code, out, _ = call(["analyze", "-"], text, monkeypatch)
    assert code == 0
    assert out.splitlines()[0] == "f* = 10"


def test_analyze_json(tmp_path):
    path = write_net(tmp_path, generators.gen_p4())
    code, out, _ = call(["analyze", path, "--json"])
    data = json.loads(out)
    assert code == 0
    assert data["schema"] == "vitalcut/1"
    assert data["fstar"] == 3
    assert data["tight"] == [1] and data["loose"] == [0, 2]


def test_vital_single_edge(tmp_path):
    path = write_net(tmp_path, generators.gen_appendixD())
    code, out, _ = call(["vital", path, "--edge", "8", "--json"])
    rows = json.loads(out)["edges"]
    assert code == 0 and len(rows) == 1
    assert rows[0]["vitality"] > 0
    assert rows[0]["witness_cut"][0] == 1  # vertices are reported 1-based


def test_oracle_build_and_query(tmp_path):
    net = generators.random_network(4, 9, 26)
    path = write_net(tmp_path, net)
    oracle = str(tmp_path / "oracle.json")
    assert call(["oracle-build", path, "-o", oracle])[0] == 0
    for e in range(0, net.m, 3):
        for delta in (-net.eff_caps[e], -1, 2):
            code, out, _ = call(["oracle-query", oracle, "--edge", str(e), "--delta", str(delta)])
            assert code == 0
            assert int(out) == max_flow(GraphDelta(e, delta).apply(net)).value
    code, out, _ = call(["oracle-query", oracle, "--insert", "2", "5", "4", "--json"])
    assert code == 0
    assert json.loads(out)["fstar"] == max_flow(net.plus_edges([(1, 4, 4)])).value


def test_appendixD_queries(tmp_path):
    path = write_net(tmp_path, generators.gen_appendixD())
    oracle = str(tmp_path / "oracle.json")
    call(["oracle-build", path, "-o", oracle])
    assert call(["oracle-query", oracle, "--edge", "8", "--delta", "-2"])[1].strip() == "7"
    assert call(["oracle-query", oracle, "--insert", "1", "6", "3"])[1].strip() == "11"


def test_exit_codes(tmp_path):
    assert call(["nope"])[0] == 1
    assert call(["analyze"])[0] == 1
    code, _, err = call(["analyze", str(tmp_path / "missing.max")])
    assert code == 2 and err.startswith("vitalcut:")
    bad = tmp_path / "bad.max"
    bad.write_text("p max 2\n")
    assert call(["analyze", str(bad)])[0] == 2
    path = write_net(tmp_path, generators.gen_p4())
    assert call(["vital", path, "--edge", "99"])[0] == 2
    assert call(["analyze", path, "--max-n", "3"])[0] == 2
    assert call(["steiner", path])[0] == 1
    assert call(["gen", "gm", "--matrix", "1,2,3"])[0] == 1
    junk = tmp_path / "junk.json"
    junk.write_text("{}")
    assert call(["oracle-query", str(junk), "--edge", "0"])[0] == 2


def test_gen_round_trip_and_determinism():
    first = call(["gen", "random", "--seed", "7", "--n", "8", "--m", "20"])[1]
    second = call(["gen", "random", "--seed", "7", "--n", "8", "--m", "20"])[1]
    assert first == second
    net = parse_network(first)
    assert serialize_network(net).rstrip("\n") == first.rstrip("\n")
    for kind in (["p4"], ["appendix-d"], ["appendix-e", "--n", "3"], ["appendix-f", "--n", "4"], ["path", "--caps", "3,1,2"]):
        code, text, _ = call(["gen", *kind])
        assert code == 0 and parse_network(text).n >= 3


def test_other_commands(tmp_path):
    path = write_net(tmp_path, generators.gen_appendixF(3))
    for argv in (
        ["cover", path, "--json"],
        ["dvit", path, "--json"],
        ["steiner", path, "--steiner", "2,7,8", "--json"],
        ["allcuts", path, "--edge", "6", "--json"],
        ["allcuts", path, "--edge", "6", "--delta", "3", "--json"],
    ):
        code, out, err = call(argv)
        assert code == 0, err
        assert json.loads(out)["schema"] == "vitalcut/1"
    assert json.loads(call(["dvit", path, "--json"])[1])["acyclic"]


def test_selftest():
    code, out, _ = call(["selftest", "--count", "8"])
    assert code == 0
    assert out.splitlines()[-1].endswith("0 failed")


def test_console_module():
    proc = subprocess.run(
        [sys.executable, "-m", "vitalcut", "gen", "p4"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert parse_network(proc.stdout).m == 3

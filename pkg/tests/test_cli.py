import json
import subprocess
import sys

import pytest

from tfsm import fixtures, io
from tfsm.cli import main
from tfsm.semantics import run
from tfsm.transform import cross_equivalent


def fx(name):
    return str(fixtures.path(name))


@pytest.fixture
def cli(capsys):
    def invoke(*argv):
        code = main([str(a) for a in argv])
        out, err = capsys.readouterr()
        return code, out, err

    return invoke


@pytest.fixture
def write(tmp_path):
    def put(name, content):
        p = tmp_path / name
        p.write_text(content if isinstance(content, str) else json.dumps(content), encoding="utf-8")
        return p

    return put


class TestValidate:
    def test_ok(self, cli, fixture_name):
        code, out, _ = cli("validate", fx(fixture_name))
        assert code == 0 and "ok" in out

    def test_violations_listed(self, cli, write):
        doc = json.loads(fixtures.text("fig1a"))
        doc["transitions"][0]["guard"]["upper_closed"] = False
        code, out, _ = cli("validate", write("gap.json", doc))
        assert code == 2 and "clock 1" in out

    def test_json(self, cli, write):
        doc = json.loads(fixtures.text("fig1a"))
        doc["transitions"][0]["guard"]["upper_closed"] = False
        code, out, _ = cli("validate", "--json", write("gap.json", doc))
        report = json.loads(out)
        assert code == 2 and not report["ok"]
        assert report["violations"][0]["kind"] == "gap" and report["violations"][0]["witness"] == "1"

    def test_unknown_kind(self, cli, write):
        doc = json.loads(fixtures.text("fig1a"))
        doc["kind"] = "hybrid"
        code, _, err = cli("validate", write("bad.json", doc))
        assert code == 2 and "ParseError" in err

    def test_missing_file(self, cli, tmp_path):
        code, _, err = cli("validate", tmp_path / "absent.json")
        assert code == 2 and "IOError" in err


class TestSimulate:
    def test_outputs(self, cli, write):
        w = write("w.json", [{"symbol": "i", "timestamp": "5/2"}])
        code, out, _ = cli("simulate", fx("m1"), w)
        assert code == 0 and out.strip() == "(o1,5/2)"

    def test_trace(self, cli, write):
        w = write("w.json", [{"symbol": "i", "timestamp": 4}])
        code, out, _ = cli("simulate", "--trace", fx("fig2a"), w)
        lines = out.strip().splitlines()
        assert code == 0 and len(lines) == 3 and "q1" in lines[1]

    def test_json(self, cli, write):
        w = write("w.json", [{"symbol": "i", "timestamp": "5/2"}])
        code, out, _ = cli("simulate", "--json", "--trace", fx("m2"), w)
        doc = json.loads(out)
        assert doc["outputs"] == [{"symbol": "o2", "timestamp": "5/2"}]
        assert doc["final"] == {"state": "q0", "clock": "0"} and len(doc["trace"]) == 2

    def test_strict(self, cli, write):
        w = write("w.json", [{"symbol": "i", "timestamp": 1}, {"symbol": "i", "timestamp": 1}])
        assert cli("simulate", fx("m1"), w)[0] == 0
        code, _, err = cli("simulate", "--strict", fx("m1"), w)
        assert code == 2 and "strictly" in err

    def test_float_free(self, cli, write):
        w = write("w.json", '[{"symbol": "i", "timestamp": 2.5}]')
        code, out, _ = cli("simulate", fx("m2"), w)
        assert code == 0 and out.strip() == "(o2,5/2)"


class TestAbstract:
    def test_fig1a(self, cli):
        code, out, _ = cli("abstract", fx("fig1a"), "--n", 1)
        doc = json.loads(out)
        assert code == 0 and len(doc["states"]) == 2 and len(doc["transitions"]) == 8

    def test_default_bounds(self, cli):
        for name, states in (("fig2a", 5), ("fig3a", 6)):
            doc = json.loads(cli("abstract", fx(name))[1])
            assert len(doc["states"]) == states

    def test_bound_too_small(self, cli):
        code, _, err = cli("abstract", fx("m2"), "--n", 1)
        assert code == 2 and "UsageError" in err

    def test_n_on_timeout_machine(self, cli):
        assert cli("abstract", fx("fig2a"), "--n", 4)[0] == 2

    def test_output_file(self, cli, tmp_path):
        target = tmp_path / "a.json"
        code, out, _ = cli("abstract", fx("fig3a"), "-o", target)
        assert code == 0 and out == "" and json.loads(target.read_text())["kind"] == "half"


class TestEquiv:
    def test_m1_m2(self, cli):
        code, out, _ = cli("equiv", fx("m1"), fx("m2"))
        assert code == 1
        assert "not equivalent" in out and "timed word:" in out and "index 0" in out

    def test_m1_m2_counterexample_replays(self, cli):
        code, out, _ = cli("equiv", "--json", fx("m1"), fx("m2"))
        doc = json.loads(out)
        assert code == 1 and doc["equivalent"] is False
        w = io.word_from_list(doc["word"])
        a = run(fixtures.load("m1"), w).outputs
        b = run(fixtures.load("m2"), w).outputs
        k = doc["index"]
        assert io.word_to_list(a) == doc["outputs_a"] and io.word_to_list(b) == doc["outputs_b"]
        assert a[:k] == b[:k] and a[k] != b[k]

    def test_json_matches_library_and_is_stable(self, cli):
        first = cli("equiv", "--json", fx("m1"), fx("m2"))[1]
        second = cli("equiv", "--json", fx("m1"), fx("m2"))[1]
        verdict = cross_equivalent(fixtures.load("m1"), fixtures.load("m2"))
        assert first == second == io.dumps(io.verdict_to_dict(verdict))

    def test_equivalent(self, cli):
        code, out, _ = cli("equiv", fx("fig2a"), fx("fig2a"))
        assert code == 0 and "are equivalent" in out
        assert json.loads(cli("equiv", "--json", fx("fig2a"), fx("fig2a"))[1]) == {"equivalent": True}

    def test_cross_kind_equivalent(self, cli, tmp_path):
        target = tmp_path / "embedded.json"
        assert cli("embed", fx("fig2a"), "-o", target)[0] == 0
        assert cli("equiv", fx("fig2a"), target)[0] == 0

    def test_alphabet_mismatch(self, cli, write):
        doc = json.loads(fixtures.text("m2"))
        doc["outputs"].append("o3")
        code, _, err = cli("equiv", fx("m1"), write("m2x.json", doc))
        assert code == 2 and "AlphabetMismatch" in err


class TestConvert:
    def test_m1_not_loop_free(self, cli):
        code, _, err = cli("convert", fx("m1"), "--to", "guarded")
        assert code == 2 and "NotLoopFree" in err and "q0 -> q1 -> q0" in err

    def test_m1_json_reason(self, cli):
        code, out, _ = cli("convert", "--json", fx("m1"), "--to", "guarded")
        assert code == 2 and json.loads(out) == {
            "error": "NotLoopFree", "message": "timeouts form a cycle: q0 -> q1 -> q0", "cycle": ["q0", "q1"],
        }

    def test_m2_not_lcro(self, cli):
        code, out, _ = cli("convert", "--json", fx("m2"), "--to", "timeout")
        doc = json.loads(out)
        assert code == 2 and doc["error"] == "NotLcro" and doc["guard"] == "[0,2]"

    def test_wrong_direction(self, cli):
        assert cli("convert", fx("m2"), "--to", "guarded")[0] == 2

    def test_round_trip(self, cli, write, tmp_path):
        chain = {
            "kind": "timeout", "states": ["a", "b"], "inputs": ["i"], "outputs": ["o1", "o2"], "initial": "a",
            "transitions": [
                {"source": "a", "input": "i", "output": "o1", "target": "a"},
                {"source": "b", "input": "i", "output": "o2", "target": "b"},
            ],
            "timeouts": {"a": {"target": "b", "duration": 2}, "b": {"target": "b", "duration": "inf"}},
        }
        src = write("chain.json", chain)
        g, t = tmp_path / "g.json", tmp_path / "t.json"
        assert cli("convert", src, "--to", "guarded", "-o", g)[0] == 0
        assert cli("convert", g, "--to", "timeout", "-o", t)[0] == 0
        assert cli("equiv", src, g)[0] == 0 and cli("equiv", src, t)[0] == 0
        assert cli("validate", g)[0] == 0


class TestEmbed:
    def test_m1(self, cli):
        code, out, _ = cli("embed", fx("m1"))
        doc = json.loads(out)
        assert code == 0 and doc["kind"] == "general"
        assert {json.dumps(t["guard"], sort_keys=True) for t in doc["transitions"]} == {
            json.dumps({"lower": 0, "lower_closed": True, "upper": 1, "upper_closed": False}, sort_keys=True)
        }

    def test_json_flag_accepted(self, cli):
        assert cli("embed", "--json", fx("fig1a"))[0] == 0


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "tfsm", "equiv", fx("m1"), fx("m2")], capture_output=True, text=True,
    )
    assert proc.returncode == 1 and "not equivalent" in proc.stdout


def test_usage_error_exit_code():
    proc = subprocess.run([sys.executable, "-m", "tfsm", "frobnicate"], capture_output=True, text=True)
    assert proc.returncode == 2

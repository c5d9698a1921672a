import json
import subprocess
import sys

import pytest

from vcspland import gen
from vcspland.cli import main
from vcspland.core import Constraint, VcspInstance, parse, serialize


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def qpath(tmp_path):
    p = tmp_path / "q4.json"
    p.write_text(serialize(gen.quadratic_path(4)))
    return str(p)


@pytest.fixture
def xor_file(tmp_path):
    p = tmp_path / "xor.json"
    p.write_text(serialize(VcspInstance.boolean(2, [Constraint((1, 2), (0, 1, 1, 0))])))
    return str(p)


def test_longest_path_plain_and_witness(capsys, qpath):
    assert run(capsys, "longest-path", "-i", qpath) == (0, "10\n", "")
    code, out, _ = run(capsys, "longest-path", "-i", qpath, "--witness")
    d = json.loads(out)
    assert code == 0 and d["length"] == 10 and len(d["witness"]) == 11


def test_eval_single_and_table(capsys, xor_file):
    code, out, _ = run(capsys, "eval", "-i", xor_file, "01")
    assert code == 0 and json.loads(out) == {"assignment": "01", "fitness": 1}
    code, out, _ = run(capsys, "eval", "-i", xor_file, "--format", "csv")
    assert out.splitlines() == ["assignment,fitness", "00,0", "01,1", "10,1", "11,0"]


def test_simplify_then_span(capsys, xor_file, tmp_path):
    code, out, _ = run(capsys, "simplify", "-i", xor_file)
    simple = tmp_path / "simple.json"
    simple.write_text(out)
    code, out, _ = run(capsys, "span", "-i", str(simple))
    assert json.loads(out)["span"] == 4


def test_normalize_envelope_feeds_other_commands(capsys, tmp_path):
    inst = tmp_path / "i.json"
    inst.write_text(serialize(gen.random_instance(5, "random", seed=2, density=0.6)))
    code, out, _ = run(capsys, "normalize", "-i", str(inst))
    env = json.loads(out)
    assert code == 0 and set(env) == {"instance", "report"}
    norm = tmp_path / "n.json"
    norm.write_text(out)
    code, out, _ = run(capsys, "equiv", "sign", str(inst), str(norm))
    assert json.loads(out)["equal"] is True


def test_minspan(capsys, qpath):
    code, out, _ = run(capsys, "minspan", "-i", qpath)
    d = json.loads(out)
    assert code == 0 and d["original_span"] == 10 and d["minimized_span"] == 22
    assert parse(json.dumps(d["instance"])).n == 4


def test_graph_stats_csv(capsys, xor_file):
    code, out, _ = run(capsys, "graph-stats", "-i", xor_file, "--format", "csv")
    assert out.splitlines() == ["vertices,edges,local_optima,longest_path,witness", "4,4,2,1,00 01"]


def test_search_and_analyze(capsys, qpath, tmp_path):
    code, out, _ = run(capsys, "search", "-i", qpath, "--start", "1010")
    lines = [json.loads(line) for line in out.splitlines()]
    assert len(lines) == 11 and lines[-1]["assignment"] == "1111"
    trace = tmp_path / "t.jsonl"
    trace.write_text(out)
    code, out, _ = run(capsys, "analyze-trace", "-i", qpath, "--trace", str(trace))
    d = json.loads(out)
    assert code == 0 and d["properties"]["passed"]
    assert d["forest"]["chains"][0] == "⊥ ⇐ (1,1↦0)"


def test_analyze_trace_exit_code_on_failure(capsys, tmp_path):
    from vcspland.core import SimpleInstance

    s = SimpleInstance(3, 0, {1: -10, 2: 2, 3: -5}, {(1, 2): -6, (1, 3): 9, (2, 3): 8}).to_instance()
    inst = tmp_path / "tri.json"
    inst.write_text(serialize(s))
    from vcspland.core import evaluate

    rows = []
    for t, lab in enumerate("110 100 101 001 000 010 011".split(), start=1):
        x = tuple(int(c) for c in lab)
        rows.append(json.dumps({"step": t, "assignment": lab, "fitness": evaluate(s, x)}))
    trace = tmp_path / "t.jsonl"
    trace.write_text("\n".join(rows) + "\n")
    code, out, err = run(capsys, "analyze-trace", "-i", str(inst), "--trace", str(trace))
    assert code == 3 and "roots-at-most-n" in err


def test_equiv_magnitude_divergence(capsys, xor_file, qpath, tmp_path):
    other = tmp_path / "o.json"
    other.write_text(serialize(VcspInstance.boolean(2, [Constraint((1, 2), (0, 1, 2, 0))])))
    code, out, _ = run(capsys, "equiv", "magnitude", xor_file, str(other))
    assert json.loads(out) == {"kind": "magnitude", "equal": False, "first_divergence": {"assignment": "10"}}


def test_sign_interact(capsys, xor_file):
    code, out, _ = run(capsys, "sign-interact", "-i", xor_file, "1", "2")
    d = json.loads(out)
    assert d["interact"] is True and d["i_depends_on_j"]["witness"] == "00"


def test_gen_families(capsys):
    code, out, _ = run(capsys, "gen", "subsetsum_star", "3,5,7", "8")
    assert parse(out).n == 5
    code, out, _ = run(capsys, "gen", "random_instance", "6", "--shape", "cycle")
    assert parse(out) == gen.random_instance(6, "cycle", seed=0)
    code, out, err = run(capsys, "gen", "quadratic_path", "x")
    assert code == 1 and json.loads(err)["error"] == "BAD_PARAMETER"


@pytest.mark.parametrize(
    "text, code, name",
    [
        ('{"n": 2, "domains": [2, 2], "constraints": [{"scope": [1, 2], "values": [1, 2, 3]}]}', 1, "TABLE_SIZE"),
        ('{"n": 2, "domains": [2, 2], "constraints": [{"scope": [2, 1], "values": [1, 2, 3, 4]}]}', 1, "SCOPE_ORDER"),
        ("not json", 1, "MALFORMED_JSON"),
    ],
)
def test_validation_errors_exit_1(capsys, tmp_path, text, code, name):
    f = tmp_path / "bad.json"
    f.write_text(text)
    rc, out, err = run(capsys, "span", "-i", str(f))
    assert rc == code and out == "" and json.loads(err)["error"] == name


def test_budget_exit_2(capsys, qpath):
    rc, _, err = run(capsys, "graph-stats", "-i", qpath, "--max-vertices", "8")
    assert rc == 2 and json.loads(err)["error"] == "SIZE_LIMIT"
    assert run(capsys, "graph-stats", "-i", qpath, "--max-vertices", "8", "--force")[0] == 0


def test_output_file(capsys, qpath, tmp_path):
    dest = tmp_path / "out.txt"
    assert run(capsys, "longest-path", "-i", qpath, "-o", str(dest)) == (0, "", "")
    assert dest.read_text() == "10\n"


def test_verify_paper_subset(capsys):
    code, out, _ = run(capsys, "verify-paper", "--only", "1,10")
    d = json.loads(out)
    assert code == 0 and [c["id"] for c in d["criteria"]] == [1, 10]


def test_module_entry_point_reads_stdin():
    proc = subprocess.run(
        [sys.executable, "-m", "vcspland", "longest-path"],
        input=serialize(gen.quadratic_path(3)), capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and proc.stdout == "6\n"

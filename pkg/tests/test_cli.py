import json

import pytest

from dualadmit.cli import run
from dualadmit.io import dump_algebra, load_algebra, load_space
from dualadmit.profiles import kleene_k

C8 = "~x <= x, x /\\ ~y <= ~x \\/ y => ~y <= y"


def _run(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_with_file(capsys, tmp_path):
    path = tmp_path / "K.json"
    dump_algebra(kleene_k(), path)
    code, out, _ = _run(capsys, "check", "--variety", "ka", "--clause", C8, "--algebra", str(path))
    assert code == 0 and out == "false; witness x:=a, y:=0\n"


def test_check_named_and_clause_file(capsys, tmp_path):
    f = tmp_path / "c.txt"
    f.write_text("x /\\ y = bot => x = bot | y = bot\n")
    code, out, _ = _run(capsys, "check", "--clause-file", str(f), "--algebra", "2^2")
    assert code == 0 and out == "false; witness x:=(1,0), y:=(0,1)\n"
    code, out, _ = _run(capsys, "check", "--clause-file", str(f), "--algebra", "2")
    assert out == "true\n"


def test_free_size_only(capsys):
    assert _run(capsys, "free", "--variety", "bdl", "-n", "2", "--size-only") == (0, "6\n", "")


def test_free_writes_readable_algebra(capsys, tmp_path):
    path = tmp_path / "f.json"
    code, _, _ = _run(capsys, "free", "--variety", "ka", "-n", "1", "--out", str(path),
                      "--emit-dot", str(tmp_path / "m.dot"))
    assert code == 0 and load_algebra(path).size == 6
    assert (tmp_path / "m.dot").read_text().startswith("digraph M {")


def test_verify(capsys):
    code, out, _ = _run(capsys, "verify", "--variety", "dma", "--max-power", "2", "--max-size", "8")
    assert code == 0 and out.strip().endswith("0 disagreements")
    code, out, _ = _run(capsys, "verify", "--variety", "bdl", "--json")
    report = json.loads(out)
    assert set(report) >= {"profile", "bounds", "members_checked", "disagreements", "verdicts"}


def test_admissible(capsys):
    code, out, _ = _run(capsys, "admissible", "--variety", "ka", "--clause", C8)
    assert code == 0 and out == "admissible\n"
    code, out, _ = _run(capsys, "admissible", "--variety", "bdl", "--clause", "x = y => false", "--json")
    data = json.loads(out)
    assert data["verdict"] == "not_admissible"
    assert data["counterexample"]["assignment"] == {"x": "0", "y": "0"}


def test_admissible_random_is_seeded(capsys):
    a = _run(capsys, "admissible", "--variety", "st", "--random", "4", "--seed", "9")
    b = _run(capsys, "admissible", "--variety", "st", "--random", "4", "--seed", "9")
    assert a == b and a[0] == 0 and len(a[1].splitlines()) == 4


def test_member(capsys):
    code, out, _ = _run(capsys, "member", "--algebra", "K")
    assert code == 0
    assert out.splitlines()[0] == "IS(F): false"
    assert "ISP(F): false" in out
    code, out, _ = _run(capsys, "member", "--algebra", "S", "--witness", "--json")
    data = json.loads(out)
    assert data["verdicts"][0]["result"] is True


def test_dual_outputs(capsys, tmp_path):
    code, out, _ = _run(capsys, "dual", "--algebra", "D^2", "--out", str(tmp_path / "x.json"),
                        "--emit-dot", str(tmp_path / "x.dot"))
    assert code == 0 and out.startswith("X(D^2): 4 points")
    assert load_space(tmp_path / "x.json").size == 4
    code, out, _ = _run(capsys, "dual", "--algebra", "K", "--variety", "kl")
    assert out.startswith("X(bar(K)): 2 points")


def test_classify(capsys):
    code, out, _ = _run(capsys, "classify", "--variety", "st")
    assert out.splitlines()[0] == "st: structurally complete, non-negative universally complete"


def test_enumerate_round_trip(capsys, tmp_path):
    code, out, _ = _run(capsys, "enumerate", "--variety", "dma", "--max-power", "1",
                        "--out", str(tmp_path))
    assert code == 0 and len(out.splitlines()) == 4
    files = sorted(tmp_path.glob("*.json"))
    assert len(files) == 4
    for f in files:
        code, _, _ = _run(capsys, "member", "--algebra", str(f))
        assert code == 0


def test_deterministic_output(capsys):
    a = _run(capsys, "classify", "--json")
    b = _run(capsys, "classify", "--json", "--no-cache")
    assert a == b


@pytest.mark.parametrize("argv,code", [
    (["bogus"], 64),
    (["free", "--variety", "bdl"], 64),
    (["check", "--algebra", "K"], 64),
    (["check", "--clause", "x = ", "--algebra", "K"], 65),
    (["check", "--clause", "x = y", "--algebra", "missing.json"], 66),
    (["check", "--clause", "x* = y", "--algebra", "K"], 65),
    (["check", "--clause", "x = y", "--algebra", "K", "--variety", "st"], 64),
    (["free", "--variety", "ka", "-n", "3", "--json"], 2),
    (["free", "--variety", "st", "-n", "9", "--size-only"], 2),
    (["verify", "--variety", "bdl", "--jobs", "0"], 64),
    (["free", "--variety", "bdl", "-n", "1", "--out", "/nonexistent/dir/f.json"], 74),
])
def test_error_exit_codes(capsys, argv, code):
    got, out, err = _run(capsys, *argv)
    assert got == code
    assert len(err.strip().splitlines()) == 1 and err.startswith("dualadmit: ")


def test_malformed_algebra_file(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"signature": "ka", "size": 2, "ops": {}}')
    code, _, err = _run(capsys, "member", "--algebra", str(path))
    assert code == 65 and "missing field ops.meet" in err


def test_non_member_algebra(capsys, tmp_path):
    path = tmp_path / "m.json"
    m = [[min(a, b) for b in range(3)] for a in range(3)]
    j = [[max(a, b) for b in range(3)] for a in range(3)]
    path.write_text(json.dumps({"signature": "ka", "size": 3, "ops": {
        "meet": m, "join": j, "neg": [0, 1, 2], "bot": 0, "top": 2}}))
    code, _, err = _run(capsys, "member", "--algebra", str(path))
    assert code == 65

import subprocess
import sys
from importlib import resources

import pytest

CORPUS = resources.files("afsterm") / "corpus"


def run(*args, timeout=60):
    proc = subprocess.run(
        [sys.executable, "-m", "afsterm", *map(str, args)], capture_output=True, text=True, timeout=timeout
    )
    return proc.returncode, proc.stdout, proc.stderr


def test_check_map_then_verify(tmp_path):
    cert = tmp_path / "map.cert"
    code, out, _ = run("check", CORPUS / "map.afs", "--cert", cert, "--jobs", 1)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "YES" and lines[1] == "CERT v1"
    assert cert.read_text() == "\n".join(lines[1:]) + "\n"
    assert run("verify", CORPUS / "map.afs", "--cert", cert)[:2] == (0, "ACCEPT\n")

    cert.write_text(cert.read_text().replace("symbol s(x0) = x0", "symbol s(x0) = 0"))
    code, out, _ = run("verify", CORPUS / "map.afs", "--cert", cert)
    assert code == 1 and out.startswith("REJECT NotStronglyMonotone")


def test_check_loop():
    code, out, _ = run("check", CORPUS / "loop.afs", "--jobs", 1)
    assert code == 1 and out.splitlines()[0] == "MAYBE"
    assert "exhausted" in out


def test_normalize():
    code, out, _ = run("normalize", CORPUS / "map.afs", "--term", r"map (\x:nat. s x) (cons 0 nil)")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "cons (s 0) nil"
    assert [ln.split(" -> ")[0].strip() for ln in lines[1:]] == ["1. rule 1 at []", "2. beta at [0, 1]", "3. rule 0 at [1]"]


def test_normalize_out_of_fuel():
    code, out, _ = run("normalize", CORPUS / "loop.afs", "--term", "f 0", "--fuel", 20)
    assert code == 1 and out.startswith("FUEL EXHAUSTED")


def test_typecheck():
    code, out, _ = run("typecheck", CORPUS / "map.afs")
    assert code == 0
    assert out.splitlines() == [
        "rule 0: map F nil => nil : list",
        "rule 1: map F (cons x q) => cons (F x) (map F q) : list",
    ]


@pytest.mark.parametrize(
    "content, needle",
    [
        ("SIG\n 0 nat\n", "line 2"),
        ("SIG\n 0 : nat\nVARS\n F : nat -> nat\n x : nat\nRULES\n F x => x\n", "line 7"),
    ],
)
def test_input_errors_exit_2(tmp_path, content, needle):
    bad = tmp_path / "bad.afs"
    bad.write_text(content)
    code, out, err = run("check", bad)
    assert code == 2 and out == "" and needle in err


def test_other_input_errors(tmp_path):
    assert run("check", tmp_path / "missing.afs")[0] == 2
    assert run("normalize", CORPUS / "map.afs", "--term", "map (")[0] == 2
    assert run("normalize", CORPUS / "map.afs", "--term", "s nil")[0] == 2
    assert run("check", CORPUS / "map.afs", "--degree", "5")[0] == 2
    assert run("frobnicate")[0] == 2

import io

import pytest

from stsgkit.cli import run
from stsgkit.grammar import read_grammar, validate_grammar

EXAMPLE = "c worked example\np cnf 3 2\n1 -2 3 0\n-1 2 -3 0\n"


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def cnf(tmp_path):
    path = tmp_path / "example.cnf"
    path.write_text(EXAMPLE)
    return path


@pytest.fixture
def gadget(tmp_path, cnf):
    outdir = tmp_path / "gadget"
    code, _, _ = call("reduce", cnf, "--out", outdir)
    assert code == 0
    return outdir


def test_reduce(gadget):
    assert (gadget / "reduction.txt").read_text() == \
        "variant mppwg\nthreshold 17/576\ntheta 13/21\n"
    g = read_grammar((gadget / "grammar.stsg").read_text())
    assert len(g) == 25 and validate_grammar(g).ok
    assert (gadget / "wordgraph.wg").read_text().startswith("positions 6\n")


def test_reduce_mpp_variant(tmp_path, cnf):
    code, out, _ = call("reduce", cnf, "--variant", "mpp", "--out", tmp_path / "m")
    assert code == 0 and "threshold 17/746496" in out.splitlines()


def test_verify_example(cnf):
    code, out, _ = call("verify", cnf)
    assert code == 0
    assert "check mppwg_mps pass" in out and "fail" not in out


def test_verify_random():
    code, out, _ = call("verify", "--random", 3, "--seed", 2, "--max-n", 3, "--max-m", 2)
    assert code == 0 and out.rstrip().endswith("verified 3 pass 3 fail 0")


def test_mpp_decision_yes(gadget):
    code, out, _ = call("mpp", gadget / "grammar.stsg", gadget / "wordgraph.wg",
                        "--threshold", "119/4032")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "mpp F F T T T F 121/4032"
    assert lines[-1] == "decision yes threshold 17/576"


def test_mps_decision_no(gadget):
    code, out, _ = call("mps", gadget / "grammar.stsg", gadget / "wordgraph.wg",
                        "--threshold", "1/32")
    assert code == 1 and out.splitlines()[-1] == "decision no threshold 1/32"


def test_mpd(gadget):
    code, out, _ = call("mpd", gadget / "grammar.stsg", gadget / "wordgraph.wg")
    assert code == 0 and out.splitlines()[0] == "mpd 13/1344"


def test_sentence_input(gadget, tmp_path):
    wg = tmp_path / "s.wg"
    wg.write_text("positions 6\nT\nF\nT\nF\nT\nF\n")
    code, out, _ = call("mps", gadget / "grammar.stsg", wg)
    assert code == 0 and out == "mps T F T F T F 121/4032\n"


def test_sample_deterministic(gadget):
    args = ("sample", gadget / "grammar.stsg", gadget / "wordgraph.wg", "--samples", 300,
            "--seed", 4)
    first, second = call(*args), call(*args)
    assert first == second and first[0] == 0
    assert first[1].startswith("mc ") and "samples 300 seed 4" in first[1]


def test_byte_identical(gadget):
    runs = [call("mps", gadget / "grammar.stsg", gadget / "wordgraph.wg") for _ in range(2)]
    assert runs[0] == runs[1]


def test_collapse(tmp_path):
    g = tmp_path / "g.stsg"
    g.write_text("start S\nterminal a b\nnonterminal S A\n"
                 "tree T1 1/2 (S A b)\ntree T3 1/2 (S (A a) b)\ntree T2 1 (A a)\n")
    code, out, _ = call("collapse", g)
    assert code == 0
    assert "tree T1 1/3 (S A b)" in out and "tree T3 2/3 (S (A a) b)" in out


def test_validate(tmp_path):
    g = tmp_path / "g.stsg"
    g.write_text("start S\nterminal a b\nnonterminal S\ntree t1 1/2 (S a)\ntree t2 1/3 (S b)\n")
    code, out, _ = call("validate", g)
    assert code == 1 and "root S sums to 5/6" in out


def test_malformed_dimacs(tmp_path):
    bad = tmp_path / "bad.cnf"
    bad.write_text("p cnf 3 1\n1 2 0\n")
    code, out, err = call("reduce", bad, "--out", tmp_path / "x")
    assert code == 2 and out == ""
    assert err == "error: %s:2:1: clause has 2 literals, expected 3\n" % bad


def test_malformed_grammar(tmp_path, gadget):
    g = tmp_path / "g.stsg"
    g.write_text("start S\nterminal a\ntree t 1 (S a\n")
    code, _, err = call("mpd", g, gadget / "wordgraph.wg")
    assert code == 2 and ":3:10:" in err


def test_cap_exceeded(gadget):
    code, _, err = call("mpp", gadget / "grammar.stsg", gadget / "wordgraph.wg", "--cap", 10)
    assert code == 2 and "240" in err


def test_missing_file(tmp_path):
    assert call("collapse", tmp_path / "nope.stsg")[0] == 2


def test_usage_error():
    assert call("frobnicate")[0] == 2

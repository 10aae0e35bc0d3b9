import csv
import io
import math
import os

import pytest

from relcurrents.cli import (FIXTURES, SystemFileError, load_system, main, parse_system,
                             serialize_system)

import oracles as o

ALL = sorted(f[:-4] for f in os.listdir(FIXTURES) if f.endswith(".sys"))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_example1_rules_echo():
    assert "b -> bac" in load_system("example1_sub.sys").substitution().describe()
    sf = load_system("example1.sys")
    assert dict(sf.rules)["b"] == sf.alphabet().parse("bac")


def test_full_rank_file():
    sf = load_system("full_rank.sys")
    assert len(sf.edges) == 5
    tt = sf.train_track()
    e5 = tt.graph.alphabet.token("e5")
    assert len(tt.image(e5)) == 9
    assert tt.fmt(tt.image(e5)) == "e5 ~e3 ~e5 e1 e4 e2 ~e4 ~e1 e5"


@pytest.mark.parametrize("name", ALL)
def test_round_trip(name):
    sf = load_system(name + ".sys")
    again = parse_system(serialize_system(sf))
    assert again == sf


@pytest.mark.parametrize("text,line,msg", [
    ("", None, "empty"),
    ("letters: a b\nrule a = ab\n", None, "kind"),
    ("kind: substitution\nletters: a b\nrule a = ab\nrule a = a\nrule b = b\n", 4, "duplicate"),
    ("kind: substitution\nletters: a b\nrule a = ac\nrule b = b\n", 3, "c"),
    ("kind: substitution\nletters: a b\nrule a = ab\n", None, "rule"),
])
def test_parse_errors(text, line, msg):
    with pytest.raises(SystemFileError) as exc:
        parse_system(text)
    s = str(exc.value)
    assert msg in s
    if line is not None:
        assert f"line {line}" in s


def test_freq_example1(capsys):
    code, out, _ = run(capsys, "freq", "example1_sub.sys", "--seed", "b", "--window", "2")
    assert code == 0
    got = {w: float(v) for w, v in rows(out)[1:]}
    assert set(got) == set(o.EXAMPLE1_FREQ)
    for w, v in o.EXAMPLE1_FREQ.items():
        assert got[w] == pytest.approx(v, abs=1e-10)


def test_matrix_appendix(capsys):
    code, out, _ = run(capsys, "matrix", "appendix.sys")
    assert code == 0 and len(rows(out)) == 5
    code, out, _ = run(capsys, "matrix", "appendix.sys", "--induce", "2")
    # the letter matrix, then the 8x8 matrix on length-2 words
    r = rows(out)
    assert code == 0 and len(r) == 5 + 9 and len(r[5]) == 9


def test_table_format_and_out(capsys, tmp_path):
    p = tmp_path / "m.csv"
    code, out, _ = run(capsys, "matrix", "example2.sys", "--out", str(p))
    assert code == 0 and out == ""
    assert p.read_text().startswith(",")
    code, out, _ = run(capsys, "matrix", "example2.sys", "--format", "table")
    assert code == 0 and "," not in out.splitlines()[0]


def test_whitehead_cli(capsys):
    code, out, _ = run(capsys, "whitehead", "f2_a.sys", "abAB")
    assert code == 0 and "NotSeparable" in out
    code, out, _ = run(capsys, "whitehead", "f2_a.sys", "ab")
    assert code == 0 and "Separable" in out and "NotSeparable" not in out
    code, out, _ = run(capsys, "whitehead", "f4_ab.sys", "cd")
    assert code == 0 and "verdict: Separable" in out


def test_current_cli(capsys):
    code, out, _ = run(capsys, "current", "f2_a.sys", "abaBab", "--depth", "4")
    got = dict(rows(out)[1:])
    got.update({o.inv(w): v for w, v in list(got.items())})
    assert code == 0
    assert [got[w] for w in ("b", "ba", "abab", "Bab")] == ["3", "2", "1", "1"]


def test_goodness_and_iterate_cli(capsys):
    code, out, _ = run(capsys, "goodness", "example2.sys", "cd")
    assert code == 0
    r = rows(out)
    assert r[0][-1] == "goodness" and float(r[1][-1]) == 1
    code, out, _ = run(capsys, "iterate", "example2.sys", "cd", "-n", "2")
    r = rows(out)
    assert code == 0 and r[2][-1] == "caddcad"


def test_ns_cli(capsys):
    code, out, err = run(capsys, "ns", "example2.sys", "cd", "--inverse", "example2_inverse.sys",
                         "--max-iter", "10")
    assert code == 0 and "forward" in err
    r = rows(out)
    assert r[0] == ["n", "direction", "distance", "goodness", "length"]


def test_exit_codes(capsys):
    code, _, err = run(capsys, "goodness", "example2.sys", "ab")
    assert code == 2 and "error" in err
    code, _, err = run(capsys, "whitehead", "f2_a.sys", "aaa")
    assert code == 2
    code, _, err = run(capsys, "iterate", "example2.sys", "cDcDcDcDcDa", "-n", "6", "--cap", "100")
    assert code == 3 and "cancel" in err


def test_missing_file(capsys):
    code, _, err = run(capsys, "matrix", "no_such_file.sys")
    assert code == 2


def test_approx_cli(capsys):
    code, out, err = run(capsys, "approx", "f2_a.sys", "--input", os.path.join(FIXTURES, "golden",
                                                                              "rational_current.csv"),
                         "--R", "100000", "--depth", "2")
    assert code == 0
    assert rows(out)[0] == ["class", "multiplicity"]
    assert "bound" in err
    assert not math.isnan(float(err.split("error")[1].split()[0].strip(":= ,")))


def test_repro(capsys):
    code, out, err = run(capsys, "repro")
    assert code == 0, out + err

import csv
import io
import json

import pytest

from nilpotwo import construct, groupio
from nilpotwo import table_group as tg
from nilpotwo.cli import main
from nilpotwo.errors import ParseError, PointOutOfRangeError

REPORT_KEYS = {
    "name", "order", "radical_order", "path", "subgroup_order", "class",
    "threshold_log2", "size_log2", "margin_log2", "diagnostics", "seed",
}


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def check_report(row):
    assert set(row) == REPORT_KEYS
    assert row["order"].isdigit() and row["subgroup_order"].isdigit() and row["radical_order"].isdigit()
    assert row["path"] in ("solvable", "socle", "fallback", "exhaustive")
    for key in ("threshold_log2", "size_log2", "margin_log2"):
        assert isinstance(row[key], float)
        assert len(repr(abs(row[key])).replace(".", "").lstrip("0").split("e")[0]) <= 13
    for d in row["diagnostics"]:
        assert set(d) == {"inequality_id", "lhs_log2", "rhs_log2", "holds"}


def write_manifest(tmp_path, text):
    p = tmp_path / "m.tsv"
    p.write_text(text, encoding="utf-8")
    return str(p)


def test_analyze_inline_alt8(capsys):
    code, out, _ = run(capsys, "analyze", "perm deg=8 gens=(1,2,3) (2,3,4,5,6,7,8)")
    row = json.loads(out)
    check_report(row)
    assert code == 0
    assert row["path"] == "socle" and row["order"] == "20160" and row["margin_log2"] > 0


def test_analyze_family(capsys):
    code, out, _ = run(capsys, "analyze", "--family", "symmetric(4)")
    assert code == 0 and json.loads(out)["path"] == "solvable"


def test_analyze_out_of_range(capsys):
    code, out, _ = run(capsys, "analyze", "--family", "cyclic(2)")
    assert code == 0
    assert json.loads(out)["notice"] == "out of theorem range"


def test_analyze_input_errors(capsys, tmp_path):
    code, _, err = run(capsys, "analyze", "perm deg=3 gens=(1,4)")
    assert code == 1 and "column" in err
    code, _, _ = run(capsys, "analyze", "--family", "bogus(3)")
    assert code == 1
    code, _, _ = run(capsys, "analyze", str(tmp_path / "missing.txt"))
    assert code == 1


def test_analyze_table_file_and_stdin(capsys, tmp_path, monkeypatch):
    f = tmp_path / "q8.txt"
    f.write_text(tg.format_table(tg.from_generated(construct.dicyclic(8))), encoding="utf-8")
    code, out, _ = run(capsys, "analyze", str(f))
    row = json.loads(out)
    assert code == 0 and row["order"] == "8" and row["name"] == "q8.txt"
    monkeypatch.setattr("sys.stdin", io.StringIO("perm deg=4 gens=(1,2,3,4)\n"))
    code, out, _ = run(capsys, "analyze", "-")
    assert code == 0 and json.loads(out)["subgroup_order"] == "4"


def test_construct_round_trip(capsys, tmp_path):
    out_file = tmp_path / "g.txt"
    code, _, _ = run(capsys, "construct", "dixon(2)", "--out", str(out_file))
    assert code == 0
    code, out, _ = run(capsys, "analyze", str(out_file))
    assert code == 0 and json.loads(out)["order"] == str(24 ** 5)


def test_construct_wreath_one(capsys):
    _, a, _ = run(capsys, "construct", "wreath(symmetric(4),1)")
    _, b, _ = run(capsys, "construct", "symmetric(4)")
    assert a == b


def test_construct_alt9_pipe(capsys, monkeypatch):
    _, text, _ = run(capsys, "construct", "alternating(9)")
    monkeypatch.setattr("sys.stdin", io.StringIO(text))
    code, out, _ = run(capsys, "analyze")
    row = json.loads(out)
    assert code == 0 and row["subgroup_order"] == "27"
    found = [d for d in row["diagnostics"] if d["inequality_id"] == "elem3_found_a9"]
    assert found and found[0]["holds"] and abs(found[0]["lhs_log2"] - 4.75488750216) < 1e-9


def test_construct_bad_spec(capsys):
    assert run(capsys, "construct", "wreath(")[0] == 1


def test_every_corpus_family_round_trips():
    for name, text in construct.corpus_specs():
        g = construct.build(text)
        back = groupio.parse_perm_spec(groupio.format_perm_spec(g))
        assert back.order == construct.expected_order(text), name


def test_verify_small_manifest_json_and_csv(capsys, tmp_path):
    tbl = tmp_path / "s3.txt"
    tbl.write_text(tg.format_table(tg.from_generated(construct.symmetric(3))), encoding="utf-8")
    m = write_manifest(tmp_path, "\n".join([
        "# a comment",
        "@seed\t5",
        "S4\tfamily\tsymmetric(4)",
        "A5\tbuiltin\tAlt(5)",
        "inline\tperm\tperm deg=5 gens=(1,2,3,4,5)",
        "tab\ttable\ts3.txt",
        "tiny\tfamily\tcyclic(2)",
    ]) + "\n")
    code, out, _ = run(capsys, "verify", m)
    assert code == 0
    lines = [json.loads(x) for x in out.splitlines()]
    assert [r.get("name") for r in lines[:-1]] == ["S4", "A5", "inline", "tab", "tiny"]
    for r in lines[:4]:
        check_report(r)
    assert lines[4]["notice"] == "out of theorem range"
    summary = lines[-1]["summary"]
    assert summary["rows"] == 5 and summary["violations"] == [] and summary["min_margin_log2"] > 0
    code, out, _ = run(capsys, "verify", m, "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert tuple(rows[0]) == groupio.CSV_COLUMNS
    assert rows[1][0] == "S4" and rows[1][groupio.CSV_COLUMNS.index("certificate_ok")] == "true"
    assert rows[-1][0] == "#summary" and rows[-1][1] == "5"


def test_verify_jobs_and_seed_determinism(capsys, tmp_path):
    m = write_manifest(tmp_path, "a\tfamily\tdihedral(12)\nb\tfamily\tsymmetric(5)\nc\tfamily\twreath(cyclic(3), 2)\n")
    _, one, _ = run(capsys, "verify", m, "--seed", "9")
    _, three, _ = run(capsys, "verify", m, "--seed", "9", "--jobs", "3")
    assert one == three


def test_verify_corrupt_hook(capsys, tmp_path):
    m = write_manifest(tmp_path, "S4\tfamily\tsymmetric(4)\nD8\tfamily\tdihedral(8)\n")
    code, out, _ = run(capsys, "verify", m, "--corrupt-certificate", "S4")
    assert code == 2
    summary = json.loads(out.splitlines()[-1])["summary"]
    assert summary["certificate_failures"] == ["S4"]


def test_verify_empty_manifest(capsys, tmp_path):
    m = write_manifest(tmp_path, "# nothing here\n")
    code, out, _ = run(capsys, "verify", m)
    assert code == 0
    assert json.loads(out)["summary"]["rows"] == 0


def test_verify_rejects_bad_entries_before_analysis(capsys, tmp_path):
    m = write_manifest(tmp_path, "ok\tfamily\tsymmetric(4)\nbad\tperm\tperm deg=3 gens=(1,2)(2,3)\n")
    code, out, err = run(capsys, "verify", m)
    assert code == 1 and out == "" and "line 2" in err
    m = write_manifest(tmp_path, "x\tweird\tsymmetric(4)\n")
    assert run(capsys, "verify", m)[0] == 1
    assert run(capsys, "verify", str(tmp_path / "none.tsv"))[0] == 1


def test_verify_out_file(capsys, tmp_path):
    m = write_manifest(tmp_path, "C5\tfamily\tcyclic(5)\n")
    target = tmp_path / "report.json"
    code, out, _ = run(capsys, "verify", m, "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text().splitlines()[0])["subgroup_order"] == "5"


def test_oracle(capsys):
    code, out, _ = run(capsys, "oracle", "--max-order", "32")
    rows = [json.loads(x) for x in out.splitlines()]
    assert code == 0
    es = next(r for r in rows if r.get("name") == "extraspecial_2_5")
    assert es["witness_order"] == "32" and es["class"] == 2 and es["a"] == "16"
    code, out, _ = run(capsys, "oracle", "--max-order", "1")
    assert code == 0 and json.loads(out)["summary"]["rows"] == 0
    code, _, err = run(capsys, "oracle", "--max-order", "5000")
    assert code == 1 and "cap" in err


def test_oracle_64(capsys):
    code, out, _ = run(capsys, "oracle", "--max-order", "64")
    rows = [json.loads(x) for x in out.splitlines()]
    assert code == 0
    assert rows[-1]["summary"]["max_class"] <= 2
    assert all(r["class"] <= 2 for r in rows[:-1])


# -- groupio --


def test_perm_spec_errors():
    with pytest.raises(PointOutOfRangeError) as info:
        groupio.parse_perm_spec("perm deg=4 gens=(1,2) (3,5)")
    assert (info.value.line, info.value.column) == (1, 26)
    with pytest.raises(ParseError):
        groupio.parse_perm_spec("perm gens=(1,2)")
    with pytest.raises(ParseError):
        groupio.parse_perm_spec("# only a comment\n")
    with pytest.raises(ParseError) as info:
        groupio.parse_perm_spec("perm deg=2 gens=(1,2)\nperm deg=2 gens=()\n")
    assert info.value.line == 2


def test_manifest_round_trip():
    text = "@seed\t3\n@cap\tclass_scan\t500\nS4\tfamily\tsymmetric(4)\nA5\tbuiltin\tAlt(5)\n"
    m = groupio.parse_manifest(text)
    assert m.seed == 3 and m.caps == {"class_scan": 500}
    assert [e.name for e in m.entries] == ["S4", "A5"]
    assert groupio.format_manifest(m) == text


@pytest.mark.parametrize("text,line", [
    ("a\tfamily\n", 1),
    ("a\tfamily\tcyclic(3)\na\tfamily\tcyclic(4)\n", 2),
    ("@seed\tx\n", 1),
    ("@cap\tno_such_cap\t3\n", 1),
    ("\tfamily\tcyclic(3)\n", 1),
])
def test_manifest_errors(text, line):
    with pytest.raises(ParseError) as info:
        groupio.parse_manifest(text)
    assert info.value.line == line


def test_builtin_manifest():
    m = groupio.builtin_manifest()
    assert len(m.entries) == 155
    assert len(groupio.builtin_manifest(extended=True).entries) == 157

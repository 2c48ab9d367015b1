import subprocess
import sys
from importlib import resources
from pathlib import Path

import pytest

from behavdt.cli import UsageError, parse_fraction, parse_fraction_list, run

CALL_TREE_SPEC = str(resources.files("behavdt") / "data" / "call_tree.yaml")


@pytest.fixture
def work(tmp_path, monkeypatch) -> Path:
    monkeypatch.chdir(tmp_path)
    assert run(["gen", "--spec", CALL_TREE_SPEC, "--out", "calls.csv"]) == 0
    return tmp_path


def test_parse_fraction_forms():
    assert parse_fraction("0.8") == parse_fraction("80") == 0.8
    assert parse_fraction("1") == 1.0 and parse_fraction("100") == 1.0
    for bad in ("-0.1", "150", "abc"):
        with pytest.raises(UsageError, match="--threshold"):
            parse_fraction(bad)
    assert parse_fraction_list("1.0, 90,0.6") == [1.0, 0.9, 0.6]
    with pytest.raises(UsageError, match="--thresholds"):
        parse_fraction_list(",")


def test_train_export_rules_gives_seven_lines(work):
    assert run(["train", "--data", "calls.csv", "--model", "m.json", "--threshold", "0.8"]) == 0
    assert run(["export", "--model", "m.json", "--format", "rules", "--out", "rules.txt"]) == 0
    lines = Path("rules.txt").read_text().splitlines()
    assert len(lines) == 7
    assert lines[0].startswith("IF S=Meeting THEN Decline")
    assert run(["export", "--model", "m.json", "--format", "dot", "--out", "m.dot"]) == 0
    assert Path("m.dot").read_text().startswith("digraph")


def test_percent_threshold_equivalent(work):
    run(["train", "--data", "calls.csv", "--model", "a.json", "--threshold", "80"])
    run(["train", "--data", "calls.csv", "--model", "b.json", "--threshold", "0.8"])
    assert Path("a.json").read_bytes() == Path("b.json").read_bytes()


def test_baselines_and_predict(work):
    for flag in ("dt", "zeror"):
        assert run(["train", "--data", "calls.csv", "--model", f"{flag}.json", "--baseline", flag]) == 0
    run(["train", "--data", "calls.csv", "--model", "m.json"])
    assert run(["predict", "--model", "m.json", "--data", "calls.csv", "--out", "p.tsv"]) == 0
    rows = [l.split("\t") for l in Path("p.tsv").read_text().splitlines()]
    assert rows[0] == ["row", "predicted", "source_node", "depth", "fallback_used", "actual"]
    assert len(rows) == 1201
    assert all(r[4] in ("true", "false") for r in rows[1:])


def test_predict_without_class_column(work):
    run(["train", "--data", "calls.csv", "--model", "m.json"])
    Path("q.csv").write_text("T,R,L,S\nMon[Eve],Boss,Cafe,Meeting\nMon[Eve],Friend,Cafe,Meeting\n")
    assert run(["predict", "--model", "m.json", "--data", "q.csv", "--out", "p.tsv"]) == 0
    lines = Path("p.tsv").read_text().splitlines()
    assert lines[0].split("\t")[-1] == "fallback_used"
    assert [l.split("\t")[1] for l in lines[1:]] == ["Answer", "Decline"]


def test_evaluate_sweep_compare_outputs(work):
    assert run(["evaluate", "--data", "calls.csv", "--out", "e.tsv", "--k", "5", "--json", "e.json", "--stratified"]) == 0
    assert Path("e.tsv").read_text().startswith("scope\taccuracy")
    assert Path("e.json").exists()
    assert run(["evaluate", "--data", "calls.csv", "--out", "z.tsv", "--model-kind", "zeror", "--k", "3"]) == 0
    assert run(["sweep", "--data", "calls.csv", "--out", "s.tsv", "--k", "3", "--thresholds", "100,80,60"]) == 0
    assert len(Path("s.tsv").read_text().splitlines()) == 4
    assert run(["compare", "--data", "calls.csv", "--out", "c.tsv", "--k", "3", "--jobs", "2"]) == 0
    assert [l.split("\t")[0] for l in Path("c.tsv").read_text().splitlines()[1:]] == [
        "zero-r",
        "traditional-dt",
        "behavdt(0.8)",
    ]


def test_discretize(work):
    Path("log.csv").write_text("timestamp,contact_id,location,label\n378600,5551234,office,Answer\n378600,999,,Decline\n")
    Path("cfg.yaml").write_text("time_bins:\n  Morning: 360\n  Evening: 1020\ncontact_map:\n  '5551234': boss\n")
    assert run(["discretize", "--log", "log.csv", "--config", "cfg.yaml", "--out", "d.csv"]) == 0
    assert Path("d.csv").read_text().splitlines() == [
        "time_segment,relationship,location,label",
        "Mon[Morning],boss,office,Answer",
        "Mon[Morning],unknown,?,Decline",
    ]


@pytest.mark.parametrize(
    "argv, flag",
    [
        (["sweep", "--data", "x.csv", "--out", "o.tsv", "--thresholds", "1.0,2000"], "--thresholds"),
        (["train", "--data", "x.csv", "--model", "m.json", "--threshold", "-1"], "--threshold"),
        (["evaluate", "--data", "x.csv", "--out", "o.tsv", "--k", "0"], "--k"),
        (["frobnicate"], "invalid choice"),
        (["train", "--data", "x.csv"], "--model"),
        (["export", "--model", "m", "--format", "png", "--out", "o"], "--format"),
    ],
)
def test_usage_errors_exit_one(tmp_path, monkeypatch, capsys, argv, flag):
    monkeypatch.chdir(tmp_path)
    assert run(argv) == 1
    err = capsys.readouterr().err
    assert flag in err and "usage" in err
    assert not Path("o.tsv").exists()


def test_data_errors_exit_two(work, capsys):
    assert run(["train", "--data", "missing.csv", "--model", "m.json"]) == 2
    Path("bad.csv").write_text("a,b,c\n1,2\n")
    assert run(["train", "--data", "bad.csv", "--model", "m.json"]) == 2
    assert "row 2" in capsys.readouterr().err
    Path("m.json").write_text('{"version": 7}')
    assert run(["export", "--model", "m.json", "--format", "rules", "--out", "r.txt"]) == 2
    assert not Path("r.txt").exists()


def test_failed_run_leaves_previous_output_untouched(work):
    Path("out.tsv").write_text("previous\n")
    Path("bad.csv").write_text("a,y\n")
    assert run(["evaluate", "--data", "bad.csv", "--out", "out.tsv", "--k", "2"]) == 2
    assert Path("out.tsv").read_text() == "previous\n"
    assert sorted(p.name for p in work.iterdir() if p.name.startswith(".")) == []


def test_module_entry_point(work):
    proc = subprocess.run(
        [sys.executable, "-m", "behavdt", "export", "--model", "none.json", "--format", "rules", "--out", "r"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2
    proc = subprocess.run([sys.executable, "-m", "behavdt", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "behavdt" in proc.stdout


def test_logging_goes_to_stderr(work, monkeypatch, capsys):
    monkeypatch.setenv("BEHAVDT_LOG", "info")
    run(["train", "--data", "calls.csv", "--model", "m.json"])
    assert "trained behavdt on 1200 instances" in capsys.readouterr().err

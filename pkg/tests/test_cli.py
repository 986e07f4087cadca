"""Command-line front end"""

import json

import pytest

from app.cli import EXIT_OK, EXIT_USAGE, build_parser, main
from app.config import settings


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_gamma_json(capsys):
    code, out = run(capsys, "gamma", "--s", "2", "--k", "6", "--method", "closed")
    assert code == EXIT_OK
    record = json.loads(out)
    assert record["method"] == "closed"
    assert record["counts"] == ["1", "21", "1162", "20160", "258720", "1128960", "688128"]


def test_gamma_tsv(capsys):
    code, out = run(capsys, "gamma", "--s", "1", "--k", "3", "--method", "brute", "--format", "tsv")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "i\tcount"
    assert lines[1:] == ["0\t1", "1\t49", "2\t294", "3\t168"]


def test_gamma_mixed(capsys):
    code, out = run(capsys, "gamma", "--n", "2", "--m", "1", "--l", "3", "--k", "5")
    assert code == EXIT_OK
    assert json.loads(out)["counts"][-1] == "31740928"


def test_gamma_needs_a_stack(capsys):
    code, _ = run(capsys, "gamma", "--k", "3")
    assert code == EXIT_USAGE


def test_gamma_over_budget(capsys):
    code, _ = run(capsys, "--bit-budget", "12", "gamma", "--s", "2", "--k", "4", "--method", "brute")
    assert code == EXIT_USAGE


def test_count(capsys):
    code, out = run(capsys, "count", "--q", "3", "--k", "5", "--s", "3")
    assert code == EXIT_OK
    record = json.loads(out)
    assert record["value"] == "228089856"
    assert record["factored"] == "27843·2^13"


def test_count_tsv(capsys):
    code, out = run(capsys, "count", "--q", "1", "--k", "2", "--n", "1", "--corrected", "--format", "tsv")
    assert code == EXIT_OK
    header, row = out.splitlines()
    assert header.split("\t") == ["q", "k", "m", "l", "n", "value", "factored"]
    assert row.split("\t")[-2:] == ["11", "11"]


def test_count_third_block_offset(capsys):
    code, _ = run(capsys, "count", "--q", "2", "--k", "2", "--s", "1", "--l", "1")
    assert code == EXIT_USAGE
    code, out = run(capsys, "count", "--q", "2", "--k", "2", "--s", "1", "--l", "1", "--allow-extrapolated")
    assert code == EXIT_OK
    assert json.loads(out)["value"] == "412"


def test_table_listing(capsys):
    code, out = run(capsys, "table")
    assert code == EXIT_OK
    ids = [item["id"] for item in json.loads(out)["tables"]]
    assert "count-s3-k5-q3" in ids


def test_table_tsv(capsys):
    code, out = run(capsys, "table", "sss-s2-symbolic", "--k", "6", "--format", "tsv")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0].split("\t") == ["table", "i", "expression", "value"]
    assert lines[-1].split("\t")[-1] == "688128"


def test_table_by_citation_square_blocks(capsys):
    code, out = run(capsys, "table", "thm10.9-s2k6")
    assert code == EXIT_OK
    record = json.loads(out)
    assert record["id"] == "sss-s2-k6"
    assert [entry["value"] for entry in record["entries"]] == [
        "1", "21", "1162", "20160", "258720", "1128960", "688128"
    ]


def test_table_by_citation_fixed_width(capsys):
    code, out = run(capsys, "table", "thm12.11-s3m4k10")
    assert code == EXIT_OK
    record = json.loads(out)
    assert record["id"] == "ssm-s3-m4-k10"
    assert record["shape"] == {"s": 3, "m": 4, "l": 0, "k": 10}
    assert record["entries"][-1]["value"] == str(2 ** 44 - 14273 * 2 ** 23)


def test_table_by_citation_symbolic(capsys):
    code, out = run(capsys, "table", "lemma1.22-m1l3")
    assert code == EXIT_OK
    record = json.loads(out)
    assert record["id"] == "s1-m1-l3-symbolic"
    assert record["entries"][1] == {"i": 1, "expression": "2**k + 17", "value": None}

    code, out = run(capsys, "table", "lemma1.22-m1l3", "--k", "5")
    assert code == EXIT_OK
    assert json.loads(out)["entries"][1]["value"] == "49"


def test_unknown_table(capsys):
    code, _ = run(capsys, "table", "nothing-here")
    assert code == EXIT_USAGE


def test_verify(capsys):
    code, out = run(capsys, "verify", "--suite", "profiles", "--max-bits", "8")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["suite"] == "profiles"
    assert report["passed"] is True


def test_parser_rejects_unknown_method():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["gamma", "--s", "1", "--k", "2", "--method", "guess"])


def test_workers_flag_leaves_settings_alone(capsys):
    before = settings.WORKERS
    code, out = run(capsys, "--workers", "2", "gamma", "--s", "1", "--k", "3", "--method", "brute")
    assert code == EXIT_OK
    assert json.loads(out)["counts"] == ["1", "49", "294", "168"]
    assert settings.WORKERS == before

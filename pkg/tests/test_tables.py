"""Worked-example tables"""

import pytest

from app.core.exceptions import NotFoundError, UnsupportedError
from app.services.table_service import TableService

SQUARE_BLOCKS_K6 = [1, 21, 1162, 20160, 258720, 1128960, 688128]


def test_numeric_table(tables):
    table = tables.get_table("sss-s2-k6")
    assert not table.symbolic
    assert table.values() == SQUARE_BLOCKS_K6
    assert table.values(6) == SQUARE_BLOCKS_K6


def test_symbolic_table_evaluates_at_width(tables):
    table = tables.get_table("sss-s2-symbolic")
    assert table.symbolic
    assert table.values(6) == SQUARE_BLOCKS_K6


def test_width_checks(tables):
    with pytest.raises(UnsupportedError):
        tables.get_table("sss-s2-k6").values(7)
    with pytest.raises(UnsupportedError):
        tables.get_table("sss-s2-symbolic").values()
    with pytest.raises(UnsupportedError):
        tables.get_table("ss1-s3-symbolic").values(10)


def test_unknown_id_lists_known_ids(tables):
    with pytest.raises(NotFoundError) as info:
        tables.get_table("no-such-table")
    assert "sss-s2-k6" in info.value.known
    with pytest.raises(NotFoundError):
        tables.get_count("sss-s2-k6")


def test_listing_covers_tables_and_counts(tables):
    listing = {item["id"]: item["kind"] for item in tables.list_tables()}
    assert listing["sss-s2-k6"] == "numeric"
    assert listing["sss-s2-symbolic"] == "symbolic"
    assert listing["count-s3-k5-q3"] == "count"
    assert set(listing) == set(tables.ids())


def test_record_without_width_keeps_expressions(tables):
    record = tables.record("sss-s1-symbolic")
    assert record["shape"] == {"s": 1, "m": 0, "l": 0}
    assert all(entry["value"] is None for entry in record["entries"])
    assert record["entries"][0]["expression"] == "1"


def test_record_at_width(tables):
    record = tables.record("sss-s2-symbolic", k=6)
    assert record["shape"]["k"] == 6
    assert [entry["value"] for entry in record["entries"]] == [str(value) for value in SQUARE_BLOCKS_K6]


def test_corrected_entries_carry_their_errata(tables):
    record = tables.record("ss1-s3-symbolic", k=11)
    assert [erratum["id"] for erratum in record["errata"]] == ["ss1-s3-example-rank7"]
    rank7 = record["entries"][7]
    assert rank7["value"] == str(96 * 2 ** 22 + 163008 * 2 ** 13 + 15069 * 2 ** 14)


def test_count_record(tables):
    record = tables.record("count-s3-k5-q3")
    assert record["entries"] == [{"q": 3, "value": str(3563904 << 6)}]
    assert [erratum["id"] for erratum in record["errata"]] == ["s3-k5-solution-count-prefactor"]


def test_symbolic_count_record_samples_q(tables):
    record = tables.record("count-s2-k6-symbolic")
    assert [entry["q"] for entry in record["entries"]] == [1, 2, 3, 4, 5, 6]
    assert record["entries"][0]["value"] == "127"


def test_frame_has_table_column(tables):
    frame = TableService.to_frame(tables.record("sss-s2-k6"))
    assert list(frame.columns) == ["table", "i", "expression", "value"]
    assert len(frame) == 7
    assert (frame["table"] == "sss-s2-k6").all()


def test_alternate_ids_resolve_to_tables(tables):
    assert tables.get_table("thm10.9-s2k6") is tables.get_table("sss-s2-k6")
    assert tables.record("lemma1.22-m1l3", k=5)["id"] == "s1-m1-l3-symbolic"
    listing = {item["id"]: item for item in tables.list_tables()}
    assert listing["ssm-s3-m4-k10"]["aliases"] == ["thm12.11-s3m4k10"]
    assert "thm10.9-s2k6" not in tables.ids()


def test_fixed_table_width(tables):
    fixed = tables.get_table("ssm-s3-m4-k10")
    assert fixed.shape["k"] == 10
    assert len(fixed.values()) == 11

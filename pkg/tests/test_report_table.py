import pytest

from sdi_lab.report_table import ReportTable, ReportTableError


class TestReportTable:
    @staticmethod
    def test_init() -> None:
        table = ReportTable({"item": [1, 2], "status": ["PASS"]})
        assert table.max_length == 2
        assert table.min_length == 1
        assert not table.is_normalized()
        assert table.normalize() == {"item": [1, 2], "status": ["PASS", ReportTable.NOT_SET]}
        assert table.is_normalized()

        assert not ReportTable()
        assert not ReportTable({"item": []})
        assert ReportTable({"item": [1]})

        with pytest.raises(ReportTableError):
            ReportTable({"item": "value"})  # type: ignore
        with pytest.raises(ReportTableError):
            ReportTable([1, 2])  # type: ignore

    @staticmethod
    def test_counts() -> None:
        table = ReportTable.from_records(
            [
                {"item": 1, "status": "PASS"},
                {"item": 2, "status": "SKIPPED"},
                {"item": 3, "status": "PASS"},
                {"item": 4},
            ]
        )
        assert table.counts("status") == {"PASS": 2, "SKIPPED": 1, None: 1}
        assert table.count("status", "PASS") == 2
        assert table.count("status", "FAIL") == 0
        assert table.counts("missing") == {}

    @staticmethod
    def test_add_record() -> None:
        table = ReportTable().add_record({"item": 1, "status": "PASS"}, {"item": 2})
        table.add_record({"item": 3, "note": "skipped"})
        assert table["item"] == [1, 2, 3]
        assert table["status"] == ["PASS", ReportTable.NOT_SET, ReportTable.NOT_SET]
        assert table["note"] == [ReportTable.NOT_SET, ReportTable.NOT_SET, "skipped"]
        assert table.get_column("status") == ["PASS", None, None]
        assert table.get_column("missing") == []

        with pytest.raises(ReportTableError):
            table.add_record(["item"])  # type: ignore

    @staticmethod
    def test_get_records() -> None:
        table = ReportTable.from_records([{"item": 1, "status": "PASS"}, {"item": 2}])
        assert table.get_record(1) == {"item": 2, "status": None}
        assert table.as_records() == [
            {"item": 1, "status": "PASS"},
            {"item": 2, "status": None},
        ]
        with pytest.raises(ReportTableError):
            table.get_record(2)
        with pytest.raises(ReportTableError):
            ReportTable({"item": [1, 2], "status": ["PASS"]}).get_record(0)


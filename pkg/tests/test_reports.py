from omv_tools.reports import ReportStatus, VerifyReport


def test_clean_report_succeeds():
    report = VerifyReport(title="t", engine="omv", queries=10)
    report.add_audit("block invariants", True)
    report.finish()
    assert report.get_status() is ReportStatus.SUCCESS
    assert report.error_rate == 0.0
    assert "Audits: 1/1 passed" in report.summary()


def test_exact_mismatch_fails():
    report = VerifyReport(title="t", queries=4)
    report.add_mismatch(2, 1, 0)
    assert report.get_status() is ReportStatus.FAILED
    assert report.error_rate == 0.25


def test_inexact_mismatch_is_only_recorded():
    report = VerifyReport(title="t", engine="wc", exact=False, queries=4)
    report.add_mismatch(0, 1, 0, rows=3)
    assert report.is_success()
    assert report.mismatches == [{"query": 0, "expected": 1, "got": 0, "rows": 3}]


def test_failed_audit_fails_inexact_report():
    report = VerifyReport(title="t", exact=False)
    report.add_audit("no insertable query", False, "block 0")
    assert report.failed_audits() == ["no insertable query"]
    assert not report.is_success()
    assert "no insertable query: block 0" in report.summary()


def test_yaml_round_trip(tmp_path):
    report = VerifyReport(title="verify omv", engine="omv", config={"n": 16}, queries=3)
    report.add_mismatch(1, 2, 3, positions=[4, 5])
    report.add_audit("block invariants", True)
    report.statistics["z"] = 2
    report.finish()
    path = tmp_path / "reports" / "r.yaml"
    text = report.to_yaml(path)
    assert path.read_text(encoding="utf-8") == text
    loaded = VerifyReport.from_yaml(path)
    assert loaded.title == "verify omv"
    assert loaded.mismatches == report.mismatches
    assert loaded.audits == report.audits
    assert loaded.statistics == {"z": 2}
    assert loaded.end_time == report.end_time

import json

from waringlab import verify


def test_full_suite_passes():
    report = verify.run_suite()
    failing = [name for name, sec in report["sections"].items()
               if not sec["pass"]]
    assert report["pass"], f"failing sections: {failing}"
    assert set(report["sections"]) == set(verify.SECTIONS)


def test_report_is_json_serializable():
    report = verify.run_suite(only="mean_value_count")
    doc = json.dumps(report, sort_keys=True, default=float)
    assert "mean_value_count" in doc


def test_single_section_selection():
    report = verify.run_suite(only="curvature_bound")
    assert list(report["sections"]) == ["curvature_bound"]

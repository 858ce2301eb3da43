import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spatialocr.report import EvalReport, SweepEntry, SweepReport, build_report


def check_consistency(report):
    doc = report.to_document()
    conf = np.array(doc["confusion"])
    assert abs(doc["overall_accuracy"] - 100 * np.trace(conf) / conf.sum()) <= 0.01
    for row, entry in zip(conf, doc["per_class"]):
        assert row.sum() == entry["tested"]
    assert doc["total_tested"] == conf.sum()
    assert doc["total_trained"] == sum(e["trained"] for e in doc["per_class"])


class TestEvalReport:
    def test_counts(self):
        r = build_report(("a", "b"), ["a", "a", "b", "b"], ["a", "b", "b", "b"], ["a", "b", "b"])
        assert r.trained == (1, 2) and r.tested == (2, 2)
        assert r.per_class_accuracy == (50.0, 100.0)
        assert r.overall_accuracy == 75.0
        assert r.confusion.tolist() == [[1, 1], [0, 2]]
        check_consistency(r)

    def test_untested_class(self):
        r = build_report(("a", "b", "c"), ["a"], ["a"])
        assert r.per_class_accuracy == (100.0, None, None)
        assert r.mean_class_accuracy == 100.0
        assert "-" in r.to_text()
        assert r.to_document()["per_class"][1]["accuracy"] is None

    def test_text_layout(self):
        r = build_report(("೦", "೧"), ["೦", "೧"], ["೦", "೦"], ["೦", "೧"])
        text = r.to_text()
        assert "Overall recognition accuracy = 50.00" in text
        assert "Number of features = 13" in text
        assert "Confusion matrix" in text
        assert json.loads(r.to_json())["classes"] == ["೦", "೧"]

    @given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=200))
    def test_consistency_property(self, pairs):
        classes = tuple("abcde")
        true = [classes[t] for t, _ in pairs]
        pred = [classes[p] for _, p in pairs]
        check_consistency(build_report(classes, true, pred, true))

    def test_empty_report(self):
        r = EvalReport(("a",), (0,), np.zeros((1, 1), int))
        assert r.overall_accuracy == 0.0


class TestSweepReport:
    def test_best_and_tie(self):
        r = SweepReport((SweepEntry(0.3, 80.0), SweepEntry(0.5, 90.0), SweepEntry(0.7, 90.0), SweepEntry(0.8, None, "x")))
        assert r.best_fraction == 0.5
        assert "failed: x" in r.to_text()
        assert r.to_plot_data().splitlines() == ["fraction\taccuracy", "0.30\t80.00", "0.50\t90.00", "0.70\t90.00"]

    def test_all_failed(self):
        r = SweepReport((SweepEntry(0.3, None, "boom"),))
        assert r.best_fraction is None
        assert "none" in r.to_text()
        assert json.loads(r.to_json())["best_fraction"] is None

    def test_rounding(self):
        doc = SweepReport((SweepEntry(0.4, 100 * 2 / 3),)).to_document()
        assert doc["entries"][0]["accuracy"] == pytest.approx(66.67)

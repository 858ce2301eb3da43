import json

import numpy as np
import pytest

from spatialocr.classifiers import KernelParams, knn_classify, predict, train_knn, train_multiclass
from spatialocr.errors import ModelFormatError, VersionMismatchError
from spatialocr.modelio import FORMAT_VERSION, dumps_model, load_model, loads_model, save_model


@pytest.fixture(scope="module")
def data():
    rng = np.random.default_rng(11)
    x = np.vstack([rng.normal(c, 0.6, (8, 13)) for c in range(4)])
    labels = [lbl for lbl in "wxyz" for _ in range(8)]
    return x, labels, rng.normal(1.5, 1.5, (40, 13))


@pytest.fixture(scope="module")
def svm(data):
    x, labels, _ = data
    return train_multiclass(x, labels, C=10, kernel=KernelParams("rbf", 0.6))


class TestRoundTrip:
    def test_svm_predictions_and_decisions(self, svm, data, tmp_path):
        _, _, queries = data
        path = str(tmp_path / "m.json")
        save_model(path, svm)
        back = load_model(path)
        assert back.classes == svm.classes and len(back.pairs) == 6
        for q in queries:
            assert predict(back, q) == predict(svm, q)
            xq = svm.normalization.apply(q)
            for (_, _, a), (_, _, b) in zip(svm.pairs, back.pairs):
                assert a.decision(xq) == b.decision(xq)
        assert dumps_model(back) == dumps_model(svm)

    def test_knn(self, data):
        x, labels, queries = data
        m = train_knn(x, labels, k=3)
        back = loads_model(dumps_model(m))
        assert [knn_classify(back, q) for q in queries] == [knn_classify(m, q) for q in queries]
        np.testing.assert_array_equal(back.vectors, m.vectors)

    def test_floats_are_exact(self, svm):
        doc = json.loads(dumps_model(svm))
        back = loads_model(dumps_model(svm))
        assert doc["normalization"]["min"] == list(back.normalization.minimum)
        for (_, _, a), (_, _, b) in zip(svm.pairs, back.pairs):
            np.testing.assert_array_equal(a.alphas, b.alphas)
            np.testing.assert_array_equal(a.support_vectors, b.support_vectors)
            assert a.bias == b.bias


class TestCorruption:
    def test_truncated(self, svm):
        text = dumps_model(svm).encode()
        with pytest.raises(ModelFormatError) as info:
            loads_model(text[: len(text) // 2])
        assert info.value.offset is not None and 0 < info.value.offset <= len(text) // 2
        assert "byte offset" in str(info.value)

    def test_not_utf8(self):
        with pytest.raises(ModelFormatError):
            loads_model(b"\xff\xfe{}")

    def test_version_bump(self, svm):
        doc = json.loads(dumps_model(svm))
        doc["version"] = FORMAT_VERSION + 1
        with pytest.raises(VersionMismatchError):
            loads_model(json.dumps(doc))

    @pytest.mark.parametrize("mutate", [
        lambda d: d.pop("classes"),
        lambda d: d.__setitem__("format", "other"),
        lambda d: d["pairs"].pop(),
        lambda d: d["pairs"][0].__setitem__("alphas", ["x"]),
        lambda d: d["pairs"][0].__setitem__("signs", []),
        lambda d: d["kernel"].__setitem__("sigma", -1),
        lambda d: d.__setitem__("classifier", "tree"),
    ])
    def test_structural_errors(self, svm, mutate):
        doc = json.loads(dumps_model(svm))
        mutate(doc)
        with pytest.raises(ModelFormatError):
            loads_model(json.dumps(doc))

    def test_missing_file_is_os_error(self, tmp_path):
        with pytest.raises(OSError):
            load_model(str(tmp_path / "absent.json"))

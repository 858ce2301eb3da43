"""Model persistence as a versioned JSON document.

Floats are written with 17 significant digits so a parsed model
reproduces every decision value bit for bit.
"""

import json

import numpy as np

from .classifiers import BinarySvmModel, KernelParams, KnnModel, MulticlassSvmModel
from .errors import ModelFormatError, VersionMismatchError
from .features import NormalizationStats
from .fsutil import atomic_write

FORMAT_NAME = "spatialocr-model"
FORMAT_VERSION = 1


def _num(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _emit(obj, level=0):
    pad = " " * level
    inner = " " * (level + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(k, ensure_ascii=False)}: {_emit(v, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(_emit(v, level + 1) for v in seq) + "]"
        return "[\n" + ",\n".join(inner + _emit(v, level + 1) for v in seq) + "\n" + pad + "]"
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    return _num(obj)


def _kernel_doc(k):
    return {"kind": k.kind, "sigma": float(k.sigma)}


def _norm_doc(s):
    return {"min": list(s.minimum), "max": list(s.maximum)}


def model_to_document(model):
    doc = {"format": FORMAT_NAME, "version": FORMAT_VERSION}
    if isinstance(model, MulticlassSvmModel):
        doc.update(
            classifier="svm",
            classes=list(model.classes),
            se_fraction=float(model.se_fraction),
            op_order=model.op_order,
            normalization=_norm_doc(model.normalization),
            kernel=_kernel_doc(model.kernel),
            C=float(model.C),
            pairs=[
                {
                    "positive": model.classes[i],
                    "negative": model.classes[j],
                    "bias": float(m.bias),
                    "converged": bool(m.converged),
                    "alphas": [float(a) for a in m.alphas],
                    "signs": [int(s) for s in m.signs],
                    "support_vectors": [[float(v) for v in row] for row in m.support_vectors],
                }
                for i, j, m in model.pairs
            ],
        )
    elif isinstance(model, KnnModel):
        doc.update(
            classifier="knn",
            classes=list(model.classes),
            se_fraction=float(model.se_fraction),
            op_order=model.op_order,
            normalization=_norm_doc(model.normalization),
            k=int(model.k),
            labels=list(model.labels),
            vectors=[[float(v) for v in row] for row in model.vectors],
        )
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    return doc


def dumps_model(model):
    return _emit(model_to_document(model)) + "\n"


def _field(doc, key, kind=None):
    if not isinstance(doc, dict) or key not in doc:
        raise ModelFormatError(f"missing field {key!r}")
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        raise ModelFormatError(f"field {key!r} has the wrong type")
    return value


def _floats(values, key):
    try:
        arr = np.array(values, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ModelFormatError(f"field {key!r} is not numeric") from exc
    if not np.all(np.isfinite(arr)):
        raise ModelFormatError(f"field {key!r} holds non-finite values")
    return arr


def _normalization(doc):
    norm = _field(doc, "normalization", dict)
    lo = _floats(_field(norm, "min", list), "min")
    hi = _floats(_field(norm, "max", list), "max")
    if lo.shape != hi.shape:
        raise ModelFormatError("normalization min/max lengths differ")
    return NormalizationStats(tuple(float(v) for v in lo), tuple(float(v) for v in hi))


def document_to_model(doc):
    if _field(doc, "format", str) != FORMAT_NAME:
        raise ModelFormatError(f"not a {FORMAT_NAME} document")
    version = _field(doc, "version")
    if version != FORMAT_VERSION:
        raise VersionMismatchError(f"model format version {version!r} is not supported (expected {FORMAT_VERSION})")
    classes = tuple(_field(doc, "classes", list))
    fraction = float(_field(doc, "se_fraction", (int, float)))
    op_order = _field(doc, "op_order", str)
    stats = _normalization(doc)
    kind = _field(doc, "classifier", str)
    if kind == "knn":
        vectors = _floats(_field(doc, "vectors", list), "vectors")
        labels = tuple(_field(doc, "labels", list))
        if vectors.ndim != 2 or len(labels) != vectors.shape[0]:
            raise ModelFormatError("k-NN vectors and labels disagree")
        return KnnModel(vectors, labels, int(_field(doc, "k", int)), stats, classes, fraction, op_order)
    if kind != "svm":
        raise ModelFormatError(f"unknown classifier {kind!r}")
    kdoc = _field(doc, "kernel", dict)
    try:
        kernel = KernelParams(_field(kdoc, "kind", str), float(_field(kdoc, "sigma", (int, float))))
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from exc
    C = float(_field(doc, "C", (int, float)))
    index = {c: n for n, c in enumerate(classes)}
    pairs = []
    for p in _field(doc, "pairs", list):
        pos, neg = _field(p, "positive", str), _field(p, "negative", str)
        if pos not in index or neg not in index:
            raise ModelFormatError(f"pair ({pos}, {neg}) names an undeclared class")
        alphas = _floats(_field(p, "alphas", list), "alphas")
        signs = np.array(_field(p, "signs", list), dtype=int)
        sv = _floats(_field(p, "support_vectors", list), "support_vectors")
        if len(alphas) == 0:
            sv = np.empty((0, len(stats.minimum)))
        if sv.ndim != 2 or sv.shape[0] != len(alphas):
            raise ModelFormatError("support vectors and alphas disagree")
        if len(signs) != len(alphas):
            raise ModelFormatError("alphas and signs lengths differ")
        model = BinarySvmModel(sv, alphas, signs, float(_field(p, "bias", (int, float))), C, kernel,
                               bool(_field(p, "converged", bool)))
        pairs.append((index[pos], index[neg], model))
    k = len(classes)
    if len(pairs) != k * (k - 1) // 2:
        raise ModelFormatError(f"expected {k * (k - 1) // 2} pairwise models, found {len(pairs)}")
    return MulticlassSvmModel(classes, tuple(pairs), stats, fraction, op_order, kernel, C)


def loads_model(data):
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ModelFormatError("model file is not UTF-8", exc.start) from exc
    else:
        text = data
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        offset = len(text[: exc.pos].encode("utf-8"))
        raise ModelFormatError(f"malformed model document: {exc.msg}", offset) from exc
    return document_to_model(doc)


def save_model(path, model):
    atomic_write(path, dumps_model(model))


def load_model(path):
    with open(path, "rb") as fh:
        return loads_model(fh.read())

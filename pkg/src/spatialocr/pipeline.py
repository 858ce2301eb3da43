"""End-to-end experiment plumbing shared by the CLI and the test-suite."""

import logging
from dataclasses import dataclass

from .classifiers import (
    DEFAULT_C, DEFAULT_SIGMA, KernelParams, KnnModel, knn_classify, predict, train_knn, train_multiclass,
)
from .corpus import SplitSpec, split
from .errors import InvalidParameterError, SpatialOcrError
from .features import FEATURE_NAMES, extract_features
from .report import SweepEntry, SweepReport, build_report

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClassifierConfig:
    kind: str = "svm"
    C: float = DEFAULT_C
    sigma: float = DEFAULT_SIGMA
    k: int = 3

    def __post_init__(self):
        if self.kind not in ("svm", "knn"):
            raise InvalidParameterError(f"classifier must be 'svm' or 'knn', got {self.kind!r}")
        if not self.C > 0:
            raise InvalidParameterError(f"C must be > 0, got {self.C}")
        if not self.sigma > 0:
            raise InvalidParameterError(f"sigma must be > 0, got {self.sigma}")
        if self.k < 1:
            raise InvalidParameterError(f"k must be >= 1, got {self.k}")


def featurize(samples, fraction=0.7, op_order="opening"):
    return [extract_features(s.image, fraction, op_order) for s in samples]


def fit(train, classes, fraction=0.7, op_order="opening", config=ClassifierConfig(), seed=0, vectors=None):
    """Train the configured classifier on ``train`` samples."""
    vectors = featurize(train, fraction, op_order) if vectors is None else vectors
    labels = [s.label for s in train]
    if config.kind == "knn":
        return train_knn(vectors, labels, config.k, classes, fraction, op_order)
    return train_multiclass(vectors, labels, config.C, KernelParams("rbf", config.sigma), seed, classes,
                            se_fraction=fraction, op_order=op_order)


def classify(model, vector):
    if isinstance(model, KnnModel):
        return knn_classify(model, vector)
    return predict(model, vector)


def model_config(model, seed=None):
    cfg = {"se_fraction": model.se_fraction, "op_order": model.op_order}
    if isinstance(model, KnnModel):
        cfg.update(classifier="knn", k=model.k)
    else:
        cfg.update(classifier="svm", sigma=model.kernel.sigma, C=model.C)
    if seed is not None:
        cfg["seed"] = seed
    cfg["features"] = len(FEATURE_NAMES)
    return cfg


def evaluate(model, samples, trained_labels=(), seed=None, vectors=None):
    vectors = featurize(samples, model.se_fraction, model.op_order) if vectors is None else vectors
    predicted = [classify(model, v) for v in vectors]
    return build_report(model.classes, [s.label for s in samples], predicted, trained_labels,
                        model_config(model, seed))


def run_experiment(samples, classes, fraction=0.7, op_order="opening", config=ClassifierConfig(),
                   split_spec=SplitSpec(), splits=None):
    """Split, train on one half and evaluate on the other.

    Returns ``(model, report)``. ``splits`` may supply a precomputed
    ``(train, test)`` pair so several runs share one split.
    """
    train, test = splits if splits is not None else split(samples, split_spec)
    model = fit(train, classes, fraction, op_order, config, split_spec.seed)
    report = evaluate(model, test, [s.label for s in train], split_spec.seed)
    report.config["split_fraction"] = split_spec.fraction
    return model, report


def sweep(samples, classes, fractions, op_order="opening", config=ClassifierConfig(), split_spec=SplitSpec()):
    """Train/evaluate once per SE fraction on a single shared split."""
    if not fractions:
        raise InvalidParameterError("no SE fractions given")
    splits = split(samples, split_spec)
    entries = []
    for f in fractions:
        try:
            _, report = run_experiment(samples, classes, f, op_order, config, split_spec, splits)
            entries.append(SweepEntry(float(f), report.overall_accuracy))
        except SpatialOcrError as exc:
            log.warning("SE fraction %s failed: %s", f, exc)
            entries.append(SweepEntry(float(f), None, str(exc)))
    cfg = {"classifier": config.kind, "seed": split_spec.seed, "split_fraction": split_spec.fraction,
           "op_order": op_order}
    cfg.update({"sigma": config.sigma, "C": config.C} if config.kind == "svm" else {"k": config.k})
    return SweepReport(tuple(entries), cfg)

"""Command-line harness: ``features``, ``train``, ``eval``, ``sweep`` and ``augment``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 training failure.
"""

import argparse
import logging
import sys

from . import __version__
from .corpus import SplitSpec, augment_manifest, load_corpus
from .errors import (
    CorpusError, EmptyGlyphError, InvalidParameterError, ModelFormatError, PnmFormatError, TrainingError,
)
from .features import features_csv
from .fsutil import atomic_write
from .modelio import load_model, save_model
from .morphology import SWEEP_FRACTIONS
from .pipeline import ClassifierConfig, evaluate, featurize, run_experiment, sweep

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_TRAINING = 0, 1, 2, 3

log = logging.getLogger("spatialocr")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fraction_list(text):
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad fraction list {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("empty fraction list")
    return values


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from exc


def _add_corpus_args(p):
    p.add_argument("--manifest", required=True, help="corpus manifest (JSON)")
    p.add_argument("--styles", default=None, help="comma-separated style tags to keep")
    p.add_argument("--lenient", action="store_true", help="skip unreadable samples instead of failing")


def _add_feature_args(p):
    p.add_argument("--se-fraction", type=float, default=0.7, help="SE length as a fraction of glyph height")
    p.add_argument("--op-order", choices=("opening", "closing"), default="opening")


def _add_classifier_args(p):
    p.add_argument("--classifier", choices=("svm", "knn"), default="svm")
    p.add_argument("--sigma", type=float, default=0.6, help="RBF kernel width")
    p.add_argument("--C", dest="C", type=float, default=10.0, help="SVM box constraint")
    p.add_argument("--k", type=int, default=3, help="neighbors for k-NN")
    p.add_argument("--seed", type=int, default=0, help="split and trainer seed")
    p.add_argument("--split-fraction", type=float, default=0.5, help="training share of each class")


def build_parser():
    parser = _Parser(prog="spatialocr", description="Printed glyph recognition from spatial stroke features.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("features", help="write the feature table of a corpus as CSV")
    _add_corpus_args(p)
    _add_feature_args(p)
    p.add_argument("--out", default="-", help="CSV path, '-' for stdout")

    p = sub.add_parser("train", help="train on one split half, evaluate on the other")
    _add_corpus_args(p)
    _add_feature_args(p)
    _add_classifier_args(p)
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--report", default=None, help="report JSON (default: <out>.report.json)")

    p = sub.add_parser("eval", help="evaluate a saved model on a corpus")
    _add_corpus_args(p)
    p.add_argument("--model", required=True)
    p.add_argument("--out", default=None, help="report JSON path")

    p = sub.add_parser("sweep", help="accuracy as a function of SE length")
    _add_corpus_args(p)
    p.add_argument("--op-order", choices=("opening", "closing"), default="opening")
    _add_classifier_args(p)
    p.add_argument("--fractions", type=_fraction_list, default=list(SWEEP_FRACTIONS))
    p.add_argument("--out", default=None, help="sweep report JSON path")
    p.add_argument("--plot-data", default=None, help="two-column TSV (fraction, accuracy)")

    p = sub.add_parser("augment", help="write size/noise variants of a corpus")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--sizes", type=_int_list, default=[16, 20, 24, 28, 32, 36, 40, 44, 50])
    p.add_argument("--noise-copies", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _load(args):
    manifest, samples = load_corpus(args.manifest, lenient=args.lenient, return_manifest=True)
    if args.styles:
        keep = {s.strip() for s in args.styles.split(",")}
        samples = [s for s in samples if s.style in keep]
        if not samples:
            raise CorpusError("empty corpus after style filter")
    return manifest.classes, samples


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        atomic_write(path, text)


def _classifier_config(args):
    try:
        return ClassifierConfig(args.classifier, args.C, args.sigma, args.k)
    except InvalidParameterError as exc:
        raise UsageError(str(exc)) from exc


def _check_fraction(value, name, upper_inclusive):
    ok = 0 < value <= 1 if upper_inclusive else 0 < value < 1
    if not ok:
        raise UsageError(f"{name} out of range: {value}")


def cmd_features(args):
    _check_fraction(args.se_fraction, "--se-fraction", True)
    _, samples = _load(args)
    vectors = featurize(samples, args.se_fraction, args.op_order)
    _write(args.out, features_csv(samples, vectors))
    return EXIT_OK


def cmd_train(args):
    _check_fraction(args.se_fraction, "--se-fraction", True)
    _check_fraction(args.split_fraction, "--split-fraction", False)
    config = _classifier_config(args)
    classes, samples = _load(args)
    spec = SplitSpec(args.split_fraction, args.seed)
    model, report = run_experiment(samples, classes, args.se_fraction, args.op_order, config, spec)
    if not getattr(model, "converged", True):
        log.warning("some pairwise SVMs hit the update cap before converging")
    save_model(args.out, model)
    _write(args.report or f"{args.out}.report.json", report.to_json())
    sys.stdout.write(report.to_text())
    return EXIT_OK


def cmd_eval(args):
    model = load_model(args.model)
    classes, samples = _load(args)
    known = set(model.classes)
    for c in classes:
        if c not in known:
            raise CorpusError(f"class {c!r} is unknown to the model")
    report = evaluate(model, samples)
    if args.out:
        _write(args.out, report.to_json())
    sys.stdout.write(report.to_text())
    return EXIT_OK


def cmd_sweep(args):
    for f in args.fractions:
        _check_fraction(f, "SE fraction", True)
    _check_fraction(args.split_fraction, "--split-fraction", False)
    config = _classifier_config(args)
    classes, samples = _load(args)
    result = sweep(samples, classes, args.fractions, args.op_order, config, SplitSpec(args.split_fraction, args.seed))
    if args.out:
        _write(args.out, result.to_json())
    if args.plot_data:
        _write(args.plot_data, result.to_plot_data())
    sys.stdout.write(result.to_text())
    return EXIT_OK


def cmd_augment(args):
    path = augment_manifest(args.manifest, args.out, args.sizes, args.noise_copies, args.seed)
    print(path)
    return EXIT_OK


COMMANDS = {"features": cmd_features, "train": cmd_train, "eval": cmd_eval, "sweep": cmd_sweep, "augment": cmd_augment}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors, --help and --version
        return exc.code
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"spatialocr: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TrainingError as exc:
        print(f"spatialocr: training failed: {exc}", file=sys.stderr)
        return EXIT_TRAINING
    except CorpusError as exc:
        print(f"spatialocr: {exc}", file=sys.stderr)
        for problem in exc.problems:
            print(f"  {problem}", file=sys.stderr)
        return EXIT_DATA
    except (ModelFormatError, PnmFormatError, EmptyGlyphError, InvalidParameterError, OSError) as exc:
        print(f"spatialocr: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

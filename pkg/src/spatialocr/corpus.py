"""Labeled glyph corpora: manifests, loading, splitting and augmentation.

A manifest is a JSON document::

    {"version": 1,
     "classes": ["೦", "೧", ...],
     "samples": [{"path": "seeds/d0_noto400.pgm", "label": "೦",
                  "style": "noto-400", "size_pt": 16, "sha256": "..."}]}

Paths are relative to the manifest's directory; images are P4 or P5.
"""

import hashlib
import json
import logging
import math
import os
from dataclasses import dataclass
from decimal import Decimal

import numpy as np

from . import pnm
from .errors import CorpusError, EmptyGlyphError, InvalidParameterError, PnmFormatError
from .fsutil import atomic_write
from .imaging import BinaryImage, GrayImage, binarize, crop_to_glyph, median_filter, otsu_threshold, preprocess

log = logging.getLogger(__name__)

MANIFEST_VERSION = 1
BASELINE_PT = 16
BASELINE_PX = 24
NOISE_RATE = 0.01

NUMERALS = ("೦", "೧", "೨", "೩", "೪", "೫", "೬", "೭", "೮", "೯")
# fourteen distinct vowel labels; ಏ is included so that no label repeats
VOWELS = ("ಅ", "ಆ", "ಇ", "ಈ", "ಉ", "ಊ", "ಋ", "ೠ", "ಎ", "ಏ", "ಐ", "ಒ", "ಓ", "ಔ")


@dataclass(frozen=True, eq=False)
class Sample:
    image: BinaryImage
    label: str
    style: str
    size_pt: float
    id: str


@dataclass(frozen=True)
class SampleRecord:
    path: str
    label: str
    style: str
    size_pt: float
    sha256: str = ""
    id: str = ""


@dataclass(frozen=True)
class CorpusManifest:
    classes: tuple
    samples: tuple
    root: str = "."
    version: int = MANIFEST_VERSION


@dataclass(frozen=True)
class SplitSpec:
    fraction: float = 0.5
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        if not 0 < self.fraction < 1:
            raise InvalidParameterError(f"split fraction must be in (0, 1), got {self.fraction}")


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def read_manifest(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise CorpusError(f"cannot read manifest {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CorpusError(f"manifest {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise CorpusError(f"manifest {path} must be a JSON object")
    if doc.get("version") != MANIFEST_VERSION:
        raise CorpusError(f"unsupported manifest version {doc.get('version')!r}")
    classes = tuple(doc.get("classes") or ())
    if len(set(classes)) != len(classes):
        raise CorpusError("manifest class names must be unique")
    records = []
    for i, rec in enumerate(doc.get("samples") or ()):
        try:
            records.append(
                SampleRecord(
                    path=str(rec["path"]),
                    label=str(rec["label"]),
                    style=str(rec.get("style", "")),
                    size_pt=float(rec.get("size_pt", BASELINE_PT)),
                    sha256=str(rec.get("sha256", "")),
                    id=str(rec.get("id", "")),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CorpusError(f"sample #{i} in {path} is malformed: {exc!r}") from exc
    return CorpusManifest(classes, tuple(records), os.path.dirname(os.path.abspath(path)))


def write_manifest(path, classes, records):
    """Write a manifest, filling in checksums for records that lack one."""
    root = os.path.dirname(os.path.abspath(path))
    samples = []
    for rec in records:
        digest = rec.sha256 or sha256_file(os.path.join(root, rec.path))
        entry = {"path": rec.path, "label": rec.label, "style": rec.style, "size_pt": rec.size_pt, "sha256": digest}
        if rec.id:
            entry["id"] = rec.id
        samples.append(entry)
    doc = {"version": MANIFEST_VERSION, "classes": list(classes), "samples": samples}
    atomic_write(path, json.dumps(doc, ensure_ascii=False, indent=1) + "\n")


def load_glyph(path, window=3):
    """Read a PNM glyph and return its preprocessed, cropped binary raster."""
    img = pnm.read(path)
    if isinstance(img, GrayImage):
        return preprocess(img, window)
    return crop_to_glyph(img)


def _load_record(manifest, rec, known, window):
    if rec.label not in known:
        raise CorpusError(f"label {rec.label!r} is not a declared class")
    full = os.path.join(manifest.root, rec.path)
    if not os.path.exists(full):
        raise CorpusError("missing file")
    if rec.sha256 and sha256_file(full) != rec.sha256:
        raise CorpusError("checksum mismatch")
    image = load_glyph(full, window)
    sample_id = rec.id or os.path.splitext(rec.path)[0]
    return Sample(image, rec.label, rec.style, rec.size_pt, sample_id)


def load_corpus(manifest_path, lenient=False, window=3, return_manifest=False):
    """Load every sample of a manifest, in manifest order.

    Failing samples are collected; in strict mode any failure raises a
    ``CorpusError`` listing all of them, otherwise they are skipped with a
    warning.
    """
    manifest = read_manifest(manifest_path)
    known = set(manifest.classes)
    samples, problems = [], []
    for rec in manifest.samples:
        try:
            samples.append(_load_record(manifest, rec, known, window))
        except (CorpusError, PnmFormatError, EmptyGlyphError, OSError) as exc:
            problems.append(f"{rec.path}: {exc}")
    if problems:
        if not lenient:
            raise CorpusError(f"{len(problems)} sample(s) failed to load", problems)
        for p in problems:
            log.warning("skipping %s", p)
    if not samples:
        raise CorpusError("empty corpus", problems)
    ids = [s.id for s in samples]
    if len(set(ids)) != len(ids):
        raise CorpusError("sample ids are not unique")
    return (manifest, samples) if return_manifest else samples


def _ceil_fraction(fraction, n):
    return math.ceil(Decimal(repr(float(fraction))) * n)


def split(samples, spec=SplitSpec()):
    """Deterministic train/test split; odd remainders go to training.

    Both halves keep the input order.
    """
    samples = list(samples)
    rng = np.random.default_rng(spec.seed)
    train_idx = []
    if spec.stratified:
        by_class = {}
        for i, s in enumerate(samples):
            by_class.setdefault(s.label, []).append(i)
        for label, idx in by_class.items():
            if len(idx) < 2:
                raise CorpusError(f"class {label!r} has a single sample; cannot stratify")
            order = rng.permutation(len(idx))
            k = _ceil_fraction(spec.fraction, len(idx))
            train_idx.extend(idx[j] for j in order[:k])
    else:
        order = rng.permutation(len(samples))
        train_idx = order[:_ceil_fraction(spec.fraction, len(samples))].tolist()
    chosen = set(int(i) for i in train_idx)
    train = [s for i, s in enumerate(samples) if i in chosen]
    test = [s for i, s in enumerate(samples) if i not in chosen]
    return train, test


def resize_nearest(img, height, width):
    h, w = img.height, img.width
    rows = np.minimum((np.arange(height) * 2 + 1) * h // (2 * height), h - 1)
    cols = np.minimum((np.arange(width) * 2 + 1) * w // (2 * width), w - 1)
    return BinaryImage(img.bits[np.ix_(rows, cols)])


def _add_noise(img, rng, margin=2):
    canvas = np.pad(img.bits, margin)
    gray = np.where(canvas, 0, 255).astype(np.uint8)
    hit = rng.random(gray.shape) < NOISE_RATE
    gray[hit] = np.where(rng.random(int(hit.sum())) < 0.5, 0, 255)
    smoothed = median_filter(GrayImage(gray), 3)
    return binarize(smoothed, otsu_threshold(smoothed))


def synth_variants(seed_glyph, sizes, noise=False, rng_seed=0):
    """Size (and optionally noise) variants of one glyph.

    A glyph of nominal size ``s`` is rescaled by ``size / s`` with
    nearest-neighbor sampling. With ``noise`` set, 1% of pixels are flipped
    to salt or pepper and the result is median filtered before re-cropping.
    """
    if not seed_glyph.image.bits.any():
        raise EmptyGlyphError(f"seed glyph {seed_glyph.id} is empty")
    out = []
    for k, size in enumerate(sizes):
        if not 8 <= size <= 100:
            raise InvalidParameterError(f"point size must lie in [8, 100], got {size}")
        scale = size / seed_glyph.size_pt
        src = seed_glyph.image
        h = max(1, int(math.floor(src.height * scale + 0.5)))
        w = max(1, int(math.floor(src.width * scale + 0.5)))
        img = resize_nearest(src, h, w)
        suffix = f"@{size:g}pt"
        if noise:
            img = _add_noise(img, np.random.default_rng([rng_seed, k]))
            suffix += f"+n{rng_seed}"
        if not img.bits.any():
            log.warning("variant %s%s of %s is empty; skipped", seed_glyph.id, suffix, seed_glyph.label)
            continue
        out.append(Sample(crop_to_glyph(img), seed_glyph.label, seed_glyph.style, float(size), seed_glyph.id + suffix))
    return out


def augment_manifest(manifest_path, out_dir, sizes, noise_copies=0, rng_seed=0, window=3):
    """Write size/noise variants of every sample as P4 files plus a manifest.

    Each seed yields one clean variant per size and ``noise_copies`` noisy
    ones. Returns the path of the new manifest.
    """
    manifest, seeds = load_corpus(manifest_path, window=window, return_manifest=True)
    os.makedirs(out_dir, exist_ok=True)
    records = []
    for i, seed in enumerate(seeds):
        variants = synth_variants(seed, sizes)
        for c in range(noise_copies):
            variants += synth_variants(seed, sizes, noise=True, rng_seed=rng_seed * 1_000_003 + i * 101 + c)
        for v in variants:
            name = v.id.replace("/", "_").replace("@", "_").replace("+", "_") + ".pbm"
            pnm.write(os.path.join(out_dir, name), v.image)
            records.append(SampleRecord(name, v.label, v.style, v.size_pt, id=v.id))
    out = os.path.join(out_dir, "manifest.json")
    write_manifest(out, manifest.classes, records)
    return out

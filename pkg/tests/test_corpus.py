import json
import math
import os
import shutil

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import NUMERALS
from spatialocr import pnm
from spatialocr.corpus import (
    NUMERALS as NUMERAL_CLASSES, Sample, SampleRecord, SplitSpec, augment_manifest, load_corpus, read_manifest,
    resize_nearest, split, synth_variants, write_manifest,
)
from spatialocr.errors import CorpusError, InvalidParameterError
from spatialocr.imaging import BinaryImage


def fake_samples(counts):
    img = BinaryImage(np.ones((2, 2), bool))
    out = []
    for label, n in counts.items():
        out += [Sample(img, label, "s", 16.0, f"{label}{i}") for i in range(n)]
    return out


def one_glyph_manifest(tmp_path, bits, label="a"):
    pnm.write(str(tmp_path / "g.pbm"), BinaryImage(bits))
    path = str(tmp_path / "manifest.json")
    write_manifest(path, [label], [SampleRecord("g.pbm", label, "plain", 16)])
    return path


class TestLoading:
    def test_empty_manifest(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps({"version": 1, "classes": ["a"], "samples": []}))
        with pytest.raises(CorpusError, match="empty corpus"):
            load_corpus(str(path))

    def test_single_p4_glyph(self, tmp_path):
        bits = np.zeros((6, 5), bool)
        bits[1:4, 2] = True
        samples = load_corpus(one_glyph_manifest(tmp_path, bits))
        assert len(samples) == 1
        assert samples[0].label == "a"
        assert samples[0].image.bits.tolist() == [[True]] * 3

    def test_fixture_corpus_is_stable(self):
        first = load_corpus(NUMERALS)
        second = load_corpus(NUMERALS)
        assert len(first) >= 40
        assert [s.id for s in first] == [s.id for s in second]
        assert all(a.image == b.image for a, b in zip(first, second))
        assert len({s.id for s in first}) == len(first)
        assert {s.label for s in first} == set(NUMERAL_CLASSES)
        assert len({s.style for s in first}) >= 3

    def test_checksum_mismatch_and_lenient(self, tmp_path):
        bits = np.ones((3, 3), bool)
        path = one_glyph_manifest(tmp_path, bits)
        pnm.write(str(tmp_path / "h.pbm"), BinaryImage(bits))
        doc = json.loads(open(path, encoding="utf-8").read())
        doc["samples"].append(dict(doc["samples"][0], path="h.pbm", sha256="0" * 64))
        doc["samples"].append(dict(doc["samples"][0], path="missing.pbm"))
        open(path, "w", encoding="utf-8").write(json.dumps(doc))
        with pytest.raises(CorpusError) as info:
            load_corpus(path)
        assert len(info.value.problems) == 2
        assert any("checksum mismatch" in p for p in info.value.problems)
        assert any("missing file" in p for p in info.value.problems)
        assert len(load_corpus(path, lenient=True)) == 1

    def test_unknown_label(self, tmp_path):
        path = one_glyph_manifest(tmp_path, np.ones((2, 2), bool))
        doc = json.loads(open(path, encoding="utf-8").read())
        doc["classes"] = ["b"]
        open(path, "w", encoding="utf-8").write(json.dumps(doc))
        with pytest.raises(CorpusError):
            load_corpus(path)

    def test_bad_version(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps({"version": 9, "classes": [], "samples": []}))
        with pytest.raises(CorpusError, match="version"):
            read_manifest(str(path))

    def test_blank_image_is_reported(self, tmp_path):
        path = one_glyph_manifest(tmp_path, np.zeros((3, 3), bool))
        with pytest.raises(CorpusError):
            load_corpus(path)


class TestSplit:
    def test_hundred_ten_per_class(self):
        samples = fake_samples({str(c): 110 for c in range(10)})
        train, test = split(samples, SplitSpec(0.5, seed=1))
        for c in range(10):
            assert sum(s.label == str(c) for s in train) == 55
            assert sum(s.label == str(c) for s in test) == 55

    def test_pair(self):
        train, test = split(fake_samples({"a": 2}))
        assert len(train) == len(test) == 1

    def test_odd_goes_to_training(self):
        train, test = split(fake_samples({"a": 5}))
        assert (len(train), len(test)) == (3, 2)

    def test_singleton_class(self):
        with pytest.raises(CorpusError):
            split(fake_samples({"a": 3, "b": 1}))

    def test_bad_fraction(self):
        with pytest.raises(InvalidParameterError):
            SplitSpec(1.0)

    def test_seeds(self):
        samples = fake_samples({"a": 20, "b": 15})
        a1, _ = split(samples, SplitSpec(seed=4))
        a2, _ = split(samples, SplitSpec(seed=4))
        b, _ = split(samples, SplitSpec(seed=5))
        assert [s.id for s in a1] == [s.id for s in a2]
        assert [s.id for s in a1] != [s.id for s in b]
        assert sorted(s.label for s in a1) == sorted(s.label for s in b)

    @settings(deadline=None)
    @given(st.dictionaries(st.sampled_from("abcdef"), st.integers(2, 30), min_size=1),
           st.sampled_from([0.1, 0.25, 0.3, 0.5, 0.7, 0.9]), st.integers(0, 1000), st.booleans())
    def test_disjoint_cover_and_ceil(self, counts, fraction, seed, stratified):
        samples = fake_samples(counts)
        train, test = split(samples, SplitSpec(fraction, seed, stratified))
        ids = [s.id for s in train] + [s.id for s in test]
        assert sorted(ids) == sorted(s.id for s in samples)
        assert len(set(ids)) == len(ids)
        if stratified:
            for label, n in counts.items():
                assert sum(s.label == label for s in train) == math.ceil(round(fraction * n, 9))
        # both halves keep the input order
        order = {s.id: i for i, s in enumerate(samples)}
        assert [order[s.id] for s in train] == sorted(order[s.id] for s in train)


@pytest.fixture(scope="module")
def seed_glyph():
    return load_corpus(NUMERALS)[0]


class TestSynth:
    def test_identity_at_baseline(self, seed_glyph):
        (out,) = synth_variants(seed_glyph, [16])
        assert out.image == seed_glyph.image
        assert out.label == seed_glyph.label and out.style == seed_glyph.style

    def test_doubling(self, seed_glyph):
        (out,) = synth_variants(seed_glyph, [32])
        assert abs(out.image.height - 2 * seed_glyph.image.height) <= 1
        assert out.size_pt == 32.0

    def test_noise_is_deterministic(self, seed_glyph):
        a = synth_variants(seed_glyph, [20, 40], noise=True, rng_seed=3)
        b = synth_variants(seed_glyph, [20, 40], noise=True, rng_seed=3)
        c = synth_variants(seed_glyph, [20, 40], noise=True, rng_seed=4)
        assert [v.image for v in a] == [v.image for v in b]
        assert [v.image for v in a] != [v.image for v in c]
        assert len({v.id for v in a + c}) == 4

    def test_size_range(self, seed_glyph):
        with pytest.raises(InvalidParameterError):
            synth_variants(seed_glyph, [7])
        with pytest.raises(InvalidParameterError):
            synth_variants(seed_glyph, [101])

    def test_resize_replicates_pixels(self):
        img = BinaryImage.from_strings(["#.", ".#"])
        assert resize_nearest(img, 4, 4).to_strings() == ["##..", "##..", "..##", "..##"]

    def test_never_empty(self, seed_glyph):
        for v in synth_variants(seed_glyph, [8, 16, 50, 100], noise=True):
            assert v.image.bits.any()
            assert v.label == seed_glyph.label

    def test_augment_roundtrip(self, tmp_path):
        src = tmp_path / "src"
        shutil.copytree(os.path.dirname(NUMERALS), src)
        out = augment_manifest(str(src / "manifest.json"), str(tmp_path / "aug"), [16, 24], noise_copies=1)
        samples = load_corpus(out)
        seeds = load_corpus(str(src / "manifest.json"))
        assert len(samples) == 4 * len(seeds)
        again = augment_manifest(str(src / "manifest.json"), str(tmp_path / "aug2"), [16, 24], noise_copies=1)
        assert open(out, "rb").read() == open(again, "rb").read()

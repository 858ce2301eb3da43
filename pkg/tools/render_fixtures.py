"""Render the seed glyph fixtures checked into tests/fixtures/.

Not part of the package: it needs Pillow (with raqm) and the OFL fonts in
tools/fonts/. Each class is drawn once per style at the 16 pt baseline
(24 px em) as an anti-aliased P5 graymap, then listed in a manifest.

    python tools/render_fixtures.py --out tests/fixtures
"""

import argparse
import os

import numpy as np
from PIL import Image, ImageDraw, ImageFont

from spatialocr import pnm
from spatialocr.corpus import BASELINE_PT, BASELINE_PX, NUMERALS, VOWELS, SampleRecord, write_manifest
from spatialocr.imaging import GrayImage

HERE = os.path.dirname(os.path.abspath(__file__))

STYLES = {
    "noto-400": "noto-sans-kannada-kannada-400-normal.woff",
    "noto-800": "noto-sans-kannada-kannada-800-normal.woff",
    "baloo-400": "baloo-tamma-2-kannada-400-normal.woff",
    "baloo-600": "baloo-tamma-2-kannada-600-normal.woff",
    "baloo-800": "baloo-tamma-2-kannada-800-normal.woff",
    "hind-400": "hind-mysuru-kannada-400-normal.woff",
    "hind-700": "hind-mysuru-kannada-700-normal.woff",
}

VOWEL_NAMES = ("a", "aa", "i", "ii", "u", "uu", "r", "rr", "e", "ee", "ai", "o", "oo", "au")


def render(char, font, margin=4):
    left, top, right, bottom = font.getbbox(char)
    w = right - left + 2 * margin
    h = bottom - top + 2 * margin
    im = Image.new("L", (w, h), 255)
    ImageDraw.Draw(im).text((margin - left, margin - top), char, font=font, fill=0)
    return GrayImage(np.asarray(im))


def build(out_dir, name, classes, ids):
    target = os.path.join(out_dir, name)
    os.makedirs(target, exist_ok=True)
    records = []
    for style, font_file in STYLES.items():
        font = ImageFont.truetype(os.path.join(HERE, "fonts", font_file), BASELINE_PX)
        for label, ident in zip(classes, ids):
            fname = f"{ident}_{style}.pgm"
            pnm.write(os.path.join(target, fname), render(label, font))
            records.append(SampleRecord(fname, label, style, BASELINE_PT, id=f"{ident}/{style}"))
    write_manifest(os.path.join(target, "manifest.json"), classes, records)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=os.path.join(HERE, "..", "tests", "fixtures"))
    args = ap.parse_args()
    build(args.out, "numerals", NUMERALS, [f"d{i}" for i in range(10)])
    build(args.out, "vowels", VOWELS, VOWEL_NAMES)


if __name__ == "__main__":
    main()

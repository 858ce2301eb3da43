"""The compiled and numpy kernels must agree bit for bit."""

import numpy as np
import pytest

from oracles import dilate_oracle, erode_oracle, flood_partition, median_oracle
from spatialocr import kernels
from spatialocr.morphology import ANGLES, line_se

BACKENDS = kernels.available_backends()


def test_backend_selected():
    assert kernels.BACKEND in BACKENDS


@pytest.mark.parametrize("theta", ANGLES)
@pytest.mark.parametrize("mu", [1, 2, 3, 6])
def test_erode_dilate(backend, rng, theta, mu):
    offsets = line_se(theta, mu).offsets
    bits = (rng.random((11, 14)) < 0.6).astype(np.uint8)
    np.testing.assert_array_equal(kernels.erode(bits, offsets, backend).astype(bool), erode_oracle(bits, offsets))
    np.testing.assert_array_equal(kernels.dilate(bits, offsets, backend).astype(bool), dilate_oracle(bits, offsets))


def test_se_longer_than_raster(backend):
    bits = np.ones((3, 3), np.uint8)
    offsets = line_se(0, 9).offsets
    assert not kernels.erode(bits, offsets, backend).any()
    assert kernels.dilate(bits, offsets, backend).all()


@pytest.mark.parametrize("connectivity", [4, 8])
def test_label(backend, rng, connectivity):
    bits = (rng.random((20, 23)) < 0.5).astype(np.uint8)
    labels, count = kernels.label(bits, connectivity, backend)
    assert count == len(flood_partition(bits, connectivity))
    # first raster-order pixel of each component gets increasing ids
    firsts = [labels.ravel()[i] for i in np.flatnonzero(labels.ravel())]
    seen = list(dict.fromkeys(firsts))
    assert seen == list(range(1, count + 1))


def test_label_u_shape_merges(backend):
    # two provisional runs that only meet at the bottom row
    bits = np.array([[1, 0, 1], [1, 0, 1], [1, 1, 1]], np.uint8)
    labels, count = kernels.label(bits, 4, backend)
    assert count == 1 and set(labels[bits == 1]) == {1}


@pytest.mark.parametrize("window", [3, 5])
def test_median(backend, rng, window):
    px = rng.integers(0, 256, (9, 13), dtype=np.uint8)
    np.testing.assert_array_equal(kernels.median_filter(px, window, backend), median_oracle(px, window))


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernels not built")
def test_backends_agree_on_large_inputs(rng):
    py, cy = BACKENDS["python"], BACKENDS["cython"]
    bits = (rng.random((64, 48)) < 0.5).astype(np.uint8)
    px = rng.integers(0, 256, (64, 48), dtype=np.uint8)
    for theta in ANGLES:
        off = line_se(theta, 7).offsets
        np.testing.assert_array_equal(kernels.erode(bits, off, py), kernels.erode(bits, off, cy))
        np.testing.assert_array_equal(kernels.dilate(bits, off, py), kernels.dilate(bits, off, cy))
    for c in (4, 8):
        lp, np_ = kernels.label(bits, c, py)
        lc, nc = kernels.label(bits, c, cy)
        assert np_ == nc
        np.testing.assert_array_equal(lp, lc)
    np.testing.assert_array_equal(kernels.median_filter(px, 5, py), kernels.median_filter(px, 5, cy))

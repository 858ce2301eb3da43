import os

import numpy as np
import pytest

from spatialocr import kernels
from spatialocr.corpus import augment_manifest

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")
NUMERALS = os.path.join(FIXTURES, "numerals", "manifest.json")
VOWELS = os.path.join(FIXTURES, "vowels", "manifest.json")

# clean renders at every size plus one noisy copy per size
ACCEPTANCE_SIZES = [16, 24, 32, 40, 50]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=sorted(kernels.available_backends()))
def backend(request):
    """Each available kernel implementation in turn."""
    return kernels.available_backends()[request.param]


@pytest.fixture(scope="session")
def numeral_corpus(tmp_path_factory):
    out = tmp_path_factory.mktemp("numerals_aug")
    return augment_manifest(NUMERALS, str(out), ACCEPTANCE_SIZES, noise_copies=1, rng_seed=7)


@pytest.fixture(scope="session")
def vowel_corpus(tmp_path_factory):
    out = tmp_path_factory.mktemp("vowels_aug")
    return augment_manifest(VOWELS, str(out), ACCEPTANCE_SIZES, noise_copies=1, rng_seed=7)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def record_criterion(number, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)

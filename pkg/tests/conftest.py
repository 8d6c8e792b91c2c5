import random

import pytest

from golden import GOLDEN_CSV


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


@pytest.fixture
def golden_csv(tmp_path):
    path = tmp_path / "points.csv"
    path.write_text(GOLDEN_CSV, encoding="utf-8")
    return path

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def write_ucr(path, labels, rows, delimiter=","):
    with open(path, "w") as fh:
        for lab, row in zip(labels, rows):
            fh.write(delimiter.join([str(lab)] + [repr(float(v)) for v in row]) + "\n")
    return path


@pytest.fixture
def ucr_file(tmp_path):
    def make(labels, rows, name="data.csv", delimiter=","):
        return write_ucr(tmp_path / name, labels, rows, delimiter)

    return make

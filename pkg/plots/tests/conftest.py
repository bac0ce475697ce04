import csv

import pytest

from synthetic_csv import (  # noqa: F401  (re-export for tests)
    COHERENT_HEADER,
    IDENTIFY_HEADER,
    write_coherent_csv,
    write_identify_csv,
)


@pytest.fixture
def coherent_csv(tmp_path):
    path = tmp_path / "coherent_samples.csv"
    write_coherent_csv(path, 20, seed=1)
    return path


@pytest.fixture
def identify_csv(tmp_path):
    path = tmp_path / "identify_samples.csv"
    write_identify_csv(path, 20, seed=2)
    return path


@pytest.fixture
def empty_csv(tmp_path):
    path = tmp_path / "empty.csv"
    with open(path, "w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerow(COHERENT_HEADER)
    return path

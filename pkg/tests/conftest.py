from pathlib import Path

import pytest

from autosimp.backends import train_standard_backends
from autosimp.corpus import make_pair, read_dictionary, read_pairs_tsv

DATA_DIR = Path(__file__).parent / "data"

GOLDEN_DIFFICULT = (
    "Lowered glucose levels result both in the reduced release of insulin "
    "from the beta cells and in the reverse conversion of glycogen to "
    "glucose when glucose levels fall."
)
GOLDEN_SIMPLE = "This insulin tells the cells to take up glucose from the blood."


@pytest.fixture(scope="session")
def golden_pair():
    return make_pair("golden", "Insulin", GOLDEN_DIFFICULT, GOLDEN_SIMPLE)


@pytest.fixture(scope="session")
def fixture_pairs():
    return read_pairs_tsv(DATA_DIR / "fixture_pairs.tsv")


@pytest.fixture(scope="session")
def filter_pairs():
    return read_pairs_tsv(DATA_DIR / "filter_pairs.tsv")


@pytest.fixture(scope="session")
def term_dictionary():
    return read_dictionary(DATA_DIR / "terms.txt")


@pytest.fixture(scope="session")
def fixture_registry(fixture_pairs):
    """The four standard backends trained on the bundled 5-pair corpus."""
    return train_standard_backends(fixture_pairs)

import pathlib

import numpy as np
import pytest

DATA_DIR = pathlib.Path(__file__).parent / "data"


@pytest.fixture
def rng():
    return np.random.default_rng(20240901)


@pytest.fixture
def irish_path():
    return DATA_DIR / "irish_election.pwg"


@pytest.fixture
def web_path():
    return DATA_DIR / "web_search.pwg"


def random_mnl_instance(rng, n):
    """Independent helper: MNL matrices satisfy strong transitivity."""
    from pairselect.oracle import mnl_matrix

    scores = rng.uniform(0.2, 3.0, size=n)
    return mnl_matrix(scores)
